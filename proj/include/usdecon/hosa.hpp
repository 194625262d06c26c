#pragma once

#include <vector>

#include "usdecon/fft.hpp"
#include "usdecon/types.hpp"

namespace usdecon {

// Third-order cumulant estimate over (m1, m2) in [-L, L]^2.
struct CumulantGrid {
    int max_lag = 0;
    std::vector<double> values;  // (2L+1)^2 row-major, m1 along rows
    std::size_t n_averaged = 0;  // samples per segment
    std::size_t n_traces = 0;
    std::size_t n_segments = 0;

    double at(int m1, int m2) const;
    double& at(int m1, int m2);
};

struct BispectrumGrid {
    std::size_t size = 0;               // K
    std::vector<cplx> values;           // K x K row-major, f1 along rows
};

struct BicepstrumGrid {
    std::size_t size = 0;
    std::vector<double> values;  // K x K row-major, quefrency wrapped FFT-style
    double unwrap_residue = 0.0; // RMS count of 2*pi jumps left after unwrapping
    double imag_residue = 0.0;   // ||imag|| / ||real|| of the inverse transform
    bool quality_ok = true;
};

// System cepstrum read off the bicepstrum, h_hat(0) fixed to 0.
struct CepstrumSeq {
    std::vector<double> values;  // index i = n + K/2, n in [-K/2, K/2)
    double at(int n) const;
    int half() const { return static_cast<int>(values.size()) / 2; }
};

struct HosaOptions {
    int max_lag = 64;
    std::size_t fft_size = 256;
    std::size_t pulse_len = 64;
    std::size_t segment_len = 512;
    std::size_t ensemble = 16;
    bool lag_window = true;      // separable Parzen window over the cumulant grid
    // Bispectrum magnitude floor, relative to max. Narrowband pulses put most
    // of the bifrequency grid far below the in-band level, and every floored
    // bin dilutes the extracted cepstrum, so the default sits just above the
    // estimation noise floor.
    double floor_eps = 3e-6;
};

struct PulseQuality {
    double unwrap_residue = 0.0;
    double imag_residue = 0.0;
    std::size_t ensemble = 0;
    std::size_t n_segments = 0;
    bool flagged = false;
};

// Biased per-segment third-moment average, pooled over every full segment
// of every trace, then symmetrized in (m1, m2).
CumulantGrid estimate_cumulant(const std::vector<RfTrace>& traces, int max_lag,
                               std::size_t segment_len);

// 2-D DFT of the (optionally Parzen-windowed) cumulant grid, lag origin at
// grid index (0,0).
BispectrumGrid bispectrum_of(const CumulantGrid& grid, std::size_t fft_size,
                             bool lag_window = true);

// Complex log with magnitude floor and row/column phase unwrapping; the
// least-squares phase plane (time-shift and sign ambiguity) is removed
// before the inverse transform. Axis conventions put the system cepstrum
// on the anti-diagonal b(-n, n).
BicepstrumGrid bicepstrum_of(const BispectrumGrid& bisp, double floor_eps = 3e-6);

CepstrumSeq extract_pulse_cepstrum(const BicepstrumGrid& bic);

// exp of the cepstrum spectrum back to the time domain, truncated to the
// best pulse_len window (>= 99% energy) and normalized.
Pulse reconstruct_pulse(const CepstrumSeq& ceps, std::size_t pulse_len, double sample_rate_hz);

Pulse estimate_pulse(const std::vector<RfTrace>& traces, const HosaOptions& opts = {},
                     PulseQuality* quality = nullptr);

}  // namespace usdecon
