#pragma once

#include <vector>

#include "usdecon/fft.hpp"
#include "usdecon/types.hpp"

namespace usdecon {

struct WienerConfig {
    double alpha = 0.01;
    int iterations = 10;
    std::size_t fft_size = 0;  // 0 = next power of two >= trace + pulse length
    int smooth_bins = 5;       // moving-average width for the Px1 periodogram
};

void validate(const WienerConfig& cfg);

struct SpectralEstimate {
    std::vector<double> freq_grid_hz;
    std::vector<cplx> Y;
    std::vector<cplx> H;
    std::vector<cplx> X1;
    std::vector<double> Px1;
    std::vector<cplx> G;
};

struct IterationLog {
    std::vector<double> residual_energy;  // per iteration
};

// MAD of the finest-scale DB16 detail coefficients; per-level variances by
// the same rule.
NoiseModel estimate_noise_variance(const RfTrace& trace, int levels = 5);

// Diagnostic spectral division X1 = Y/H with |H| floored. Unstable by
// construction; kept as the comparison baseline.
ReflectivitySeries naive_inverse(const RfTrace& trace, const Pulse& pulse);

// One regularized Wiener application:
//   G = H* Px1 / (|H|^2 Px1 + alpha sigma2),  X1 = G Y,  0/0 -> 0.
SpectralEstimate wiener_step(const std::vector<cplx>& Y, const std::vector<cplx>& H,
                             const std::vector<double>& Px1, double alpha, double sigma2,
                             double sample_rate_hz = 0.0);

ReflectivitySeries iterative_wiener(const RfTrace& trace, const Pulse& pulse,
                                    const WienerConfig& cfg, const NoiseModel& noise,
                                    IterationLog* log = nullptr);

// Spectrum of the pulse on an fft_size grid with the peak shifted to time
// zero, so deconvolved reflectors stay put.
std::vector<cplx> pulse_spectrum(const Pulse& pulse, std::size_t fft_size);

}  // namespace usdecon
