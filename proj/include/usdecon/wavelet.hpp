#pragma once

#include <vector>

#include "usdecon/types.hpp"

namespace usdecon {

// Family named by vanishing moments (DB10 = 20 taps, DB16 = 32 taps).
enum class WaveletFamily { DB10, DB16 };

const std::vector<double>& scaling_filter(WaveletFamily family);

// Orthonormal dyadic decomposition with periodic boundary handling.
// details[0] is the finest level (j = 1).
struct WaveletDecomposition {
    WaveletFamily family = WaveletFamily::DB16;
    int levels = 0;
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    std::size_t original_len = 0;
};

struct ShrinkageGains {
    std::vector<double> lambda_approx;
    std::vector<std::vector<double>> lambda_details;
};

WaveletDecomposition dwt(const std::vector<double>& x, WaveletFamily family, int levels);
std::vector<double> idwt(const WaveletDecomposition& dec);

// thresholds[j-1] applies to detail level j; approximation untouched.
WaveletDecomposition soft_threshold(WaveletDecomposition dec, const std::vector<double>& thresholds);

// Per-coefficient Wiener gains |w|^2 / (|w|^2 + sigma_j^2), 0/0 -> 0.
// The coarsest available sigma is used for the approximation band.
ShrinkageGains wiener_gains(const WaveletDecomposition& dec, const NoiseModel& noise);

WaveletDecomposition apply_gains(WaveletDecomposition dec, const ShrinkageGains& gains);

// MAD noise scale per level: sigma_j = median(|d_j|) / 0.6745.
NoiseModel mad_noise_by_level(const WaveletDecomposition& dec);

struct WaveletConfig {
    WaveletFamily denoise_family = WaveletFamily::DB16;
    WaveletFamily gain_family = WaveletFamily::DB10;
    // Decomposition depth. The per-level MAD noise scale is only trustworthy
    // on levels the signal band does not reach: once a detail level overlaps
    // the pulse passband, the median reads signal as noise and the universal
    // threshold wipes the band. The default keeps the passband inside the
    // approximation and shrinks only the top octave, where the deconvolved
    // residual is noise-dominated.
    int levels = 1;
};

struct DeconvolveLog {
    std::vector<double> sigma_by_level;
    std::vector<double> threshold_by_level;
    std::vector<std::size_t> surviving_by_level;
};

struct WienerConfig;  // wiener.hpp

// Full chain: Fourier-domain iterative Wiener estimate, wavelet soft
// thresholding with the denoise family, then wavelet-domain Wiener gains
// with the gain family.
ReflectivitySeries forward_deconvolve(const RfTrace& trace, const Pulse& pulse,
                                      const WaveletConfig& wcfg, const WienerConfig& wiener_cfg,
                                      DeconvolveLog* log = nullptr);

}  // namespace usdecon
