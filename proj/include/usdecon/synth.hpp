#pragma once

#include <cstdint>
#include <filesystem>

#include "usdecon/types.hpp"

namespace usdecon {

struct SynthConfig {
    double center_freq_hz = 3.5e6;
    double fractional_bandwidth = 0.5;  // -6 dB fractional bandwidth
    double sample_rate_hz = 50e6;
    std::size_t n_samples = 8192;
    double reflector_density = 0.02;
    double snr_db = 10.0;  // +inf for noise free
    std::uint64_t rng_seed = 1;
    std::size_t pulse_len = 128;
};

void validate(const SynthConfig& cfg);

// Gabor pulse: Gaussian-enveloped cosine at center_freq_hz whose -6 dB
// spectral width matches fractional_bandwidth. Unit energy, peak aligned.
Pulse generate_pulse(const SynthConfig& cfg);

// Bernoulli reflector positions with one-sided exponential amplitudes, so
// the series is skewed and its third-order cumulant is nonzero.
ReflectivitySeries generate_reflectivity(const SynthConfig& cfg);

// y = h * x truncated to the reflectivity length, plus white Gaussian
// noise scaled to snr_db against the noise-free convolution power.
RfTrace generate_trace(const Pulse& pulse, const ReflectivitySeries& refl, double snr_db,
                       std::uint64_t seed, const std::string& id = "trace");

// n_lines traces sharing one pulse; traces, truths, pulse and manifest
// written under out_dir.
DatasetManifest generate_dataset(const SynthConfig& cfg, std::size_t n_lines,
                                 const std::filesystem::path& out_dir);

}  // namespace usdecon
