#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace usdecon {

// One sampled A-scan line y(n).
struct RfTrace {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    std::string id;
};

// System kernel h(n), peak-aligned with positive polarity.
struct Pulse {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    std::size_t alignment = 0;
    bool energy_normalized = false;
};

enum class SeriesKind { ground_truth, wiener_estimate, wavelet_estimate };

// Medium response x(n): ground truth or an estimate.
struct ReflectivitySeries {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    SeriesKind kind = SeriesKind::ground_truth;
};

struct DatasetManifest {
    std::vector<std::string> trace_ids;
    std::size_t n_samples = 0;
    double sample_rate_hz = 0.0;
    double line_pitch_mm = 0.0;
    std::string notes;
    // generation metadata (rng algorithm + seed, config echo)
    std::string rng_algorithm;
    unsigned long long rng_seed = 0;
    std::map<std::string, double> config;
};

// Noise variance, global and per wavelet level (index 0 = finest level).
struct NoiseModel {
    double sigma2 = 0.0;
    std::vector<double> sigma2_by_level;
};

// Throw std::invalid_argument on any invariant violation.
void validate(const RfTrace& t);
void validate(const Pulse& p);
void validate(const ReflectivitySeries& r);
void validate(const DatasetManifest& m);

RfTrace remove_mean(const RfTrace& t);

// Unit energy, positive-polarity peak, alignment set to the peak index.
Pulse normalize_pulse(Pulse p);

double mean_of(const std::vector<double>& v);
double energy_of(const std::vector<double>& v);

// Normalized cross-correlation, maximized over integer lags.
double ncc_peak(const std::vector<double>& a, const std::vector<double>& b);

std::string to_string(SeriesKind k);
SeriesKind series_kind_from_string(const std::string& s);

}  // namespace usdecon
