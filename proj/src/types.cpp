#include "usdecon/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace usdecon {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw std::invalid_argument(std::string(what) +
                                        ": non-finite sample at index " + std::to_string(i));
        }
    }
}

}  // namespace

void validate(const RfTrace& t) {
    if (t.samples.empty()) throw std::invalid_argument("RfTrace: empty samples");
    if (!(t.sample_rate_hz > 0.0)) throw std::invalid_argument("RfTrace: sample_rate_hz must be > 0");
    check_finite(t.samples, "RfTrace");
}

void validate(const Pulse& p) {
    if (p.samples.empty()) throw std::invalid_argument("Pulse: empty samples");
    if (!(p.sample_rate_hz > 0.0)) throw std::invalid_argument("Pulse: sample_rate_hz must be > 0");
    check_finite(p.samples, "Pulse");
    if (p.alignment >= p.samples.size()) throw std::invalid_argument("Pulse: alignment out of range");
    if (p.energy_normalized) {
        const double e = energy_of(p.samples);
        if (std::abs(e - 1.0) > 1e-9) throw std::invalid_argument("Pulse: energy_normalized flag set but energy != 1");
        double mx = 0.0;
        for (double s : p.samples) mx = std::max(mx, std::abs(s));
        if (!(p.samples[p.alignment] > 0.0) || std::abs(p.samples[p.alignment]) < mx - 1e-12) {
            throw std::invalid_argument("Pulse: alignment must point at the positive global peak");
        }
    }
}

void validate(const ReflectivitySeries& r) {
    if (r.samples.empty()) throw std::invalid_argument("ReflectivitySeries: empty samples");
    if (!(r.sample_rate_hz > 0.0)) throw std::invalid_argument("ReflectivitySeries: sample_rate_hz must be > 0");
    check_finite(r.samples, "ReflectivitySeries");
}

void validate(const DatasetManifest& m) {
    if (m.trace_ids.empty()) throw std::invalid_argument("DatasetManifest: no traces");
    if (m.n_samples == 0) throw std::invalid_argument("DatasetManifest: n_samples is zero");
    if (!(m.sample_rate_hz > 0.0)) throw std::invalid_argument("DatasetManifest: bad sample rate");
    if (m.line_pitch_mm < 0.0) throw std::invalid_argument("DatasetManifest: negative line pitch");
}

RfTrace remove_mean(const RfTrace& t) {
    RfTrace out = t;
    const double mu = mean_of(t.samples);
    for (auto& s : out.samples) s -= mu;
    return out;
}

Pulse normalize_pulse(Pulse p) {
    if (p.samples.empty()) throw std::invalid_argument("normalize_pulse: empty pulse");
    const double e = energy_of(p.samples);
    if (!(e > 0.0)) throw std::invalid_argument("normalize_pulse: zero-energy pulse");
    const double scale = 1.0 / std::sqrt(e);
    for (auto& s : p.samples) s *= scale;
    std::size_t peak = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        if (std::abs(p.samples[i]) > best) {
            best = std::abs(p.samples[i]);
            peak = i;
        }
    }
    if (p.samples[peak] < 0.0) {
        for (auto& s : p.samples) s = -s;
    }
    p.alignment = peak;
    p.energy_normalized = true;
    return p;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double energy_of(const std::vector<double>& v) {
    double e = 0.0;
    for (double s : v) e += s * s;
    return e;
}

double ncc_peak(const std::vector<double>& a, const std::vector<double>& b) {
    const double ea = energy_of(a);
    const double eb = energy_of(b);
    if (!(ea > 0.0) || !(eb > 0.0)) return 0.0;
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    double best = 0.0;
    for (int lag = -(nb - 1); lag < na; ++lag) {
        double dot = 0.0;
        for (int i = 0; i < nb; ++i) {
            const int j = lag + i;
            if (j >= 0 && j < na) dot += a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(i)];
        }
        best = std::max(best, dot);
    }
    return best / std::sqrt(ea * eb);
}

std::string to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::ground_truth: return "ground_truth";
        case SeriesKind::wiener_estimate: return "wiener_estimate";
        case SeriesKind::wavelet_estimate: return "wavelet_estimate";
    }
    throw std::invalid_argument("unknown SeriesKind");
}

SeriesKind series_kind_from_string(const std::string& s) {
    if (s == "ground_truth") return SeriesKind::ground_truth;
    if (s == "wiener_estimate") return SeriesKind::wiener_estimate;
    if (s == "wavelet_estimate") return SeriesKind::wavelet_estimate;
    throw std::invalid_argument("unknown series kind: " + s);
}

}  // namespace usdecon
