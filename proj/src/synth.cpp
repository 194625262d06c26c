#include "usdecon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "usdecon/io.hpp"

namespace usdecon {

void validate(const SynthConfig& cfg) {
    if (!(cfg.center_freq_hz > 0.0)) throw std::invalid_argument("SynthConfig: center_freq_hz <= 0");
    if (!(cfg.fractional_bandwidth > 0.0) || cfg.fractional_bandwidth > 1.0)
        throw std::invalid_argument("SynthConfig: fractional_bandwidth outside (0,1]");
    if (!(cfg.sample_rate_hz > 2.0 * cfg.center_freq_hz * (1.0 + cfg.fractional_bandwidth)))
        throw std::invalid_argument("SynthConfig: sample rate too low for the pulse band");
    if (cfg.n_samples < 64) throw std::invalid_argument("SynthConfig: n_samples < 64");
    if (!(cfg.reflector_density >= 0.0) || cfg.reflector_density >= 1.0)
        throw std::invalid_argument("SynthConfig: reflector_density outside [0,1)");
}

Pulse generate_pulse(const SynthConfig& cfg) {
    validate(cfg);
    // -6 dB (half-amplitude) full spectral width = bw * fc; for a Gaussian
    // magnitude the half-amplitude full width is 2*sqrt(2 ln 2)*sigma_f.
    const double sigma_f = cfg.fractional_bandwidth * cfg.center_freq_hz /
                           (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double sigma_t = 1.0 / (2.0 * std::numbers::pi * sigma_f);
    const double dt = 1.0 / cfg.sample_rate_hz;
    const std::size_t n = cfg.pulse_len;
    if (static_cast<double>(n) * dt < 4.0 * sigma_t)
        throw std::invalid_argument("generate_pulse: pulse_len too short for the requested bandwidth");
    Pulse p;
    p.sample_rate_hz = cfg.sample_rate_hz;
    p.samples.resize(n);
    const double t0 = 0.5 * static_cast<double>(n - 1) * dt;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt - t0;
        p.samples[i] = std::exp(-t * t / (2.0 * sigma_t * sigma_t)) *
                       std::cos(2.0 * std::numbers::pi * cfg.center_freq_hz * t);
    }
    return normalize_pulse(std::move(p));
}

ReflectivitySeries generate_reflectivity(const SynthConfig& cfg) {
    validate(cfg);
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    ReflectivitySeries r;
    r.sample_rate_hz = cfg.sample_rate_hz;
    r.kind = SeriesKind::ground_truth;
    r.samples.assign(cfg.n_samples, 0.0);
    for (auto& s : r.samples) {
        const bool hit = unif(rng) < cfg.reflector_density;
        const double amp = expo(rng);  // draw always, to keep the stream aligned
        const double att = 0.5 + 0.5 * unif(rng);
        if (hit) s = amp * att;
    }
    return r;
}

RfTrace generate_trace(const Pulse& pulse, const ReflectivitySeries& refl, double snr_db,
                       std::uint64_t seed, const std::string& id) {
    validate(pulse);
    validate(refl);
    if (pulse.sample_rate_hz != refl.sample_rate_hz)
        throw std::invalid_argument("generate_trace: sample rate mismatch");
    const std::size_t n = refl.samples.size();
    const std::size_t m = pulse.samples.size();
    RfTrace t;
    t.id = id;
    t.sample_rate_hz = refl.sample_rate_hz;
    t.samples.assign(n, 0.0);
    // "same"-mode linear convolution: output k aligned with the pulse peak,
    // so a reflector at k produces an echo centred at k.
    const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(pulse.alignment);
    for (std::size_t k = 0; k < n; ++k) {
        if (refl.samples[k] == 0.0) continue;
        const double a = refl.samples[k];
        for (std::size_t j = 0; j < m; ++j) {
            const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(k + j) - off;
            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(n))
                t.samples[static_cast<std::size_t>(idx)] += a * pulse.samples[j];
        }
    }
    if (std::isfinite(snr_db)) {
        const double psig = energy_of(t.samples) / static_cast<double>(n);
        const double sigma = psig > 0.0 ? std::sqrt(psig / std::pow(10.0, snr_db / 10.0)) : 0.0;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& s : t.samples) s += sigma * gauss(rng);
    }
    return t;
}

DatasetManifest generate_dataset(const SynthConfig& cfg, std::size_t n_lines,
                                 const std::filesystem::path& out_dir) {
    validate(cfg);
    if (n_lines == 0) throw std::invalid_argument("generate_dataset: n_lines == 0");
    std::filesystem::create_directories(out_dir);
    const Pulse pulse = generate_pulse(cfg);
    save_series(pulse, pulse_path(out_dir), FileFormat::binary_f32le);

    DatasetManifest m;
    m.n_samples = cfg.n_samples;
    m.sample_rate_hz = cfg.sample_rate_hz;
    m.line_pitch_mm = 0.25;
    m.rng_algorithm = "mt19937_64";
    m.rng_seed = cfg.rng_seed;
    m.notes = "synthetic A-scan dataset";
    m.config = {{"center_freq_hz", cfg.center_freq_hz},
                {"fractional_bandwidth", cfg.fractional_bandwidth},
                {"sample_rate_hz", cfg.sample_rate_hz},
                {"n_samples", static_cast<double>(cfg.n_samples)},
                {"reflector_density", cfg.reflector_density},
                {"snr_db", cfg.snr_db},
                {"pulse_len", static_cast<double>(cfg.pulse_len)},
                {"n_lines", static_cast<double>(n_lines)}};

    for (std::size_t line = 0; line < n_lines; ++line) {
        char id[32];
        std::snprintf(id, sizeof(id), "line_%04zu", line);
        SynthConfig line_cfg = cfg;
        // per-line streams derived from the dataset seed
        line_cfg.rng_seed = cfg.rng_seed * 1000003ULL + 2ULL * line + 1ULL;
        const ReflectivitySeries refl = generate_reflectivity(line_cfg);
        const RfTrace trace =
            generate_trace(pulse, refl, cfg.snr_db, line_cfg.rng_seed + 1ULL, id);
        save_series(trace, trace_path(out_dir, id), FileFormat::binary_f32le);
        save_series(refl, truth_path(out_dir, id), FileFormat::binary_f32le);
        m.trace_ids.emplace_back(id);
    }
    save_manifest(m, out_dir / "manifest.json");
    return m;
}

}  // namespace usdecon
