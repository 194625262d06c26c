#include "usdecon/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "usdecon/io.hpp"

namespace usdecon {

namespace {

using nlohmann::json;

void run_indexed(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += nthreads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

Pulse pick_pulse(const PipelineConfig& cfg) {
    if (cfg.use_true_pulse) {
        return load_pulse(pulse_path(cfg.dataset_dir), FileFormat::binary_f32le);
    }
    return load_pulse(estimated_pulse_path(cfg.output_dir), FileFormat::binary_f32le);
}

}  // namespace

PipelineConfig config_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed config " + path.string() + ": " + e.what());
    }
    PipelineConfig cfg;
    cfg.dataset_dir = j.value("dataset_dir", std::string{});
    cfg.output_dir = j.value("output_dir", std::string{});
    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        cfg.synth.center_freq_hz = s.value("center_freq_hz", cfg.synth.center_freq_hz);
        cfg.synth.fractional_bandwidth = s.value("fractional_bandwidth", cfg.synth.fractional_bandwidth);
        cfg.synth.sample_rate_hz = s.value("sample_rate_hz", cfg.synth.sample_rate_hz);
        cfg.synth.n_samples = s.value("n_samples", cfg.synth.n_samples);
        cfg.synth.reflector_density = s.value("reflector_density", cfg.synth.reflector_density);
        if (s.contains("snr_db")) {
            if (s.at("snr_db").is_string())
                cfg.synth.snr_db = std::numeric_limits<double>::infinity();
            else
                cfg.synth.snr_db = s.at("snr_db").get<double>();
        }
        cfg.synth.rng_seed = s.value("rng_seed", cfg.synth.rng_seed);
        cfg.synth.pulse_len = s.value("pulse_len", cfg.synth.pulse_len);
    }
    cfg.n_lines = j.value("n_lines", cfg.n_lines);
    if (j.contains("hosa")) {
        const auto& h = j.at("hosa");
        cfg.hosa.max_lag = h.value("max_lag", cfg.hosa.max_lag);
        cfg.hosa.fft_size = h.value("fft_size", cfg.hosa.fft_size);
        cfg.hosa.pulse_len = h.value("pulse_len", cfg.hosa.pulse_len);
        cfg.hosa.segment_len = h.value("segment_len", cfg.hosa.segment_len);
        cfg.hosa.ensemble = h.value("ensemble", cfg.hosa.ensemble);
        cfg.hosa.lag_window = h.value("lag_window", cfg.hosa.lag_window);
        cfg.hosa.floor_eps = h.value("floor_eps", cfg.hosa.floor_eps);
    }
    if (j.contains("wiener")) {
        const auto& w = j.at("wiener");
        cfg.wiener.alpha = w.value("alpha", cfg.wiener.alpha);
        cfg.wiener.iterations = w.value("iterations", cfg.wiener.iterations);
        cfg.wiener.fft_size = w.value("fft_size", cfg.wiener.fft_size);
        cfg.wiener.smooth_bins = w.value("smooth_bins", cfg.wiener.smooth_bins);
    }
    if (j.contains("wavelet")) {
        const auto& w = j.at("wavelet");
        auto fam = [](const std::string& s) {
            if (s == "DB10") return WaveletFamily::DB10;
            if (s == "DB16") return WaveletFamily::DB16;
            throw std::runtime_error("unknown wavelet family: " + s);
        };
        if (w.contains("denoise_family")) cfg.wavelet.denoise_family = fam(w.at("denoise_family"));
        if (w.contains("gain_family")) cfg.wavelet.gain_family = fam(w.at("gain_family"));
        cfg.wavelet.levels = w.value("levels", cfg.wavelet.levels);
    }
    cfg.drop_db = j.value("drop_db", cfg.drop_db);
    cfg.use_true_pulse = j.value("use_true_pulse", cfg.use_true_pulse);
    cfg.jobs = j.value("jobs", cfg.jobs);
    return cfg;
}

void write_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
    json j{
        {"dataset_dir", cfg.dataset_dir.string()},
        {"output_dir", cfg.output_dir.string()},
        {"synth",
         {{"center_freq_hz", cfg.synth.center_freq_hz},
          {"fractional_bandwidth", cfg.synth.fractional_bandwidth},
          {"sample_rate_hz", cfg.synth.sample_rate_hz},
          {"n_samples", cfg.synth.n_samples},
          {"reflector_density", cfg.synth.reflector_density},
          {"snr_db", std::isfinite(cfg.synth.snr_db) ? json(cfg.synth.snr_db) : json("inf")},
          {"rng_seed", cfg.synth.rng_seed},
          {"pulse_len", cfg.synth.pulse_len}}},
        {"n_lines", cfg.n_lines},
        {"hosa",
         {{"max_lag", cfg.hosa.max_lag},
          {"fft_size", cfg.hosa.fft_size},
          {"pulse_len", cfg.hosa.pulse_len},
          {"segment_len", cfg.hosa.segment_len},
          {"ensemble", cfg.hosa.ensemble},
          {"lag_window", cfg.hosa.lag_window},
          {"floor_eps", cfg.hosa.floor_eps}}},
        {"wiener",
         {{"alpha", cfg.wiener.alpha},
          {"iterations", cfg.wiener.iterations},
          {"fft_size", cfg.wiener.fft_size},
          {"smooth_bins", cfg.wiener.smooth_bins}}},
        {"wavelet",
         {{"denoise_family", cfg.wavelet.denoise_family == WaveletFamily::DB16 ? "DB16" : "DB10"},
          {"gain_family", cfg.wavelet.gain_family == WaveletFamily::DB16 ? "DB16" : "DB10"},
          {"levels", cfg.wavelet.levels}}},
        {"drop_db", cfg.drop_db},
        {"use_true_pulse", cfg.use_true_pulse},
        {"jobs", cfg.jobs}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path.string());
    out << j.dump(2) << "\n";
}

DatasetManifest cmd_synth(const PipelineConfig& cfg) {
    const auto manifest = generate_dataset(cfg.synth, cfg.n_lines, cfg.dataset_dir);
    return manifest;
}

Pulse cmd_estimate_pulse(const PipelineConfig& cfg) {
    const auto manifest = load_manifest(cfg.dataset_dir / "manifest.json");
    if (manifest.trace_ids.empty()) throw std::runtime_error("no traces");
    std::vector<RfTrace> traces;
    const std::size_t n_use = std::min<std::size_t>(cfg.hosa.ensemble, manifest.trace_ids.size());
    for (std::size_t i = 0; i < n_use; ++i)
        traces.push_back(load_trace(trace_path(cfg.dataset_dir, manifest.trace_ids[i]),
                                    FileFormat::binary_f32le));
    PulseQuality quality;
    const Pulse pulse = estimate_pulse(traces, cfg.hosa, &quality);
    std::filesystem::create_directories(cfg.output_dir);
    save_series(pulse, estimated_pulse_path(cfg.output_dir), FileFormat::binary_f32le);
    json q{{"unwrap_residue", quality.unwrap_residue},
           {"imag_residue", quality.imag_residue},
           {"ensemble", quality.ensemble},
           {"n_segments", quality.n_segments},
           {"flagged", quality.flagged}};
    std::ofstream out(cfg.output_dir / "pulse_quality.json");
    out << q.dump(2) << "\n";
    return pulse;
}

DeconvolveSummary cmd_deconvolve(const PipelineConfig& cfg) {
    const auto manifest = load_manifest(cfg.dataset_dir / "manifest.json");
    const Pulse pulse = pick_pulse(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    struct LineResult {
        bool ok = false;
        std::string error;
        ReflectivitySeries x1;
        ReflectivitySeries xt;
        DeconvolveLog log;
    };
    std::vector<LineResult> results(manifest.trace_ids.size());
    run_indexed(manifest.trace_ids.size(), cfg.jobs, [&](std::size_t i) {
        auto& res = results[i];
        try {
            const RfTrace trace = load_trace(trace_path(cfg.dataset_dir, manifest.trace_ids[i]),
                                             FileFormat::binary_f32le);
            const NoiseModel noise = estimate_noise_variance(trace);
            res.x1 = iterative_wiener(trace, pulse, cfg.wiener, noise);
            res.xt = forward_deconvolve(trace, pulse, cfg.wavelet, cfg.wiener, &res.log);
            res.ok = true;
        } catch (const std::exception& e) {
            res.error = e.what();
        }
    });

    DeconvolveSummary summary;
    json batch = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& id = manifest.trace_ids[i];
        auto& res = results[i];
        if (!res.ok) {
            summary.failed_ids.push_back(id);
            batch.push_back({{"id", id}, {"ok", false}, {"error", res.error}});
            continue;
        }
        save_series(res.x1, wiener_estimate_path(cfg.output_dir, id), FileFormat::binary_f32le);
        save_series(res.xt, wavelet_estimate_path(cfg.output_dir, id), FileFormat::binary_f32le);
        json line{{"id", id},
                  {"ok", true},
                  {"sigma_by_level", res.log.sigma_by_level},
                  {"threshold_by_level", res.log.threshold_by_level},
                  {"surviving_by_level", res.log.surviving_by_level}};
        std::ofstream lout(cfg.output_dir / (id + "_log.json"));
        lout << line.dump(2) << "\n";
        batch.push_back(std::move(line));
        ++summary.n_ok;
    }
    std::ofstream bout(cfg.output_dir / "deconvolve_summary.json");
    bout << batch.dump(2) << "\n";
    return summary;
}

ResolutionReport cmd_metrics(const PipelineConfig& cfg) {
    const auto manifest = load_manifest(cfg.dataset_dir / "manifest.json");
    std::vector<std::pair<RfTrace, ReflectivitySeries>> pairs;
    for (const auto& id : manifest.trace_ids) {
        const auto est = wavelet_estimate_path(cfg.output_dir, id);
        if (!std::filesystem::exists(est)) continue;
        pairs.emplace_back(load_trace(trace_path(cfg.dataset_dir, id), FileFormat::binary_f32le),
                           load_reflectivity(est, FileFormat::binary_f32le));
    }
    if (pairs.size() < 2) throw std::runtime_error("cmd_metrics: fewer than 2 estimated lines");
    const ResolutionReport rep = batch_resolution_stats(pairs, cfg.drop_db);

    json j{{"lobe_width_before", rep.lobe_width_before},
           {"lobe_width_after", rep.lobe_width_after},
           {"gain", rep.gain},
           {"per_trace_gains", rep.per_trace_gains},
           {"gain_mean", rep.gain_mean},
           {"gain_std", rep.gain_std}};
    std::ofstream out(cfg.output_dir / "resolution_report.json");
    out << j.dump(2) << "\n";

    // plot data for the first line, matched to the shorter lag axis
    const auto acov_b = autocovariance(pairs.front().first.samples);
    const auto acov_a = autocovariance(pairs.front().second.samples);
    std::ofstream csv(cfg.output_dir / "autocovariance.csv");
    csv << "lag,acov_before,acov_after\n";
    csv.precision(12);
    const std::size_t n = std::min(acov_b.size(), acov_a.size());
    const std::ptrdiff_t cb = static_cast<std::ptrdiff_t>(acov_b.size() / 2);
    const std::ptrdiff_t ca = static_cast<std::ptrdiff_t>(acov_a.size() / 2);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::ptrdiff_t lag = -half; lag <= half; ++lag) {
        csv << lag << "," << acov_b[static_cast<std::size_t>(cb + lag)] << ","
            << acov_a[static_cast<std::size_t>(ca + lag)] << "\n";
    }
    return rep;
}

ResolutionReport cmd_pipeline(const PipelineConfig& cfg) {
    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("stage \"") + name + "\" failed: " + e.what());
        }
    };
    stage("synth", [&] { return cmd_synth(cfg); });
    stage("estimate-pulse", [&] { return cmd_estimate_pulse(cfg); });
    const auto dec = stage("deconvolve", [&] { return cmd_deconvolve(cfg); });
    const auto rep = stage("metrics", [&] { return cmd_metrics(cfg); });

    write_config(cfg, cfg.output_dir / "resolved_config.json");
    json summary{{"n_lines_ok", dec.n_ok},
                 {"failed_ids", dec.failed_ids},
                 {"gain_mean", rep.gain_mean},
                 {"gain_std", rep.gain_std},
                 {"lobe_width_before", rep.lobe_width_before},
                 {"lobe_width_after", rep.lobe_width_after}};
    std::ofstream out(cfg.output_dir / "pipeline_summary.json");
    out << summary.dump(2) << "\n";
    return rep;
}

std::filesystem::path wiener_estimate_path(const std::filesystem::path& out_dir,
                                           const std::string& id) {
    return out_dir / (id + "_x1.f32");
}

std::filesystem::path wavelet_estimate_path(const std::filesystem::path& out_dir,
                                            const std::string& id) {
    return out_dir / (id + "_xt.f32");
}

std::filesystem::path estimated_pulse_path(const std::filesystem::path& out_dir) {
    return out_dir / "pulse_estimate.f32";
}

}  // namespace usdecon
