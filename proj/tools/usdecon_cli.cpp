#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "usdecon/pipeline.hpp"

namespace {

using usdecon::PipelineConfig;

void add_common_flags(CLI::App* cmd, PipelineConfig& cfg, std::string& config_path,
                      bool& seed_set, std::uint64_t& seed) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its fields");
    cmd->add_option("--dataset", cfg.dataset_dir, "dataset directory (manifest.json lives here)");
    cmd->add_option("--out", cfg.output_dir, "output directory");
    cmd->add_option("--jobs", cfg.jobs, "worker threads for per-line stages");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; }, "dataset RNG seed");
}

PipelineConfig resolve(const std::string& config_path, const PipelineConfig& overrides,
                       bool seed_set, std::uint64_t seed) {
    PipelineConfig cfg = overrides;
    if (!config_path.empty()) {
        cfg = usdecon::config_from_json_file(config_path);
        // CLI-provided paths win over the file
        if (!overrides.dataset_dir.empty()) cfg.dataset_dir = overrides.dataset_dir;
        if (!overrides.output_dir.empty()) cfg.output_dir = overrides.output_dir;
        if (overrides.jobs != 1) cfg.jobs = overrides.jobs;
        cfg.use_true_pulse = overrides.use_true_pulse || cfg.use_true_pulse;
    }
    if (seed_set) cfg.synth.rng_seed = seed;
    if (cfg.dataset_dir.empty()) {
        if (const char* root = std::getenv("USDECON_OUTPUT_ROOT"))
            cfg.dataset_dir = std::filesystem::path(root) / "dataset";
    }
    if (cfg.output_dir.empty()) {
        if (const char* root = std::getenv("USDECON_OUTPUT_ROOT"))
            cfg.output_dir = std::filesystem::path(root) / "out";
        else
            cfg.output_dir = cfg.dataset_dir;
    }
    if (cfg.dataset_dir.empty()) throw CLI::ValidationError("--dataset (or --config) is required");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind deconvolution of ultrasonic A-scan lines"};
    app.require_subcommand(1);

    PipelineConfig overrides;
    std::string config_path;
    bool seed_set = false;
    std::uint64_t seed = 0;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--lines", overrides.n_lines, "number of A-scan lines");
    synth->add_option("--snr", overrides.synth.snr_db, "SNR in dB (omit for the default 10)");
    synth->add_option("--samples", overrides.synth.n_samples, "samples per line");
    add_common_flags(synth, overrides, config_path, seed_set, seed);

    auto* est = app.add_subcommand("estimate-pulse", "estimate the pulse from the bicepstrum");
    est->add_option("--ensemble", overrides.hosa.ensemble, "number of traces to pool");
    add_common_flags(est, overrides, config_path, seed_set, seed);

    auto* dec = app.add_subcommand("deconvolve", "recover reflectivity estimates per line");
    dec->add_flag("--use-true-pulse", overrides.use_true_pulse,
                  "use the stored ground-truth pulse instead of the estimate");
    add_common_flags(dec, overrides, config_path, seed_set, seed);

    auto* met = app.add_subcommand("metrics", "autocovariance lobe widths and resolution gain");
    add_common_flags(met, overrides, config_path, seed_set, seed);

    auto* pipe = app.add_subcommand("pipeline", "synth + estimate-pulse + deconvolve + metrics");
    pipe->add_option("--lines", overrides.n_lines, "number of A-scan lines");
    pipe->add_flag("--use-true-pulse", overrides.use_true_pulse,
                   "use the stored ground-truth pulse instead of the estimate");
    add_common_flags(pipe, overrides, config_path, seed_set, seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const PipelineConfig cfg = resolve(config_path, overrides, seed_set, seed);
        if (synth->parsed()) {
            const auto m = cmd_synth(cfg);
            std::cout << "wrote " << m.trace_ids.size() << " lines to " << cfg.dataset_dir << "\n";
        } else if (est->parsed()) {
            const auto p = cmd_estimate_pulse(cfg);
            std::cout << "pulse estimate (" << p.samples.size() << " samples) written to "
                      << usdecon::estimated_pulse_path(cfg.output_dir) << "\n";
        } else if (dec->parsed()) {
            const auto s = cmd_deconvolve(cfg);
            std::cout << s.n_ok << " lines deconvolved";
            if (!s.failed_ids.empty()) {
                std::cout << ", " << s.failed_ids.size() << " failed:";
                for (const auto& id : s.failed_ids) std::cout << " " << id;
            }
            std::cout << "\n";
        } else if (met->parsed()) {
            const auto r = cmd_metrics(cfg);
            std::cout << "gain_mean=" << r.gain_mean << " gain_std=" << r.gain_std
                      << " width_before=" << r.lobe_width_before
                      << " width_after=" << r.lobe_width_after << "\n";
        } else if (pipe->parsed()) {
            const auto r = cmd_pipeline(cfg);
            std::cout << "gain_mean=" << r.gain_mean << " gain_std=" << r.gain_std << "\n";
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
