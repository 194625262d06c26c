#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <fstream>
#include <string>

#include "usdecon/io.hpp"
#include "usdecon/pipeline.hpp"

using namespace usdecon;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig small_cfg(const fs::path& root) {
    PipelineConfig cfg;
    cfg.dataset_dir = root / "dataset";
    cfg.output_dir = root / "out";
    cfg.synth.n_samples = 4096;
    cfg.synth.rng_seed = 77;
    cfg.n_lines = 4;
    cfg.hosa.ensemble = 4;
    cfg.wavelet.levels = 5;
    cfg.jobs = 2;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args) {
    const std::string cmd = "env -u USDECON_OUTPUT_ROOT " + std::string(USDECON_CLI_PATH) + " " +
                            args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config JSON round trip, including infinite SNR") {
    const auto root = fresh_dir("usdecon_test_cfg");
    PipelineConfig cfg = small_cfg(root);
    cfg.synth.snr_db = std::numeric_limits<double>::infinity();
    cfg.wiener.alpha = 0.05;
    cfg.hosa.max_lag = 48;
    cfg.use_true_pulse = true;
    write_config(cfg, root / "cfg.json");
    const auto back = config_from_json_file(root / "cfg.json");
    CHECK(back.dataset_dir == cfg.dataset_dir);
    CHECK(back.n_lines == 4);
    CHECK(std::isinf(back.synth.snr_db));
    CHECK(back.wiener.alpha == 0.05);
    CHECK(back.hosa.max_lag == 48);
    CHECK(back.use_true_pulse);
    CHECK(back.wavelet.levels == 5);

    std::ofstream bad(root / "bad.json");
    bad << "{ not json";
    bad.close();
    CHECK_THROWS_AS(config_from_json_file(root / "bad.json"), std::runtime_error);
    CHECK_THROWS_AS(config_from_json_file(root / "missing.json"), std::runtime_error);
}

TEST_CASE("full pipeline on a small dataset produces every artifact") {
    const auto root = fresh_dir("usdecon_test_pipe");
    const auto cfg = small_cfg(root);
    const auto rep = cmd_pipeline(cfg);

    CHECK(rep.per_trace_gains.size() == 4);
    CHECK(rep.lobe_width_before > 0.0);
    CHECK(rep.lobe_width_after > 0.0);
    for (double g : rep.per_trace_gains) CHECK(std::isfinite(g));

    const auto m = load_manifest(cfg.dataset_dir / "manifest.json");
    REQUIRE(m.trace_ids.size() == 4);
    for (const auto& id : m.trace_ids) {
        CHECK(fs::exists(wiener_estimate_path(cfg.output_dir, id)));
        CHECK(fs::exists(wavelet_estimate_path(cfg.output_dir, id)));
        CHECK(fs::exists(cfg.output_dir / (id + "_log.json")));
    }
    CHECK(fs::exists(estimated_pulse_path(cfg.output_dir)));
    CHECK(fs::exists(cfg.output_dir / "pulse_quality.json"));
    CHECK(fs::exists(cfg.output_dir / "deconvolve_summary.json"));
    CHECK(fs::exists(cfg.output_dir / "resolution_report.json"));
    CHECK(fs::exists(cfg.output_dir / "resolved_config.json"));
    CHECK(fs::exists(cfg.output_dir / "pipeline_summary.json"));

    // schema spot checks
    const auto quality = slurp(cfg.output_dir / "pulse_quality.json");
    CHECK(quality.find("unwrap_residue") != std::string::npos);
    CHECK(quality.find("imag_residue") != std::string::npos);
    std::ifstream csv(cfg.output_dir / "autocovariance.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "lag,acov_before,acov_after");

    // estimates are full-length series
    const auto xt =
        load_reflectivity(wavelet_estimate_path(cfg.output_dir, m.trace_ids[0]), FileFormat::binary_f32le);
    CHECK(xt.samples.size() == 4096);
}

TEST_CASE("pipeline reruns are byte identical") {
    const auto r1 = fresh_dir("usdecon_test_det1");
    const auto r2 = fresh_dir("usdecon_test_det2");
    auto c1 = small_cfg(r1);
    auto c2 = small_cfg(r2);
    c1.jobs = 1;
    c2.jobs = 3;  // thread count must not affect results
    cmd_pipeline(c1);
    cmd_pipeline(c2);
    const auto m = load_manifest(c1.dataset_dir / "manifest.json");
    for (const auto& id : m.trace_ids) {
        CHECK(slurp(wiener_estimate_path(c1.output_dir, id)) ==
              slurp(wiener_estimate_path(c2.output_dir, id)));
        CHECK(slurp(wavelet_estimate_path(c1.output_dir, id)) ==
              slurp(wavelet_estimate_path(c2.output_dir, id)));
    }
    CHECK(slurp(estimated_pulse_path(c1.output_dir)) == slurp(estimated_pulse_path(c2.output_dir)));
}

TEST_CASE("a corrupt line is isolated; the remaining lines still complete") {
    const auto root = fresh_dir("usdecon_test_fault");
    auto cfg = small_cfg(root);
    cfg.use_true_pulse = true;
    cmd_synth(cfg);
    const auto m = load_manifest(cfg.dataset_dir / "manifest.json");
    REQUIRE(m.trace_ids.size() == 4);

    // poison one payload with a NaN
    const auto victim = trace_path(cfg.dataset_dir, m.trace_ids[1]);
    {
        std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
        const float nan = std::nanf("");
        f.seekp(40);
        f.write(reinterpret_cast<const char*>(&nan), sizeof nan);
    }

    const auto summary = cmd_deconvolve(cfg);
    CHECK(summary.n_ok == 3);
    REQUIRE(summary.failed_ids.size() == 1);
    CHECK(summary.failed_ids[0] == m.trace_ids[1]);
    CHECK(!fs::exists(wavelet_estimate_path(cfg.output_dir, m.trace_ids[1])));
    CHECK(fs::exists(wavelet_estimate_path(cfg.output_dir, m.trace_ids[0])));
    const auto batch = slurp(cfg.output_dir / "deconvolve_summary.json");
    CHECK(batch.find("\"ok\": false") != std::string::npos);
}

TEST_CASE("estimate-pulse on an empty dataset reports no traces") {
    const auto root = fresh_dir("usdecon_test_empty");
    auto cfg = small_cfg(root);
    fs::create_directories(cfg.dataset_dir);
    // save_manifest refuses empty id lists, so write the file directly
    std::ofstream mf(cfg.dataset_dir / "manifest.json");
    mf << R"({"trace_ids": [], "n_samples": 4096, "sample_rate_hz": 5e7,)"
       << R"( "line_pitch_mm": 0.25, "rng_algorithm": "mt19937_64", "rng_seed": 0, "notes": ""})";
    mf.close();
    // the empty manifest is rejected at load time as a config error (CLI exit 2)
    CHECK_THROWS_WITH_AS(cmd_estimate_pulse(cfg), doctest::Contains("no traces"),
                         std::invalid_argument);
}

TEST_CASE("pipeline failures name the stage") {
    const auto root = fresh_dir("usdecon_test_stage");
    auto cfg = small_cfg(root);
    cfg.synth.reflector_density = -1.0;  // rejected by synth validation
    CHECK_THROWS_WITH_AS(cmd_pipeline(cfg), doctest::Contains("synth"), std::runtime_error);
}

TEST_CASE("CLI exit codes: 0 on success, 2 on usage or config errors") {
    const auto root = fresh_dir("usdecon_test_cli");
    CHECK(run_cli("") == 2);                 // missing subcommand
    CHECK(run_cli("frobnicate") == 2);       // unknown subcommand
    CHECK(run_cli("synth") == 2);            // no dataset anywhere

    const auto ds = (root / "dataset").string();
    CHECK(run_cli("synth --dataset " + ds + " --lines 3 --samples 1024 --seed 5") == 0);
    CHECK(fs::exists(root / "dataset" / "manifest.json"));
    std::size_t f32 = 0;
    for (const auto& e : fs::directory_iterator(root / "dataset"))
        if (e.path().extension() == ".f32") ++f32;
    CHECK(f32 == 7);  // 3 traces + 3 truths + pulse

    // config error propagates as exit 2, runtime failure as exit 1
    std::ofstream bad(root / "bad.json");
    bad << "{ nope";
    bad.close();
    CHECK(run_cli("synth --config " + (root / "bad.json").string()) == 1);
    CHECK(run_cli("metrics --dataset " + ds + " --out " + (root / "nothing").string()) == 1);
}
