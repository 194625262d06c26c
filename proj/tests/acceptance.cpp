// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "usdecon/hosa.hpp"
#include "usdecon/io.hpp"
#include "usdecon/metrics.hpp"
#include "usdecon/pipeline.hpp"
#include "usdecon/synth.hpp"
#include "usdecon/wavelet.hpp"
#include "usdecon/wiener.hpp"

using namespace usdecon;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const char* what, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, what, detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

SynthConfig mirror_config() {
    SynthConfig cfg;  // 3.5 MHz, 50% bandwidth, 50 MHz sampling
    cfg.n_samples = 8192;
    cfg.snr_db = 10.0;
    cfg.rng_seed = 4242;
    return cfg;
}

std::vector<std::pair<RfTrace, ReflectivitySeries>> mirror_lines(double snr_db, std::size_t n_lines) {
    SynthConfig cfg = mirror_config();
    cfg.snr_db = snr_db;
    const Pulse p = generate_pulse(cfg);
    std::vector<std::pair<RfTrace, ReflectivitySeries>> lines;
    for (std::size_t i = 0; i < n_lines; ++i) {
        cfg.rng_seed = 4242 + 7 * i;
        auto refl = generate_reflectivity(cfg);
        auto tr = generate_trace(p, refl, snr_db, cfg.rng_seed + 1);
        tr.id = "line_" + std::to_string(i);
        lines.emplace_back(std::move(tr), std::move(refl));
    }
    return lines;
}

double rel_l2(const std::vector<double>& est, const std::vector<double>& truth) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        num += (est[i] - truth[i]) * (est[i] - truth[i]);
        den += truth[i] * truth[i];
    }
    return std::sqrt(num / den);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const char* name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig mirror_pipeline_config(const fs::path& root) {
    PipelineConfig cfg;
    cfg.dataset_dir = root / "dataset";
    cfg.output_dir = root / "out";
    cfg.synth = mirror_config();
    cfg.n_lines = 30;
    cfg.jobs = 4;
    return cfg;
}

// --- criteria ---------------------------------------------------------------

void criterion_raw_lobe_width() {
    const auto t0 = clock_type::now();
    const auto lines = mirror_lines(10.0, 30);
    double mean_w = 0.0;
    for (const auto& [tr, refl] : lines) mean_w += main_lobe_width(autocovariance(tr.samples));
    mean_w /= static_cast<double>(lines.size());
    const double elapsed = seconds_since(t0);
    const bool ok = mean_w >= 7.0 && mean_w <= 11.0 && elapsed < 5.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "mean -6 dB width %.2f samples, target 9 +/- 2, %.1f s", mean_w,
                  elapsed);
    report(1, "raw-trace main-lobe width", ok, buf);
}

void criterion_resolution_gain(const fs::path& run_a) {
    const auto t0 = clock_type::now();
    const auto cfg = mirror_pipeline_config(run_a);
    ResolutionReport rep;
    std::string err;
    try {
        rep = cmd_pipeline(cfg);
    } catch (const std::exception& e) {
        err = e.what();
    }
    const double elapsed = seconds_since(t0);
    const bool ok = err.empty() && rep.gain_mean >= 1.8 && rep.gain_mean <= 3.2 &&
                    rep.gain_std < 0.8 && elapsed < 120.0;
    char buf[192];
    if (err.empty())
        std::snprintf(buf, sizeof buf, "gain_mean %.2f (target [1.8, 3.2]), gain_std %.2f (< 0.8), %.1f s",
                      rep.gain_mean, rep.gain_std, elapsed);
    else
        std::snprintf(buf, sizeof buf, "pipeline failed: %s", err.c_str());
    report(2, "batch resolution gain", ok, buf);
}

void criterion_blind_pulse_recovery() {
    const auto t0 = clock_type::now();
    SynthConfig cfg = mirror_config();
    const Pulse truth = generate_pulse(cfg);
    auto run = [&](double snr) {
        std::vector<RfTrace> traces;
        for (std::size_t i = 0; i < 16; ++i) {
            SynthConfig c = cfg;
            c.rng_seed = 900 + 3 * i;
            traces.push_back(generate_trace(truth, generate_reflectivity(c), snr, c.rng_seed + 1));
        }
        HosaOptions opts;
        const Pulse est = estimate_pulse(traces, opts);
        return ncc_peak(est.samples, truth.samples);
    };
    const double ncc_clean = run(std::numeric_limits<double>::infinity());
    const double ncc_noisy = run(10.0);
    const double elapsed = seconds_since(t0);
    const bool ok = ncc_clean >= 0.95 && ncc_noisy >= 0.90 && elapsed < 30.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "NCC %.3f at SNR inf (>= 0.95), %.3f at 10 dB (>= 0.90), %.1f s",
                  ncc_clean, ncc_noisy, elapsed);
    report(3, "blind pulse recovery", ok, buf);
}

void criterion_cepstrum_oracle() {
    const std::vector<double> h{1.0, 0.5};
    const int L = 8;
    const std::size_t K = 64;
    CumulantGrid g;
    g.max_lag = L;
    g.values.assign(static_cast<std::size_t>(2 * L + 1) * (2 * L + 1), 0.0);
    for (int m1 = -L; m1 <= L; ++m1)
        for (int m2 = -L; m2 <= L; ++m2) {
            double acc = 0.0;
            for (int k = 0; k < 2; ++k) {
                const int a = k + m1, b = k + m2;
                if (a >= 0 && a < 2 && b >= 0 && b < 2) acc += h[k] * h[a] * h[b];
            }
            g.at(m1, m2) = acc;
        }
    std::string err;
    double worst_c = 0.0, worst_p = 0.0;
    try {
        const auto bic = bicepstrum_of(bispectrum_of(g, K, false), 1e-6);
        const auto ceps = extract_pulse_cepstrum(bic);
        for (int n = 1; n <= 8; ++n) {
            const double expect = ((n % 2 == 0) ? -1.0 : 1.0) * std::pow(0.5, n) / n;
            worst_c = std::max(worst_c, std::abs(ceps.at(n) - expect));
            worst_c = std::max(worst_c, std::abs(ceps.at(-n)));
        }
        const Pulse rec = reconstruct_pulse(ceps, 8, 50e6);
        std::vector<double> target(8, 0.0);
        const double norm = std::sqrt(1.25);
        target[rec.alignment] = 1.0 / norm;
        if (rec.alignment + 1 < 8) target[rec.alignment + 1] = 0.5 / norm;
        for (std::size_t i = 0; i < 8; ++i)
            worst_p = std::max(worst_p, std::abs(rec.samples[i] - target[i]));
    } catch (const std::exception& e) {
        err = e.what();
    }
    const bool ok = err.empty() && worst_c < 1e-3 && worst_p < 1e-3;
    char buf[160];
    if (err.empty())
        std::snprintf(buf, sizeof buf, "cepstrum err %.2e, reconstruction err %.2e (< 1e-3)", worst_c,
                      worst_p);
    else
        std::snprintf(buf, sizeof buf, "failed: %s", err.c_str());
    report(4, "closed-form cepstrum oracle", ok, buf);
}

void criterion_cumulant_bruteforce() {
    std::mt19937 rng(515);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int L = 1 + static_cast<int>(rng() % 8);
        const int n = 2 * L + 2 + static_cast<int>(rng() % (64 - 2 * L - 1));
        RfTrace t;
        t.sample_rate_hz = 50e6;
        t.id = "r";
        t.samples.resize(static_cast<std::size_t>(n));
        for (auto& s : t.samples) s = gauss(rng);
        const auto fast = estimate_cumulant({t}, L, static_cast<std::size_t>(n));
        // independent triple loop
        for (int m1 = -L; m1 <= L; ++m1)
            for (int m2 = -L; m2 <= L; ++m2) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) {
                    const int a = k + m1, b = k + m2;
                    if (a < 0 || a >= n || b < 0 || b >= n) continue;
                    acc += t.samples[static_cast<std::size_t>(k)] *
                           t.samples[static_cast<std::size_t>(a)] *
                           t.samples[static_cast<std::size_t>(b)];
                }
                worst = std::max(worst, std::abs(fast.at(m1, m2) - acc / n));
            }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max deviation %.2e over 50 trials (< 1e-12)", worst);
    report(5, "cumulant brute-force equivalence", worst < 1e-12, buf);
}

void criterion_dwt_integrity() {
    std::mt19937 rng(616);
    std::normal_distribution<double> gauss;
    double worst_pr = 0.0, worst_parseval = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(512);
        for (auto& v : x) v = gauss(rng);
        const auto family = (trial % 2 == 0) ? WaveletFamily::DB10 : WaveletFamily::DB16;
        const int J = 1 + trial % 6;
        const auto dec = dwt(x, family, J);
        const auto back = idwt(dec);
        for (std::size_t i = 0; i < x.size(); ++i)
            worst_pr = std::max(worst_pr, std::abs(back[i] - x[i]));
        double e = energy_of(dec.approx);
        for (const auto& d : dec.details) e += energy_of(d);
        worst_parseval = std::max(worst_parseval, std::abs(e - energy_of(x)) / energy_of(x));
    }
    const bool ok = worst_pr < 1e-10 && worst_parseval < 1e-9;
    char buf[96];
    std::snprintf(buf, sizeof buf, "PR err %.2e (< 1e-10), Parseval err %.2e (< 1e-9)", worst_pr,
                  worst_parseval);
    report(6, "wavelet transform integrity", ok, buf);
}

void criterion_wiener_limits() {
    SynthConfig cfg = mirror_config();
    cfg.n_samples = 4096;
    cfg.rng_seed = 717;
    const Pulse p = generate_pulse(cfg);
    const auto refl = generate_reflectivity(cfg);
    const auto trace = generate_trace(p, refl, 15.0, 718);

    Pulse delta;
    delta.sample_rate_hz = cfg.sample_rate_hz;
    delta.samples = {1.0};
    delta = normalize_pulse(std::move(delta));
    const auto identity = iterative_wiener(trace, delta, WienerConfig{}, NoiseModel{});
    const double id_err = rel_l2(identity.samples, trace.samples);

    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double s2 : {1e-2, 1e-1, 1.0, 1e1, 1e2}) {
        NoiseModel noise;
        noise.sigma2 = s2;
        const double e = energy_of(iterative_wiener(trace, p, WienerConfig{}, noise).samples);
        if (e >= prev) monotone = false;
        prev = e;
    }
    const bool ok = id_err < 1e-9 && monotone;
    char buf[96];
    std::snprintf(buf, sizeof buf, "identity err %.2e (< 1e-9), sweep monotone %s", id_err,
                  monotone ? "yes" : "no");
    report(7, "Wiener identity and noise limits", ok, buf);
}

void criterion_shrinkage_algebra() {
    std::mt19937 rng(818);
    std::normal_distribution<double> gauss;
    std::vector<double> x(64);
    for (auto& v : x) v = gauss(rng);
    auto dec = dwt(x, WaveletFamily::DB10, 2);
    dec.details[0][0] = 3.0;   // sigma = 0 case
    dec.details[0][1] = 0.0;   // dead coefficient case
    dec.details[1][0] = 2.0;   // |d|^2 == sigma^2 case

    NoiseModel clean;
    clean.sigma2_by_level = {0.0, 4.0};
    const auto g = wiener_gains(dec, clean);
    const bool ok = g.lambda_details[0][0] == 1.0 && g.lambda_details[0][1] == 0.0 &&
                    g.lambda_details[1][0] == 0.5;
    char buf[128];
    std::snprintf(buf, sizeof buf, "gains %.17g, %.17g, %.17g (want 1, 0, 0.5)",
                  g.lambda_details[0][0], g.lambda_details[0][1], g.lambda_details[1][0]);
    report(8, "shrinkage gain algebra", ok, buf);
}

void criterion_denoising_benefit() {
    const auto lines = mirror_lines(10.0, 30);
    const Pulse pulse = generate_pulse(mirror_config());
    int ordered = 0;
    for (const auto& [tr, refl] : lines) {
        const auto noise = estimate_noise_variance(tr);
        const auto naive = naive_inverse(tr, pulse);
        const auto x1 = iterative_wiener(tr, pulse, WienerConfig{}, noise);
        const auto xt = forward_deconvolve(tr, pulse, WaveletConfig{}, WienerConfig{});
        const double e_naive = rel_l2(naive.samples, refl.samples);
        const double e_x1 = rel_l2(x1.samples, refl.samples);
        const double e_xt = rel_l2(xt.samples, refl.samples);
        if (e_xt < e_x1 && e_x1 < e_naive) ++ordered;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "error ordering holds on %d/30 lines (>= 27)", ordered);
    report(9, "denoising benefit ordering", ordered >= 27, buf);
}

void criterion_determinism(const fs::path& run_a) {
    const auto run_b = fresh_dir("usdecon_accept_b");
    std::string err;
    try {
        cmd_pipeline(mirror_pipeline_config(run_b));
    } catch (const std::exception& e) {
        err = e.what();
    }
    bool ok = err.empty();
    std::size_t compared = 0;
    if (ok) {
        for (const auto& dir : {std::string("dataset"), std::string("out")}) {
            const fs::path da = run_a / dir, db = run_b / dir;
            for (const auto& e : fs::directory_iterator(da)) {
                if (e.path().extension() != ".f32") continue;
                ++compared;
                if (slurp(e.path()) != slurp(db / e.path().filename())) {
                    ok = false;
                    err = "mismatch in " + e.path().filename().string();
                }
            }
        }
        if (compared == 0) {
            ok = false;
            err = "no outputs to compare";
        }
    }
    char buf[160];
    if (ok)
        std::snprintf(buf, sizeof buf, "%zu numeric artifacts byte-identical across reruns", compared);
    else
        std::snprintf(buf, sizeof buf, "%s", err.c_str());
    report(10, "deterministic reruns", ok, buf);
}

}  // namespace

int main() {
    const auto run_a = fresh_dir("usdecon_accept_a");
    criterion_raw_lobe_width();
    criterion_resolution_gain(run_a);
    criterion_blind_pulse_recovery();
    criterion_cepstrum_oracle();
    criterion_cumulant_bruteforce();
    criterion_dwt_integrity();
    criterion_wiener_limits();
    criterion_shrinkage_algebra();
    criterion_denoising_benefit();
    criterion_determinism(run_a);
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
