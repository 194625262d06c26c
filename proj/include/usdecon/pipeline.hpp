#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "usdecon/hosa.hpp"
#include "usdecon/metrics.hpp"
#include "usdecon/synth.hpp"
#include "usdecon/types.hpp"
#include "usdecon/wavelet.hpp"
#include "usdecon/wiener.hpp"

namespace usdecon {

struct PipelineConfig {
    std::filesystem::path dataset_dir;   // manifest location / synth target
    std::filesystem::path output_dir;    // estimates, reports
    SynthConfig synth;
    std::size_t n_lines = 30;
    HosaOptions hosa;
    WienerConfig wiener;
    WaveletConfig wavelet;
    double drop_db = -6.0;
    bool use_true_pulse = false;
    int jobs = 1;
};

PipelineConfig config_from_json_file(const std::filesystem::path& path);
void write_config(const PipelineConfig& cfg, const std::filesystem::path& path);

struct DeconvolveSummary {
    std::size_t n_ok = 0;
    std::vector<std::string> failed_ids;
};

// Subcommand bodies; each throws on unrecoverable failure.
DatasetManifest cmd_synth(const PipelineConfig& cfg);
Pulse cmd_estimate_pulse(const PipelineConfig& cfg);
DeconvolveSummary cmd_deconvolve(const PipelineConfig& cfg);
ResolutionReport cmd_metrics(const PipelineConfig& cfg);
ResolutionReport cmd_pipeline(const PipelineConfig& cfg);

std::filesystem::path wiener_estimate_path(const std::filesystem::path& out_dir,
                                           const std::string& id);
std::filesystem::path wavelet_estimate_path(const std::filesystem::path& out_dir,
                                            const std::string& id);
std::filesystem::path estimated_pulse_path(const std::filesystem::path& out_dir);

}  // namespace usdecon
