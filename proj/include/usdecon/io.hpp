#pragma once

#include <filesystem>
#include <string>

#include "usdecon/types.hpp"

namespace usdecon {

enum class FileFormat { binary_f32le, csv };

// Binary format: raw little-endian float32 payload in <path>, metadata in
// a JSON sidecar <path>.json. CSV format: header "index,amplitude", one
// sample per row; sample rate read from the sidecar as well.
RfTrace load_trace(const std::filesystem::path& path, FileFormat format);
Pulse load_pulse(const std::filesystem::path& path, FileFormat format);
ReflectivitySeries load_reflectivity(const std::filesystem::path& path, FileFormat format);

void save_series(const RfTrace& t, const std::filesystem::path& path, FileFormat format);
void save_series(const Pulse& p, const std::filesystem::path& path, FileFormat format);
void save_series(const ReflectivitySeries& r, const std::filesystem::path& path, FileFormat format);

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Path of the trace/truth file for a given id, relative to the manifest dir.
std::filesystem::path trace_path(const std::filesystem::path& dataset_dir, const std::string& id);
std::filesystem::path truth_path(const std::filesystem::path& dataset_dir, const std::string& id);
std::filesystem::path pulse_path(const std::filesystem::path& dataset_dir);

}  // namespace usdecon
