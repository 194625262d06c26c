#include "usdecon/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace usdecon {

namespace {

using nlohmann::json;

json read_sidecar(const std::filesystem::path& path) {
    const auto side = std::filesystem::path(path.string() + ".json");
    std::ifstream in(side);
    if (!in) throw std::runtime_error("missing sidecar: " + side.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed sidecar " + side.string() + ": " + e.what());
    }
    return j;
}

void write_sidecar(const std::filesystem::path& path, const json& j) {
    const auto side = std::filesystem::path(path.string() + ".json");
    std::ofstream out(side);
    if (!out) throw std::runtime_error("cannot write sidecar: " + side.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + side.string());
}

std::vector<double> read_payload(const std::filesystem::path& path, FileFormat format) {
    std::vector<double> samples;
    if (format == FileFormat::binary_f32le) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open: " + path.string());
        in.seekg(0, std::ios::end);
        const auto bytes = static_cast<std::size_t>(in.tellg());
        in.seekg(0);
        if (bytes % 4 != 0) throw std::runtime_error("binary payload not a multiple of 4 bytes: " + path.string());
        std::vector<float> raw(bytes / 4);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
        if (!in) throw std::runtime_error("read failed: " + path.string());
        samples.assign(raw.begin(), raw.end());
    } else {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open: " + path.string());
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path.string());
        if (line.rfind("index,amplitude", 0) != 0) {
            throw std::runtime_error("malformed CSV header in " + path.string() + " (expected index,amplitude)");
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw std::runtime_error("malformed CSV row: " + line);
            samples.push_back(std::stod(line.substr(comma + 1)));
        }
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i])) {
            throw std::runtime_error("non-finite sample at index " + std::to_string(i) +
                                     " in " + path.string());
        }
    }
    return samples;
}

void write_payload(const std::vector<double>& samples, const std::filesystem::path& path,
                   FileFormat format) {
    if (format == FileFormat::binary_f32le) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write: " + path.string());
        std::vector<float> raw(samples.begin(), samples.end());
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size() * 4));
        if (!out) throw std::runtime_error("write failed: " + path.string());
    } else {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write: " + path.string());
        out << "index,amplitude\n";
        out.precision(17);
        for (std::size_t i = 0; i < samples.size(); ++i) out << i << "," << samples[i] << "\n";
        if (!out) throw std::runtime_error("write failed: " + path.string());
    }
}

double sidecar_rate(const json& j, const std::filesystem::path& path) {
    if (!j.contains("sample_rate_hz")) {
        throw std::runtime_error("sidecar of " + path.string() + " lacks sample_rate_hz");
    }
    return j.at("sample_rate_hz").get<double>();
}

}  // namespace

RfTrace load_trace(const std::filesystem::path& path, FileFormat format) {
    const json j = read_sidecar(path);
    RfTrace t;
    t.samples = read_payload(path, format);
    t.sample_rate_hz = sidecar_rate(j, path);
    t.id = j.value("id", path.stem().string());
    validate(t);
    return t;
}

Pulse load_pulse(const std::filesystem::path& path, FileFormat format) {
    const json j = read_sidecar(path);
    Pulse p;
    p.samples = read_payload(path, format);
    p.sample_rate_hz = sidecar_rate(j, path);
    p.alignment = j.value("alignment", std::size_t{0});
    p.energy_normalized = j.value("energy_normalized", false);
    // float32 storage perturbs the unit-energy invariant; renormalize.
    if (p.energy_normalized) p = normalize_pulse(std::move(p));
    validate(p);
    return p;
}

ReflectivitySeries load_reflectivity(const std::filesystem::path& path, FileFormat format) {
    const json j = read_sidecar(path);
    ReflectivitySeries r;
    r.samples = read_payload(path, format);
    r.sample_rate_hz = sidecar_rate(j, path);
    r.kind = series_kind_from_string(j.value("kind", std::string("ground_truth")));
    validate(r);
    return r;
}

void save_series(const RfTrace& t, const std::filesystem::path& path, FileFormat format) {
    validate(t);
    write_payload(t.samples, path, format);
    write_sidecar(path, json{{"type", "trace"},
                             {"id", t.id},
                             {"sample_rate_hz", t.sample_rate_hz},
                             {"length", t.samples.size()}});
}

void save_series(const Pulse& p, const std::filesystem::path& path, FileFormat format) {
    validate(p);
    write_payload(p.samples, path, format);
    write_sidecar(path, json{{"type", "pulse"},
                             {"sample_rate_hz", p.sample_rate_hz},
                             {"length", p.samples.size()},
                             {"alignment", p.alignment},
                             {"energy_normalized", p.energy_normalized}});
}

void save_series(const ReflectivitySeries& r, const std::filesystem::path& path, FileFormat format) {
    validate(r);
    write_payload(r.samples, path, format);
    write_sidecar(path, json{{"type", "reflectivity"},
                             {"sample_rate_hz", r.sample_rate_hz},
                             {"length", r.samples.size()},
                             {"kind", to_string(r.kind)}});
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    validate(m);
    json j{{"trace_ids", m.trace_ids},
           {"n_samples", m.n_samples},
           {"sample_rate_hz", m.sample_rate_hz},
           {"line_pitch_mm", m.line_pitch_mm},
           {"notes", m.notes},
           {"rng_algorithm", m.rng_algorithm},
           {"rng_seed", m.rng_seed},
           {"config", m.config}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    m.trace_ids = j.at("trace_ids").get<std::vector<std::string>>();
    m.n_samples = j.at("n_samples").get<std::size_t>();
    m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    m.line_pitch_mm = j.value("line_pitch_mm", 0.0);
    m.notes = j.value("notes", std::string{});
    m.rng_algorithm = j.value("rng_algorithm", std::string{});
    m.rng_seed = j.value("rng_seed", 0ULL);
    if (j.contains("config")) m.config = j.at("config").get<std::map<std::string, double>>();
    validate(m);
    return m;
}

std::filesystem::path trace_path(const std::filesystem::path& dataset_dir, const std::string& id) {
    return dataset_dir / (id + ".f32");
}

std::filesystem::path truth_path(const std::filesystem::path& dataset_dir, const std::string& id) {
    return dataset_dir / (id + "_truth.f32");
}

std::filesystem::path pulse_path(const std::filesystem::path& dataset_dir) {
    return dataset_dir / "pulse.f32";
}

}  // namespace usdecon
