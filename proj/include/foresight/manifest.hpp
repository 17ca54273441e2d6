#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/errors.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// Written once per CLI run at the root of the output directory. The config
/// and dataset hashes are stable across machines, so two manifests with equal
/// hashes and seed describe reproducible runs.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string dataset_hash;
    uint64_t seed = 0;
    std::vector<std::string> provider_ids;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> output_paths;
};

inline std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash file: " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
    return hex64(h);
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    return {{"command", m.command},
            {"config_hash", m.config_hash},
            {"dataset_hash", m.dataset_hash},
            {"seed", m.seed},
            {"provider_ids", m.provider_ids},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at},
            {"output_paths", m.output_paths}};
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << manifest_to_json(m).dump(2) << "\n";
}

}  // namespace foresight
