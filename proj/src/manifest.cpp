#include "polarmin/manifest.hpp"

#include "polarmin/errors.hpp"
#include "polarmin/hash.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace polarmin {

std::string configDigest(const nlohmann::json& resolvedConfig) {
    return stringDigest(resolvedConfig.dump());
}

nlohmann::json artifactMeta(const std::string& subcommand,
                            const nlohmann::json& resolvedConfig,
                            std::uint64_t seed) {
    return {{"subcommand", subcommand},
            {"config_digest", configDigest(resolvedConfig)},
            {"seed", seed},
            {"timestamp", nullptr}};
}

nlohmann::json RunManifest::toJson(bool stamped) const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["resolved_config"] = resolvedConfig;
    j["config_digest"] = configDigest(resolvedConfig);
    j["seed"] = seed;
    nlohmann::json ins = nlohmann::json::array();
    for (const auto& [path, digest] : inputs) {
        ins.push_back({{"path", path}, {"digest", digest}});
    }
    j["inputs"] = ins;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [path, digest] : outputs) {
        outs.push_back({{"path", path}, {"digest", digest}});
    }
    j["outputs"] = outs;
    j["timestamp"] = stamped ? nlohmann::json(currentUtcTimestamp()) : nlohmann::json(nullptr);
    return j;
}

void writeRunManifest(const std::string& outDir, const RunManifest& manifest) {
    writeTextFile((std::filesystem::path(outDir) / "run_manifest.json").string(),
                  manifest.toJson(true).dump(2) + "\n");
}

void writeTextFile(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw DataError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed: " + path);
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string currentUtcTimestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace polarmin
