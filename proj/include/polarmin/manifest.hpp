#pragma once

#include "json.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace polarmin {

// Reproducibility record written next to every subcommand's artifacts. This
// is the one file that carries a wall-clock timestamp; the artifacts
// themselves stay byte-identical across reruns.
struct RunManifest {
    std::string subcommand;
    nlohmann::json resolvedConfig;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::vector<std::pair<std::string, std::string>> outputs; // path, digest

    nlohmann::json toJson(bool stamped) const;
};

// Digest of the resolved configuration, embedded in report metadata.
std::string configDigest(const nlohmann::json& resolvedConfig);

// Metadata block shared by all report artifacts. The timestamp field is null
// unless stamped (keeps reports byte-identical by default).
nlohmann::json artifactMeta(const std::string& subcommand,
                            const nlohmann::json& resolvedConfig,
                            std::uint64_t seed);

// Writes <outDir>/run_manifest.json (directories created as needed).
void writeRunManifest(const std::string& outDir, const RunManifest& manifest);

// Small file helpers shared by the CLI: parent directories are created on
// write; read failures throw DataError with the path.
void writeTextFile(const std::string& path, const std::string& content);
std::string readTextFile(const std::string& path);

std::string currentUtcTimestamp();

} // namespace polarmin
