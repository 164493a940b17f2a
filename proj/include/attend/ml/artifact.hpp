#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

namespace attend::ml {

inline constexpr int kArtifactSchemaVersion = 1;

struct ArtifactMetadata {
    std::uint64_t seed = 0;
    std::string data_hash;
    nlohmann::json hyperparameters = nlohmann::json::object();
};

struct Artifact {
    std::string kind;
    ArtifactMetadata metadata;
    nlohmann::json payload;
};

/// Writes {schema_version, kind, metadata, payload} as pretty JSON.
void save_artifact(const std::filesystem::path& path, const Artifact& artifact);

/// Throws ArtifactError when the file is missing, unparsable, has another
/// schema version, or holds a different kind.
Artifact load_artifact(const std::filesystem::path& path, std::string_view expected_kind);

/// Incremental FNV-1a (64-bit) used to fingerprint training data.
class DataHash {
public:
    void add(std::span<const double> values);
    void add(double value) { add(std::span<const double>(&value, 1)); }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

}  // namespace attend::ml
