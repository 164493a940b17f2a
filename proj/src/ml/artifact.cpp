#include "attend/ml/artifact.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include "attend/error.hpp"

namespace attend::ml {

void save_artifact(const std::filesystem::path& path, const Artifact& artifact) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const nlohmann::json j = {{"schema_version", kArtifactSchemaVersion},
                              {"kind", artifact.kind},
                              {"metadata",
                               {{"seed", artifact.metadata.seed},
                                {"data_hash", artifact.metadata.data_hash},
                                {"hyperparameters", artifact.metadata.hyperparameters}}},
                              {"payload", artifact.payload}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write artifact " + path.string());
    out << j.dump(1) << '\n';
}

Artifact load_artifact(const std::filesystem::path& path, std::string_view expected_kind) {
    if (!std::filesystem::exists(path))
        throw ArtifactError("missing " + std::string(expected_kind) + " artifact: " + path.string() +
                            " (run `attend train` first)");
    std::ifstream in(path, std::ios::binary);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        if (j.at("schema_version").get<int>() != kArtifactSchemaVersion)
            throw ArtifactError(path.string() + ": unsupported schema_version");
        Artifact a;
        a.kind = j.at("kind").get<std::string>();
        if (a.kind != expected_kind)
            throw ArtifactError(path.string() + ": expected a " + std::string(expected_kind) + " artifact, found " +
                                a.kind);
        const auto& meta = j.at("metadata");
        a.metadata.seed = meta.at("seed").get<std::uint64_t>();
        a.metadata.data_hash = meta.at("data_hash").get<std::string>();
        a.metadata.hyperparameters = meta.at("hyperparameters");
        a.payload = j.at("payload");
        return a;
    } catch (const ArtifactError&) {
        throw;
    } catch (const std::exception& e) {
        throw ArtifactError(path.string() + ": " + e.what());
    }
}

void DataHash::add(std::span<const double> values) {
    for (double v : values) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            state_ ^= bits & 0xffu;
            state_ *= 0x100000001b3ull;
            bits >>= 8;
        }
    }
}

std::string DataHash::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
}

}  // namespace attend::ml
