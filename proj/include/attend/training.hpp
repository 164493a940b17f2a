#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "attend/config.hpp"
#include "attend/frame.hpp"
#include "attend/ml/artifact.hpp"
#include "attend/pipeline.hpp"
#include "attend/session_io.hpp"

namespace attend {

/// A session with generator labels, as used for training.
struct LabeledSession {
    SessionManifest manifest;
    std::vector<FrameRecord> frames;
    std::vector<FrameAnnotation> annotations;
};

/// Loads frames and annotations named by a manifest. Throws DataError when
/// the manifest has no annotations.
LabeledSession load_labeled_session(const std::filesystem::path& manifest_path);

struct TrainOptions {
    bool gaze = true;
    bool speaking = true;
    bool yawn = true;
    std::uint64_t seed = 7;
    /// Balanced window budget for the speaking CNN.
    std::size_t speaking_windows = 500;
};

/// Throws DataError when no session of `device` has on-screen dot frames.
GazeRegressor train_gaze_model(std::span<const LabeledSession> sessions, DeviceType device, const Config& config,
                               ml::DataHash* hash = nullptr);

/// Balanced speaking/silent windows; roughly a quarter of the negatives are
/// drawn from yawns when available.
struct SpeakingDataset {
    std::vector<std::vector<double>> windows;
    std::vector<double> labels;
};
SpeakingDataset speaking_dataset(std::span<const LabeledSession> sessions, std::size_t budget, std::uint64_t seed);

ml::TemporalCnn train_speaking_model(std::span<const LabeledSession> sessions, const Config& config,
                                     const TrainOptions& options, ml::DataHash* hash = nullptr);

ml::BoostedEnsemble train_yawn_model(std::span<const LabeledSession> sessions, const Config& config,
                                     ml::DataHash* hash = nullptr);

struct TrainedModels {
    ModelBundle models;
    std::optional<ml::Artifact> gaze;
    std::optional<ml::Artifact> speaking;
    std::optional<ml::Artifact> yawn;
};

TrainedModels train_models(std::span<const LabeledSession> sessions, const Config& config, const TrainOptions& options);

inline constexpr const char* kGazeArtifact = "gaze_regressor.json";
inline constexpr const char* kSpeakingArtifact = "speaking_cnn.json";
inline constexpr const char* kYawnArtifact = "yawn_classifier.json";

void save_models(const TrainedModels& trained, const std::filesystem::path& dir);

/// Loads the requested artifacts; throws ArtifactError naming a missing one.
ModelBundle load_models(const std::filesystem::path& dir, bool gaze, bool speaking, bool yawn);

}  // namespace attend
