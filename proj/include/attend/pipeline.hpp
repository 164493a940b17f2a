#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "attend/config.hpp"
#include "attend/drowsiness.hpp"
#include "attend/frame.hpp"
#include "attend/fusion.hpp"
#include "attend/gaze_model.hpp"
#include "attend/head_model.hpp"
#include "attend/ml/boosted.hpp"
#include "attend/ml/temporal_cnn.hpp"
#include "attend/speaking.hpp"

namespace attend {

/// Trained models needed for scoring. Any may be absent when the signal
/// that needs it is disabled.
struct ModelBundle {
    std::optional<GazeRegressor> desktop_gaze;
    std::optional<GazeRegressor> mobile_gaze;
    std::optional<ml::TemporalCnn> speaking;
    std::optional<ml::BoostedEnsemble> yawn;

    const std::optional<GazeRegressor>& gaze_for(DeviceType device) const {
        return device == DeviceType::desktop ? desktop_gaze : mobile_gaze;
    }
};

/// Switches for ablations. The defaults run the full model.
struct PipelineOptions {
    bool normalize = true;
    bool fine_tune = true;
    bool screen_size_detection = true;
    /// When false the head model decides gaze on every face frame.
    bool eye_gaze_model = true;
    std::array<bool, kSignalCount> enabled{true, true, true, true, true};
};

struct ScoredSession {
    DistractionTimeline timeline;
    SignalFlags signals;
    /// Absent when no frame has usable eye gaze.
    std::optional<SessionGazeStats> gaze_stats;
    std::optional<ScreenGeometry> screen;
    Orientation orientation = Orientation::centered;
    std::vector<GazeSource> gaze_source;
    /// Empty when the signal is disabled.
    std::vector<double> speaking_probability;
    std::vector<double> yawn_probability;
};

/// Both passes over one session. Throws ArtifactError when an enabled
/// signal's model is missing from the bundle.
ScoredSession score_session(const SessionManifest& manifest, std::span<const FrameRecord> frames,
                            const ModelBundle& models, const Config& config, const PipelineOptions& options = {});

}  // namespace attend
