#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "attend/config.hpp"
#include "attend/events.hpp"
#include "attend/frame.hpp"
#include "attend/ml/boosted.hpp"
#include "attend/ml/matrix.hpp"
#include "attend/session_io.hpp"

namespace attend {

/// Mouth height over width; invalid when the width is degenerate.
struct MouthAspect {
    double ratio = 0.0;
    bool valid = false;
};

inline constexpr double kMinMouthWidth = 1e-6;
inline constexpr std::size_t kYawnFeatureCount = 1 + kAuCount;

/// Closed eyes that are not explained by smiling or cheek raising:
/// eye_closure >= closure_gate with AU12 and AU6 both below au_gate.
bool refined_eye_closure(const FrameRecord& frame, double closure_gate, double au_gate);

/// Runs of refined closure; distracting iff longer than min_duration_s.
std::vector<Event> closure_events(std::span<const std::uint8_t> flags, double frame_rate_hz, double min_duration_s);

MouthAspect mouth_aspect_ratio(const FrameRecord& frame);

/// [MAR, AU1 .. AU43].
std::array<double, kYawnFeatureCount> yawn_features(const FrameRecord& frame, const MouthAspect& mar);

/// Throws ArtifactError for an untrained model and std::invalid_argument on
/// a wrong feature count.
double yawn_probability(std::span<const double> features, const ml::BoostedEnsemble& model);

/// Centered majority vote over `window` frames (clipped at the edges).
Flags smooth_majority(std::span<const std::uint8_t> flags, std::size_t window);

/// Frame-wise OR of distracting closure events and yawn flags.
Flags drowsiness_signal(const std::vector<Event>& closure, std::span<const std::uint8_t> yawn);

struct DrowsinessResult {
    Flags closure;
    std::vector<Event> closure_events;
    /// NaN where the frame has no face or a degenerate mouth.
    std::vector<double> yawn_probability;
    Flags yawn;
    Flags signal;
};

DrowsinessResult detect_drowsiness(std::span<const FrameRecord> frames, double frame_rate_hz,
                                   const ml::BoostedEnsemble& yawn_model, const Config& config);

struct YawnDataset {
    ml::FeatureMatrix features;
    std::vector<double> labels;
};

/// Feature rows for every frame with a face and a valid MAR, labeled from
/// the annotations.
void append_yawn_samples(std::span<const FrameRecord> frames, std::span<const FrameAnnotation> annotations,
                         YawnDataset& out);

}  // namespace attend
