#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "attend/config.hpp"
#include "attend/events.hpp"
#include "attend/frame.hpp"
#include "attend/ml/temporal_cnn.hpp"
#include "attend/session_io.hpp"

namespace attend {

inline constexpr std::size_t kLipWindowSamples = 30;
inline constexpr double kLipSampleRateHz = 30.0;
/// Longest run of missing samples bridged by holding the last value.
inline constexpr std::size_t kMaxHeldSamples = 5;
/// Windows need at least this many observed (not held) samples.
inline constexpr std::size_t kMinObservedSamples = 15;

/// One second of vertical lip distance resampled to 30 samples, centered on
/// a frame.
struct LipWindow {
    std::array<double, kLipWindowSamples> samples{};
    std::size_t center_frame = 0;
};

/// Upper-to-lower inner lip distance (interocular units); nullopt when the
/// expression tracker has no face.
std::optional<double> lip_distance(const FrameRecord& frame);

/// One optional window per frame, aligned with `frames`. A frame gets no
/// window when it has no face, its second extends past the session, a gap
/// longer than kMaxHeldSamples falls inside it, or fewer than
/// kMinObservedSamples samples were observed.
std::vector<std::optional<LipWindow>> build_lip_windows(std::span<const FrameRecord> frames);

/// CNN input for a window: mean-removed and scaled by 10.
std::vector<double> window_features(const LipWindow& window);

double speaking_probability(const LipWindow& window, const ml::TemporalCnn& net);

/// Runs of speaking frames; distracting iff longer than min_duration_s.
std::vector<Event> speaking_events(std::span<const std::uint8_t> flags, double frame_rate_hz, double min_duration_s);

struct SpeakingResult {
    /// NaN where the frame has no window.
    std::vector<double> probability;
    Flags speaking;
    std::vector<Event> events;
    Flags distracting;
};

/// Scores every window; frames without a window but with a face inherit the
/// nearest scored frame's flag, frames without a face are not speaking.
SpeakingResult detect_speaking(std::span<const FrameRecord> frames, double frame_rate_hz, const ml::TemporalCnn& net,
                               const Config& config);

struct LabeledWindows {
    std::vector<std::vector<double>> features;
    std::vector<double> labels;
    /// Yawning at the window center (used to stratify negatives).
    std::vector<std::uint8_t> yawning;
};

/// Every scorable window of a session with its speaking label at the center frame.
LabeledWindows labeled_speaking_windows(std::span<const FrameRecord> frames,
                                        std::span<const FrameAnnotation> annotations);

}  // namespace attend
