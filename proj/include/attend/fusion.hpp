#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "attend/events.hpp"
#include "attend/frame.hpp"
#include "attend/timeline.hpp"

namespace attend {

/// Both trackers lost the face for longer than min_duration_s.
Flags unattended_signal(std::span<const FrameRecord> frames, double frame_rate_hz, double min_duration_s);

using SignalFlags = std::array<Flags, kSignalCount>;

/// OR-fusion with attribution. Every flag vector must match frames in
/// length; throws std::invalid_argument otherwise.
DistractionTimeline fuse(const SignalFlags& signals, std::span<const FrameRecord> frames, double frame_rate_hz);

struct SummaryEvent {
    std::size_t begin_frame = 0;
    std::size_t end_frame = 0;  // exclusive, position in the timeline
    double start_ms = 0.0;
    double end_ms = 0.0;
    double duration_s = 0.0;
};

struct SessionSummary {
    std::size_t frame_count = 0;
    std::size_t inattentive_frames = 0;
    double inattentive_percent = 0.0;
    std::array<std::vector<SummaryEvent>, kSignalCount> source_events;
    std::vector<SummaryEvent> inattentive_events;
};

/// Throws std::invalid_argument on an empty timeline.
SessionSummary session_summary(const DistractionTimeline& timeline);

nlohmann::json to_json(const SessionSummary& summary);

}  // namespace attend
