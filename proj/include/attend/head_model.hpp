#pragma once

#include <cstddef>
#include <span>

#include "attend/frame.hpp"

namespace attend {

struct HeadPoseStats {
    double mean_yaw_deg = 0.0;
    double mean_pitch_deg = 0.0;
    std::size_t frame_count = 0;
};

struct HeadThresholds {
    double yaw_deg = 20.0;
    double pitch_deg = 12.0;
};

enum class GazeSource { eye_gaze, head_pose };

/// Means over frames where the expression tracker found a face. frame_count
/// is zero when there are none.
HeadPoseStats compute_head_stats(std::span<const FrameRecord> frames);

/// Off-screen when the session-normalized yaw or pitch exceeds its threshold.
/// Roll is ignored.
bool head_off_screen(const FrameRecord& frame, const HeadPoseStats& stats, const HeadThresholds& thresholds);

GazeSource select_gaze_source(const FrameRecord& frame, double quality_gate);

}  // namespace attend
