#include "attend/head_model.hpp"

#include <cmath>

namespace attend {

HeadPoseStats compute_head_stats(std::span<const FrameRecord> frames) {
    HeadPoseStats s;
    double yaw = 0.0, pitch = 0.0;
    for (const auto& f : frames) {
        if (!f.face_detected_expr) continue;
        yaw += f.head_yaw_deg;
        pitch += f.head_pitch_deg;
        ++s.frame_count;
    }
    if (s.frame_count > 0) {
        s.mean_yaw_deg = yaw / static_cast<double>(s.frame_count);
        s.mean_pitch_deg = pitch / static_cast<double>(s.frame_count);
    }
    return s;
}

bool head_off_screen(const FrameRecord& frame, const HeadPoseStats& stats, const HeadThresholds& thresholds) {
    return std::abs(frame.head_yaw_deg - stats.mean_yaw_deg) > thresholds.yaw_deg ||
           std::abs(frame.head_pitch_deg - stats.mean_pitch_deg) > thresholds.pitch_deg;
}

GazeSource select_gaze_source(const FrameRecord& frame, double quality_gate) {
    return (frame.face_detected_gaze && frame.gaze_quality >= quality_gate) ? GazeSource::eye_gaze
                                                                             : GazeSource::head_pose;
}

}  // namespace attend
