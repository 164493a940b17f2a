#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "attend/config.hpp"
#include "attend/frame.hpp"
#include "attend/geometry.hpp"
#include "attend/ml/boosted.hpp"
#include "attend/session_io.hpp"

namespace attend {

enum class Orientation { centered, clockwise, anticlockwise };

std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view s);

/// Physical screen extents in cm. After normalization the screen is
/// centered on the session's mean gaze.
struct ScreenGeometry {
    double width_cm = 0.0;
    double height_cm = 0.0;
    Orientation orientation = Orientation::centered;
    double margin_cm = 1.0;
};

/// Session-level aggregates from the first pass over the frames.
struct SessionGazeStats {
    double mean_x_s = 0.0;
    double mean_y_s = 0.0;
    double mean_eye_distance_cm = 0.0;
    double mean_yaw_deg = 0.0;
    double mean_face_center_x = 0.5;
    double mean_gaze_x_s = 0.0;
    std::size_t valid_frame_count = 0;
};

/// True when the frame's eye gaze is usable for session statistics: face
/// seen by the gaze tracker, quality at or above the floor, and a ray that
/// meets the screen plane in front of the viewer.
bool stats_eligible(const FrameRecord& frame, double quality_floor);

/// Means over eligible frames. Eye distance is the mean pupil depth (distance
/// to the screen plane). Throws DataError("session untrackable") when no
/// frame is eligible.
SessionGazeStats compute_session_stats(std::span<const FrameRecord> frames, double quality_floor);

ScreenPoint normalize_gaze(const ScreenPoint& point, const SessionGazeStats& stats);

/// Per-axis correction models. Each ensemble predicts the residual
/// (true - normalized) from the normalized (x, y); fine_tune adds it back.
struct GazeRegressor {
    ml::BoostedEnsemble x;
    ml::BoostedEnsemble y;
};

/// Throws ArtifactError when the regressor is untrained.
ScreenPoint fine_tune(const ScreenPoint& normalized, const GazeRegressor& model);

/// One on-screen training pair.
struct DotSample {
    ScreenPoint normalized;
    Point2 truth;
};

/// A session from the dot-following protocol with its per-frame labels.
struct DotSession {
    std::span<const FrameRecord> frames;
    std::span<const FrameAnnotation> annotations;
};

/// Normalized raw gaze paired with the dot position for every frame that
/// follows an on-screen dot and whose eye gaze passes the quality gate.
std::vector<DotSample> collect_dot_samples(const DotSession& session, const Config& config);

/// Throws DataError on an empty session list or when no on-screen dot
/// frames exist.
GazeRegressor train_gaze_regressor(const std::vector<DotSession>& sessions, const Config& config);

/// Majority of three votes; two or three equal votes win, otherwise centered.
Orientation majority_vote(const std::array<Orientation, 3>& votes);

/// The three threshold votes: mean raw gaze x, mean face x, mean head yaw.
std::array<Orientation, 3> orientation_votes(const SessionGazeStats& stats, const Config& config);

Orientation detect_orientation(const SessionGazeStats& stats, const Config& config);

/// Desktop: height = mean distance / pvd_coefficient, width = aspect * height.
/// Mobile: nominal handset, swapped to landscape when rotated. An override
/// (width, height) wins. Throws DataError on a nonpositive desktop distance.
ScreenGeometry estimate_screen(const SessionGazeStats& stats, DeviceType device, Orientation orientation,
                               const std::optional<std::pair<double, double>>& override_cm, const Config& config);

/// The screen center in camera coordinates assuming the camera is built into
/// the bezel (top for desktops and upright handsets, the side for rotated
/// handsets). Used as the anchor when session normalization is disabled.
ScreenPoint assumed_screen_center(DeviceType device, const ScreenGeometry& geometry, const Config& config);

bool gaze_on_screen(const ScreenPoint& point, const ScreenGeometry& geometry);
/// Rays that do not meet the plane in front of the viewer are off-screen.
bool gaze_on_screen(const ScreenPoint& point, RayStatus status, const ScreenGeometry& geometry);

}  // namespace attend
