#pragma once

#include "attend/frame.hpp"

namespace attend {

/// Screen-plane coordinates in cm, camera at the origin.
struct ScreenPoint {
    double x = 0.0;
    double y = 0.0;
};

enum class RayStatus { toward_plane, away_from_plane, parallel };

struct PlaneIntersection {
    ScreenPoint point;
    double t = 0.0;
    RayStatus status = RayStatus::parallel;
};

/// Directions with |z_d| / |D| below this are treated as parallel to the screen.
inline constexpr double kParallelEpsilon = 1e-6;

/// Intersects the gaze ray pupil + t * direction with the plane Z = 0.
///
/// Throws std::invalid_argument for a zero direction or a pupil that is not
/// in front of the plane (z <= 0). For parallel rays point and t are zero.
PlaneIntersection intersect_gaze(const Vec3& pupil, const Vec3& direction);

}  // namespace attend
