#include "attend/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace attend {

PlaneIntersection intersect_gaze(const Vec3& pupil, const Vec3& direction) {
    const double norm = std::sqrt(direction.x * direction.x + direction.y * direction.y + direction.z * direction.z);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("gaze direction must be nonzero and finite");
    if (!(pupil.z > 0.0)) throw std::invalid_argument("pupil must lie in front of the screen plane (z > 0)");

    PlaneIntersection out;
    if (std::abs(direction.z) / norm < kParallelEpsilon) {
        out.status = RayStatus::parallel;
        return out;
    }
    out.t = -pupil.z / direction.z;
    out.point = {pupil.x + direction.x * out.t, pupil.y + direction.y * out.t};
    out.status = out.t > 0.0 ? RayStatus::toward_plane : RayStatus::away_from_plane;
    return out;
}

}  // namespace attend
