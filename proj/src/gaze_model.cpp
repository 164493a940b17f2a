#include "attend/gaze_model.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "attend/error.hpp"

namespace attend {

std::string_view to_string(Orientation o) {
    switch (o) {
        case Orientation::centered: return "centered";
        case Orientation::clockwise: return "clockwise";
        case Orientation::anticlockwise: return "anticlockwise";
    }
    return "centered";
}

Orientation parse_orientation(std::string_view s) {
    if (s == "centered") return Orientation::centered;
    if (s == "clockwise") return Orientation::clockwise;
    if (s == "anticlockwise") return Orientation::anticlockwise;
    throw DataError("unknown orientation '" + std::string(s) + "'");
}

bool stats_eligible(const FrameRecord& frame, double quality_floor) {
    if (!frame.face_detected_gaze || frame.gaze_quality < quality_floor) return false;
    return intersect_gaze(frame.pupil_position_cm, frame.gaze_direction).status == RayStatus::toward_plane;
}

SessionGazeStats compute_session_stats(std::span<const FrameRecord> frames, double quality_floor) {
    SessionGazeStats s;
    double sx = 0.0, sy = 0.0, sd = 0.0, syaw = 0.0, sface = 0.0;
    std::size_t expr_count = 0;
    for (const auto& f : frames) {
        if (!f.face_detected_gaze || f.gaze_quality < quality_floor) continue;
        const auto hit = intersect_gaze(f.pupil_position_cm, f.gaze_direction);
        if (hit.status != RayStatus::toward_plane) continue;
        sx += hit.point.x;
        sy += hit.point.y;
        sd += f.pupil_position_cm.z;
        ++s.valid_frame_count;
        if (f.face_detected_expr) {
            syaw += f.head_yaw_deg;
            sface += f.face_center_x;
            ++expr_count;
        }
    }
    if (s.valid_frame_count == 0) throw DataError("session untrackable: no frame with usable eye gaze");
    const auto n = static_cast<double>(s.valid_frame_count);
    s.mean_x_s = sx / n;
    s.mean_y_s = sy / n;
    s.mean_eye_distance_cm = sd / n;
    s.mean_gaze_x_s = s.mean_x_s;
    if (expr_count > 0) {
        s.mean_yaw_deg = syaw / static_cast<double>(expr_count);
        s.mean_face_center_x = sface / static_cast<double>(expr_count);
    }
    return s;
}

ScreenPoint normalize_gaze(const ScreenPoint& point, const SessionGazeStats& stats) {
    return {point.x - stats.mean_x_s, point.y - stats.mean_y_s};
}

ScreenPoint fine_tune(const ScreenPoint& normalized, const GazeRegressor& model) {
    if (model.x.feature_count != 2 || model.y.feature_count != 2)
        throw ArtifactError("gaze regressor is not trained");
    const std::array<double, 2> in{normalized.x, normalized.y};
    return {normalized.x + ml::predict_boosted(model.x, in), normalized.y + ml::predict_boosted(model.y, in)};
}

std::vector<DotSample> collect_dot_samples(const DotSession& session, const Config& config) {
    std::vector<DotSample> out;
    SessionGazeStats stats;
    try {
        stats = compute_session_stats(session.frames, config.quality_floor);
    } catch (const DataError&) {
        return out;
    }
    std::unordered_map<std::uint64_t, const FrameAnnotation*> by_index;
    for (const auto& a : session.annotations) by_index[a.frame_index] = &a;
    for (const auto& f : session.frames) {
        const auto it = by_index.find(f.frame_index);
        if (it == by_index.end() || !it->second->dot_cm) continue;
        if (!f.face_detected_gaze || f.gaze_quality < config.quality_gate) continue;
        const auto hit = intersect_gaze(f.pupil_position_cm, f.gaze_direction);
        if (hit.status != RayStatus::toward_plane) continue;
        out.push_back({normalize_gaze(hit.point, stats), *it->second->dot_cm});
    }
    return out;
}

GazeRegressor train_gaze_regressor(const std::vector<DotSession>& sessions, const Config& config) {
    if (sessions.empty()) throw DataError("train_gaze_regressor: no sessions");
    ml::FeatureMatrix X;
    std::vector<double> rx, ry;
    for (const auto& s : sessions) {
        for (const auto& sample : collect_dot_samples(s, config)) {
            const std::array<double, 2> row{sample.normalized.x, sample.normalized.y};
            X.push_row(row);
            rx.push_back(sample.truth.x - sample.normalized.x);
            ry.push_back(sample.truth.y - sample.normalized.y);
        }
    }
    if (X.rows() < 10) throw DataError("train_gaze_regressor: no on-screen dot segments found");
    ml::BoostConfig bc;
    bc.stages = config.gbt_stages;
    bc.max_depth = config.gbt_max_depth;
    bc.learning_rate = config.gbt_learning_rate;
    bc.min_samples_leaf = config.gbt_min_samples_leaf;
    return {ml::fit_boosted(X, rx, bc), ml::fit_boosted(X, ry, bc)};
}

Orientation majority_vote(const std::array<Orientation, 3>& votes) {
    for (auto candidate : {Orientation::clockwise, Orientation::anticlockwise, Orientation::centered}) {
        int n = 0;
        for (auto v : votes) n += (v == candidate) ? 1 : 0;
        if (n >= 2) return candidate;
    }
    return Orientation::centered;
}

std::array<Orientation, 3> orientation_votes(const SessionGazeStats& stats, const Config& config) {
    auto signed_vote = [](double value, double threshold) {
        if (value < -threshold) return Orientation::clockwise;
        if (value > threshold) return Orientation::anticlockwise;
        return Orientation::centered;
    };
    Orientation face = Orientation::centered;
    if (stats.mean_face_center_x < config.orientation_face_low) face = Orientation::clockwise;
    if (stats.mean_face_center_x > config.orientation_face_high) face = Orientation::anticlockwise;
    return {signed_vote(stats.mean_gaze_x_s, config.orientation_gaze_x_cm), face,
            signed_vote(stats.mean_yaw_deg, config.orientation_yaw_deg)};
}

Orientation detect_orientation(const SessionGazeStats& stats, const Config& config) {
    return majority_vote(orientation_votes(stats, config));
}

ScreenGeometry estimate_screen(const SessionGazeStats& stats, DeviceType device, Orientation orientation,
                               const std::optional<std::pair<double, double>>& override_cm, const Config& config) {
    ScreenGeometry g;
    g.margin_cm = config.margin_cm;
    g.orientation = device == DeviceType::desktop ? Orientation::centered : orientation;
    if (override_cm) {
        g.width_cm = override_cm->first;
        g.height_cm = override_cm->second;
        return g;
    }
    if (device == DeviceType::desktop) {
        if (!(stats.mean_eye_distance_cm > 0.0)) throw DataError("estimate_screen: nonpositive mean eye distance");
        g.height_cm = stats.mean_eye_distance_cm / config.pvd_coefficient;
        g.width_cm = config.desktop_aspect * g.height_cm;
    } else if (g.orientation == Orientation::centered) {
        g.width_cm = config.mobile_screen_width_cm;
        g.height_cm = config.mobile_screen_height_cm;
    } else {
        g.width_cm = config.mobile_screen_height_cm;
        g.height_cm = config.mobile_screen_width_cm;
    }
    return g;
}

ScreenPoint assumed_screen_center(DeviceType device, const ScreenGeometry& g, const Config& config) {
    const double bezel = device == DeviceType::desktop ? config.desktop_camera_bezel_cm : config.mobile_camera_bezel_cm;
    switch (g.orientation) {
        case Orientation::clockwise: return {-(g.width_cm / 2.0 + bezel), 0.0};
        case Orientation::anticlockwise: return {g.width_cm / 2.0 + bezel, 0.0};
        case Orientation::centered: break;
    }
    return {0.0, -(g.height_cm / 2.0 + bezel)};
}

bool gaze_on_screen(const ScreenPoint& p, const ScreenGeometry& g) {
    return std::abs(p.x) <= g.width_cm / 2.0 + g.margin_cm && std::abs(p.y) <= g.height_cm / 2.0 + g.margin_cm;
}

bool gaze_on_screen(const ScreenPoint& p, RayStatus status, const ScreenGeometry& g) {
    return status == RayStatus::toward_plane && gaze_on_screen(p, g);
}

}  // namespace attend
