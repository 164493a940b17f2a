#include "attend/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "attend/error.hpp"
#include "attend/rng.hpp"

namespace attend {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kDesktopBezelCm = 1.0;
constexpr double kMobileBezelCm = 0.8;
constexpr double kOffScreenReach = 2.5;   // target distance from center, in half-extents
constexpr double kFreeViewReach = 0.85;   // free viewing stays inside this share of the half-extents
constexpr double kWatchHeadFraction = 0.2;
constexpr double kYawnLabelLevel = 0.3;

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double smoothstep(double u) {
    u = clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

/// Trapezoid envelope with smooth ramps of length `ramp` over [0, duration).
double envelope(double t, double duration, double ramp) {
    if (t < 0.0 || t >= duration) return 0.0;
    return std::min(smoothstep(t / ramp), smoothstep((duration - t) / ramp));
}

struct Wander {
    double f1, f2, p1, p2;
    double at(double t) const {
        return 0.6 * std::sin(2.0 * std::numbers::pi * f1 * t + p1) + 0.4 * std::sin(2.0 * std::numbers::pi * f2 * t + p2);
    }
};

Wander make_wander(Rng& rng) {
    const double tau = 2.0 * std::numbers::pi;
    return {rng.uniform(0.05, 0.15), rng.uniform(0.2, 0.4), rng.uniform(0.0, tau), rng.uniform(0.0, tau)};
}

struct SegmentParams {
    double frequency_hz = 4.0;  // speak
    double amplitude = 0.2;     // speak
    double peak_mar = 0.9;      // yawn
    double cross = 0.0;         // off_screen jitter along the other axis, in half-extents
    double head_fraction = 0.5; // off_screen
};

std::pair<double, double> screen_size(const ScenarioScript& s) {
    if (s.screen_width_cm > 0.0 && s.screen_height_cm > 0.0) return {s.screen_width_cm, s.screen_height_cm};
    if (s.device_type == DeviceType::desktop) {
        const double h = s.viewing_distance_cm / 3.0;
        return {16.0 / 9.0 * h, h};
    }
    if (s.orientation == Orientation::centered) return {7.0, 14.0};
    return {14.0, 7.0};
}

/// Built-in camera position relative to the screen center.
Point2 builtin_camera(const ScenarioScript& s, double w, double h) {
    if (s.device_type == DeviceType::desktop) return {0.0, h / 2.0 + kDesktopBezelCm};
    switch (s.orientation) {
        case Orientation::clockwise: return {w / 2.0 + kMobileBezelCm, 0.0};
        case Orientation::anticlockwise: return {-(w / 2.0 + kMobileBezelCm), 0.0};
        case Orientation::centered: break;
    }
    return {0.0, h / 2.0 + kMobileBezelCm};
}

std::size_t frame_at(double t_s, double fps) { return static_cast<std::size_t>(std::llround(t_s * fps)); }

}  // namespace

NoiseModel NoiseModel::clean() {
    NoiseModel n;
    n.gaze_noise_deg = 0.0;
    n.landmark_jitter = 0.0;
    n.gaze_gain = 1.0;
    n.head_noise_deg = 0.0;
    n.quality_noise = 0.0;
    n.posture_jitter = 0.0;
    n.artifact_rate_hz = 0.0;
    n.blink_rate_hz = 0.0;
    return n;
}

std::string_view to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::dot: return "dot";
        case SegmentKind::off_screen: return "off_screen";
        case SegmentKind::speak: return "speak";
        case SegmentKind::yawn: return "yawn";
        case SegmentKind::close_eyes: return "close_eyes";
        case SegmentKind::leave: return "leave";
        case SegmentKind::laugh: return "laugh";
    }
    return "dot";
}

SegmentKind parse_segment_kind(std::string_view s) {
    for (auto k : {SegmentKind::dot, SegmentKind::off_screen, SegmentKind::speak, SegmentKind::yawn,
                   SegmentKind::close_eyes, SegmentKind::leave, SegmentKind::laugh}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown segment kind '" + std::string(s) + "'");
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::up: return "up";
        case Direction::down: return "down";
        case Direction::left: return "left";
        case Direction::right: return "right";
    }
    return "up";
}

Direction parse_direction(std::string_view s) {
    for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right}) {
        if (to_string(d) == s) return d;
    }
    throw ConfigError("unknown direction '" + std::string(s) + "'");
}

void validate_script(const ScenarioScript& s) {
    if (!(s.duration_s > 0.0)) throw ConfigError("script duration must be positive");
    if (!(s.frame_rate_hz >= 5.0 && s.frame_rate_hz <= 120.0)) throw ConfigError("script frame rate must be in [5, 120]");
    if (!(s.viewing_distance_cm > 0.0)) throw ConfigError("viewing distance must be positive");
    for (std::size_t i = 0; i < s.segments.size(); ++i) {
        const auto& a = s.segments[i];
        if (!(a.duration_s > 0.0) || a.start_s < 0.0 || a.start_s + a.duration_s > s.duration_s + 1e-9)
            throw ConfigError("segment " + std::to_string(i) + " lies outside the session");
    }
    std::vector<std::size_t> order(s.segments.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.segments[a].start_s < s.segments[b].start_s || (s.segments[a].start_s == s.segments[b].start_s && a < b);
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& prev = s.segments[order[k - 1]];
        const auto& cur = s.segments[order[k]];
        if (cur.start_s < prev.start_s + prev.duration_s) {
            const auto lo = std::min(order[k - 1], order[k]);
            const auto hi = std::max(order[k - 1], order[k]);
            throw ConfigError("segments " + std::to_string(lo) + " and " + std::to_string(hi) + " overlap");
        }
    }
}

GeneratedSession generate(const ScenarioScript& script) {
    validate_script(script);
    const auto& nz = script.noise;
    Rng rng(script.seed);
    const double fps = script.frame_rate_hz;
    const auto n = static_cast<std::size_t>(std::floor(script.duration_s * fps + 1e-9));
    const auto [W, H] = screen_size(script);
    const bool mobile = script.device_type == DeviceType::mobile;

    Point2 cam = builtin_camera(script, W, H);
    cam.x += script.camera_offset_cm.x;
    cam.y += script.camera_offset_cm.y;

    // Session constants, drawn in a fixed order.
    const double head_x0 = rng.normal(0.0, 1.0) * nz.posture_jitter * (mobile ? 1.5 : 2.0);
    const double head_y0 = rng.normal(0.0, 1.0) * nz.posture_jitter * (mobile ? 1.0 : 2.0);
    const Wander drift_x = make_wander(rng), drift_y = make_wander(rng), drift_z = make_wander(rng);
    const Wander view_x = make_wander(rng), view_y = make_wander(rng);
    const double rotated_yaw = rng.uniform(11.0, 18.0) - (nz.posture_jitter > 0.0 ? rng.uniform(0.0, 6.0) : 0.0);
    double yaw_bias = rng.normal(0.0, 1.0) * 3.0 * nz.posture_jitter;
    if (mobile && script.orientation == Orientation::clockwise) yaw_bias = -rotated_yaw;
    if (mobile && script.orientation == Orientation::anticlockwise) yaw_bias = rotated_yaw;
    const double pitch_bias = rng.normal(0.0, 1.0) * 3.0 * nz.posture_jitter;
    const double roll_bias = rng.normal(0.0, 1.0) * 2.0 * nz.posture_jitter;
    std::array<double, kAuCount> au_base{};
    for (auto& a : au_base) a = rng.uniform(0.0, 8.0);
    const double mouth_width = rng.uniform(0.85, 1.0);
    const double mouth_rest = rng.uniform(0.02, 0.05);
    const double closure_base = rng.uniform(5.0, 12.0);
    const double quality_base = rng.uniform(0.9, 0.96);

    std::vector<SegmentParams> params(script.segments.size());
    for (std::size_t i = 0; i < script.segments.size(); ++i) {
        auto& p = params[i];
        p.frequency_hz = rng.uniform(3.0, 6.0);
        p.amplitude = rng.uniform(0.15, 0.3);
        p.peak_mar = rng.uniform(0.8, 1.0);
        p.cross = rng.uniform(-0.3, 0.3);
        const double hf = script.segments[i].head_fraction;
        p.head_fraction = hf >= 0.0 ? hf : script.behavior_mix;
    }

    // Frame ownership by segment.
    std::vector<int> owner(n, -1);
    for (std::size_t s = 0; s < script.segments.size(); ++s) {
        const auto& seg = script.segments[s];
        const std::size_t b = frame_at(seg.start_s, fps);
        const std::size_t e = std::min(n, frame_at(seg.start_s + seg.duration_s, fps));
        for (std::size_t i = b; i < e; ++i) owner[i] = static_cast<int>(s);
    }
    auto segment_frames = [&](std::size_t s) {
        const auto& seg = script.segments[s];
        return std::min(n, frame_at(seg.start_s + seg.duration_s, fps)) - std::min(n, frame_at(seg.start_s, fps));
    };

    // Tracker artifacts, placed only in free viewing away from segments.
    enum Artifact : std::uint8_t { none = 0, low_quality, gaze_dropout, dual_dropout, blink };
    std::vector<std::uint8_t> artifact(n, none);
    auto free_span = [&](std::size_t b, std::size_t e) {
        const auto guard = static_cast<std::size_t>(std::llround(0.5 * fps));
        const std::size_t lo = b >= guard ? b - guard : 0;
        const std::size_t hi = std::min(n, e + guard);
        for (std::size_t i = lo; i < hi; ++i) {
            if (owner[i] >= 0 || artifact[i] != none) return false;
        }
        return e <= n;
    };
    const double expected = nz.artifact_rate_hz * script.duration_s;
    const auto artifact_count = static_cast<std::size_t>(std::floor(expected + rng.uniform()));
    for (std::size_t k = 0; k < artifact_count; ++k) {
        const auto kind = static_cast<std::uint8_t>(1 + rng.below(3));
        const double dur = kind == low_quality ? rng.uniform(0.5, 1.5) : kind == gaze_dropout ? rng.uniform(0.2, 1.0)
                                                                                            : rng.uniform(0.1, 0.6);
        const std::size_t b = frame_at(rng.uniform(0.0, script.duration_s), fps);
        const std::size_t e = b + std::max<std::size_t>(1, frame_at(dur, fps));
        if (free_span(b, e))
            for (std::size_t i = b; i < e; ++i) artifact[i] = kind;
    }
    const auto blink_count = static_cast<std::size_t>(std::floor(nz.blink_rate_hz * script.duration_s + rng.uniform()));
    for (std::size_t k = 0; k < blink_count; ++k) {
        const std::size_t b = frame_at(rng.uniform(0.0, script.duration_s), fps);
        const std::size_t e = std::min(n, b + 3 + rng.below(6));
        bool ok = true;
        for (std::size_t i = b; i < e; ++i) {
            const int o = owner[i];
            if (artifact[i] != none ||
                (o >= 0 && script.segments[o].kind != SegmentKind::dot && script.segments[o].kind != SegmentKind::off_screen &&
                 script.segments[o].kind != SegmentKind::speak))
                ok = false;
        }
        if (ok)
            for (std::size_t i = b; i < e; ++i) artifact[i] = blink;
    }

    GeneratedSession out;
    out.script = script;
    out.manifest.session_id = script.session_id;
    out.manifest.device_type = script.device_type;
    out.manifest.frame_rate_hz = fps;
    out.manifest.frame_source = "frames.jsonl";
    out.manifest.ground_truth = "truth.tsv";
    out.manifest.annotations = "annotations.tsv";
    out.frames.resize(n);
    out.annotations.resize(n);
    out.target_cm.resize(n);
    out.truth.frame_rate_hz = fps;
    out.truth.frames.resize(n);

    const bool jitter_time = nz.gaze_noise_deg > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fps;
        const int o = owner[i];
        const Segment* seg = o >= 0 ? &script.segments[static_cast<std::size_t>(o)] : nullptr;
        const SegmentParams* sp = o >= 0 ? &params[static_cast<std::size_t>(o)] : nullptr;
        const SegmentKind kind = seg ? seg->kind : SegmentKind::dot;
        const double t_in = seg ? t - static_cast<double>(frame_at(seg->start_s, fps)) / fps : 0.0;
        const std::size_t seg_len = seg ? segment_frames(static_cast<std::size_t>(o)) : 0;
        const double seg_dur = static_cast<double>(seg_len) / fps;

        // Per-frame draws, always in the same order.
        const double g_nx = rng.normal(), g_ny = rng.normal();
        const double h_nx = rng.normal(), h_ny = rng.normal(), h_nr = rng.normal();
        const double q_n = rng.normal();
        std::array<double, 8> lm{};
        for (auto& v : lm) v = rng.normal();
        std::array<double, kAuCount> au_n{};
        for (auto& v : au_n) v = rng.normal();
        const double c_n = rng.normal();
        const double ts_n = rng.uniform();
        const double lowq = rng.uniform(0.1, 0.4);
        const double closeq = rng.uniform(0.05, 0.25);

        FrameRecord& f = out.frames[i];
        f.frame_index = i;
        f.timestamp_ms = static_cast<double>(i) * 1000.0 / fps + (jitter_time ? 3.0 * ts_n : 0.0);
        FrameAnnotation& a = out.annotations[i];
        a.frame_index = i;
        auto& truth = out.truth.frames[i];
        truth.frame_index = i;
        truth.timestamp_ms = f.timestamp_ms;

        const bool present = !(seg && kind == SegmentKind::leave) && artifact[i] != dual_dropout;
        if (seg && kind == SegmentKind::leave && static_cast<double>(seg_len) / fps > 1.0) truth.mask |= bit(Signal::unattended);
        if (!present) {
            out.target_cm[i] = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
            f.face_center_x = 0.5;
            continue;
        }

        // Pupil in world coordinates (screen center at the origin).
        const double px = head_x0 + 1.0 * nz.posture_jitter * drift_x.at(t);
        const double py = head_y0 + 1.0 * nz.posture_jitter * drift_y.at(t);
        const double pz = script.viewing_distance_cm + 2.0 * nz.posture_jitter * drift_z.at(t);

        // Gaze target on the screen plane.
        double tx = kFreeViewReach * W / 2.0 * view_x.at(t);
        double ty = kFreeViewReach * H / 2.0 * view_y.at(t);
        double head_fraction = kWatchHeadFraction;
        if (seg && kind == SegmentKind::dot) {
            tx = seg->dot.x * W / 2.0;
            ty = seg->dot.y * H / 2.0;
            a.dot_cm = Point2{tx, ty};
        } else if (seg && kind == SegmentKind::off_screen) {
            head_fraction = sp->head_fraction;
            switch (seg->direction) {
                case Direction::left: tx = -kOffScreenReach * W / 2.0, ty = sp->cross * H / 2.0; break;
                case Direction::right: tx = kOffScreenReach * W / 2.0, ty = sp->cross * H / 2.0; break;
                case Direction::up: tx = sp->cross * W / 2.0, ty = kOffScreenReach * H / 2.0; break;
                case Direction::down: tx = sp->cross * W / 2.0, ty = -kOffScreenReach * H / 2.0; break;
            }
            truth.mask |= bit(Signal::gaze_eye);
        }
        out.target_cm[i] = {tx - cam.x, ty - cam.y};

        // Angles from the pupil: to the target and to the screen center.
        const double ax = std::atan2(tx - px, pz), ay = std::atan2(ty - py, pz);
        const double cx = std::atan2(-px, pz), cy = std::atan2(-py, pz);
        const double head_x = head_fraction * (ax - cx) * kDeg;
        const double head_y = head_fraction * (ay - cy) * kDeg;
        const double eye_x = (ax - cx) * kDeg - head_x;
        const double eye_y = (ay - cy) * kDeg - head_y;

        // Tracker output: gain on the offset from the screen-center direction, then bias and noise.
        const double rx = cx + (nz.gaze_gain * (ax - cx) * kDeg + nz.gaze_bias_deg_x + nz.gaze_noise_deg * g_nx) / kDeg;
        const double ry = cy + (nz.gaze_gain * (ay - cy) * kDeg + nz.gaze_bias_deg_y + nz.gaze_noise_deg * g_ny) / kDeg;
        const double dx = std::tan(rx), dy = std::tan(ry);
        const double norm = std::sqrt(dx * dx + dy * dy + 1.0);
        f.pupil_position_cm = {px - cam.x, py - cam.y, pz};
        f.gaze_direction = {dx / norm, dy / norm, -1.0 / norm};
        f.face_center_x = clamp(0.5 + 0.866 * (px - cam.x) / pz, 0.0, 1.0);

        double yawn_e = 0.0, laugh_e = 0.0, speech_open = 0.0;
        bool closing = false;
        if (seg && kind == SegmentKind::yawn) yawn_e = envelope(t_in, seg_dur, std::min(1.0, seg_dur / 3.0));
        if (seg && kind == SegmentKind::laugh) laugh_e = envelope(t_in, seg_dur, 0.2);
        if (seg && kind == SegmentKind::speak) speech_open = std::abs(std::sin(std::numbers::pi * sp->frequency_hz * t_in));
        if (seg && kind == SegmentKind::close_eyes) closing = true;

        f.head_yaw_deg = yaw_bias + head_x + nz.head_noise_deg * h_nx;
        f.head_pitch_deg = pitch_bias + head_y + 6.0 * yawn_e + nz.head_noise_deg * h_ny;
        f.head_roll_deg = roll_bias + nz.head_noise_deg * h_nr;

        double q = quality_base - 0.016 * std::hypot(head_x, head_y) - 0.004 * std::hypot(eye_x, eye_y) + nz.quality_noise * q_n;
        if (artifact[i] == low_quality) q = lowq;
        if (artifact[i] == blink || closing) q = closeq;
        f.gaze_quality = clamp(q, 0.0, 1.0);
        f.face_detected_gaze = artifact[i] != gaze_dropout;
        f.face_detected_expr = true;
        if (!f.face_detected_gaze) {
            f.pupil_position_cm = {};
            f.gaze_direction = {};
            f.gaze_quality = 0.0;
        }

        // Mouth landmarks in interocular units, rotated by head roll.
        double height = mouth_rest, width = mouth_width;
        if (speech_open > 0.0) {
            height += sp->amplitude * speech_open;
            width *= 1.0 - 0.05 * speech_open;
        }
        if (yawn_e > 0.0) {
            width *= 1.0 - 0.15 * yawn_e;
            height += yawn_e * (sp->peak_mar * width - mouth_rest);
        }
        if (laugh_e > 0.0) {
            height += 0.25 * laugh_e;
            width *= 1.0 + 0.15 * laugh_e;
        }
        const std::array<Point2, 4> base_pts = {Point2{0.0, height / 2.0}, Point2{0.0, -height / 2.0},
                                                Point2{-width / 2.0, 0.0}, Point2{width / 2.0, 0.0}};
        const double roll = f.head_roll_deg / kDeg;
        for (std::size_t k = 0; k < 4; ++k) {
            const double x = base_pts[k].x + nz.landmark_jitter * lm[2 * k];
            const double y = base_pts[k].y + nz.landmark_jitter * lm[2 * k + 1];
            f.mouth_points[k] = {x * std::cos(roll) - y * std::sin(roll), x * std::sin(roll) + y * std::cos(roll)};
        }

        for (std::size_t k = 0; k < kAuCount; ++k) f.au_intensities[k] = au_base[k] + 2.5 * au_n[k] * (nz.landmark_jitter > 0.0);
        auto add_au = [&](std::size_t k, double v) { f.au_intensities[k] += v; };
        add_au(kAu25, 45.0 * speech_open + 60.0 * yawn_e + 40.0 * laugh_e);
        add_au(kAu26, 15.0 * speech_open + 80.0 * yawn_e);
        add_au(7, 8.0 * speech_open);                      // AU10
        add_au(5, 25.0 * yawn_e);                          // AU7
        add_au(kAu43, 15.0 * yawn_e + (closing ? 80.0 : 0.0) + (artifact[i] == blink ? 60.0 : 0.0));
        add_au(kAu12, 70.0 * laugh_e);
        add_au(kAu6, 60.0 * laugh_e);
        for (auto& v : f.au_intensities) v = clamp(v, 0.0, 100.0);

        double closure = closure_base + 3.0 * c_n * (nz.landmark_jitter > 0.0) + 35.0 * yawn_e + 55.0 * laugh_e;
        if (closing) closure = 90.0 + 3.0 * c_n;
        if (artifact[i] == blink) closure = 85.0 + 3.0 * c_n;
        f.eye_closure = clamp(closure, 0.0, 100.0);

        a.speaking = seg && kind == SegmentKind::speak;
        a.yawning = yawn_e >= kYawnLabelLevel;
        if (a.speaking && seg_dur > 1.0) truth.mask |= bit(Signal::speaking);
        if (a.yawning) truth.mask |= bit(Signal::drowsiness);
        if (closing && seg_dur > 2.0) truth.mask |= bit(Signal::drowsiness);
    }
    return out;
}

ScenarioScript make_script(std::uint64_t seed, DeviceType device, const ScriptOptions& opt) {
    Rng rng(seed);
    ScenarioScript s;
    s.seed = derive_seed(seed, 1000);
    s.device_type = device;
    s.duration_s = opt.duration_s;
    s.noise = opt.clean ? NoiseModel::clean() : NoiseModel{};
    if (device == DeviceType::desktop) {
        s.viewing_distance_cm = rng.uniform(45.0, 90.0);
        s.screen_height_cm = s.viewing_distance_cm / 3.0 * (opt.clean ? 1.0 : rng.uniform(0.93, 1.07));
        s.screen_width_cm = 16.0 / 9.0 * s.screen_height_cm;
        const double r = opt.max_camera_offset_cm * rng.uniform(0.5, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.camera_offset_cm = {r * std::cos(phi), r * std::sin(phi)};
    } else {
        s.viewing_distance_cm = rng.uniform(25.0, 35.0);
        s.orientation = static_cast<Orientation>(rng.below(3));
        const double scale = opt.clean ? 1.0 : rng.uniform(0.95, 1.05);
        const bool rotated = s.orientation != Orientation::centered;
        s.screen_width_cm = (rotated ? 14.0 : 7.0) * scale;
        s.screen_height_cm = (rotated ? 7.0 : 14.0) * scale;
    }
    s.behavior_mix = rng.uniform();
    if (!opt.clean) {
        const double gain_lo = device == DeviceType::desktop ? 1.15 : 1.1;
        s.noise.gaze_gain = rng.uniform(gain_lo, gain_lo + 0.1);
        s.noise.gaze_bias_deg_x = rng.normal(0.0, 2.5);
        s.noise.gaze_bias_deg_y = rng.normal(0.0, 2.5);
    }

    // Items to place: the dot block is one contiguous item.
    struct Item {
        std::vector<Segment> parts;
        double length() const {
            double l = 0.0;
            for (const auto& p : parts) l += p.duration_s;
            return l;
        }
    };
    std::vector<Item> items;
    if (opt.dots > 0) {
        const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(opt.dots))));
        std::vector<Point2> grid;
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) {
                const double fx = k == 1 ? 0.0 : -0.95 + 1.9 * static_cast<double>(c) / static_cast<double>(k - 1);
                const double fy = k == 1 ? 0.0 : -0.95 + 1.9 * static_cast<double>(r) / static_cast<double>(k - 1);
                grid.push_back({fx, fy});
            }
        }
        rng.shuffle(std::span<Point2>(grid));
        grid.resize(opt.dots);
        Item block;
        for (const auto& g : grid) {
            Segment seg;
            seg.kind = SegmentKind::dot;
            seg.dot = g;
            seg.duration_s = rng.uniform(1.5, 2.5);
            block.parts.push_back(seg);
        }
        items.push_back(block);
    }
    auto single = [&](SegmentKind kind, double lo, double hi) {
        Segment seg;
        seg.kind = kind;
        seg.duration_s = rng.uniform(lo, hi);
        items.push_back({{seg}});
        return &items.back().parts.front();
    };
    if (opt.off_screen) {
        for (int rep = 0; rep < 2; ++rep) {
            for (auto pair : {std::array{Direction::left, Direction::right}, std::array{Direction::up, Direction::down}}) {
                const double dur = rng.uniform(2.0, 4.0);
                for (auto d : pair) {
                    Segment seg;
                    seg.kind = SegmentKind::off_screen;
                    seg.direction = d;
                    seg.duration_s = dur;
                    seg.head_fraction = rng.uniform() < s.behavior_mix ? rng.uniform(0.7, 0.9) : rng.uniform(0.0, 0.05);
                    items.push_back({{seg}});
                }
            }
        }
    }
    if (opt.speak) {
        single(SegmentKind::speak, 2.0, 4.0);
        single(SegmentKind::speak, 2.0, 4.0);
    }
    if (opt.yawn && opt.yawn_prevalence > 0.0) {
        const double yawning_s = opt.yawn_prevalence * opt.duration_s;
        const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(yawning_s / 4.5)));
        for (std::size_t k = 0; k < count; ++k) {
            Segment seg;
            seg.kind = SegmentKind::yawn;
            seg.duration_s = yawning_s / static_cast<double>(count) / 0.85;
            items.push_back({{seg}});
        }
    }
    if (opt.close_eyes) single(SegmentKind::close_eyes, 2.6, 4.5);
    if (opt.leave) single(SegmentKind::leave, 2.0, 4.0);
    if (opt.laugh) single(SegmentKind::laugh, 1.5, 2.5);

    // Shrink everything proportionally when the session is short.
    double total = 0.0;
    for (const auto& it : items) total += it.length();
    const double edge = 1.0;
    const double min_gap = 0.8;
    const double overhead = 2.0 * edge + min_gap * static_cast<double>(items.size() + 1);
    const double budget = std::min(0.55 * opt.duration_s, opt.duration_s - overhead);
    if (budget <= 0.0) throw ConfigError("session duration is too short for the generated script");
    if (total > budget) {
        const double k = budget / total;
        for (auto& it : items)
            for (auto& p : it.parts) p.duration_s *= k;
        total = budget;
    }

    rng.shuffle(std::span<Item>(items));
    const double slack = opt.duration_s - total - overhead;
    std::vector<double> weights(items.size() + 1);
    double wsum = 0.0;
    for (auto& w : weights) wsum += (w = rng.uniform(0.2, 1.0));
    double t = edge;
    for (std::size_t k = 0; k < items.size(); ++k) {
        t += min_gap + std::max(0.0, slack) * weights[k] / wsum;
        for (auto p : items[k].parts) {
            p.start_s = t;
            t += p.duration_s;
            s.segments.push_back(p);
        }
    }
    return s;
}

SuiteConfig suite_preset(std::string_view name, std::uint64_t seed) {
    SuiteConfig c;
    c.seed = seed;
    if (name == "default") return c;
    if (name == "small") {
        c.train_desktop = c.train_mobile = c.test_desktop = c.test_mobile = 2;
        c.options.duration_s = 60.0;
        c.options.dots = 9;
        return c;
    }
    if (name == "gaze") {
        c.options.speak = c.options.yawn = c.options.close_eyes = c.options.leave = c.options.laugh = false;
        return c;
    }
    if (name == "offset") {
        c.options.speak = c.options.yawn = c.options.close_eyes = c.options.leave = c.options.laugh = false;
        c.options.max_camera_offset_cm = 10.0;
        c.train_mobile = c.test_mobile = 0;
        c.test_desktop = 8;
        return c;
    }
    if (name == "clean") {
        c.options.clean = true;
        return c;
    }
    throw ConfigError("unknown suite preset '" + std::string(name) + "'");
}

std::vector<GeneratedSession> generate_suite(const SuiteConfig& config) {
    struct Plan {
        const char* split;
        DeviceType device;
        std::size_t count;
    };
    const std::array<Plan, 4> plans = {Plan{"train", DeviceType::desktop, config.train_desktop},
                                       Plan{"train", DeviceType::mobile, config.train_mobile},
                                       Plan{"test", DeviceType::desktop, config.test_desktop},
                                       Plan{"test", DeviceType::mobile, config.test_mobile}};
    std::vector<GeneratedSession> out;
    std::uint64_t index = 0;
    for (const auto& plan : plans) {
        for (std::size_t k = 0; k < plan.count; ++k, ++index) {
            auto script = make_script(derive_seed(config.seed, index), plan.device, config.options);
            char id[64];
            std::snprintf(id, sizeof id, "%s-%s-%03zu", plan.split, std::string(to_string(plan.device)).c_str(), k);
            script.session_id = id;
            auto session = generate(script);
            session.split = plan.split;
            out.push_back(std::move(session));
        }
    }
    return out;
}

void write_suite(const std::vector<GeneratedSession>& sessions, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    nlohmann::ordered_json index;
    index["sessions"] = nlohmann::ordered_json::array();
    for (const auto& s : sessions) {
        const fs::path sub = dir / s.manifest.session_id;
        write_frames(s.frames, sub / "frames.jsonl");
        write_timeline(s.truth, sub / "truth.tsv");
        write_annotations(s.annotations, sub / "annotations.tsv");
        write_manifest(s.manifest, sub / "manifest.json");
        nlohmann::ordered_json entry;
        entry["session_id"] = s.manifest.session_id;
        entry["split"] = s.split;
        entry["device_type"] = std::string(to_string(s.manifest.device_type));
        entry["manifest"] = s.manifest.session_id + "/manifest.json";
        entry["orientation"] = std::string(to_string(s.script.orientation));
        entry["script"] = to_json(s.script);
        index["sessions"].push_back(std::move(entry));
    }
    std::ofstream out(dir / "suite.json", std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "suite.json").string());
    out << index.dump(2) << '\n';
}

nlohmann::json to_json(const ScenarioScript& s) {
    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (const auto& seg : s.segments) {
        nlohmann::ordered_json j;
        j["kind"] = std::string(to_string(seg.kind));
        j["start_s"] = seg.start_s;
        j["duration_s"] = seg.duration_s;
        if (seg.kind == SegmentKind::dot) j["dot"] = {seg.dot.x, seg.dot.y};
        if (seg.kind == SegmentKind::off_screen) {
            j["direction"] = std::string(to_string(seg.direction));
            j["head_fraction"] = seg.head_fraction;
        }
        segs.push_back(std::move(j));
    }
    const auto& nz = s.noise;
    nlohmann::ordered_json noise;
    noise["gaze_noise_deg"] = nz.gaze_noise_deg;
    noise["landmark_jitter"] = nz.landmark_jitter;
    noise["gaze_gain"] = nz.gaze_gain;
    noise["gaze_bias_deg_x"] = nz.gaze_bias_deg_x;
    noise["gaze_bias_deg_y"] = nz.gaze_bias_deg_y;
    noise["head_noise_deg"] = nz.head_noise_deg;
    noise["quality_noise"] = nz.quality_noise;
    noise["posture_jitter"] = nz.posture_jitter;
    noise["artifact_rate_hz"] = nz.artifact_rate_hz;
    noise["blink_rate_hz"] = nz.blink_rate_hz;
    nlohmann::ordered_json j;
    j["seed"] = s.seed;
    j["session_id"] = s.session_id;
    j["device_type"] = std::string(to_string(s.device_type));
    j["duration_s"] = s.duration_s;
    j["frame_rate_hz"] = s.frame_rate_hz;
    j["camera_offset_cm"] = {s.camera_offset_cm.x, s.camera_offset_cm.y};
    j["orientation"] = std::string(to_string(s.orientation));
    j["behavior_mix"] = s.behavior_mix;
    j["viewing_distance_cm"] = s.viewing_distance_cm;
    j["screen_cm"] = {s.screen_width_cm, s.screen_height_cm};
    j["noise"] = std::move(noise);
    j["segments"] = std::move(segs);
    return nlohmann::json::parse(j.dump());
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

}  // namespace

ScenarioScript script_from_json(const nlohmann::json& j) {
    reject_unknown(j,
                   {"seed", "session_id", "device_type", "duration_s", "frame_rate_hz", "camera_offset_cm", "orientation",
                    "behavior_mix", "viewing_distance_cm", "screen_cm", "noise", "segments"},
                   "script");
    ScenarioScript s;
    try {
        s.seed = j.value("seed", s.seed);
        s.session_id = j.value("session_id", s.session_id);
        if (j.contains("device_type")) s.device_type = parse_device_type(j["device_type"].get<std::string>());
        s.duration_s = j.value("duration_s", s.duration_s);
        s.frame_rate_hz = j.value("frame_rate_hz", s.frame_rate_hz);
        if (j.contains("camera_offset_cm"))
            s.camera_offset_cm = {j["camera_offset_cm"].at(0).get<double>(), j["camera_offset_cm"].at(1).get<double>()};
        if (j.contains("orientation")) s.orientation = parse_orientation(j["orientation"].get<std::string>());
        s.behavior_mix = j.value("behavior_mix", s.behavior_mix);
        s.viewing_distance_cm = j.value("viewing_distance_cm", s.viewing_distance_cm);
        if (j.contains("screen_cm")) {
            s.screen_width_cm = j["screen_cm"].at(0).get<double>();
            s.screen_height_cm = j["screen_cm"].at(1).get<double>();
        }
        if (j.contains("noise")) {
            const auto& nj = j["noise"];
            reject_unknown(nj,
                           {"gaze_noise_deg", "landmark_jitter", "gaze_gain", "gaze_bias_deg_x", "gaze_bias_deg_y",
                            "head_noise_deg", "quality_noise", "posture_jitter", "artifact_rate_hz", "blink_rate_hz"},
                           "script noise");
            auto& nz = s.noise;
            nz.gaze_noise_deg = nj.value("gaze_noise_deg", nz.gaze_noise_deg);
            nz.landmark_jitter = nj.value("landmark_jitter", nz.landmark_jitter);
            nz.gaze_gain = nj.value("gaze_gain", nz.gaze_gain);
            nz.gaze_bias_deg_x = nj.value("gaze_bias_deg_x", nz.gaze_bias_deg_x);
            nz.gaze_bias_deg_y = nj.value("gaze_bias_deg_y", nz.gaze_bias_deg_y);
            nz.head_noise_deg = nj.value("head_noise_deg", nz.head_noise_deg);
            nz.quality_noise = nj.value("quality_noise", nz.quality_noise);
            nz.posture_jitter = nj.value("posture_jitter", nz.posture_jitter);
            nz.artifact_rate_hz = nj.value("artifact_rate_hz", nz.artifact_rate_hz);
            nz.blink_rate_hz = nj.value("blink_rate_hz", nz.blink_rate_hz);
        }
        if (j.contains("segments")) {
            std::size_t idx = 0;
            for (const auto& sj : j["segments"]) {
                const std::string where = "segment " + std::to_string(idx++);
                reject_unknown(sj, {"kind", "start_s", "duration_s", "dot", "direction", "head_fraction"}, where);
                Segment seg;
                seg.kind = parse_segment_kind(sj.at("kind").get<std::string>());
                seg.start_s = sj.at("start_s").get<double>();
                seg.duration_s = sj.at("duration_s").get<double>();
                if (sj.contains("dot")) seg.dot = {sj["dot"].at(0).get<double>(), sj["dot"].at(1).get<double>()};
                if (sj.contains("direction")) seg.direction = parse_direction(sj["direction"].get<std::string>());
                seg.head_fraction = sj.value("head_fraction", seg.head_fraction);
                s.segments.push_back(seg);
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("script: ") + e.what());
    }
    return s;
}

}  // namespace attend
