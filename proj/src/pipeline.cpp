#include "attend/pipeline.hpp"

#include "attend/error.hpp"
#include "attend/geometry.hpp"

namespace attend {

namespace {

bool enabled(const PipelineOptions& o, Signal s) { return o.enabled[static_cast<std::size_t>(s)]; }

Flags& slot(SignalFlags& signals, Signal s) { return signals[static_cast<std::size_t>(s)]; }

}  // namespace

ScoredSession score_session(const SessionManifest& manifest, std::span<const FrameRecord> frames,
                            const ModelBundle& models, const Config& config, const PipelineOptions& options) {
    const std::size_t n = frames.size();
    const double fps = manifest.frame_rate_hz;
    ScoredSession out;
    for (auto& s : out.signals) s.assign(n, 0);

    const bool want_eye = enabled(options, Signal::gaze_eye) && options.eye_gaze_model;
    const bool want_head = enabled(options, Signal::gaze_head);
    const GazeRegressor* regressor = nullptr;
    if (want_eye && options.fine_tune) {
        const auto& r = models.gaze_for(manifest.device_type);
        if (!r) throw ArtifactError(std::string("missing gaze regressor for ") + std::string(to_string(manifest.device_type)));
        regressor = &*r;
    }

    // Pass 1: session statistics.
    if (want_eye) {
        try {
            out.gaze_stats = compute_session_stats(frames, config.quality_floor);
        } catch (const DataError&) {
            out.gaze_stats.reset();
        }
    }
    if (out.gaze_stats) {
        const auto& stats = *out.gaze_stats;
        if (manifest.device_type == DeviceType::mobile) out.orientation = detect_orientation(stats, config);
        auto override_cm = manifest.screen_override_cm;
        if (!override_cm && !options.screen_size_detection && manifest.device_type == DeviceType::desktop)
            override_cm = std::make_pair(config.default_desktop_width_cm, config.default_desktop_height_cm);
        out.screen = estimate_screen(stats, manifest.device_type, out.orientation, override_cm, config);
    }
    const HeadPoseStats head_stats = compute_head_stats(frames);
    const HeadThresholds thresholds{config.head_yaw_threshold_deg, config.head_pitch_threshold_deg};

    // Pass 2: per-frame gaze decision, eye model or head fallback.
    out.gaze_source.assign(n, GazeSource::head_pose);
    const ScreenPoint anchor =
        out.screen ? assumed_screen_center(manifest.device_type, *out.screen, config) : ScreenPoint{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = frames[i];
        const bool eye = out.screen && select_gaze_source(f, config.quality_gate) == GazeSource::eye_gaze;
        if (eye) {
            out.gaze_source[i] = GazeSource::eye_gaze;
            const auto hit = intersect_gaze(f.pupil_position_cm, f.gaze_direction);
            bool on = false;
            if (hit.status == RayStatus::toward_plane) {
                ScreenPoint p = options.normalize ? normalize_gaze(hit.point, *out.gaze_stats)
                                                  : ScreenPoint{hit.point.x - anchor.x, hit.point.y - anchor.y};
                if (regressor) p = fine_tune(p, *regressor);
                on = gaze_on_screen(p, *out.screen);
            }
            slot(out.signals, Signal::gaze_eye)[i] = on ? 0 : 1;
        } else if (want_head && f.face_detected_expr) {
            slot(out.signals, Signal::gaze_head)[i] = head_off_screen(f, head_stats, thresholds) ? 1 : 0;
        }
    }

    if (enabled(options, Signal::speaking)) {
        if (!models.speaking) throw ArtifactError("missing speaking model");
        auto r = detect_speaking(frames, fps, *models.speaking, config);
        slot(out.signals, Signal::speaking) = std::move(r.distracting);
        out.speaking_probability = std::move(r.probability);
    }
    if (enabled(options, Signal::drowsiness)) {
        if (!models.yawn) throw ArtifactError("missing yawn model");
        auto r = detect_drowsiness(frames, fps, *models.yawn, config);
        slot(out.signals, Signal::drowsiness) = std::move(r.signal);
        out.yawn_probability = std::move(r.yawn_probability);
    }
    if (enabled(options, Signal::unattended))
        slot(out.signals, Signal::unattended) = unattended_signal(frames, fps, config.unattended_min_duration_s);

    out.timeline = fuse(out.signals, frames, fps);
    return out;
}

}  // namespace attend
