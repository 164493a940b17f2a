#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attend/frame.hpp"
#include "attend/gaze_model.hpp"
#include "attend/session_io.hpp"
#include "attend/timeline.hpp"

namespace attend {

enum class SegmentKind { dot, off_screen, speak, yawn, close_eyes, leave, laugh };
enum class Direction { up, down, left, right };

std::string_view to_string(SegmentKind k);
SegmentKind parse_segment_kind(std::string_view s);
std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

/// One scripted interval. Time outside every segment is free viewing of
/// the screen.
struct Segment {
    SegmentKind kind = SegmentKind::dot;
    double start_s = 0.0;
    double duration_s = 1.0;
    /// dot: position as a fraction of the screen half-extents, in [-1, 1].
    Point2 dot;
    /// off_screen: where the target lies.
    Direction direction = Direction::left;
    /// off_screen: share of the gaze angle carried by the head (owl near 1,
    /// lizard near 0). Negative means use the script's behavior_mix.
    double head_fraction = -1.0;
};

struct NoiseModel {
    double gaze_noise_deg = 0.8;
    double landmark_jitter = 0.01;
    /// Multiplicative error of the tracker's eye-in-head angles.
    double gaze_gain = 1.2;
    /// Constant angular error per axis (deg).
    double gaze_bias_deg_x = 0.0;
    double gaze_bias_deg_y = 0.0;
    double head_noise_deg = 1.0;
    double quality_noise = 0.03;
    /// Spread of the mobile posture cues used by orientation detection.
    double posture_jitter = 1.0;
    /// Rate per second of short tracker artifacts (low-quality bursts,
    /// single-tracker dropouts, brief dual dropouts, blinks).
    double artifact_rate_hz = 0.05;
    double blink_rate_hz = 0.25;

    static NoiseModel clean();
};

struct ScenarioScript {
    std::uint64_t seed = 1;
    std::string session_id = "session";
    DeviceType device_type = DeviceType::desktop;
    double duration_s = 160.0;
    double frame_rate_hz = 30.0;
    std::vector<Segment> segments;
    /// Webcam displacement within the screen plane (desktop).
    Point2 camera_offset_cm;
    /// Mobile handset orientation.
    Orientation orientation = Orientation::centered;
    /// Default head_fraction for off-screen segments.
    double behavior_mix = 0.5;
    /// Eye-to-screen distance (cm).
    double viewing_distance_cm = 60.0;
    /// True screen extents; zero means derive from the device defaults.
    double screen_width_cm = 0.0;
    double screen_height_cm = 0.0;
    NoiseModel noise;
};

/// Throws ConfigError listing the offending segment indices when segments
/// overlap or leave the session.
void validate_script(const ScenarioScript& script);

struct GeneratedSession {
    ScenarioScript script;
    SessionManifest manifest;
    std::vector<FrameRecord> frames;
    DistractionTimeline truth;
    std::vector<FrameAnnotation> annotations;
    /// World position of the scripted gaze target relative to the camera,
    /// per frame (cm); NaN while the face is absent.
    std::vector<Point2> target_cm;
    std::string split;
};

GeneratedSession generate(const ScenarioScript& script);

/// Which distractors a generated script contains.
struct ScriptOptions {
    bool off_screen = true;
    bool speak = true;
    bool yawn = true;
    bool close_eyes = true;
    bool leave = true;
    bool laugh = true;
    bool clean = false;
    double duration_s = 160.0;
    /// Webcam displacement radius is drawn from [0.5, 1] times this (desktop).
    double max_camera_offset_cm = 0.0;
    /// Share of frames spent yawning.
    double yawn_prevalence = 0.026;
    /// Number of dot positions in the calibration protocol.
    std::size_t dots = 16;
};

/// A randomized protocol session: dots, off-screen glances in all four
/// directions, and the enabled distractors at random times.
ScenarioScript make_script(std::uint64_t seed, DeviceType device, const ScriptOptions& options);

struct SuiteConfig {
    std::uint64_t seed = 7;
    std::size_t train_desktop = 4;
    std::size_t train_mobile = 4;
    std::size_t test_desktop = 4;
    std::size_t test_mobile = 4;
    ScriptOptions options;
};

/// Named presets: "default", "small", "gaze", "offset", "clean".
SuiteConfig suite_preset(std::string_view name, std::uint64_t seed);

/// Sessions in a fixed order: training split first, then held-out.
std::vector<GeneratedSession> generate_suite(const SuiteConfig& config);

/// Writes <dir>/<session_id>/{frames.jsonl, truth.tsv, annotations.tsv,
/// manifest.json} plus <dir>/suite.json listing every session.
void write_suite(const std::vector<GeneratedSession>& sessions, const std::filesystem::path& dir);

nlohmann::json to_json(const ScenarioScript& script);
ScenarioScript script_from_json(const nlohmann::json& j);

}  // namespace attend
