#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace attend {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

enum class DeviceType { desktop, mobile };

std::string_view to_string(DeviceType d);
DeviceType parse_device_type(std::string_view s);

/// Action units reported by the expression tracker, in file order.
inline constexpr std::array<std::string_view, 20> kAuNames = {
    "AU1",  "AU2",  "AU4",  "AU5",  "AU6",  "AU7",  "AU9",  "AU10", "AU12", "AU14",
    "AU15", "AU17", "AU18", "AU20", "AU23", "AU24", "AU25", "AU26", "AU28", "AU43"};

inline constexpr std::size_t kAuCount = kAuNames.size();
inline constexpr std::size_t kAu6 = 4;
inline constexpr std::size_t kAu12 = 8;
inline constexpr std::size_t kAu25 = 16;
inline constexpr std::size_t kAu26 = 17;
inline constexpr std::size_t kAu43 = 19;

/// Indices into FrameRecord::mouth_points.
enum MouthPoint : std::size_t { upper_lip = 0, lower_lip = 1, left_corner = 2, right_corner = 3 };

/// One tracker output frame.
///
/// Camera at the origin, X right, Y up, Z from the screen toward the
/// participant, so on-screen gaze has a negative z direction component.
/// Mouth points are in interocular units. When face_detected_gaze is false
/// the gaze fields hold sentinels and must be ignored.
struct FrameRecord {
    std::uint64_t frame_index = 0;
    double timestamp_ms = 0.0;
    Vec3 pupil_position_cm;
    Vec3 gaze_direction;
    double gaze_quality = 0.0;
    double head_yaw_deg = 0.0;
    double head_pitch_deg = 0.0;
    double head_roll_deg = 0.0;
    std::array<Point2, 4> mouth_points{};
    std::array<double, kAuCount> au_intensities{};
    double eye_closure = 0.0;
    bool face_detected_expr = false;
    bool face_detected_gaze = false;
    double face_center_x = 0.5;

    bool gaze_valid() const { return face_detected_gaze; }
};

struct SessionManifest {
    std::string session_id;
    DeviceType device_type = DeviceType::desktop;
    double frame_rate_hz = 30.0;
    std::string frame_source;
    std::optional<std::string> ground_truth;
    std::optional<std::pair<double, double>> screen_override_cm;
    /// Per-frame training labels written by the generator.
    std::optional<std::string> annotations;
};

}  // namespace attend
