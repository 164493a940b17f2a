#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "attend/frame.hpp"

namespace attend::test {

/// A face-visible frame looking straight at the camera from 60 cm.
inline FrameRecord basic_frame(std::uint64_t index, double fps = 30.0) {
    FrameRecord f;
    f.frame_index = index;
    f.timestamp_ms = static_cast<double>(index) * 1000.0 / fps;
    f.pupil_position_cm = {0.0, -10.0, 60.0};
    f.gaze_direction = {0.0, 10.0, -60.0};
    f.gaze_quality = 0.9;
    f.mouth_points = {Point2{0.0, 0.02}, Point2{0.0, -0.02}, Point2{-0.25, 0.0}, Point2{0.25, 0.0}};
    f.face_detected_expr = true;
    f.face_detected_gaze = true;
    return f;
}

inline std::vector<FrameRecord> basic_frames(std::size_t n, double fps = 30.0) {
    std::vector<FrameRecord> frames;
    for (std::size_t i = 0; i < n; ++i) frames.push_back(basic_frame(i, fps));
    return frames;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("attend_" + tag + "_" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace attend::test
