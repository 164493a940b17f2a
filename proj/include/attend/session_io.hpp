#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "attend/frame.hpp"
#include "attend/timeline.hpp"

namespace attend {

/// Generator-side labels for one frame, used for training.
struct FrameAnnotation {
    std::uint64_t frame_index = 0;
    /// Dot position relative to the screen center (cm) while following a dot.
    std::optional<Point2> dot_cm;
    bool speaking = false;
    bool yawning = false;

    friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

/// Reads a manifest; relative paths inside it are resolved against the
/// manifest's directory.
SessionManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const SessionManifest& manifest, const std::filesystem::path& path);

/// Loads and validates the manifest's frame file. Frames come back sorted
/// by frame_index. Throws DataError naming the offending row.
std::vector<FrameRecord> load_session(const SessionManifest& manifest);
std::vector<FrameRecord> load_frames(const std::filesystem::path& path);
void write_frames(const std::vector<FrameRecord>& frames, const std::filesystem::path& path);

/// Range checks on a single record; throws DataError prefixed by `where`.
void validate_frame(const FrameRecord& frame, const std::string& where);

void write_timeline(const DistractionTimeline& timeline, const std::filesystem::path& path);
DistractionTimeline read_timeline(const std::filesystem::path& path);

void write_annotations(const std::vector<FrameAnnotation>& rows, const std::filesystem::path& path);
std::vector<FrameAnnotation> read_annotations(const std::filesystem::path& path);

}  // namespace attend
