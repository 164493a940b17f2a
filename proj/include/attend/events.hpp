#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace attend {

/// Per-frame boolean signal (one byte per frame).
using Flags = std::vector<std::uint8_t>;

/// A maximal run of set frames [begin, end).
struct Event {
    std::size_t begin = 0;
    std::size_t end = 0;
    double duration_s = 0.0;
    bool distracting = false;

    std::size_t length() const { return end - begin; }
};

/// Maximal runs of set flags. Duration is frame count / frame_rate; a run is
/// distracting only when its duration strictly exceeds min_duration_s.
std::vector<Event> find_events(std::span<const std::uint8_t> flags, double frame_rate_hz, double min_duration_s);

/// Flags covering the frames of distracting events.
Flags distracting_frames(const std::vector<Event>& events, std::size_t frame_count);

}  // namespace attend
