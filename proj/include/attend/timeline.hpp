#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace attend {

/// The five distraction signals, in mask bit order.
enum class Signal : std::uint8_t { gaze_eye = 0, gaze_head = 1, speaking = 2, drowsiness = 3, unattended = 4 };

inline constexpr std::size_t kSignalCount = 5;
inline constexpr std::array<std::string_view, kSignalCount> kSignalNames = {
    "gaze_eye", "gaze_head", "speaking", "drowsiness", "unattended"};

using SignalMask = std::uint8_t;

constexpr SignalMask bit(Signal s) { return static_cast<SignalMask>(1u << static_cast<unsigned>(s)); }

/// Comma-joined names of the set bits, or "-" when none are set.
std::string mask_names(SignalMask mask);

struct TimelineFrame {
    std::uint64_t frame_index = 0;
    double timestamp_ms = 0.0;
    SignalMask mask = 0;

    bool attentive() const { return mask == 0; }
    bool has(Signal s) const { return (mask & bit(s)) != 0; }

    friend bool operator==(const TimelineFrame&, const TimelineFrame&) = default;
};

/// Per-frame distraction attribution for one session.
struct DistractionTimeline {
    double frame_rate_hz = 30.0;
    std::vector<TimelineFrame> frames;

    std::size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }

    friend bool operator==(const DistractionTimeline&, const DistractionTimeline&) = default;
};

}  // namespace attend
