#include "attend/events.hpp"

#include <stdexcept>

namespace attend {

std::vector<Event> find_events(std::span<const std::uint8_t> flags, double frame_rate_hz, double min_duration_s) {
    if (!(frame_rate_hz > 0.0)) throw std::invalid_argument("frame rate must be positive");
    std::vector<Event> events;
    std::size_t i = 0;
    while (i < flags.size()) {
        if (!flags[i]) {
            ++i;
            continue;
        }
        Event e;
        e.begin = i;
        while (i < flags.size() && flags[i]) ++i;
        e.end = i;
        e.duration_s = static_cast<double>(e.length()) / frame_rate_hz;
        e.distracting = e.duration_s > min_duration_s;
        events.push_back(e);
    }
    return events;
}

Flags distracting_frames(const std::vector<Event>& events, std::size_t frame_count) {
    Flags out(frame_count, 0);
    for (const auto& e : events) {
        if (!e.distracting) continue;
        for (std::size_t i = e.begin; i < e.end && i < frame_count; ++i) out[i] = 1;
    }
    return out;
}

}  // namespace attend
