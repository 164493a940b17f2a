#include "attend/fusion.hpp"

#include <stdexcept>

namespace attend {

Flags unattended_signal(std::span<const FrameRecord> frames, double frame_rate_hz, double min_duration_s) {
    Flags no_face(frames.size(), 0);
    for (std::size_t i = 0; i < frames.size(); ++i)
        no_face[i] = (!frames[i].face_detected_expr && !frames[i].face_detected_gaze) ? 1 : 0;
    return distracting_frames(find_events(no_face, frame_rate_hz, min_duration_s), frames.size());
}

DistractionTimeline fuse(const SignalFlags& signals, std::span<const FrameRecord> frames, double frame_rate_hz) {
    for (const auto& s : signals) {
        if (s.size() != frames.size()) throw std::invalid_argument("fuse: signal length does not match frame count");
    }
    DistractionTimeline t;
    t.frame_rate_hz = frame_rate_hz;
    t.frames.resize(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        SignalMask mask = 0;
        for (std::size_t s = 0; s < kSignalCount; ++s) {
            if (signals[s][i]) mask |= static_cast<SignalMask>(1u << s);
        }
        t.frames[i] = {frames[i].frame_index, frames[i].timestamp_ms, mask};
    }
    return t;
}

namespace {

std::vector<SummaryEvent> runs(const DistractionTimeline& t, auto&& active) {
    std::vector<SummaryEvent> out;
    const std::size_t n = t.size();
    std::size_t i = 0;
    while (i < n) {
        if (!active(t.frames[i])) {
            ++i;
            continue;
        }
        SummaryEvent e;
        e.begin_frame = i;
        while (i < n && active(t.frames[i])) ++i;
        e.end_frame = i;
        e.duration_s = static_cast<double>(e.end_frame - e.begin_frame) / t.frame_rate_hz;
        e.start_ms = t.frames[e.begin_frame].timestamp_ms;
        e.end_ms = e.start_ms + e.duration_s * 1000.0;
        out.push_back(e);
    }
    return out;
}

nlohmann::json events_json(const std::vector<SummaryEvent>& events) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : events) {
        arr.push_back({{"begin_frame", e.begin_frame},
                       {"end_frame", e.end_frame},
                       {"start_ms", e.start_ms},
                       {"end_ms", e.end_ms},
                       {"duration_s", e.duration_s}});
    }
    return arr;
}

}  // namespace

SessionSummary session_summary(const DistractionTimeline& timeline) {
    if (timeline.empty()) throw std::invalid_argument("session_summary: empty timeline");
    SessionSummary s;
    s.frame_count = timeline.size();
    for (const auto& f : timeline.frames) s.inattentive_frames += f.attentive() ? 0 : 1;
    s.inattentive_percent = 100.0 * static_cast<double>(s.inattentive_frames) / static_cast<double>(s.frame_count);
    for (std::size_t k = 0; k < kSignalCount; ++k) {
        const auto sig = static_cast<Signal>(k);
        s.source_events[k] = runs(timeline, [sig](const TimelineFrame& f) { return f.has(sig); });
    }
    s.inattentive_events = runs(timeline, [](const TimelineFrame& f) { return !f.attentive(); });
    return s;
}

nlohmann::json to_json(const SessionSummary& s) {
    nlohmann::json sources = nlohmann::json::object();
    for (std::size_t k = 0; k < kSignalCount; ++k) sources[std::string(kSignalNames[k])] = events_json(s.source_events[k]);
    return {{"frame_count", s.frame_count},
            {"inattentive_frames", s.inattentive_frames},
            {"inattentive_percent", s.inattentive_percent},
            {"inattentive_events", events_json(s.inattentive_events)},
            {"source_events", sources}};
}

}  // namespace attend
