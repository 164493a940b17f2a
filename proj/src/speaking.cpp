#include "attend/speaking.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "attend/error.hpp"

namespace attend {

std::optional<double> lip_distance(const FrameRecord& frame) {
    if (!frame.face_detected_expr) return std::nullopt;
    const auto& up = frame.mouth_points[upper_lip];
    const auto& low = frame.mouth_points[lower_lip];
    return std::hypot(up.x - low.x, up.y - low.y);
}

std::vector<std::optional<LipWindow>> build_lip_windows(std::span<const FrameRecord> frames) {
    std::vector<std::optional<LipWindow>> out(frames.size());
    if (frames.empty()) return out;

    const double step_ms = 1000.0 / kLipSampleRateHz;
    const double t0 = frames.front().timestamp_ms;
    const double span_ms = frames.back().timestamp_ms - t0;
    const auto grid_size = static_cast<std::size_t>(std::floor(span_ms / step_ms + 1e-9)) + 1;

    std::vector<std::optional<double>> dist(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) dist[i] = lip_distance(frames[i]);

    // Resample onto the 30 Hz grid; interpolation needs both neighbours.
    std::vector<double> value(grid_size, 0.0);
    std::vector<std::uint8_t> observed(grid_size, 0), filled(grid_size, 0);
    constexpr double kSnapMs = 1e-6;
    std::size_t k = 0;
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double t = t0 + static_cast<double>(j) * step_ms;
        while (k + 1 < frames.size() && frames[k + 1].timestamp_ms <= t + kSnapMs) ++k;
        if (std::abs(frames[k].timestamp_ms - t) <= kSnapMs) {
            if (dist[k]) {
                value[j] = *dist[k];
                observed[j] = 1;
            }
        } else if (k + 1 < frames.size() && dist[k] && dist[k + 1]) {
            const double ta = frames[k].timestamp_ms, tb = frames[k + 1].timestamp_ms;
            const double w = (t - ta) / (tb - ta);
            value[j] = *dist[k] + w * (*dist[k + 1] - *dist[k]);
            observed[j] = 1;
        }
    }

    // Hold the last observed value across short gaps.
    std::size_t held = 0;
    bool have_last = false;
    double last = 0.0;
    for (std::size_t j = 0; j < grid_size; ++j) {
        if (observed[j]) {
            filled[j] = 1;
            last = value[j];
            have_last = true;
            held = 0;
        } else if (have_last && held < kMaxHeldSamples) {
            value[j] = last;
            filled[j] = 1;
            ++held;
        } else {
            have_last = false;
        }
    }

    const auto half = static_cast<std::ptrdiff_t>(kLipWindowSamples / 2);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!dist[i]) continue;
        const auto c = static_cast<std::ptrdiff_t>(std::llround((frames[i].timestamp_ms - t0) / step_ms));
        const std::ptrdiff_t begin = c - half;
        const std::ptrdiff_t end = begin + static_cast<std::ptrdiff_t>(kLipWindowSamples);
        if (begin < 0 || end > static_cast<std::ptrdiff_t>(grid_size)) continue;
        std::size_t n_observed = 0;
        bool complete = true;
        LipWindow w;
        w.center_frame = i;
        for (std::ptrdiff_t j = begin; j < end; ++j) {
            const auto u = static_cast<std::size_t>(j);
            if (!filled[u]) {
                complete = false;
                break;
            }
            n_observed += observed[u];
            w.samples[static_cast<std::size_t>(j - begin)] = value[u];
        }
        if (complete && n_observed >= kMinObservedSamples) out[i] = w;
    }
    return out;
}

std::vector<double> window_features(const LipWindow& window) {
    double mean = 0.0;
    for (double v : window.samples) mean += v;
    mean /= static_cast<double>(kLipWindowSamples);
    std::vector<double> out(kLipWindowSamples);
    for (std::size_t i = 0; i < kLipWindowSamples; ++i) out[i] = (window.samples[i] - mean) * 10.0;
    return out;
}

double speaking_probability(const LipWindow& window, const ml::TemporalCnn& net) {
    if (net.input_length() != kLipWindowSamples) throw ArtifactError("speaking model is missing or has the wrong input length");
    return net.predict(window_features(window));
}

std::vector<Event> speaking_events(std::span<const std::uint8_t> flags, double frame_rate_hz, double min_duration_s) {
    return find_events(flags, frame_rate_hz, min_duration_s);
}

SpeakingResult detect_speaking(std::span<const FrameRecord> frames, double frame_rate_hz, const ml::TemporalCnn& net,
                               const Config& config) {
    const std::size_t n = frames.size();
    SpeakingResult r;
    r.probability.assign(n, std::numeric_limits<double>::quiet_NaN());
    r.speaking.assign(n, 0);
    const auto windows = build_lip_windows(frames);
    std::vector<std::uint8_t> scored(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!windows[i]) continue;
        r.probability[i] = speaking_probability(*windows[i], net);
        r.speaking[i] = r.probability[i] >= config.speaking_threshold ? 1 : 0;
        scored[i] = 1;
    }

    // Unscored face frames take the flag of the nearest scored frame (earlier wins ties).
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> prev(n, kNone), next(n, kNone);
    for (std::size_t i = 0, last = kNone; i < n; ++i) {
        if (scored[i]) last = i;
        prev[i] = last;
    }
    for (std::size_t i = n, last = kNone; i-- > 0;) {
        if (scored[i]) last = i;
        next[i] = last;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (scored[i] || !frames[i].face_detected_expr) continue;
        std::size_t src = kNone;
        if (prev[i] != kNone && next[i] != kNone)
            src = (i - prev[i] <= next[i] - i) ? prev[i] : next[i];
        else
            src = prev[i] != kNone ? prev[i] : next[i];
        if (src != kNone) r.speaking[i] = r.speaking[src];
    }

    r.events = speaking_events(r.speaking, frame_rate_hz, config.speaking_min_duration_s);
    r.distracting = distracting_frames(r.events, n);
    return r;
}

LabeledWindows labeled_speaking_windows(std::span<const FrameRecord> frames,
                                        std::span<const FrameAnnotation> annotations) {
    std::unordered_map<std::uint64_t, const FrameAnnotation*> by_index;
    for (const auto& a : annotations) by_index[a.frame_index] = &a;
    LabeledWindows out;
    const auto windows = build_lip_windows(frames);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (!windows[i]) continue;
        const auto it = by_index.find(frames[i].frame_index);
        if (it == by_index.end()) continue;
        out.features.push_back(window_features(*windows[i]));
        out.labels.push_back(it->second->speaking ? 1.0 : 0.0);
        out.yawning.push_back(it->second->yawning ? 1 : 0);
    }
    return out;
}

}  // namespace attend
