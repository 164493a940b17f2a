#include "attend/drowsiness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "attend/error.hpp"

namespace attend {

bool refined_eye_closure(const FrameRecord& frame, double closure_gate, double au_gate) {
    if (!frame.face_detected_expr) return false;
    return frame.eye_closure >= closure_gate && frame.au_intensities[kAu12] < au_gate &&
           frame.au_intensities[kAu6] < au_gate;
}

std::vector<Event> closure_events(std::span<const std::uint8_t> flags, double frame_rate_hz, double min_duration_s) {
    return find_events(flags, frame_rate_hz, min_duration_s);
}

MouthAspect mouth_aspect_ratio(const FrameRecord& frame) {
    const auto& p = frame.mouth_points;
    const double height = std::hypot(p[upper_lip].x - p[lower_lip].x, p[upper_lip].y - p[lower_lip].y);
    const double width = std::hypot(p[left_corner].x - p[right_corner].x, p[left_corner].y - p[right_corner].y);
    if (!(width >= kMinMouthWidth)) return {};
    return {height / width, true};
}

std::array<double, kYawnFeatureCount> yawn_features(const FrameRecord& frame, const MouthAspect& mar) {
    std::array<double, kYawnFeatureCount> out{};
    out[0] = mar.ratio;
    for (std::size_t i = 0; i < kAuCount; ++i) out[i + 1] = frame.au_intensities[i];
    return out;
}

double yawn_probability(std::span<const double> features, const ml::BoostedEnsemble& model) {
    if (model.feature_count == 0) throw ArtifactError("yawn classifier is not trained");
    if (features.size() != kYawnFeatureCount)
        throw std::invalid_argument("yawn_probability: expected 21 features");
    return ml::predict_boosted(model, features);
}

Flags smooth_majority(std::span<const std::uint8_t> flags, std::size_t window) {
    const std::size_t n = flags.size();
    Flags out(n, 0);
    if (window <= 1) {
        out.assign(flags.begin(), flags.end());
        return out;
    }
    std::vector<std::size_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (flags[i] ? 1 : 0);
    const auto before = static_cast<std::ptrdiff_t>(window / 2);
    const auto size = static_cast<std::ptrdiff_t>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(i) - before;
        const auto lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, start));
        const auto hi = static_cast<std::size_t>(std::min(size, start + static_cast<std::ptrdiff_t>(window)));
        const std::size_t count = prefix[hi] - prefix[lo];
        out[i] = 2 * count > (hi - lo) ? 1 : 0;
    }
    return out;
}

Flags drowsiness_signal(const std::vector<Event>& closure, std::span<const std::uint8_t> yawn) {
    Flags out = distracting_frames(closure, yawn.size());
    for (std::size_t i = 0; i < yawn.size(); ++i) out[i] = (out[i] || yawn[i]) ? 1 : 0;
    return out;
}

DrowsinessResult detect_drowsiness(std::span<const FrameRecord> frames, double frame_rate_hz,
                                   const ml::BoostedEnsemble& yawn_model, const Config& config) {
    const std::size_t n = frames.size();
    DrowsinessResult r;
    r.closure.assign(n, 0);
    r.yawn_probability.assign(n, std::numeric_limits<double>::quiet_NaN());
    Flags raw_yawn(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = frames[i];
        r.closure[i] = refined_eye_closure(f, config.closure_gate, config.au_gate) ? 1 : 0;
        if (!f.face_detected_expr) continue;
        const auto mar = mouth_aspect_ratio(f);
        if (!mar.valid) continue;
        const auto features = yawn_features(f, mar);
        r.yawn_probability[i] = yawn_probability(features, yawn_model);
        raw_yawn[i] = r.yawn_probability[i] >= config.yawn_threshold ? 1 : 0;
    }
    r.closure_events = closure_events(r.closure, frame_rate_hz, config.closure_min_duration_s);
    const auto window = static_cast<std::size_t>(std::max(1LL, std::llround(config.yawn_smoothing_s * frame_rate_hz)));
    r.yawn = smooth_majority(raw_yawn, window);
    r.signal = drowsiness_signal(r.closure_events, r.yawn);
    return r;
}

void append_yawn_samples(std::span<const FrameRecord> frames, std::span<const FrameAnnotation> annotations,
                         YawnDataset& out) {
    std::unordered_map<std::uint64_t, const FrameAnnotation*> by_index;
    for (const auto& a : annotations) by_index[a.frame_index] = &a;
    for (const auto& f : frames) {
        if (!f.face_detected_expr) continue;
        const auto it = by_index.find(f.frame_index);
        if (it == by_index.end()) continue;
        const auto mar = mouth_aspect_ratio(f);
        if (!mar.valid) continue;
        const auto row = yawn_features(f, mar);
        out.features.push_row(row);
        out.labels.push_back(it->second->yawning ? 1.0 : 0.0);
    }
}

}  // namespace attend
