#include "attend/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace attend {

ClassificationReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    ClassificationReport r{tp, fp, tn, fn, {}, {}, {}, {}, {}};
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    if (tp + fn > 0) r.tpr = d(tp) / d(tp + fn);
    if (tn + fp > 0) r.tnr = d(tn) / d(tn + fp);
    if (tp + fp > 0) r.precision = d(tp) / d(tp + fp);
    if (r.tpr && r.tnr) r.g_mean = std::sqrt(*r.tpr * *r.tnr);
    if (2 * tp + fp + fn > 0) r.f1 = 2.0 * d(tp) / d(2 * tp + fp + fn);
    return r;
}

ClassificationReport frame_metrics(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("frame_metrics: length mismatch");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0, t = truth[i] != 0;
        tp += p && t;
        fp += p && !t;
        tn += !p && !t;
        fn += !p && t;
    }
    return report_from_counts(tp, fp, tn, fn);
}

ClassificationReport frame_metrics(const DistractionTimeline& predicted, const DistractionTimeline& truth,
                                   SignalMask truth_bits) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("frame_metrics: timeline length mismatch");
    std::vector<std::uint8_t> p(predicted.size()), t(truth.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = predicted.frames[i].attentive() ? 0 : 1;
        t[i] = (truth.frames[i].mask & truth_bits) != 0 ? 1 : 0;
    }
    return frame_metrics(p, t);
}

ClassificationReport micro_average(std::span<const ClassificationReport> reports) {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& r : reports) {
        tp += r.tp;
        fp += r.fp;
        tn += r.tn;
        fn += r.fn;
    }
    return report_from_counts(tp, fp, tn, fn);
}

MacroAverage macro_average(std::span<const ClassificationReport> reports) {
    MacroAverage m;
    m.count = reports.size();
    double g = 0.0, f = 0.0;
    std::size_t ng = 0, nf = 0;
    for (const auto& r : reports) {
        if (r.g_mean) g += *r.g_mean, ++ng;
        if (r.f1) f += *r.f1, ++nf;
    }
    if (ng > 0) m.g_mean = g / static_cast<double>(ng);
    if (nf > 0) m.f1 = f / static_cast<double>(nf);
    return m;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: size mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Sum of average ranks of the positives.
    double rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]]) {
                rank_sum += avg_rank;
                ++pos;
            }
        }
        i = j;
    }
    const std::size_t neg = scores.size() - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("roc_auc: both classes must be present");
    const double np = static_cast<double>(pos), nn = static_cast<double>(neg);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double macro_f1(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("macro_f1: size mismatch");
    if (predicted.empty()) throw std::invalid_argument("macro_f1: empty input");
    std::map<int, std::array<std::size_t, 3>> counts;  // tp, fp, fn
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == truth[i]) {
            ++counts[truth[i]][0];
        } else {
            ++counts[predicted[i]][1];
            ++counts[truth[i]][2];
        }
    }
    double sum = 0.0;
    for (const auto& [_, c] : counts)
        sum += 2.0 * static_cast<double>(c[0]) / static_cast<double>(2 * c[0] + c[1] + c[2]);
    return sum / static_cast<double>(counts.size());
}

nlohmann::json to_json(const ClassificationReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"tp", r.tp},           {"fp", r.fp},         {"tn", r.tn},
            {"fn", r.fn},           {"tpr", opt(r.tpr)},  {"tnr", opt(r.tnr)},
            {"precision", opt(r.precision)}, {"g_mean", opt(r.g_mean)}, {"f1", opt(r.f1)}};
}

}  // namespace attend
