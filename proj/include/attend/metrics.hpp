#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "attend/timeline.hpp"

namespace attend {

/// Binary confusion counts with the inattentive class as positive. Rates
/// with a zero denominator are absent rather than zero.
struct ClassificationReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::optional<double> tpr;
    std::optional<double> tnr;
    std::optional<double> precision;
    /// sqrt(TPR * TNR); absent when either rate is.
    std::optional<double> g_mean;
    /// 2TP / (2TP + FP + FN); absent when there are no positives at all.
    std::optional<double> f1;
};

ClassificationReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

/// Throws std::invalid_argument on a length mismatch.
ClassificationReport frame_metrics(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);

/// Positive = inattentive. `truth_bits` restricts which ground-truth
/// signals count as positive (all by default).
ClassificationReport frame_metrics(const DistractionTimeline& predicted, const DistractionTimeline& truth,
                                   SignalMask truth_bits = 0x1f);

/// Micro aggregate: counts summed, then rates derived.
ClassificationReport micro_average(std::span<const ClassificationReport> reports);

/// Mean of per-report g_mean and f1 over reports where each is present.
struct MacroAverage {
    std::optional<double> g_mean;
    std::optional<double> f1;
    std::size_t count = 0;
};
MacroAverage macro_average(std::span<const ClassificationReport> reports);

/// Mann-Whitney estimate of P(score+ > score-) + P(tie)/2. Throws
/// std::invalid_argument when only one class is present or sizes differ.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Unweighted mean of per-class F1 over classes present in either input.
double macro_f1(std::span<const int> predicted, std::span<const int> truth);

nlohmann::json to_json(const ClassificationReport& r);

}  // namespace attend
