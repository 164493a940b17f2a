#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "attend/config.hpp"
#include "attend/frame.hpp"
#include "attend/gaze_model.hpp"
#include "attend/metrics.hpp"
#include "attend/pipeline.hpp"
#include "attend/session_io.hpp"

namespace attend {

/// A session with ground truth, ready for scoring.
struct EvalSession {
    SessionManifest manifest;
    std::vector<FrameRecord> frames;
    DistractionTimeline truth;
    std::vector<FrameAnnotation> annotations;
    std::optional<Orientation> true_orientation;
};

struct AblationVariant {
    std::string name;
    PipelineOptions options;
    bool desktop_only = false;
    /// Ground-truth signals that count as inattentive for this comparison.
    SignalMask truth_bits = 0x1f;
};

/// Gaze model with every processing step, scored against off-screen truth.
AblationVariant gaze_full_variant();
/// Without normalization, without fine-tuning, without screen-size detection.
std::vector<AblationVariant> gaze_ablation_variants();

/// All five signals.
AblationVariant signals_full_variant();
/// Head only, then adding eye gaze, drowsiness and speaking in turn; the
/// full variant completes the sequence with the unattended signal.
std::vector<AblationVariant> signal_ablation_variants();

struct AblationRow {
    std::string variant;
    DeviceType device = DeviceType::desktop;
    std::size_t sessions = 0;
    ClassificationReport micro;
    MacroAverage macro;
};

struct AblationTable {
    std::string title;
    std::vector<AblationRow> rows;

    /// Throws std::out_of_range when absent.
    const AblationRow& row(const std::string& variant, DeviceType device) const;
};

enum class FullRow { first, last };

/// Scores the full model and each variant on the same sessions, one row
/// per variant and device type present.
AblationTable run_ablation(std::span<const EvalSession> sessions, const ModelBundle& models, const Config& config,
                           const AblationVariant& full, std::span<const AblationVariant> variants, std::string title,
                           std::size_t jobs = 1, FullRow placement = FullRow::first);

/// Aligned plain-text table; `macro` selects per-session averages.
std::string render_table(const AblationTable& table, bool macro = false);

nlohmann::json to_json(const AblationTable& table);

/// Held-out quality of the individual detectors.
struct DetectorReport {
    std::optional<double> speaking_auc;
    std::optional<double> yawn_auc;
    std::optional<double> orientation_macro_f1;
    std::size_t speaking_windows = 0;
    std::size_t yawn_frames = 0;
    std::size_t mobile_sessions = 0;
};

DetectorReport detector_report(std::span<const EvalSession> sessions, const ModelBundle& models, const Config& config);

nlohmann::json to_json(const DetectorReport& report);

}  // namespace attend
