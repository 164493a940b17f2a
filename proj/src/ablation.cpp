#include "attend/ablation.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "attend/drowsiness.hpp"
#include "attend/error.hpp"
#include "attend/parallel.hpp"
#include "attend/speaking.hpp"

namespace attend {

namespace {

PipelineOptions only(std::initializer_list<Signal> signals) {
    PipelineOptions o;
    o.enabled.fill(false);
    for (auto s : signals) o.enabled[static_cast<std::size_t>(s)] = true;
    return o;
}

}  // namespace

AblationVariant gaze_full_variant() {
    AblationVariant v;
    v.name = "full model";
    v.options = only({Signal::gaze_eye, Signal::gaze_head});
    v.truth_bits = bit(Signal::gaze_eye);
    return v;
}

std::vector<AblationVariant> gaze_ablation_variants() {
    auto no_norm = gaze_full_variant();
    no_norm.name = "w/o normalization";
    no_norm.options.normalize = false;
    auto no_ft = gaze_full_variant();
    no_ft.name = "w/o fine-tuning";
    no_ft.options.fine_tune = false;
    auto no_size = gaze_full_variant();
    no_size.name = "w/o screen size";
    no_size.options.screen_size_detection = false;
    no_size.desktop_only = true;
    return {no_norm, no_ft, no_size};
}

AblationVariant signals_full_variant() {
    AblationVariant v;
    v.name = "+ unattended";
    return v;
}

std::vector<AblationVariant> signal_ablation_variants() {
    AblationVariant head{"head only", only({Signal::gaze_head}), false, 0x1f};
    head.options.eye_gaze_model = false;
    AblationVariant gaze{"+ gaze", only({Signal::gaze_eye, Signal::gaze_head}), false, 0x1f};
    AblationVariant drowsy{"+ drowsiness", only({Signal::gaze_eye, Signal::gaze_head, Signal::drowsiness}), false, 0x1f};
    AblationVariant speak{
        "+ speaking", only({Signal::gaze_eye, Signal::gaze_head, Signal::drowsiness, Signal::speaking}), false, 0x1f};
    return {head, gaze, drowsy, speak};
}

const AblationRow& AblationTable::row(const std::string& variant, DeviceType device) const {
    for (const auto& r : rows) {
        if (r.variant == variant && r.device == device) return r;
    }
    throw std::out_of_range("no ablation row '" + variant + "' for " + std::string(to_string(device)));
}

AblationTable run_ablation(std::span<const EvalSession> sessions, const ModelBundle& models, const Config& config,
                           const AblationVariant& full, std::span<const AblationVariant> variants, std::string title,
                           std::size_t jobs, FullRow placement) {
    std::vector<AblationVariant> all(variants.begin(), variants.end());
    all.insert(placement == FullRow::first ? all.begin() : all.end(), full);
    const std::size_t nv = all.size(), ns = sessions.size();
    std::vector<std::optional<ClassificationReport>> reports(nv * ns);
    parallel_for(ns, jobs, [&](std::size_t s) {
        const auto& session = sessions[s];
        for (std::size_t v = 0; v < nv; ++v) {
            if (all[v].desktop_only && session.manifest.device_type != DeviceType::desktop) continue;
            const auto scored = score_session(session.manifest, session.frames, models, config, all[v].options);
            reports[v * ns + s] = frame_metrics(scored.timeline, session.truth, all[v].truth_bits);
        }
    });
    AblationTable table;
    table.title = std::move(title);
    for (auto device : {DeviceType::desktop, DeviceType::mobile}) {
        for (std::size_t v = 0; v < nv; ++v) {
            std::vector<ClassificationReport> picked;
            for (std::size_t s = 0; s < ns; ++s) {
                if (sessions[s].manifest.device_type == device && reports[v * ns + s]) picked.push_back(*reports[v * ns + s]);
            }
            if (picked.empty()) continue;
            table.rows.push_back({all[v].name, device, picked.size(), micro_average(picked), macro_average(picked)});
        }
    }
    return table;
}

namespace {

std::string fmt(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

}  // namespace

std::string render_table(const AblationTable& table, bool macro) {
    std::size_t name_w = 7;
    for (const auto& r : table.rows) name_w = std::max(name_w, r.variant.size());
    std::ostringstream out;
    out << table.title << (macro ? " (macro over sessions)" : " (micro over frames)") << '\n';
    char line[256];
    std::snprintf(line, sizeof line, "%-8s  %-*s  %8s  %6s  %6s\n", "device", static_cast<int>(name_w), "variant",
                  "sessions", "g_mean", "f1");
    out << line;
    for (const auto& r : table.rows) {
        const auto g = macro ? r.macro.g_mean : r.micro.g_mean;
        const auto f = macro ? r.macro.f1 : r.micro.f1;
        std::snprintf(line, sizeof line, "%-8s  %-*s  %8zu  %6s  %6s\n", std::string(to_string(r.device)).c_str(),
                      static_cast<int>(name_w), r.variant.c_str(), r.sessions, fmt(g).c_str(), fmt(f).c_str());
        out << line;
    }
    return out.str();
}

nlohmann::json to_json(const AblationTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    for (const auto& r : table.rows) {
        rows.push_back({{"variant", r.variant},
                        {"device_type", std::string(to_string(r.device))},
                        {"sessions", r.sessions},
                        {"micro", to_json(r.micro)},
                        {"macro", {{"g_mean", opt(r.macro.g_mean)}, {"f1", opt(r.macro.f1)}}}});
    }
    return {{"title", table.title}, {"rows", rows}};
}

DetectorReport detector_report(std::span<const EvalSession> sessions, const ModelBundle& models, const Config& config) {
    DetectorReport rep;
    if (models.speaking) {
        std::vector<double> scores;
        std::vector<std::uint8_t> labels;
        for (const auto& s : sessions) {
            const auto w = labeled_speaking_windows(s.frames, s.annotations);
            for (std::size_t i = 0; i < w.features.size(); ++i) {
                scores.push_back(models.speaking->predict(w.features[i]));
                labels.push_back(w.labels[i] > 0.5 ? 1 : 0);
            }
        }
        rep.speaking_windows = scores.size();
        try {
            rep.speaking_auc = roc_auc(scores, labels);
        } catch (const std::invalid_argument&) {
        }
    }
    if (models.yawn) {
        YawnDataset d;
        for (const auto& s : sessions) append_yawn_samples(s.frames, s.annotations, d);
        std::vector<double> scores(d.labels.size());
        std::vector<std::uint8_t> labels(d.labels.size());
        for (std::size_t i = 0; i < d.labels.size(); ++i) {
            scores[i] = yawn_probability(d.features.row(i), *models.yawn);
            labels[i] = d.labels[i] > 0.5 ? 1 : 0;
        }
        rep.yawn_frames = scores.size();
        try {
            rep.yawn_auc = roc_auc(scores, labels);
        } catch (const std::invalid_argument&) {
        }
    }
    std::vector<int> predicted, truth;
    for (const auto& s : sessions) {
        if (s.manifest.device_type != DeviceType::mobile || !s.true_orientation) continue;
        try {
            const auto stats = compute_session_stats(s.frames, config.quality_floor);
            predicted.push_back(static_cast<int>(detect_orientation(stats, config)));
        } catch (const DataError&) {
            predicted.push_back(static_cast<int>(Orientation::centered));
        }
        truth.push_back(static_cast<int>(*s.true_orientation));
    }
    rep.mobile_sessions = truth.size();
    if (!truth.empty()) rep.orientation_macro_f1 = macro_f1(predicted, truth);
    return rep;
}

nlohmann::json to_json(const DetectorReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"speaking_auc", opt(r.speaking_auc)},
            {"speaking_windows", r.speaking_windows},
            {"yawn_auc", opt(r.yawn_auc)},
            {"yawn_frames", r.yawn_frames},
            {"orientation_macro_f1", opt(r.orientation_macro_f1)},
            {"mobile_sessions", r.mobile_sessions}};
}

}  // namespace attend
