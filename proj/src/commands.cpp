#include "attend/commands.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "attend/ablation.hpp"
#include "attend/error.hpp"
#include "attend/fusion.hpp"
#include "attend/metrics.hpp"
#include "attend/parallel.hpp"
#include "attend/pipeline.hpp"
#include "attend/session_io.hpp"
#include "attend/synth.hpp"
#include "attend/training.hpp"

namespace attend {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

EvalSession load_eval_session(const SessionRef& ref) {
    EvalSession s;
    s.manifest = load_manifest(ref.manifest);
    if (!s.manifest.ground_truth) throw DataError("no ground truth for session " + s.manifest.session_id);
    s.frames = load_session(s.manifest);
    s.truth = read_timeline(*s.manifest.ground_truth);
    if (s.truth.size() != s.frames.size())
        throw DataError("ground truth length does not match frames for session " + s.manifest.session_id);
    if (s.manifest.annotations) s.annotations = read_annotations(*s.manifest.annotations);
    s.true_orientation = ref.true_orientation;
    return s;
}

std::string fmt3(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

}  // namespace

Config resolve_config(const GlobalOptions& global) {
    Config c;
    if (global.config_file) apply_config_file(c, *global.config_file);
    for (const auto& o : global.overrides) apply_override(c, o);
    validate_config(c);
    return c;
}

std::vector<SessionRef> find_sessions(const std::vector<fs::path>& inputs, const std::string& split) {
    std::vector<SessionRef> out;
    for (const auto& input : inputs) {
        if (fs::is_directory(input) && fs::exists(input / "suite.json")) {
            const auto index = read_json(input / "suite.json");
            try {
                for (const auto& e : index.at("sessions")) {
                    const auto s = e.at("split").get<std::string>();
                    if (split != "all" && s != split) continue;
                    SessionRef ref{input / e.at("manifest").get<std::string>(), s, std::nullopt};
                    if (e.contains("orientation")) ref.true_orientation = parse_orientation(e["orientation"].get<std::string>());
                    out.push_back(std::move(ref));
                }
            } catch (const DataError&) {
                throw;
            } catch (const std::exception& e) {
                throw DataError((input / "suite.json").string() + ": " + e.what());
            }
        } else if (fs::is_directory(input) && fs::exists(input / "manifest.json")) {
            out.push_back({input / "manifest.json", "", std::nullopt});
        } else if (fs::is_regular_file(input)) {
            out.push_back({input, "", std::nullopt});
        } else {
            throw DataError("input not found: " + input.string());
        }
    }
    if (out.empty()) throw DataError("no sessions found for split '" + split + "'");
    return out;
}

int cmd_simulate(const GlobalOptions& global, const SimulateOptions& options, std::ostream& log) {
    resolve_config(global);
    std::vector<GeneratedSession> sessions;
    if (options.script) {
        std::ifstream in(*options.script, std::ios::binary);
        if (!in) throw ConfigError("cannot open script " + options.script->string());
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const std::exception& e) {
            throw ConfigError(options.script->string() + ": " + e.what());
        }
        auto script = script_from_json(j);
        if (!j.contains("seed")) script.seed = global.seed;
        auto s = generate(script);
        s.split = "test";
        sessions.push_back(std::move(s));
    } else {
        auto suite = suite_preset(options.suite, global.seed);
        if (options.sessions > 0) {
            for (auto* count : {&suite.train_desktop, &suite.train_mobile, &suite.test_desktop, &suite.test_mobile})
                if (*count > 0) *count = options.sessions;
        }
        if (options.duration_s > 0.0) suite.options.duration_s = options.duration_s;
        sessions = generate_suite(suite);
    }
    write_suite(sessions, global.output);
    log << "wrote " << sessions.size() << " session(s) to " << global.output.string() << '\n';
    return 0;
}

int cmd_train(const GlobalOptions& global, const TrainOptionsCli& options, std::ostream& log) {
    const Config config = resolve_config(global);
    TrainOptions t;
    t.seed = global.seed;
    if (!options.only.empty()) {
        t.gaze = t.speaking = t.yawn = false;
        for (const auto& o : options.only) {
            if (o == "gaze")
                t.gaze = true;
            else if (o == "speaking")
                t.speaking = true;
            else if (o == "yawn")
                t.yawn = true;
            else
                throw ConfigError("--only expects gaze, speaking or yawn, got '" + o + "'");
        }
    }
    if (!fs::exists(options.suite)) throw DataError("missing training suite " + options.suite.string());
    const auto refs = find_sessions({options.suite}, "train");
    std::vector<LabeledSession> sessions(refs.size());
    parallel_for(refs.size(), global.jobs, [&](std::size_t i) { sessions[i] = load_labeled_session(refs[i].manifest); });
    const auto trained = train_models(sessions, config, t);
    save_models(trained, global.output);
    if (trained.gaze) log << "wrote " << (global.output / kGazeArtifact).string() << '\n';
    if (trained.speaking) log << "wrote " << (global.output / kSpeakingArtifact).string() << '\n';
    if (trained.yawn) log << "wrote " << (global.output / kYawnArtifact).string() << '\n';
    return 0;
}

int cmd_score(const GlobalOptions& global, const ScoreOptions& options, std::ostream& log) {
    const Config config = resolve_config(global);
    std::optional<DeviceType> device;
    if (options.device) {
        try {
            device = parse_device_type(*options.device);
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
    }
    const auto refs = find_sessions(options.inputs, options.split);
    const ModelBundle models = load_models(options.models, true, true, true);
    std::vector<std::string> notes(refs.size());
    parallel_for(refs.size(), global.jobs, [&](std::size_t i) {
        const auto manifest = load_manifest(refs[i].manifest);
        if (device && manifest.device_type != *device) {
            notes[i] = "warning: skipping " + manifest.session_id + " (device " +
                       std::string(to_string(manifest.device_type)) + ")";
            return;
        }
        const auto frames = load_session(manifest);
        const auto scored = score_session(manifest, frames, models, config);
        write_timeline(scored.timeline, global.output / (manifest.session_id + ".timeline.tsv"));
        nlohmann::ordered_json j;
        j["session_id"] = manifest.session_id;
        j["device_type"] = std::string(to_string(manifest.device_type));
        j["orientation"] = std::string(to_string(scored.orientation));
        if (scored.screen) j["screen_cm"] = {scored.screen->width_cm, scored.screen->height_cm};
        j["eye_model"] = scored.gaze_stats.has_value();
        j["summary"] = nlohmann::ordered_json::parse(to_json(session_summary(scored.timeline)).dump());
        write_text(global.output / (manifest.session_id + ".summary.json"), j.dump(2) + "\n");
        notes[i] = "scored " + manifest.session_id;
    });
    for (const auto& n : notes) log << n << '\n';
    return 0;
}

int cmd_evaluate(const GlobalOptions& global, const EvaluateOptions& options, std::ostream& log) {
    resolve_config(global);
    const auto refs = find_sessions(options.inputs, options.split);
    struct Row {
        std::string id;
        DeviceType device;
        ClassificationReport report;
    };
    std::vector<Row> rows(refs.size());
    parallel_for(refs.size(), global.jobs, [&](std::size_t i) {
        const auto manifest = load_manifest(refs[i].manifest);
        if (!manifest.ground_truth) throw DataError("no ground truth for session " + manifest.session_id);
        const auto truth = read_timeline(*manifest.ground_truth);
        const fs::path predicted_path = options.timelines / (manifest.session_id + ".timeline.tsv");
        if (!fs::exists(predicted_path)) throw DataError("no timeline for session " + manifest.session_id);
        const auto predicted = read_timeline(predicted_path);
        if (predicted.size() != truth.size())
            throw DataError("timeline length mismatch for session " + manifest.session_id);
        rows[i] = {manifest.session_id, manifest.device_type, frame_metrics(predicted, truth)};
    });
    std::set<std::string> ids;
    for (const auto& r : rows) ids.insert(r.id);
    if (fs::is_directory(options.timelines)) {
        const std::string suffix = ".timeline.tsv";
        for (const auto& entry : fs::directory_iterator(options.timelines)) {
            const auto name = entry.path().filename().string();
            if (name.size() > suffix.size() && name.ends_with(suffix) &&
                !ids.count(name.substr(0, name.size() - suffix.size())))
                throw DataError("timeline " + name + " has no matching session");
        }
    }

    nlohmann::ordered_json j;
    j["aggregation"] = options.macro ? "macro" : "micro";
    j["sessions"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json e;
        e["session_id"] = r.id;
        e["device_type"] = std::string(to_string(r.device));
        e["report"] = nlohmann::ordered_json::parse(to_json(r.report).dump());
        j["sessions"].push_back(std::move(e));
    }
    std::ostringstream text;
    text << "device    sessions  g_mean      f1\n";
    j["devices"] = nlohmann::ordered_json::object();
    for (auto device : {DeviceType::desktop, DeviceType::mobile}) {
        std::vector<ClassificationReport> picked;
        for (const auto& r : rows)
            if (r.device == device) picked.push_back(r.report);
        if (picked.empty()) continue;
        const auto micro = micro_average(picked);
        const auto macro = macro_average(picked);
        nlohmann::ordered_json d;
        d["sessions"] = picked.size();
        d["micro"] = nlohmann::ordered_json::parse(to_json(micro).dump());
        if (options.macro) {
            d["macro"] = {{"g_mean", macro.g_mean ? nlohmann::ordered_json(*macro.g_mean) : nlohmann::ordered_json()},
                          {"f1", macro.f1 ? nlohmann::ordered_json(*macro.f1) : nlohmann::ordered_json()}};
        }
        j["devices"][std::string(to_string(device))] = std::move(d);
        char line[128];
        std::snprintf(line, sizeof line, "%-8s  %8zu  %6s  %6s\n", std::string(to_string(device)).c_str(), picked.size(),
                      fmt3(options.macro ? macro.g_mean : micro.g_mean).c_str(),
                      fmt3(options.macro ? macro.f1 : micro.f1).c_str());
        text << line;
    }
    write_text(global.output / "evaluation.json", j.dump(2) + "\n");
    write_text(global.output / "evaluation.txt", text.str());
    log << text.str();
    return 0;
}

int cmd_ablate(const GlobalOptions& global, const AblateOptions& options, std::ostream& log) {
    const Config config = resolve_config(global);
    if (options.table != "gaze" && options.table != "signals" && options.table != "both")
        throw ConfigError("--table expects gaze, signals or both");
    const auto refs = find_sessions(options.inputs, options.split);
    std::vector<EvalSession> sessions(refs.size());
    parallel_for(refs.size(), global.jobs, [&](std::size_t i) { sessions[i] = load_eval_session(refs[i]); });
    const ModelBundle models = load_models(options.models, true, true, true);

    nlohmann::json j = nlohmann::json::object();
    std::string text;
    if (options.table != "signals") {
        const auto variants = gaze_ablation_variants();
        const auto t = run_ablation(sessions, models, config, gaze_full_variant(), variants,
                                    "Gaze model: removing processing steps", global.jobs);
        write_text(global.output / "table1.txt", render_table(t, options.macro));
        j["gaze"] = to_json(t);
        text += render_table(t, options.macro) + "\n";
    }
    if (options.table != "gaze") {
        const auto variants = signal_ablation_variants();
        const auto t = run_ablation(sessions, models, config, signals_full_variant(), variants,
                                    "Attention model: adding distraction signals", global.jobs, FullRow::last);
        write_text(global.output / "table3.txt", render_table(t, options.macro));
        j["signals"] = to_json(t);
        text += render_table(t, options.macro) + "\n";
    }
    const auto detectors = detector_report(sessions, models, config);
    j["detectors"] = to_json(detectors);
    text += "speaking ROC-AUC " + fmt3(detectors.speaking_auc) + ", yawning ROC-AUC " + fmt3(detectors.yawn_auc) +
            ", orientation macro-F1 " + fmt3(detectors.orientation_macro_f1) + "\n";
    write_text(global.output / "ablation.json", j.dump(2) + "\n");
    log << text;
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const ArtifactError*>(&e)) return 4;
    return 1;
}

}  // namespace attend
