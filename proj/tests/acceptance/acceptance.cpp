// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// and exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "attend/ablation.hpp"
#include "attend/commands.hpp"
#include "attend/drowsiness.hpp"
#include "attend/fusion.hpp"
#include "attend/geometry.hpp"
#include "attend/gaze_model.hpp"
#include "attend/metrics.hpp"
#include "attend/ml/boosted.hpp"
#include "attend/ml/temporal_cnn.hpp"
#include "attend/rng.hpp"
#include "attend/speaking.hpp"
#include "attend/synth.hpp"
#include "attend/training.hpp"

using namespace attend;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<EvalSession> eval_split(const std::vector<GeneratedSession>& suite, const std::string& split) {
    std::vector<EvalSession> out;
    for (const auto& s : suite)
        if (s.split == split) out.push_back({s.manifest, s.frames, s.truth, s.annotations, s.script.orientation});
    return out;
}

std::vector<LabeledSession> train_split(const std::vector<GeneratedSession>& suite) {
    std::vector<LabeledSession> out;
    for (const auto& s : suite)
        if (s.split == "train") out.push_back({s.manifest, s.frames, s.annotations});
    return out;
}

/// The mixed suite shared by criteria 3 and 5-7: 50 held-out sessions.
struct MainSuite {
    Config config;
    std::vector<EvalSession> test;
    TrainedModels trained;
    double generate_s = 0.0;
    double train_s = 0.0;
};

MainSuite& main_suite() {
    static MainSuite m = [] {
        MainSuite x;
        SuiteConfig sc = suite_preset("default", 11);
        sc.train_desktop = sc.train_mobile = 6;
        sc.test_desktop = sc.test_mobile = 25;
        auto t0 = Clock::now();
        const auto suite = generate_suite(sc);
        x.test = eval_split(suite, "test");
        x.generate_s = seconds_since(t0);
        t0 = Clock::now();
        x.trained = train_models(train_split(suite), x.config, TrainOptions{});
        x.train_s = seconds_since(t0);
        return x;
    }();
    return m;
}

// Walks the ray in fixed steps until z changes sign, then bisects.
std::optional<ScreenPoint> sampled_intersection(const Vec3& p, const Vec3& d) {
    double lo = 0.0;
    double hi = 0.0;
    const double step = 1.0 / std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    bool found = false;
    for (int k = 1; k <= 100000; ++k) {
        hi = step * k;
        if (p.z + hi * d.z <= 0.0) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p.z + mid * d.z > 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    return ScreenPoint{p.x + t * d.x, p.y + t * d.y};
}

Outcome geometry_oracle() {
    Rng rng(101);
    std::vector<std::pair<Vec3, Vec3>> rays;
    while (rays.size() < 10000) {
        const Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(20, 100)};
        const Vec3 d{rng.uniform(-1, 1), rng.uniform(-1, 1), -rng.uniform(0.2, 1.5)};
        rays.emplace_back(p, d);
    }
    const auto t0 = Clock::now();
    std::vector<PlaneIntersection> hits;
    hits.reserve(rays.size());
    for (const auto& [p, d] : rays) hits.push_back(intersect_gaze(p, d));
    const double runtime = seconds_since(t0);

    double worst = 0.0;
    bool statuses = true;
    for (std::size_t i = 0; i < rays.size(); ++i) {
        const auto oracle = sampled_intersection(rays[i].first, rays[i].second);
        if (!oracle || hits[i].status != RayStatus::toward_plane) {
            statuses = false;
            continue;
        }
        worst = std::max({worst, std::abs(hits[i].point.x - oracle->x), std::abs(hits[i].point.y - oracle->y)});
    }
    std::size_t special = 0;
    std::size_t special_ok = 0;
    for (int k = 0; k < 500; ++k) {
        const Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(20, 100)};
        const Vec3 away{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.01, 1.5)};
        const Vec3 flat{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0};
        special += 2;
        special_ok += intersect_gaze(p, away).status == RayStatus::away_from_plane;
        special_ok += intersect_gaze(p, flat).status == RayStatus::parallel;
    }
    const bool pass = statuses && worst <= 1e-6 && special_ok == special && runtime < 1.0;
    return {pass, fmt("max error %.2e cm, special cases %zu/%zu, %.4f s for 10000 rays", worst, special_ok, special,
                      runtime)};
}

Outcome normalization_invariance() {
    auto& m = main_suite();
    SuiteConfig sc = suite_preset("offset", 23);
    sc.train_desktop = 0;
    sc.test_desktop = 20;
    const auto suite = generate_suite(sc);
    const auto options = gaze_full_variant().options;
    std::size_t flips = 0;
    std::size_t frames = 0;
    double max_offset = 0.0;
    for (const auto& g : suite) {
        auto centered = g.script;
        max_offset = std::max(max_offset, std::hypot(centered.camera_offset_cm.x, centered.camera_offset_cm.y));
        centered.camera_offset_cm = {0.0, 0.0};
        const auto g0 = generate(centered);
        const auto a = score_session(g.manifest, g.frames, m.trained.models, m.config, options);
        const auto b = score_session(g0.manifest, g0.frames, m.trained.models, m.config, options);
        for (std::size_t i = 0; i < a.timeline.size(); ++i)
            flips += a.timeline.frames[i].has(Signal::gaze_eye) != b.timeline.frames[i].has(Signal::gaze_eye);
        frames += a.timeline.size();
    }
    return {flips == 0, fmt("%zu label flips over %zu frames in %zu sessions (offsets up to %.1f cm)", flips, frames,
                            suite.size(), max_offset)};
}

Outcome end_to_end() {
    auto& m = main_suite();
    const auto t0 = Clock::now();
    std::map<DeviceType, std::vector<ClassificationReport>> per;
    for (const auto& s : m.test) {
        const auto r = score_session(s.manifest, s.frames, m.trained.models, m.config);
        per[s.manifest.device_type].push_back(frame_metrics(r.timeline, s.truth));
    }
    const double score_s = seconds_since(t0);
    const double total = m.generate_s + m.train_s + score_s;
    bool pass = total < 60.0;
    std::string detail;
    for (const auto& [device, reports] : per) {
        const auto r = micro_average(reports);
        const double g = r.g_mean.value_or(0.0);
        const double f1 = r.f1.value_or(0.0);
        pass = pass && g >= 0.90 && f1 >= 0.85;
        detail += fmt("%s g_mean %.3f F1 %.3f (%zu sessions); ", std::string(to_string(device)).c_str(), g, f1,
                      reports.size());
    }
    pass = pass && per.size() == 2;
    detail += fmt("runtime %.1f s (generate %.1f, train %.1f, score %.1f)", total, m.generate_s, m.train_s, score_s);
    return {pass, detail};
}

Outcome gaze_ablation() {
    auto& m = main_suite();
    SuiteConfig sc = suite_preset("offset", 5);
    sc.train_desktop = 0;
    sc.test_desktop = 20;
    const auto test = eval_split(generate_suite(sc), "test");
    const auto variants = gaze_ablation_variants();
    const auto t = run_ablation(test, m.trained.models, m.config, gaze_full_variant(), variants, "gaze");
    const auto g = [&](const char* name) { return t.row(name, DeviceType::desktop).micro.g_mean.value_or(0.0); };
    const double full = g("full model");
    const double no_norm = g("w/o normalization");
    const double no_tune = g("w/o fine-tuning");
    const double no_size = g("w/o screen size");
    const bool pass = full - no_norm >= 0.05 && no_tune <= full && no_size <= full;
    return {pass, fmt("full %.3f, w/o normalization %.3f, w/o fine-tuning %.3f, w/o screen size %.3f", full, no_norm,
                      no_tune, no_size)};
}

Outcome signal_ablation() {
    auto& m = main_suite();
    const auto variants = signal_ablation_variants();
    const auto t = run_ablation(m.test, m.trained.models, m.config, signals_full_variant(), variants, "signals", 1,
                                FullRow::last);
    bool pass = true;
    std::string detail;
    for (DeviceType device : {DeviceType::desktop, DeviceType::mobile}) {
        std::vector<double> g;
        for (const auto& v : variants) g.push_back(t.row(v.name, device).micro.g_mean.value_or(0.0));
        g.push_back(t.row(signals_full_variant().name, device).micro.g_mean.value_or(0.0));
        // head only, + gaze, + drowsiness, + speaking, + unattended
        pass = pass && g[1] - g[0] >= 0.02 && g[2] >= g[1] && g[3] >= g[2] && g[4] - g[3] >= 0.02;
        detail += fmt("%s %.3f -> %.3f -> %.3f -> %.3f -> %.3f; ", std::string(to_string(device)).c_str(), g[0], g[1],
                      g[2], g[3], g[4]);
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

Outcome speaking_model() {
    auto& m = main_suite();
    const auto report = detector_report(m.test, m.trained.models, m.config);
    const auto& net = *m.trained.models.speaking;
    Rng rng(77);
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& s : m.test) {
        if (checked == 10) break;
        const auto windows = build_lip_windows(s.frames);
        for (int tries = 0; tries < 50; ++tries) {
            const auto& w = windows[rng.below(windows.size())];
            if (!w) continue;
            const auto x = window_features(*w);
            worst = std::max(worst, ml::cnn_gradient_check(net, x, static_cast<double>(checked % 2)));
            ++checked;
            break;
        }
    }
    const double auc = report.speaking_auc.value_or(0.0);
    const bool pass = auc >= 0.95 && worst <= 1e-4 && checked > 0;
    return {pass, fmt("ROC-AUC %.4f over %zu held-out windows, gradient check max relative error %.2e (%zu windows)",
                      auc, report.speaking_windows, worst, checked)};
}

Outcome yawn_model() {
    auto& m = main_suite();
    const auto report = detector_report(m.test, m.trained.models, m.config);
    std::size_t positives = 0;
    std::size_t total = 0;
    for (const auto& s : m.test)
        for (const auto& a : s.annotations) {
            positives += a.yawning;
            ++total;
        }
    const double prevalence = static_cast<double>(positives) / static_cast<double>(total);
    const double auc = report.yawn_auc.value_or(0.0);
    return {auc >= 0.95, fmt("ROC-AUC %.4f over %zu held-out frames, yawning prevalence %.2f%%", auc,
                             report.yawn_frames, 100.0 * prevalence)};
}

Outcome orientation_voting() {
    const Config config;
    std::array<double, 2> f1{};
    for (bool clean : {true, false}) {
        SuiteConfig sc = suite_preset(clean ? "clean" : "default", 9);
        sc.train_desktop = sc.train_mobile = sc.test_desktop = 0;
        sc.test_mobile = clean ? 30 : 60;
        const auto test = eval_split(generate_suite(sc), "test");
        std::vector<int> predicted;
        std::vector<int> truth;
        for (const auto& s : test) {
            const auto stats = compute_session_stats(s.frames, config.quality_floor);
            predicted.push_back(static_cast<int>(detect_orientation(stats, config)));
            truth.push_back(static_cast<int>(*s.true_orientation));
        }
        f1[clean ? 0 : 1] = macro_f1(predicted, truth);
    }
    constexpr std::array<Orientation, 3> all = {Orientation::centered, Orientation::clockwise,
                                                Orientation::anticlockwise};
    std::size_t correct = 0;
    for (auto a : all)
        for (auto b : all)
            for (auto c : all) {
                Orientation expected = Orientation::centered;
                if (a == b || a == c) expected = a;
                else if (b == c) expected = b;
                correct += majority_vote({a, b, c}) == expected;
            }
    const bool pass = f1[0] == 1.0 && f1[1] >= 0.90 && correct == 27;
    return {pass, fmt("macro-F1 clean %.3f (30 sessions), default noise %.3f (60 sessions), votes %zu/27", f1[0], f1[1],
                      correct)};
}

Outcome duration_boundaries() {
    const double fps = 30.0;
    const auto run = [](std::size_t n) { return Flags(n, 1); };
    const auto distracting = [](const std::vector<Event>& e) { return e.size() == 1 && e[0].distracting; };
    std::size_t ok = 0;
    std::size_t total = 0;
    const auto expect = [&](bool got, bool want) {
        ++total;
        ok += got == want;
    };
    for (std::size_t n : {29, 30, 31}) expect(distracting(speaking_events(run(n), fps, 1.0)), n > 30);
    for (std::size_t n : {59, 60, 61}) expect(distracting(closure_events(run(n), fps, 2.0)), n > 60);
    for (std::size_t n : {29, 30, 31}) {
        std::vector<FrameRecord> frames(n + 20);
        for (std::size_t i = 0; i < frames.size(); ++i) {
            frames[i].frame_index = i;
            frames[i].timestamp_ms = static_cast<double>(i) * 1000.0 / fps;
            const bool gone = i >= 10 && i < 10 + n;
            frames[i].face_detected_expr = frames[i].face_detected_gaze = !gone;
        }
        const auto flags = unattended_signal(frames, fps, 1.0);
        expect(flags[10] != 0, n > 30);
    }
    return {ok == total, fmt("%zu/%zu boundary cases at 1.0 s speaking, 2.0 s closure, 1.0 s unattended", ok, total)};
}

Outcome boosted_trees() {
    Rng rng(31);
    std::size_t monotone = 0;
    for (int problem = 0; problem < 100; ++problem) {
        const std::size_t n = 50 + rng.below(150);
        const std::size_t d = 1 + rng.below(5);
        ml::FeatureMatrix X(n, d);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) X.at(i, j) = rng.uniform(-3, 3);
            y[i] = std::sin(X.at(i, 0)) + 0.3 * X.at(i, d - 1) * X.at(i, 0) + rng.normal(0, 0.5);
        }
        ml::BoostConfig cfg;
        cfg.stages = 30;
        cfg.max_depth = 1 + rng.below(4);
        cfg.learning_rate = rng.uniform(0.05, 0.5);
        const auto model = ml::fit_boosted(X, y, cfg);
        bool ok = true;
        for (std::size_t k = 1; k < model.training_loss.size(); ++k)
            ok = ok && model.training_loss[k] <= model.training_loss[k - 1];
        monotone += ok;
    }
    const std::size_t n = 500;
    ml::FeatureMatrix X(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = X.at(i, 0) = rng.uniform(-10, 10);
    const auto model = ml::fit_boosted(X, y);
    double mse = 0.0;
    double mean = 0.0;
    for (double v : y) mean += v / static_cast<double>(n);
    double baseline = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::array<double, 1> x{X.at(i, 0)};
        mse += std::pow(ml::predict_boosted(model, x) - y[i], 2) / static_cast<double>(n);
        baseline += std::pow(mean - y[i], 2) / static_cast<double>(n);
    }
    const bool pass = monotone == 100 && mse < 0.5 * baseline;
    return {pass, fmt("%zu/100 problems with nonincreasing loss; identity MSE %.4f vs baseline %.4f", monotone, mse,
                      baseline)};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return out;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("attend-acceptance-" + std::to_string(Clock::now().time_since_epoch().count()));
    std::array<std::map<std::string, std::string>, 2> runs;
    std::ostringstream log;
    for (int k = 0; k < 2; ++k) {
        const fs::path dir = root / ("run" + std::to_string(k));
        GlobalOptions g;
        g.seed = 19;
        SimulateOptions sim;
        sim.suite = "small";
        sim.sessions = 1;
        g.output = dir / "suite";
        cmd_simulate(g, sim, log);
        TrainOptionsCli train;
        train.suite = dir / "suite";
        g.output = dir / "models";
        cmd_train(g, train, log);
        ScoreOptions score;
        score.inputs = {dir / "suite"};
        score.models = dir / "models";
        g.output = dir / "scores";
        cmd_score(g, score, log);
        EvaluateOptions eval;
        eval.inputs = {dir / "suite"};
        eval.timelines = dir / "scores";
        g.output = dir / "eval";
        cmd_evaluate(g, eval, log);
        runs[static_cast<std::size_t>(k)] = read_tree(dir);
    }
    std::size_t differing = 0;
    for (const auto& [name, bytes] : runs[0]) {
        const auto it = runs[1].find(name);
        differing += it == runs[1].end() || it->second != bytes;
    }
    differing += runs[1].size() > runs[0].size() ? runs[1].size() - runs[0].size() : 0;
    fs::remove_all(root);
    return {differing == 0 && !runs[0].empty(), fmt("%zu files compared, %zu differ", runs[0].size(), differing)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"geometry oracle", geometry_oracle},
        {"normalization invariance", normalization_invariance},
        {"end-to-end suite", end_to_end},
        {"gaze ablation direction", gaze_ablation},
        {"signal ablation direction", signal_ablation},
        {"speaking CNN", speaking_model},
        {"yawn classifier", yawn_model},
        {"orientation voting", orientation_voting},
        {"duration boundaries", duration_boundaries},
        {"boosted trees", boosted_trees},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
