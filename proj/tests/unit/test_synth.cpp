#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "attend/error.hpp"
#include "attend/geometry.hpp"
#include "attend/session_io.hpp"
#include "attend/synth.hpp"
#include "helpers.hpp"

using namespace attend;
using attend::test::TempDir;

namespace {

Segment make_segment(SegmentKind kind, double start, double duration) {
    Segment s;
    s.kind = kind;
    s.start_s = start;
    s.duration_s = duration;
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("same seed gives identical sessions") {
    ScriptOptions opt;
    opt.duration_s = 40;
    const auto a = generate(make_script(5, DeviceType::desktop, opt));
    const auto b = generate(make_script(5, DeviceType::desktop, opt));
    TempDir dir("synth");
    write_frames(a.frames, dir.path() / "a.jsonl");
    write_frames(b.frames, dir.path() / "b.jsonl");
    CHECK(slurp(dir.path() / "a.jsonl") == slurp(dir.path() / "b.jsonl"));
    CHECK(a.truth == b.truth);
    CHECK(a.annotations == b.annotations);

    const auto c = generate(make_script(6, DeviceType::desktop, opt));
    write_frames(c.frames, dir.path() / "c.jsonl");
    CHECK(slurp(dir.path() / "a.jsonl") != slurp(dir.path() / "c.jsonl"));
}

TEST_CASE("clean rays re-intersect at the scripted targets") {
    for (auto device : {DeviceType::desktop, DeviceType::mobile}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            ScriptOptions opt;
            opt.clean = true;
            opt.duration_s = 60;
            opt.max_camera_offset_cm = 8;
            const auto s = generate(make_script(seed, device, opt));
            std::size_t checked = 0;
            for (std::size_t i = 0; i < s.frames.size(); ++i) {
                const auto& f = s.frames[i];
                if (!f.gaze_valid()) continue;
                const auto hit = intersect_gaze(f.pupil_position_cm, f.gaze_direction);
                REQUIRE(hit.status == RayStatus::toward_plane);
                CHECK(std::abs(hit.point.x - s.target_cm[i].x) <= 1e-6);
                CHECK(std::abs(hit.point.y - s.target_cm[i].y) <= 1e-6);
                ++checked;
            }
            CHECK(checked > s.frames.size() / 2);
        }
    }
}

TEST_CASE("single centered dot is on screen throughout") {
    ScenarioScript s;
    s.duration_s = 5;
    s.noise = NoiseModel::clean();
    Segment dot = make_segment(SegmentKind::dot, 0, 5);
    s.segments = {dot};
    const auto g = generate(s);
    REQUIRE(g.frames.size() == 150);
    const double cam_y = 60.0 / 3.0 / 2.0 + 1.0;
    for (std::size_t i = 0; i < g.frames.size(); ++i) {
        CHECK(g.truth.frames[i].attentive());
        REQUIRE(g.annotations[i].dot_cm.has_value());
        const auto hit = intersect_gaze(g.frames[i].pupil_position_cm, g.frames[i].gaze_direction);
        CHECK(hit.point.x == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(hit.point.y == doctest::Approx(-cam_y));
    }
}

TEST_CASE("lizard glances keep the head still") {
    ScenarioScript s;
    s.duration_s = 10;
    s.seed = 9;
    s.noise.artifact_rate_hz = 0;
    s.noise.blink_rate_hz = 0;
    s.segments = {make_segment(SegmentKind::dot, 0.5, 3.0), make_segment(SegmentKind::off_screen, 5.0, 3.0)};
    s.segments[1].direction = Direction::left;
    s.segments[1].head_fraction = 0.0;
    const auto g = generate(s);
    double baseline = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 15; i < 105; ++i, ++n) baseline += g.frames[i].head_yaw_deg;
    baseline /= static_cast<double>(n);
    std::size_t inside = 0, total = 0;
    double mean = 0.0;
    for (std::size_t i = 150; i < 240; ++i, ++total) {
        CHECK(g.truth.frames[i].has(Signal::gaze_eye));
        inside += std::abs(g.frames[i].head_yaw_deg - baseline) <= 3.0;
        mean += g.frames[i].head_yaw_deg - baseline;
    }
    CHECK(static_cast<double>(inside) / static_cast<double>(total) >= 0.98);
    CHECK(std::abs(mean / static_cast<double>(total)) < 1.0);

    s.segments[1].head_fraction = 0.9;
    const auto owl = generate(s);
    double owl_mean = 0.0;
    for (std::size_t i = 150; i < 240; ++i) owl_mean += owl.frames[i].head_yaw_deg - baseline;
    CHECK(std::abs(owl_mean / 90.0) > 20.0);
}

TEST_CASE("leave segment marks exactly its span") {
    ScenarioScript s;
    s.duration_s = 8;
    s.noise = NoiseModel::clean();
    s.segments = {make_segment(SegmentKind::leave, 3.0, 2.0)};
    const auto g = generate(s);
    for (std::size_t i = 0; i < g.frames.size(); ++i) {
        const bool inside = i >= 90 && i < 150;
        CHECK(g.truth.frames[i].has(Signal::unattended) == inside);
        CHECK(g.frames[i].face_detected_expr == !inside);
        CHECK(g.frames[i].face_detected_gaze == !inside);
    }
}

TEST_CASE("ground truth duration rules") {
    ScenarioScript s;
    s.duration_s = 20;
    s.noise = NoiseModel::clean();
    s.segments = {make_segment(SegmentKind::speak, 1.0, 0.9), make_segment(SegmentKind::speak, 3.0, 1.5),
                  make_segment(SegmentKind::close_eyes, 6.0, 1.5), make_segment(SegmentKind::close_eyes, 9.0, 2.5),
                  make_segment(SegmentKind::leave, 13.0, 0.5)};
    const auto g = generate(s);
    CHECK_FALSE(g.truth.frames[40].has(Signal::speaking));
    CHECK(g.annotations[40].speaking);
    CHECK(g.truth.frames[100].has(Signal::speaking));
    CHECK_FALSE(g.truth.frames[200].has(Signal::drowsiness));
    CHECK(g.truth.frames[300].has(Signal::drowsiness));
    CHECK_FALSE(g.truth.frames[395].has(Signal::unattended));
    CHECK_FALSE(g.frames[395].face_detected_expr);
}

TEST_CASE("script validation") {
    ScenarioScript s;
    s.duration_s = 10;
    s.segments = {make_segment(SegmentKind::speak, 1.0, 2.0), make_segment(SegmentKind::yawn, 2.5, 2.0)};
    CHECK_THROWS_WITH_AS(validate_script(s), doctest::Contains("segments 0 and 1 overlap"), ConfigError);
    CHECK_THROWS_AS(generate(s), ConfigError);
    s.segments = {make_segment(SegmentKind::speak, 9.0, 2.0)};
    CHECK_THROWS_WITH_AS(validate_script(s), doctest::Contains("segment 0"), ConfigError);
    s.segments = {make_segment(SegmentKind::speak, 1.0, 2.0), make_segment(SegmentKind::yawn, 3.0, 2.0)};
    CHECK_NOTHROW(validate_script(s));
}

TEST_CASE("random scripts are valid and cover every distractor") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto device = seed % 2 ? DeviceType::mobile : DeviceType::desktop;
        const auto s = make_script(seed, device, ScriptOptions{});
        CHECK_NOTHROW(validate_script(s));
        std::array<int, 7> counts{};
        for (const auto& seg : s.segments) ++counts[static_cast<std::size_t>(seg.kind)];
        CHECK(counts[static_cast<std::size_t>(SegmentKind::dot)] == 16);
        CHECK(counts[static_cast<std::size_t>(SegmentKind::off_screen)] == 8);
        for (auto k : {SegmentKind::speak, SegmentKind::yawn, SegmentKind::close_eyes, SegmentKind::leave})
            CHECK(counts[static_cast<std::size_t>(k)] >= 1);
    }
}

TEST_CASE("yawning prevalence follows the option") {
    ScriptOptions opt;
    std::size_t yawning = 0, frames = 0;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto g = generate(make_script(seed, DeviceType::desktop, opt));
        for (const auto& a : g.annotations) yawning += a.yawning;
        frames += g.annotations.size();
    }
    const double share = static_cast<double>(yawning) / static_cast<double>(frames);
    CHECK(share == doctest::Approx(0.026).epsilon(0.15));
}

TEST_CASE("frames satisfy the record invariants") {
    ScriptOptions opt;
    opt.duration_s = 60;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto g = generate(make_script(seed, seed % 2 ? DeviceType::mobile : DeviceType::desktop, opt));
        for (std::size_t i = 0; i < g.frames.size(); ++i) {
            CHECK_NOTHROW(validate_frame(g.frames[i], "frame"));
            if (i > 0) CHECK(g.frames[i].timestamp_ms > g.frames[i - 1].timestamp_ms);
        }
    }
}

TEST_CASE("script JSON round-trip and strictness") {
    const auto s = make_script(3, DeviceType::mobile, ScriptOptions{});
    const auto back = script_from_json(to_json(s));
    CHECK(to_json(back) == to_json(s));
    auto j = to_json(s);
    j["colour"] = "blue";
    CHECK_THROWS_AS(script_from_json(j), ConfigError);
    j = to_json(s);
    j["noise"]["gain"] = 1.0;
    CHECK_THROWS_AS(script_from_json(j), ConfigError);
}

TEST_CASE("suites") {
    auto cfg = suite_preset("small", 3);
    cfg.options.duration_s = 20;
    cfg.train_desktop = cfg.train_mobile = cfg.test_desktop = cfg.test_mobile = 1;
    const auto sessions = generate_suite(cfg);
    REQUIRE(sessions.size() == 4);
    CHECK(sessions[0].manifest.session_id == "train-desktop-000");
    CHECK(sessions[3].split == "test");
    CHECK(sessions[3].manifest.device_type == DeviceType::mobile);

    TempDir dir("suite");
    write_suite(sessions, dir.path());
    CHECK(std::filesystem::exists(dir.path() / "suite.json"));
    for (const auto& s : sessions) {
        const auto m = load_manifest(dir.path() / s.manifest.session_id / "manifest.json");
        CHECK(load_session(m).size() == s.frames.size());
        CHECK(read_timeline(*m.ground_truth) == s.truth);
    }
    CHECK_THROWS_AS(suite_preset("huge", 1), ConfigError);
}

TEST_CASE("too short for a generated script") {
    ScriptOptions o;
    o.duration_s = 5;
    CHECK_THROWS_AS(make_script(1, DeviceType::desktop, o), ConfigError);
}
