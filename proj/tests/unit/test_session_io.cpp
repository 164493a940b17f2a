#include <doctest.h>

#include <fstream>
#include <string>

#include "attend/error.hpp"
#include "attend/rng.hpp"
#include "attend/session_io.hpp"
#include "helpers.hpp"

using namespace attend;
using attend::test::TempDir;

namespace {

FrameRecord random_frame(Rng& rng, std::uint64_t index) {
    FrameRecord f;
    f.frame_index = index;
    f.timestamp_ms = static_cast<double>(index) * 33.333333333333336 + rng.uniform(0.0, 1.0);
    f.face_detected_gaze = rng.bernoulli(0.8);
    f.face_detected_expr = rng.bernoulli(0.8);
    f.pupil_position_cm = {rng.normal(0, 5), rng.normal(0, 5), rng.uniform(20, 90)};
    f.gaze_direction = {rng.normal(), rng.normal(), -rng.uniform(0.1, 1)};
    f.gaze_quality = rng.uniform();
    f.head_yaw_deg = rng.normal(0, 20);
    f.head_pitch_deg = rng.normal(0, 10);
    f.head_roll_deg = rng.normal(0, 5);
    for (auto& p : f.mouth_points) p = {rng.normal(0, 0.3), rng.normal(0, 0.3)};
    for (auto& a : f.au_intensities) a = rng.uniform(0, 100);
    f.eye_closure = rng.uniform(0, 100);
    f.face_center_x = rng.uniform();
    return f;
}

bool same_frame(const FrameRecord& a, const FrameRecord& b) {
    bool ok = a.frame_index == b.frame_index && a.timestamp_ms == b.timestamp_ms &&
              a.pupil_position_cm.x == b.pupil_position_cm.x && a.pupil_position_cm.y == b.pupil_position_cm.y &&
              a.pupil_position_cm.z == b.pupil_position_cm.z && a.gaze_direction.x == b.gaze_direction.x &&
              a.gaze_direction.y == b.gaze_direction.y && a.gaze_direction.z == b.gaze_direction.z &&
              a.gaze_quality == b.gaze_quality && a.head_yaw_deg == b.head_yaw_deg &&
              a.head_pitch_deg == b.head_pitch_deg && a.head_roll_deg == b.head_roll_deg &&
              a.eye_closure == b.eye_closure && a.face_detected_expr == b.face_detected_expr &&
              a.face_detected_gaze == b.face_detected_gaze && a.face_center_x == b.face_center_x;
    for (std::size_t i = 0; i < 4; ++i)
        ok = ok && a.mouth_points[i].x == b.mouth_points[i].x && a.mouth_points[i].y == b.mouth_points[i].y;
    return ok && a.au_intensities == b.au_intensities;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("frames round-trip bit-exactly") {
    TempDir dir("io");
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<FrameRecord> frames;
        for (std::uint64_t i = 0; i < 100; ++i) frames.push_back(random_frame(rng, i));
        const auto path = dir.path() / "frames.jsonl";
        write_frames(frames, path);
        const auto back = load_frames(path);
        REQUIRE(back.size() == frames.size());
        for (std::size_t i = 0; i < frames.size(); ++i) CHECK(same_frame(frames[i], back[i]));
    }
}

TEST_CASE("load_session resolves the manifest and sorts by frame index") {
    TempDir dir("io");
    auto frames = test::basic_frames(10);
    std::swap(frames[2], frames[7]);
    write_frames(frames, dir.path() / "frames.jsonl");
    SessionManifest m;
    m.session_id = "s1";
    m.frame_source = "frames.jsonl";
    m.screen_override_cm = std::make_pair(30.0, 20.0);
    write_manifest(m, dir.path() / "manifest.json");

    const auto loaded = load_manifest(dir.path() / "manifest.json");
    CHECK(loaded.session_id == "s1");
    REQUIRE(loaded.screen_override_cm.has_value());
    CHECK(loaded.screen_override_cm->first == 30.0);
    const auto back = load_session(loaded);
    REQUIRE(back.size() == 10);
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i].frame_index == i);
}

TEST_CASE("out-of-range quality names the row") {
    TempDir dir("io");
    auto frames = test::basic_frames(8);
    frames[4].gaze_quality = 1.7;
    const auto path = dir.path() / "frames.jsonl";
    write_frames(frames, path);
    try {
        load_frames(path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string what = e.what();
        CHECK(what.find("row 5") != std::string::npos);
        CHECK(what.find("gaze_quality") != std::string::npos);
    }
}

TEST_CASE("degenerate frame files are rejected") {
    TempDir dir("io");
    const auto path = dir.path() / "frames.jsonl";

    SUBCASE("empty file") {
        write_text(path, "");
        try {
            load_frames(path);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("empty session") != std::string::npos);
        }
    }
    SUBCASE("non-monotonic timestamps") {
        auto frames = test::basic_frames(5);
        frames[3].timestamp_ms = frames[2].timestamp_ms;
        write_frames(frames, path);
        CHECK_THROWS_AS(load_frames(path), DataError);
    }
    SUBCASE("malformed row") {
        write_text(path, "{not json}\n");
        CHECK_THROWS_WITH_AS(load_frames(path), doctest::Contains("row 1"), DataError);
    }
    SUBCASE("unknown field") {
        auto frames = test::basic_frames(1);
        write_frames(frames, path);
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        in.close();
        line.insert(1, "\"extra\":1,");
        write_text(path, line + "\n");
        CHECK_THROWS_AS(load_frames(path), DataError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_frames(dir.path() / "nope.jsonl"), DataError); }
    SUBCASE("pupil behind the camera plane") {
        auto frames = test::basic_frames(3);
        frames[1].pupil_position_cm.z = -1.0;
        write_frames(frames, path);
        CHECK_THROWS_AS(load_frames(path), DataError);
    }
}

TEST_CASE("frames without a gaze face may carry sentinel gaze fields") {
    TempDir dir("io");
    auto frames = test::basic_frames(3);
    frames[1].face_detected_gaze = false;
    frames[1].pupil_position_cm = {0, 0, 0};
    frames[1].gaze_direction = {0, 0, 0};
    write_frames(frames, dir.path() / "f.jsonl");
    const auto back = load_frames(dir.path() / "f.jsonl");
    REQUIRE(back.size() == 3);
    CHECK_FALSE(back[1].gaze_valid());
}

TEST_CASE("timelines round-trip over random masks") {
    TempDir dir("io");
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        DistractionTimeline t;
        t.frame_rate_hz = trial % 2 ? 30.0 : 25.0;
        const auto n = 1 + rng.below(300);
        for (std::uint64_t i = 0; i < n; ++i)
            t.frames.push_back({i, static_cast<double>(i) * 1000.0 / t.frame_rate_hz,
                                static_cast<SignalMask>(rng.below(32))});
        write_timeline(t, dir.path() / "t.tsv");
        CHECK(read_timeline(dir.path() / "t.tsv") == t);
    }
}

TEST_CASE("timeline edge cases") {
    TempDir dir("io");
    DistractionTimeline t;
    SUBCASE("all attentive") {
        for (std::uint64_t i = 0; i < 50; ++i) t.frames.push_back({i, i * 10.0, 0});
        write_timeline(t, dir.path() / "t.tsv");
        CHECK(read_timeline(dir.path() / "t.tsv") == t);
    }
    SUBCASE("all five bits on one frame") {
        t.frames.push_back({0, 0.0, 0});
        t.frames.push_back({1, 33.3, 0x1f});
        write_timeline(t, dir.path() / "t.tsv");
        const auto back = read_timeline(dir.path() / "t.tsv");
        CHECK(back.frames[1].mask == 0x1f);
        for (std::size_t s = 0; s < kSignalCount; ++s) CHECK(back.frames[1].has(static_cast<Signal>(s)));
    }
    SUBCASE("empty timeline") { CHECK_THROWS_AS(write_timeline(t, dir.path() / "t.tsv"), DataError); }
}

TEST_CASE("mask names") {
    CHECK(mask_names(0) == "-");
    CHECK(mask_names(bit(Signal::speaking)) == "speaking");
    CHECK(mask_names(bit(Signal::gaze_eye) | bit(Signal::unattended)) == "gaze_eye,unattended");
}

TEST_CASE("annotations round-trip") {
    TempDir dir("io");
    std::vector<FrameAnnotation> rows;
    for (std::uint64_t i = 0; i < 20; ++i) {
        FrameAnnotation a;
        a.frame_index = i;
        if (i % 3 == 0) a.dot_cm = Point2{0.1 * static_cast<double>(i), -1.0 / 3.0};
        a.speaking = i % 4 == 1;
        a.yawning = i % 5 == 2;
        rows.push_back(a);
    }
    write_annotations(rows, dir.path() / "a.tsv");
    CHECK(read_annotations(dir.path() / "a.tsv") == rows);
}

TEST_CASE("manifest validation") {
    TempDir dir("io");
    write_text(dir.path() / "m.json",
               R"({"session_id":"x","device_type":"tablet","frame_rate_hz":30,"frame_source":"f.jsonl"})");
    CHECK_THROWS_AS(load_manifest(dir.path() / "m.json"), DataError);
    write_text(dir.path() / "m.json",
               R"({"session_id":"x","device_type":"mobile","frame_rate_hz":500,"frame_source":"f.jsonl"})");
    CHECK_THROWS_AS(load_manifest(dir.path() / "m.json"), DataError);
}
