#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "attend/fusion.hpp"
#include "attend/rng.hpp"
#include "helpers.hpp"

using namespace attend;

namespace {

std::vector<FrameRecord> with_gap(std::size_t before, std::size_t gap, std::size_t after, bool expr, bool gaze) {
    auto frames = test::basic_frames(before + gap + after);
    for (std::size_t i = before; i < before + gap; ++i) {
        frames[i].face_detected_expr = expr;
        frames[i].face_detected_gaze = gaze;
    }
    return frames;
}

SignalFlags empty_signals(std::size_t n) {
    SignalFlags s;
    for (auto& f : s) f.assign(n, 0);
    return s;
}

}  // namespace

TEST_CASE("unattended needs both trackers to lose the face") {
    const auto half_second = with_gap(30, 15, 30, false, false);
    for (auto v : unattended_signal(half_second, 30.0, 1.0)) CHECK(v == 0);

    const auto three_seconds = with_gap(30, 90, 30, false, false);
    const auto u = unattended_signal(three_seconds, 30.0, 1.0);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == (i >= 30 && i < 120 ? 1 : 0));

    for (auto v : unattended_signal(with_gap(30, 90, 30, true, false), 30.0, 1.0)) CHECK(v == 0);
    for (auto v : unattended_signal(with_gap(30, 90, 30, false, true), 30.0, 1.0)) CHECK(v == 0);
}

TEST_CASE("unattended one-second boundary") {
    struct Case {
        std::size_t frames;
        bool active;
    };
    for (const auto c : {Case{29, false}, Case{30, false}, Case{31, true}}) {
        CAPTURE(c.frames);
        const auto u = unattended_signal(with_gap(10, c.frames, 10, false, false), 30.0, 1.0);
        CHECK(u[10] == (c.active ? 1 : 0));
    }
}

TEST_CASE("all 32 masks fuse to their own attribution") {
    const auto frames = test::basic_frames(32);
    auto signals = empty_signals(32);
    for (std::size_t m = 0; m < 32; ++m)
        for (std::size_t s = 0; s < kSignalCount; ++s) signals[s][m] = (m >> s) & 1u;
    const auto t = fuse(signals, frames, 30.0);
    REQUIRE(t.size() == 32);
    for (std::size_t m = 0; m < 32; ++m) {
        CHECK(t.frames[m].mask == m);
        CHECK(t.frames[m].attentive() == (m == 0));
        for (std::size_t s = 0; s < kSignalCount; ++s)
            CHECK(t.frames[m].has(static_cast<Signal>(s)) == (((m >> s) & 1u) != 0));
        CHECK(t.frames[m].frame_index == frames[m].frame_index);
    }
}

TEST_CASE("fusion examples") {
    const auto frames = test::basic_frames(60);
    auto signals = empty_signals(60);
    auto t = fuse(signals, frames, 30.0);
    for (const auto& f : t.frames) CHECK(f.attentive());

    for (std::size_t i = 10; i <= 40; ++i) signals[static_cast<std::size_t>(Signal::speaking)][i] = 1;
    t = fuse(signals, frames, 30.0);
    for (std::size_t i = 0; i < 60; ++i)
        CHECK(t.frames[i].mask == (i >= 10 && i <= 40 ? bit(Signal::speaking) : 0));

    for (std::size_t i = 30; i < 50; ++i) signals[static_cast<std::size_t>(Signal::drowsiness)][i] = 1;
    t = fuse(signals, frames, 30.0);
    CHECK(t.frames[35].mask == (bit(Signal::speaking) | bit(Signal::drowsiness)));
    CHECK(t.frames[45].mask == bit(Signal::drowsiness));

    signals[0].pop_back();
    CHECK_THROWS_AS(fuse(signals, frames, 30.0), std::invalid_argument);
}

TEST_CASE("fusion is monotone") {
    Rng rng(23);
    const auto frames = test::basic_frames(100);
    for (int trial = 0; trial < 20; ++trial) {
        auto signals = empty_signals(100);
        for (auto& s : signals)
            for (auto& v : s) v = rng.bernoulli(0.1) ? 1 : 0;
        const auto before = fuse(signals, frames, 30.0);
        auto more = signals;
        for (auto& s : more)
            for (auto& v : s) v = v || rng.bernoulli(0.1) ? 1 : 0;
        const auto after = fuse(more, frames, 30.0);
        for (std::size_t i = 0; i < 100; ++i) {
            if (!before.frames[i].attentive()) CHECK_FALSE(after.frames[i].attentive());
        }
    }
}

TEST_CASE("session summary") {
    DistractionTimeline t;
    for (std::uint64_t i = 0; i < 100; ++i) t.frames.push_back({i, i * 1000.0 / 30.0, 0});
    auto s = session_summary(t);
    CHECK(s.inattentive_percent == 0.0);
    CHECK(s.inattentive_events.empty());

    for (std::size_t i = 0; i < 50; ++i) t.frames[i].mask = bit(Signal::gaze_eye);
    s = session_summary(t);
    CHECK(s.inattentive_percent == doctest::Approx(50.0));
    REQUIRE(s.source_events[0].size() == 1);
    CHECK(s.source_events[0][0].duration_s == doctest::Approx(50.0 / 30.0));

    CHECK_THROWS_AS(session_summary(DistractionTimeline{}), std::invalid_argument);
}

TEST_CASE("summary durations match independently counted runs") {
    Rng rng(31);
    DistractionTimeline t;
    SignalMask mask = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        if (rng.bernoulli(0.05)) mask = static_cast<SignalMask>(rng.below(32));
        t.frames.push_back({i, i * 40.0, mask});
    }
    t.frame_rate_hz = 25.0;
    const auto s = session_summary(t);
    for (std::size_t k = 0; k < kSignalCount; ++k) {
        std::size_t frames_set = 0, runs = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const bool on = t.frames[i].has(static_cast<Signal>(k));
            frames_set += on;
            runs += on && (i == 0 || !t.frames[i - 1].has(static_cast<Signal>(k)));
        }
        double total = 0.0;
        for (const auto& e : s.source_events[k]) {
            total += e.duration_s;
            CHECK(e.start_ms == t.frames[e.begin_frame].timestamp_ms);
        }
        CHECK(s.source_events[k].size() == runs);
        CHECK(total == doctest::Approx(static_cast<double>(frames_set) / 25.0));
    }
    const auto j = to_json(s);
    CHECK(j.at("frame_count") == 1000);
    CHECK(j.at("source_events").contains("unattended"));
}
