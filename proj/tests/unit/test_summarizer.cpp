#include <doctest.h>

#include <algorithm>
#include <random>

#include "snow/error.hpp"
#include "snow/summarizer.hpp"

using namespace snow;

namespace {

std::vector<FrameDecision> window_of(std::size_t no_action, std::size_t discarded,
                                     std::initializer_list<std::pair<EventClass, std::size_t>> events) {
    std::vector<FrameDecision> out(no_action, FrameDecision::no_action());
    out.insert(out.end(), discarded, FrameDecision::discarded());
    for (auto [c, n] : events) out.insert(out.end(), n, FrameDecision::event(c));
    return out;
}

std::vector<FrameDecision> repeat(FrameDecision d, std::size_t n) { return std::vector<FrameDecision>(n, d); }

} // namespace

TEST_CASE("vote examples") {
    CHECK(vote(window_of(60, 50, {{EventClass::Out, 140}})) == EventClass::Out);
    CHECK(vote(window_of(130, 40, {{EventClass::NoBall, 80}})) == std::nullopt);
    CHECK(vote(window_of(0, 50, {{EventClass::Out, 100}, {EventClass::Wide, 100}})) == EventClass::Out);
    CHECK(vote(window_of(0, 50, {{EventClass::Wide, 100}, {EventClass::Six, 100}})) == EventClass::Six);
    // Event wins a tie against NoAction.
    CHECK(vote(window_of(70, 0, {{EventClass::NoBall, 70}})) == EventClass::NoBall);
    CHECK(vote(window_of(0, 250, {})) == std::nullopt);
    CHECK(vote(window_of(10, 0, {})) == std::nullopt);
    CHECK_THROWS_AS(vote(std::vector<FrameDecision>{}), DataError);
}

TEST_CASE("vote is invariant to frame order") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 200; ++t) {
        std::vector<FrameDecision> w;
        for (int i = 0; i < 60; ++i) {
            const auto k = rng() % 6;
            w.push_back(k == 5 ? FrameDecision::discarded() : FrameDecision::from_class(static_cast<EventClass>(k)));
        }
        const auto v = vote(w);
        std::shuffle(w.begin(), w.end(), rng);
        CHECK(vote(w) == v);
    }
}

TEST_CASE("reinforcing the winner never changes the outcome") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        std::vector<FrameDecision> w;
        for (int i = 0; i < 40; ++i) {
            const auto k = rng() % 6;
            w.push_back(k == 5 ? FrameDecision::discarded() : FrameDecision::from_class(static_cast<EventClass>(k)));
        }
        const auto v = vote(w);
        if (!v) continue;
        for (auto& d : w)
            if (d.event_class() != v) {
                d = FrameDecision::event(*v);
                CHECK(vote(w) == v);
            }
    }
}

TEST_CASE("summarize_stream windows") {
    const WindowConfig cfg;
    SUBCASE("single full event window") {
        const auto segs = summarize_decisions(repeat(FrameDecision::event(EventClass::Out), 250), cfg);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].start_frame == 0);
        CHECK(segs[0].end_frame == 249);
        CHECK(segs[0].event == EventClass::Out);
        CHECK(segs[0].tally[code_of(EventClass::Out)] == 250);
    }
    SUBCASE("windows are independent") {
        auto d = repeat(FrameDecision::no_action(), 250);
        auto wide = repeat(FrameDecision::event(EventClass::Wide), 250);
        d.insert(d.end(), wide.begin(), wide.end());
        const auto segs = summarize_decisions(d, cfg);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0] == Segment{250, 499, EventClass::Wide, {0, 0, 0, 0, 250, 0}});
    }
    SUBCASE("partial tail") {
        auto d = repeat(FrameDecision::no_action(), 250);
        auto six = repeat(FrameDecision::event(EventClass::Six), 50);
        d.insert(d.end(), six.begin(), six.end());
        auto segs = summarize_decisions(d, cfg);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].start_frame == 250);
        CHECK(segs[0].end_frame == 299);
        CHECK(segs[0].event == EventClass::Six);

        WindowConfig strict = cfg;
        strict.allow_partial_tail = false;
        CHECK(summarize_decisions(d, strict).empty());
    }
    SUBCASE("indices must be contiguous from zero") {
        std::vector<IndexedDecision> s{{0, FrameDecision::no_action()}, {2, FrameDecision::no_action()}};
        CHECK_THROWS_AS(summarize_stream(s, cfg), DataError);
        std::vector<IndexedDecision> late{{1, FrameDecision::no_action()}};
        CHECK_THROWS_AS(summarize_stream(late, cfg), DataError);
    }
}

TEST_CASE("segments stay window-aligned, ordered and event-only") {
    std::mt19937_64 rng(99);
    WindowConfig cfg;
    cfg.window_frames = 37;
    for (int t = 0; t < 30; ++t) {
        std::vector<FrameDecision> d;
        const auto n = 1 + rng() % 500;
        // Runs of equal decisions so some windows have a clear winner.
        while (d.size() < n) {
            const auto k = rng() % 6;
            const auto f = k == 5 ? FrameDecision::discarded() : FrameDecision::from_class(static_cast<EventClass>(k));
            d.insert(d.end(), 1 + rng() % 60, f);
        }
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(n), d.end());
        WindowSummarizer s(cfg);
        std::vector<Segment> segs;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (auto seg = s.push(static_cast<std::int64_t>(i), d[i])) segs.push_back(*seg);
        if (auto seg = s.finish()) segs.push_back(*seg);
        CHECK(s.peak_buffered() <= cfg.window_frames);
        for (std::size_t i = 0; i < segs.size(); ++i) {
            CHECK(segs[i].start_frame % 37 == 0);
            CHECK(segs[i].end_frame - segs[i].start_frame + 1 <= 37);
            CHECK(segs[i].event != EventClass::NoAction);
            for (auto c : kSummaryEvents) CHECK(segs[i].tally[code_of(segs[i].event)] >= segs[i].tally[code_of(c)]);
            if (i) CHECK(segs[i].start_frame > segs[i - 1].end_frame);
        }
        CHECK(segs == summarize_decisions(d, cfg));
    }
}

TEST_CASE("summary documents") {
    const WindowConfig cfg;
    const Segment s{0, 249, EventClass::Out, {60, 0, 0, 140, 0, 50}};
    const auto doc = emit_summary(std::vector<Segment>{s}, cfg);
    REQUIRE(doc.entries.size() == 1);
    CHECK(doc.entries[0].start_seconds == 0.0);
    CHECK(doc.entries[0].end_seconds == doctest::Approx(10.0));
    CHECK(doc.entries[0].duration_seconds == doctest::Approx(10.0));
    CHECK(doc.text() ==
          "SNOWSUM 1 fps=25 window=250\n0\t249\tOut\tNoAction:60,Six:0,NoBall:0,Out:140,Wide:0,Discarded:50\n");
    CHECK(doc.cut_list() == "0.000 10.000 Out\n");

    const auto back = parse_summary(doc.text());
    REQUIRE(back.entries.size() == 1);
    CHECK(back.entries[0].segment == s);
    CHECK(back.fps == 25.0);

    const auto empty = emit_summary(std::vector<Segment>{}, cfg);
    CHECK(empty.entries.empty());
    CHECK(empty.text() == "SNOWSUM 1 fps=25 window=250\n");
    CHECK(empty.cut_list().empty());

    const std::vector<Segment> overlap{{0, 249, EventClass::Out, {}}, {200, 300, EventClass::Six, {}}};
    CHECK_THROWS_AS(emit_summary(overlap, cfg), DataError);
    const std::vector<Segment> noaction{{0, 10, EventClass::NoAction, {}}};
    CHECK_THROWS_AS(emit_summary(noaction, cfg), DataError);

    WindowConfig odd;
    odd.fps = 29.97;
    odd.window_frames = 300;
    const auto d2 = emit_summary(std::vector<Segment>{{300, 599, EventClass::Wide, {}}}, odd);
    CHECK(parse_summary(d2.text()).fps == 29.97);
    CHECK(d2.cut_list() == "10.010 20.020 Wide\n");
    CHECK_THROWS_AS(parse_summary("SNOWSUM 2 fps=25 window=250\n"), DataError);
}
