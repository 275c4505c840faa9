#include <doctest.h>

#include <random>

#include "snow/cascade.hpp"
#include "snow/error.hpp"
#include "support/synthetic.hpp"

using namespace snow;

namespace {

// Hand-built models over a 3-dim space: x[0] > 0 means umpire; x[1] selects the pose code.
MulticlassModel presence_model() {
    MulticlassModel m;
    m.dim = 3;
    m.classes = {0, 1};
    m.models = {BinaryLinearModel{{-1, 0, 0}, false, 1, 3}, BinaryLinearModel{{1, 0, 0}, false, 1, 3}};
    return m;
}

MulticlassModel pose_model() {
    // Decision for class c is -(x1 - c)^2 linearized: 2c*x1 - c^2 via the bias-free third coordinate x2 = 1.
    MulticlassModel m;
    m.dim = 3;
    m.classes = {0, 1, 2, 3, 4};
    for (int c = 0; c < 5; ++c) m.models.push_back(BinaryLinearModel{{0, 2.0 * c, -1.0 * c * c}, false, 1, 3});
    return m;
}

FeatureVector frame(float umpire, float pose) { return FeatureVector({umpire, pose, 1.0f}); }

} // namespace

TEST_CASE("frame decisions") {
    CHECK(FrameDecision::discarded().is_discarded());
    CHECK(FrameDecision::no_action().is_no_action());
    CHECK(FrameDecision::event(EventClass::Out).event_class() == EventClass::Out);
    CHECK_THROWS_AS(FrameDecision::event(EventClass::NoAction), DataError);
    CHECK(FrameDecision::from_class(EventClass::NoAction) == FrameDecision::no_action());
    CHECK_FALSE(FrameDecision::no_action().event_class().has_value());
}

TEST_CASE("classify_frame follows the two-stage rule") {
    const auto c = make_cascade(presence_model(), pose_model(), "t", "t");
    CascadeCounters counters;
    CHECK(classify_frame(c, frame(-1, 3), &counters) == FrameDecision::discarded());
    CHECK(counters.stage1_evaluations == 1);
    CHECK(counters.stage2_evaluations == 0);
    CHECK(classify_frame(c, frame(1, 0), &counters) == FrameDecision::no_action());
    CHECK(classify_frame(c, frame(1, 3), &counters) == FrameDecision::event(EventClass::Out));
    CHECK(classify_frame(c, frame(1, 1), &counters) == FrameDecision::event(EventClass::Six));
    CHECK(counters.stage2_evaluations == 3);
    CHECK_THROWS_AS(classify_frame(c, FeatureVector({1.0f, 2.0f}), nullptr), DataError);
}

TEST_CASE("non-umpire frames short-circuit whatever stage 2 would say") {
    const auto c = make_cascade(presence_model(), pose_model(), "t", "t");
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(-6, 6);
    CascadeCounters counters;
    std::size_t umpire = 0;
    for (int i = 0; i < 500; ++i) {
        const auto x = frame(u(rng), u(rng));
        const auto d = classify_frame(c, x, &counters);
        if (x[0] > 0) ++umpire;
        else CHECK(d.is_discarded());
        CHECK(d == classify_frame(c, x));
        if (d.is_event()) CHECK(d.event_class() != EventClass::NoAction);
    }
    CHECK(counters.stage2_evaluations == umpire);
}

TEST_CASE("make_cascade refuses inconsistent stages") {
    CHECK_THROWS_AS(make_cascade(presence_model(), pose_model(), "inceptionv3-pool", "vgg19-fc1"), DataError);
    auto other = pose_model();
    other.dim = 4;
    for (auto& m : other.models) {
        m.dim = 4;
        m.w.push_back(0);
    }
    CHECK_THROWS_AS(make_cascade(presence_model(), other, "t", "t"), DataError);
    CHECK_THROWS_AS(make_cascade(pose_model(), pose_model(), "t", "t"), DataError);
}

TEST_CASE("cascade bundle persistence") {
    const auto c = make_cascade(presence_model(), pose_model(), "vgg19-fc1", "vgg19-fc1");
    const auto b = save_cascade(c);
    CHECK(std::string(b.begin(), b.begin() + 8) == "SNOWCSC1");
    const auto back = load_cascade(b);
    CHECK(back == c);
    CHECK(back.source_tag == "vgg19-fc1");

    auto bad = b;
    bad[3] = '?';
    CHECK_THROWS_AS(load_cascade(bad), DataError);
    bad = b;
    bad.resize(b.size() - 4);
    CHECK_THROWS_AS(load_cascade(bad), DataError);

    // Hand-assemble a bundle with 2048 vs 4096 stage dims.
    MulticlassModel s1;
    s1.dim = 2048;
    s1.classes = {0, 1};
    for (int k = 0; k < 2; ++k) s1.models.push_back(BinaryLinearModel{std::vector<double>(2049, 0.5), true, 10, 2048});
    MulticlassModel s2;
    s2.dim = 4096;
    s2.classes = {0, 1, 2, 3, 4};
    for (int k = 0; k < 5; ++k) s2.models.push_back(BinaryLinearModel{std::vector<double>(4097, 0.25), true, 10, 4096});
    io::ByteWriter w;
    w.raw(std::string_view("SNOWCSC1"));
    for (const auto* s : {&s1, &s2}) {
        const auto p = save_model(*s);
        w.u32(static_cast<std::uint32_t>(p.size()));
        w.raw(p);
    }
    w.str16("mixed");
    CHECK_THROWS_WITH_AS(load_cascade(w.bytes()), doctest::Contains("dims disagree"), DataError);
}

TEST_CASE("training both stages from a labeled store") {
    snow::testing::GaussianClasses g(12, 1.0, 10.0, 5);
    const std::vector<std::uint8_t> codes{0, 1, 2, 3, 4, 5};
    const auto store = snow::testing::make_class_store(g, codes, 20, "baseline112");
    MulticlassReport r1, r2;
    const auto c = train_cascade(store, {}, &r1, &r2);
    CHECK(c.source_tag == "baseline112");
    CHECK(c.stage1.classes == std::vector<std::uint8_t>{0, 1});
    CHECK(c.stage2.classes.size() == 5);
    for (const auto& r : store.records) {
        const auto d = classify_frame(c, r.vector);
        if (r.class_code == kNonUmpireCode) CHECK(d.is_discarded());
        else CHECK(d == snow::testing::decision_for_code(r.class_code));
    }

    SUBCASE("presence needs non-umpire examples") {
        auto umpire_only = store;
        std::erase_if(umpire_only.records, [](const auto& r) { return r.class_code == kNonUmpireCode; });
        CHECK_THROWS_WITH_AS(train_presence(umpire_only, {}), doctest::Contains("missing non-umpire class"), DataError);
    }
    SUBCASE("pose needs all five classes") {
        auto partial = store;
        std::erase_if(partial.records, [](const auto& r) { return r.class_code == 2; });
        CHECK_THROWS_AS(train_pose(partial, {}), DataError);
    }
}
