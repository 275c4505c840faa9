// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "snow/cascade.hpp"
#include "snow/eval.hpp"
#include "snow/linsvm.hpp"
#include "snow/summarizer.hpp"
#include "support/oracle.hpp"
#include "support/synthetic.hpp"

using namespace snow;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects failures without stopping at the first one.
struct Check {
    bool ok = true;
    std::ostringstream first_failure;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) first_failure << what;
        ok = ok && cond;
    }
    Outcome outcome(const std::string& detail) const { return {ok, ok ? detail : first_failure.str()}; }
};

int failures = 0;

void criterion(const std::string& name, double limit_ms, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    const bool in_time = ms < limit_ms;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::printf("%s  %-22s %s [%.3f ms, limit %.0f ms%s]\n", pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                ms, limit_ms, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

FeatureVector fv(std::vector<float> v) { return FeatureVector(std::move(v)); }

// Independent reading of the window vote rule on raw per-class counts.
std::optional<EventClass> reference_vote(const std::array<int, 6>& counts) {
    int best_code = -1;
    for (int code = 1; code <= 4; ++code)
        if (counts[code] > 0 && (best_code < 0 || counts[code] > counts[best_code])) best_code = code;
    if (best_code < 0) return std::nullopt;
    if (counts[0] > counts[best_code]) return std::nullopt;
    return static_cast<EventClass>(best_code);
}

FrameDecision decision_of(int code) {
    return code == 5 ? FrameDecision::discarded() : FrameDecision::from_class(static_cast<EventClass>(code));
}

Outcome metric_identity() {
    const EventCounts c{11, 1, 1};
    const double t = tpr(c), p = ppv(c);
    Check k;
    k.expect(std::abs(t - 0.9167) <= 1e-4, "TPR off");
    k.expect(std::abs(p - 0.9167) <= 1e-4, "PPV off");
    k.expect(format_ratio(t) == "0.9166" && format_ratio(p) == "0.9166", "formatting off");
    return k.outcome("TPR=" + format_ratio(t) + " PPV=" + format_ratio(p));
}

Outcome solver_oracle() {
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> g(0.0, 1.0);
    Check k;
    double worst = -1e300;
    int not_converged = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng() % 19;
        const std::size_t d = 1 + rng() % 3;
        const double C = std::array{1.0, 10.0, 20.0}[rng() % 3];
        std::vector<FeatureVector> X;
        std::vector<int> y;
        snow::testing::DenseProblem p;
        p.C = C;
        for (std::size_t i = 0; i < n; ++i) {
            const int label = i == 0 ? 1 : (i == 1 ? -1 : (rng() % 2 ? 1 : -1));
            std::vector<float> v(d);
            for (auto& x : v) x = static_cast<float>(g(rng) + 0.8 * label);
            std::vector<double> row(v.begin(), v.end());
            row.push_back(1.0);
            p.x.push_back(std::move(row));
            p.y.push_back(label);
            X.push_back(fv(std::move(v)));
            y.push_back(label);
        }
        TrainConfig cfg;
        cfg.C = C;
        cfg.seed = static_cast<std::uint64_t>(t);
        cfg.max_epochs = 100000;
        TrainReport rep;
        const auto m = train_binary(X, y, cfg, &rep);
        if (!rep.converged) ++not_converged;
        const double gap = objective(m, X, y) - snow::testing::primal_gradient_descent(p).objective;
        worst = std::max(worst, gap);
    }
    k.expect(not_converged == 0, std::to_string(not_converged) + " runs hit the epoch cap");
    k.expect(worst <= 1e-4, "objective exceeds oracle by " + std::to_string(worst));
    char buf[96];
    std::snprintf(buf, sizeof buf, "100 datasets, max(f_svm - f_oracle)=%.3g", worst);
    return k.outcome(buf);
}

Outcome analytic() {
    TrainConfig cfg;
    cfg.C = 10;
    cfg.bias_augmented = false;
    const auto m = train_binary(std::vector<FeatureVector>{fv({1, 0}), fv({-1, 0})}, std::vector<int>{1, -1}, cfg);
    const double e0 = std::abs(m.w[0] - 40.0 / 41.0), e1 = std::abs(m.w[1]);
    char buf[96];
    std::snprintf(buf, sizeof buf, "w=(%.6f, %.6f), target (%.6f, 0)", m.w[0], m.w[1], 40.0 / 41.0);
    return {e0 <= 1e-3 && e1 <= 1e-3, buf};
}

Outcome end_to_end() {
    snow::testing::GaussianClasses g(16, 1.0, 10.0, 78);
    const std::vector<std::uint8_t> codes{0, 1, 2, 3, 4, kNonUmpireCode};
    const auto store = snow::testing::make_class_store(g, codes, 78);
    Check k;
    for (const auto& r : store.records) k.expect(g.nearest_mean(r.vector, codes) == r.class_code, "data not separable");

    TrainConfig cfg;
    cfg.C = 10;
    const auto pres = labeled_set(store, Task::Presence);
    const auto pose = labeled_set(store, Task::Pose);
    const auto cv1 = kfold_cv(pres.X, pres.labels, cfg, 10, 1);
    const auto cv2 = kfold_cv(pose.X, pose.labels, cfg, 10, 1);
    k.expect(cv1.mean_accuracy >= 0.99, "presence CV below 0.99");
    k.expect(cv2.mean_accuracy >= 0.99, "pose CV below 0.99");

    const auto cascade = train_cascade(store, cfg);
    const auto ps = snow::testing::plant_events(10, 250, 150, 3);
    k.expect(ps.frame_codes.size() == 2500, "stream length");
    WindowSummarizer summ(WindowConfig{});
    std::vector<Segment> segs;
    for (std::size_t f = 0; f < ps.frame_codes.size(); ++f)
        if (auto s = summ.push(static_cast<std::int64_t>(f), classify_frame(cascade, g.sample(ps.frame_codes[f]))))
            segs.push_back(*s);
    if (auto s = summ.finish()) segs.push_back(*s);
    const auto counts = match_events(segs, ps.truth);
    k.expect(tpr(counts) == 1.0 && ppv(counts) == 1.0, "event metrics below 1.0");

    char buf[160];
    std::snprintf(buf, sizeof buf, "CV presence=%.4f pose=%.4f; %zu events, TP=%zu FP=%zu FN=%zu", cv1.mean_accuracy,
                  cv2.mean_accuracy, ps.truth.size(), counts.tp, counts.fp, counts.fn);
    return k.outcome(buf);
}

Outcome voting() {
    std::mt19937_64 rng(77);
    Check k;
    int suppressed = 0, ties = 0;
    for (int t = 0; t < 1000; ++t) {
        std::array<int, 6> counts{};
        // Small count ranges make ties and NoAction-vs-event collisions common.
        const int spread = 1 + static_cast<int>(rng() % 40);
        for (auto& c : counts) c = static_cast<int>(rng() % (spread + 1));
        if (t % 4 == 0) counts[1 + rng() % 4] = counts[1 + rng() % 4];
        if (t % 5 == 0) counts[0] = *std::max_element(counts.begin() + 1, counts.begin() + 5);
        if (std::accumulate(counts.begin(), counts.end(), 0) == 0) counts[5] = 1;

        std::vector<FrameDecision> d;
        for (int code = 0; code < 6; ++code) d.insert(d.end(), counts[code], decision_of(code));
        const auto expected = reference_vote(counts);
        const auto got = vote(d);
        k.expect(got == expected, "vote differs from rule at window " + std::to_string(t));
        for (int p = 0; p < 3; ++p) {
            std::shuffle(d.begin(), d.end(), rng);
            k.expect(vote(d) == got, "permutation changed the vote at window " + std::to_string(t));
        }
        const int best = *std::max_element(counts.begin() + 1, counts.begin() + 5);
        if (best > 0 && counts[0] > best) ++suppressed;
        if (best > 0 && std::count(counts.begin() + 1, counts.begin() + 5, best) > 1) ++ties;
    }
    k.expect(suppressed > 50 && ties > 50, "randomization did not exercise suppression and ties");

    const WindowConfig cfg;
    WindowSummarizer s(cfg);
    std::size_t segments = 0;
    for (std::int64_t f = 0; f < 10 * 250; ++f) {
        if (s.push(f, decision_of(f % 250 < 200 ? 3 : 5))) ++segments;
        k.expect(s.buffered() <= cfg.window_frames, "buffer grew past one window");
    }
    if (s.finish()) ++segments;
    k.expect(s.peak_buffered() <= cfg.window_frames, "peak buffer past one window");
    k.expect(segments == 10, "expected 10 segments");

    return k.outcome("1000 windows, " + std::to_string(suppressed) + " suppressed, " + std::to_string(ties) +
                     " event ties; peak buffer " + std::to_string(s.peak_buffered()) + " frames");
}

MulticlassModel random_model(std::mt19937_64& rng, std::vector<std::uint8_t> classes, std::size_t dim, bool bias) {
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    MulticlassModel m;
    m.dim = dim;
    m.classes = std::move(classes);
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        BinaryLinearModel b;
        b.dim = dim;
        b.bias_augmented = bias;
        b.C = 0.5 + static_cast<double>(rng() % 40);
        b.w.resize(dim + (bias ? 1 : 0));
        for (auto& w : b.w) {
            switch (rng() % 6) {
            case 0: w = 0.0; break;
            case 1: w = -0.0; break;
            case 2: w = std::numeric_limits<double>::denorm_min() * static_cast<double>(rng() % 100); break;
            default: w = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
            }
        }
        m.models.push_back(std::move(b));
    }
    return m;
}

bool same_bits(const MulticlassModel& a, const MulticlassModel& b) {
    if (a.classes != b.classes || a.dim != b.dim || a.models.size() != b.models.size()) return false;
    for (std::size_t i = 0; i < a.models.size(); ++i) {
        const auto &x = a.models[i], &y = b.models[i];
        if (x.w.size() != y.w.size() || x.bias_augmented != y.bias_augmented || x.dim != y.dim) return false;
        if (std::memcmp(&x.C, &y.C, sizeof(double)) != 0) return false;
        if (std::memcmp(x.w.data(), y.w.data(), x.w.size() * sizeof(double)) != 0) return false;
    }
    return true;
}

std::string random_tag(std::mt19937_64& rng) {
    std::string s(rng() % 24, ' ');
    for (auto& c : s) c = static_cast<char>(33 + rng() % 94);
    return s;
}

Outcome persistence() {
    std::mt19937_64 rng(5150);
    Check k;
    for (int t = 0; t < 100; ++t) {
        std::vector<std::uint8_t> classes;
        for (std::uint8_t c = 0; c < 6; ++c)
            if (rng() % 2) classes.push_back(c);
        if (classes.empty()) classes.push_back(static_cast<std::uint8_t>(rng() % 6));
        const auto m = random_model(rng, classes, 1 + rng() % 64, rng() % 2);
        const auto bytes = save_model(m);
        const auto back = load_model(bytes);
        k.expect(same_bits(m, back) && save_model(back) == bytes, "model round trip " + std::to_string(t));

        const std::size_t dim = 1 + rng() % 32;
        const bool bias = rng() % 2;
        CascadeModel c;
        c.stage1 = random_model(rng, {0, 1}, dim, bias);
        c.stage2 = random_model(rng, {0, 1, 2, 3, 4}, dim, bias);
        c.source_tag = random_tag(rng);
        const auto cb = save_cascade(c);
        const auto cback = load_cascade(cb);
        k.expect(same_bits(c.stage1, cback.stage1) && same_bits(c.stage2, cback.stage2) &&
                     c.source_tag == cback.source_tag && save_cascade(cback) == cb,
                 "cascade round trip " + std::to_string(t));

        FeatureStore s;
        s.source_tag = random_tag(rng);
        s.dim = static_cast<std::uint32_t>(1 + rng() % 128);
        const std::size_t n = rng() % 40;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<float> v(s.dim);
            for (auto& x : v) {
                std::uint32_t bits;
                do {
                    bits = static_cast<std::uint32_t>(rng());
                    std::memcpy(&x, &bits, sizeof x);
                } while (!std::isfinite(x));
            }
            s.records.push_back({static_cast<std::uint32_t>(rng()), static_cast<std::uint8_t>(rng() % 6), fv(v)});
        }
        const auto sb = write_store(s);
        const auto sback = read_store(sb);
        bool payload_same = sback.records.size() == s.records.size();
        for (std::size_t i = 0; payload_same && i < n; ++i)
            payload_same = sback.records[i].id == s.records[i].id &&
                           sback.records[i].class_code == s.records[i].class_code &&
                           std::memcmp(sback.records[i].vector.values().data(), s.records[i].vector.values().data(),
                                       s.dim * sizeof(float)) == 0;
        k.expect(payload_same && sback.source_tag == s.source_tag && write_store(sback) == sb,
                 "store round trip " + std::to_string(t));
    }
    return k.outcome("100 models, 100 cascades, 100 stores bit-exact");
}

Outcome partitions() {
    Check k;
    std::vector<std::uint8_t> labels;
    for (std::uint8_t c = 0; c < 5; ++c) labels.insert(labels.end(), 78, c);
    const auto split = stratified_split(labels, 0.2, 7);
    k.expect(split.train.size() == 312 && split.test.size() == 78, "80/20 sizes");
    const auto folds = stratified_folds(labels, 10, 7);
    k.expect(folds.fold_sizes() == std::vector<std::size_t>(10, 39), "fold sizes");

    auto exact = [](std::vector<std::size_t> a, const std::vector<std::size_t>& b, std::size_t n) {
        a.insert(a.end(), b.begin(), b.end());
        std::sort(a.begin(), a.end());
        if (a.size() != n) return false;
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] != i) return false;
        return true;
    };
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::uint8_t> l(12 + rng() % 300);
        for (auto& x : l) x = static_cast<std::uint8_t>(rng() % 6);
        const auto s = stratified_split(l, 0.2, rng());
        k.expect(exact(s.train, s.test, l.size()), "split not a partition");
        const int kf = 2 + static_cast<int>(rng() % 9);
        const auto p = stratified_folds(l, kf, rng());
        std::vector<int> hits(l.size(), 0);
        for (int f = 0; f < kf; ++f) {
            const auto te = p.test_indices(f);
            k.expect(exact(te, p.train_indices(f), l.size()), "fold not a partition");
            for (auto i : te) ++hits[i];
        }
        k.expect(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }), "item not in exactly one fold");
    }
    return k.outcome("312/78, 10x39, 200 random label vectors exact");
}

} // namespace

int main() {
    criterion("metric-identity", 1, metric_identity);
    criterion("solver-oracle", 10000, solver_oracle);
    criterion("analytic-solution", 10, analytic);
    criterion("end-to-end-pipeline", 60000, end_to_end);
    criterion("voting-properties", 5000, voting);
    criterion("persistence", 5000, persistence);
    criterion("evaluation-partitions", 1000, partitions);
    std::printf("%s: %d failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
