#include "snow/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "snow/error.hpp"

namespace snow {

namespace {

std::map<std::uint8_t, std::vector<std::size_t>> group_by_class(std::span<const std::uint8_t> labels) {
    std::map<std::uint8_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    return groups;
}

template <typename T>
std::vector<T> gather(std::span<const T> v, std::span<const std::size_t> idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

void check_sizes(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels) {
    if (X.size() != labels.size()) throw DataError("label count does not match example count");
}

} // namespace

TrainTestSplit stratified_split(std::span<const std::uint8_t> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw UsageError("test fraction must lie in (0, 1)");
    if (labels.empty()) throw DataError("stratified split: no items");

    auto groups = group_by_class(labels);
    std::mt19937_64 rng(seed);
    for (auto& [code, idx] : groups) std::shuffle(idx.begin(), idx.end(), rng);

    // Small epsilon so products like 0.29 * 100 are not floored to 28.
    auto floor_eps = [](double v) { return static_cast<std::size_t>(std::floor(v + 1e-9)); };
    const std::size_t total_test = floor_eps(static_cast<double>(labels.size()) * test_fraction);

    struct Quota {
        std::uint8_t code;
        std::size_t n;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (const auto& [code, idx] : groups) {
        const double exact = static_cast<double>(idx.size()) * test_fraction;
        const auto q = floor_eps(exact);
        quotas.push_back({code, q, std::max(0.0, exact - static_cast<double>(q))});
        assigned += q;
    }
    std::vector<std::size_t> by_remainder(quotas.size());
    std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
    std::stable_sort(by_remainder.begin(), by_remainder.end(),
                     [&](auto a, auto b) { return quotas[a].remainder > quotas[b].remainder; });
    for (std::size_t j = 0; assigned < total_test && j < by_remainder.size(); ++j, ++assigned)
        ++quotas[by_remainder[j]].n;

    TrainTestSplit out;
    out.seed = seed;
    std::size_t qi = 0;
    for (const auto& [code, idx] : groups) {
        const auto q = quotas[qi++].n;
        if (q == 0)
            out.warnings.push_back("class " + std::string(class_code_name(code)) + " has no test items");
        if (q == idx.size())
            out.warnings.push_back("class " + std::string(class_code_name(code)) + " has no training items");
        out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(q));
        out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(q), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

FoldPlan stratified_folds(std::span<const std::uint8_t> labels, int k, std::uint64_t seed) {
    if (k < 2) throw UsageError("k-fold needs k >= 2");
    if (labels.size() < static_cast<std::size_t>(k))
        throw DataError("stratification infeasible: " + std::to_string(labels.size()) + " items for " +
                        std::to_string(k) + " folds");

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_of.assign(labels.size(), -1);

    auto groups = group_by_class(labels);
    std::mt19937_64 rng(seed);
    int next = 0;
    for (auto& [code, idx] : groups) {
        if (idx.size() < static_cast<std::size_t>(k))
            plan.warnings.push_back("class " + std::string(class_code_name(code)) + " has " +
                                    std::to_string(idx.size()) + " items, fewer than " + std::to_string(k) +
                                    " folds");
        std::shuffle(idx.begin(), idx.end(), rng);
        for (auto i : idx) {
            plan.fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    return plan;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(k), 0);
    for (int f : fold_of) ++out[static_cast<std::size_t>(f)];
    return out;
}

double accuracy(const MulticlassModel& model, std::span<const FeatureVector> X, std::span<const std::uint8_t> labels) {
    check_sizes(X, labels);
    if (X.empty()) throw NumericError("accuracy of an empty set is undefined");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < X.size(); ++i)
        if (predict_multi(model, X[i]) == labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(X.size());
}

CvResult kfold_cv(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                  int k, std::uint64_t seed) {
    check_sizes(X, labels);
    auto plan = stratified_folds(labels, k, seed);
    CvResult out;
    out.seed = seed;
    out.warnings = plan.warnings;
    for (int f = 0; f < k; ++f) {
        const auto tr = plan.train_indices(f);
        const auto te = plan.test_indices(f);
        const auto Xtr = gather(X, tr);
        const auto ytr = gather(labels, tr);
        const auto model = train_ovr(Xtr, ytr, cfg);
        const auto Xte = gather(X, te);
        const auto yte = gather(labels, te);
        out.fold_accuracies.push_back(accuracy(model, Xte, yte));
        out.fold_sizes.push_back(te.size());
    }
    out.mean_accuracy = std::accumulate(out.fold_accuracies.begin(), out.fold_accuracies.end(), 0.0) / k;
    return out;
}

double jackknife(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels, const TrainConfig& cfg) {
    check_sizes(X, labels);
    const auto n = X.size();
    if (n < 2) throw DataError("jackknife needs at least two examples");
    std::size_t correct = 0;
    std::vector<FeatureVector> Xtr;
    std::vector<std::uint8_t> ytr;
    Xtr.reserve(n - 1);
    ytr.reserve(n - 1);
    for (std::size_t held = 0; held < n; ++held) {
        Xtr.clear();
        ytr.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (i != held) {
                Xtr.push_back(X[i]);
                ytr.push_back(labels[i]);
            }
        const auto model = train_ovr(Xtr, ytr, cfg);
        if (predict_multi(model, X[held]) == labels[held]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

HoldoutResult holdout(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                      double test_fraction, std::uint64_t seed) {
    check_sizes(X, labels);
    auto split = stratified_split(labels, test_fraction, seed);
    if (split.test.empty()) throw DataError("hold-out split produced an empty test set");
    const auto Xtr = gather(X, split.train);
    const auto ytr = gather(labels, split.train);
    const auto model = train_ovr(Xtr, ytr, cfg);
    const auto Xte = gather(X, split.test);
    const auto yte = gather(labels, split.test);
    HoldoutResult out;
    out.train_size = split.train.size();
    out.test_size = split.test.size();
    out.train_accuracy = accuracy(model, Xtr, ytr);
    out.test_accuracy = accuracy(model, Xte, yte);
    out.seed = seed;
    out.warnings = std::move(split.warnings);
    return out;
}

EventCounts match_events(std::span<const Segment> segments, std::span<const GroundTruthEvent> truth) {
    for (const auto& t : truth) validate(t);
    {
        std::vector<std::pair<std::int64_t, std::int64_t>> iv;
        for (const auto& s : segments) {
            if (s.end_frame < s.start_frame) throw DataError("match_events: invalid segment interval");
            iv.emplace_back(s.start_frame, s.end_frame);
        }
        std::sort(iv.begin(), iv.end());
        for (std::size_t i = 1; i < iv.size(); ++i)
            if (iv[i].first <= iv[i - 1].second) throw DataError("match_events: overlapping segments");
    }

    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return std::pair{truth[a].start_frame, truth[a].end_frame} < std::pair{truth[b].start_frame, truth[b].end_frame};
    });

    std::vector<bool> matched(truth.size(), false);
    EventCounts c;
    for (const auto& s : segments) {
        bool hit = false;
        for (auto t : order) {
            const auto& ev = truth[t];
            if (matched[t] || ev.event != s.event) continue;
            if (ev.start_frame <= s.end_frame && s.start_frame <= ev.end_frame) {
                matched[t] = true;
                hit = true;
                break;
            }
        }
        ++(hit ? c.tp : c.fp);
    }
    c.fn = static_cast<std::size_t>(std::count(matched.begin(), matched.end(), false));
    return c;
}

double tpr(const EventCounts& c) {
    if (c.tp + c.fn == 0) throw NumericError("TPR undefined: TP + FN == 0");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double ppv(const EventCounts& c) {
    if (c.tp + c.fp == 0) throw NumericError("PPV undefined: TP + FP == 0");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::string format_ratio(double v) {
    // Nudge before truncating so exact ratios such as 0.25 are not printed as 0.2499.
    const double t = std::floor(v * 10000.0 + 1e-7) / 10000.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", t);
    return buf;
}

} // namespace snow
