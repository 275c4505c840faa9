#pragma once
// Classifier validation (stratified hold-out, k-fold, leave-one-out) and
// event-level summarization metrics.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "snow/domain.hpp"
#include "snow/features.hpp"
#include "snow/linsvm.hpp"
#include "snow/summarizer.hpp"

namespace snow {

struct TrainTestSplit {
    std::vector<std::size_t> train; // ascending
    std::vector<std::size_t> test;  // ascending
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// Test size is floor(n * fraction). Each class first gets floor(n_c * fraction)
// test items; the leftover slots go to the largest fractional remainders
// (ties to the smaller class code). Items are chosen by a seeded shuffle.
TrainTestSplit stratified_split(std::span<const std::uint8_t> labels, double test_fraction, std::uint64_t seed);

struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<int> fold_of; // per item
    std::vector<std::string> warnings;

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
    std::vector<std::size_t> fold_sizes() const;
};

// Classes are shuffled independently, then dealt round-robin with one running
// fold counter, so every fold gets floor or ceil of each class's share and
// fold sizes differ by at most one.
FoldPlan stratified_folds(std::span<const std::uint8_t> labels, int k, std::uint64_t seed);

struct CvResult {
    std::vector<double> fold_accuracies;
    std::vector<std::size_t> fold_sizes;
    double mean_accuracy = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

double accuracy(const MulticlassModel& model, std::span<const FeatureVector> X, std::span<const std::uint8_t> labels);

CvResult kfold_cv(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                  int k, std::uint64_t seed);

// Leave-one-out accuracy over n trainings.
double jackknife(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels, const TrainConfig& cfg);

struct HoldoutResult {
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double train_accuracy = 0;
    double test_accuracy = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

HoldoutResult holdout(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels, const TrainConfig& cfg,
                      double test_fraction, std::uint64_t seed);

struct EventCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    EventCounts& operator+=(const EventCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const EventCounts&) const = default;
};

// Greedy in segment order: a segment is a TP when some still-unmatched truth
// event of the same class overlaps it (earliest truth event wins), else an FP.
// Truth events left unmatched are FNs.
EventCounts match_events(std::span<const Segment> segments, std::span<const GroundTruthEvent> truth);

// TP / (TP + FN). Throws NumericError when undefined.
double tpr(const EventCounts& c);
// TP / (TP + FP). Throws NumericError when undefined.
double ppv(const EventCounts& c);

// Four decimals, truncated toward zero (11/12 prints as 0.9166).
std::string format_ratio(double v);

} // namespace snow
