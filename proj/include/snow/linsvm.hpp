#pragma once
// L2-regularized squared-hinge linear SVM.
//
// Primal:  f(w) = 1/2 |w|^2 + C * sum_i max(0, 1 - y_i w.x_i)^2
// Dual:    min_a  1/2 a'(Q + I/(2C))a - e'a,  a >= 0,  Q_ij = y_i y_j x_i.x_j
//
// Solved by dual coordinate descent: w = sum_i a_i y_i x_i is maintained
// incrementally and every example gets one closed-form projected Newton step
// per epoch, visiting examples in a freshly shuffled order. With bias
// augmentation each x carries a trailing constant 1 and the bias weight is
// regularized like any other coordinate.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "snow/binary_io.hpp"
#include "snow/features.hpp"

namespace snow {

struct TrainConfig {
    double C = 10.0;
    double tolerance = 1e-4; // on the max projected-gradient violation of an epoch
    int max_epochs = 1000;
    std::uint64_t seed = 0;
    bool bias_augmented = true;

    void validate() const;
};

struct BinaryLinearModel {
    std::vector<double> w; // dim entries, plus a trailing bias weight when augmented
    bool bias_augmented = true;
    double C = 10.0;
    std::size_t dim = 0;

    void validate() const;
    bool operator==(const BinaryLinearModel&) const = default;
};

struct TrainReport {
    int epochs = 0;
    double max_violation = 0.0;
    bool converged = false;
};

struct EpochInfo {
    int epoch = 0;            // 1-based
    double max_violation = 0;
    std::span<const double> w;
    std::span<const double> alpha; // dual variables, one per example
};

using EpochCallback = std::function<void(const EpochInfo&)>;

// Labels must be +1 / -1 with both signs present.
BinaryLinearModel train_binary(std::span<const FeatureVector> X, std::span<const int> y, const TrainConfig& cfg,
                               TrainReport* report = nullptr, const EpochCallback& on_epoch = {});

// Primal objective at the model's weights, using the model's C.
double objective(const BinaryLinearModel& model, std::span<const FeatureVector> X, std::span<const int> y);
// Same objective for raw augmented weights; shared with tests and the solver itself.
double objective(std::span<const double> w, bool bias_augmented, double C, std::span<const FeatureVector> X,
                 std::span<const int> y);
// Dual objective 1/2 |w|^2 + |alpha|^2 / (4C) - sum(alpha), with w = sum_i alpha_i y_i x_i.
// Coordinate descent never increases it, and objective(w) + dual_objective(...) >= 0.
double dual_objective(std::span<const double> w, std::span<const double> alpha, double C);

double decision_value(const BinaryLinearModel& model, const FeatureVector& x);
// sign with sign(0) = +1
int predict_binary(const BinaryLinearModel& model, const FeatureVector& x);

struct MulticlassModel {
    std::vector<std::uint8_t> classes; // ascending
    std::vector<BinaryLinearModel> models;
    std::size_t dim = 0;

    void validate() const;
    bool operator==(const MulticlassModel&) const = default;
};

struct MulticlassReport {
    std::vector<TrainReport> per_class;

    bool all_converged() const;
    int max_epochs() const;
    double max_violation() const;
};

// One-vs-rest: one binary model per distinct label, that label +1 and the rest -1.
// Per-class problems are trained concurrently; output is in class-code order.
MulticlassModel train_ovr(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels,
                          const TrainConfig& cfg, MulticlassReport* report = nullptr);

std::vector<double> decision_values(const MulticlassModel& model, const FeatureVector& x);
// Argmax of the per-class decision values; ties go to the smallest class code.
std::uint8_t predict_multi(const MulticlassModel& model, const FeatureVector& x);

std::vector<double> default_C_grid(); // 1, 2, ..., 20

struct GridSearchRow {
    double C = 0;
    double mean_accuracy = 0;
};

struct GridSearchResult {
    double best_C = 0;
    std::vector<GridSearchRow> table;
    std::vector<std::string> warnings;
};

// Stratified k-fold CV accuracy for every C; best is highest mean, ties to smallest C.
GridSearchResult grid_search_C(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels,
                               std::span<const double> grid, int k, std::uint64_t seed,
                               const TrainConfig& base = {});

// SNOWMDL1 format.
io::Bytes save_model(const MulticlassModel& model);
MulticlassModel load_model(std::span<const std::uint8_t> bytes);

void save_model_file(const std::string& path, const MulticlassModel& model);
MulticlassModel load_model_file(const std::string& path);

} // namespace snow
