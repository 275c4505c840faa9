#include "snow/error.hpp"
#include "snow/eval.hpp"
#include "snow/linsvm.hpp"

namespace snow {

GridSearchResult grid_search_C(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels,
                               std::span<const double> grid, int k, std::uint64_t seed, const TrainConfig& base) {
    if (grid.empty()) throw UsageError("grid search: empty C grid");
    for (double c : grid)
        if (!(c > 0.0)) throw UsageError("grid search: C values must be positive");

    GridSearchResult out;
    double best_acc = -1.0;
    for (double c : grid) {
        TrainConfig cfg = base;
        cfg.C = c;
        // Same seed for every C so all candidates see identical folds.
        auto cv = kfold_cv(X, labels, cfg, k, seed);
        if (out.table.empty()) out.warnings = cv.warnings;
        out.table.push_back({c, cv.mean_accuracy});
        if (cv.mean_accuracy > best_acc || (cv.mean_accuracy == best_acc && c < out.best_C)) {
            best_acc = cv.mean_accuracy;
            out.best_C = c;
        }
    }
    return out;
}

} // namespace snow
