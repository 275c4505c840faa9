#include "snow/linsvm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "snow/error.hpp"

namespace snow {

void TrainConfig::validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw UsageError("TrainConfig: C must be positive");
    if (!(tolerance > 0.0)) throw UsageError("TrainConfig: tolerance must be positive");
    if (max_epochs <= 0) throw UsageError("TrainConfig: max_epochs must be positive");
}

void BinaryLinearModel::validate() const {
    if (dim == 0) throw DataError("linear model: dim must be positive");
    if (w.size() != dim + (bias_augmented ? 1 : 0))
        throw DataError("linear model: weight length does not match dim and bias flag");
    if (!(C > 0.0)) throw DataError("linear model: C must be positive");
}

namespace {

// Row-major design matrix in f64, one extra column of ones when bias-augmented.
struct DesignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

std::size_t check_dims(std::span<const FeatureVector> X) {
    if (X.empty()) throw DataError("training set is empty");
    const auto d = X.front().dim();
    if (d == 0) throw DataError("feature vectors must have positive dimension");
    for (std::size_t i = 0; i < X.size(); ++i)
        if (X[i].dim() != d)
            throw DataError("dimension mismatch at example " + std::to_string(i) + ": " +
                            std::to_string(X[i].dim()) + " vs " + std::to_string(d));
    return d;
}

DesignMatrix make_design(std::span<const FeatureVector> X, std::size_t dim, bool bias) {
    DesignMatrix m;
    m.rows = X.size();
    m.cols = dim + (bias ? 1 : 0);
    m.data.reserve(m.rows * m.cols);
    for (const auto& x : X) {
        for (float v : x.values()) m.data.push_back(v);
        if (bias) m.data.push_back(1.0);
    }
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

double dot(std::span<const double> w, const FeatureVector& x, bool bias) {
    double s = 0.0;
    const auto v = x.values();
    for (std::size_t j = 0; j < v.size(); ++j) s += w[j] * v[j];
    if (bias) s += w[v.size()];
    return s;
}

void check_labels(std::span<const int> y, std::size_t n) {
    if (y.size() != n) throw DataError("label count does not match example count");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw DataError("binary labels must be +1 or -1");
    }
    if (!pos || !neg) throw DataError("training set contains a single class");
}

} // namespace

BinaryLinearModel train_binary(std::span<const FeatureVector> X, std::span<const int> y, const TrainConfig& cfg,
                               TrainReport* report, const EpochCallback& on_epoch) {
    cfg.validate();
    const auto dim = check_dims(X);
    check_labels(y, X.size());

    const auto A = make_design(X, dim, cfg.bias_augmented);
    const std::size_t n = A.rows;
    const double diag = 0.5 / cfg.C;

    std::vector<double> w(A.cols, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = A.row(i);
        qd[i] = dot(xi, xi) + diag;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.seed);

    TrainReport rep;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double max_violation = 0.0;
        for (auto i : order) {
            auto xi = A.row(i);
            const double yi = y[i];
            const double g = yi * dot(w, xi) - 1.0 + alpha[i] * diag;
            // Only the lower bound a_i >= 0 can be active.
            const double pg = alpha[i] == 0.0 ? std::min(g, 0.0) : g;
            max_violation = std::max(max_violation, std::abs(pg));
            if (std::abs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::max(old - g / qd[i], 0.0);
                const double step = (alpha[i] - old) * yi;
                for (std::size_t j = 0; j < w.size(); ++j) w[j] += step * xi[j];
            }
        }
        rep.epochs = epoch;
        rep.max_violation = max_violation;
        if (on_epoch) on_epoch(EpochInfo{epoch, max_violation, w, alpha});
        if (max_violation <= cfg.tolerance) {
            rep.converged = true;
            break;
        }
    }
    if (report) *report = rep;

    BinaryLinearModel model{std::move(w), cfg.bias_augmented, cfg.C, dim};
    return model;
}

double objective(std::span<const double> w, bool bias_augmented, double C, std::span<const FeatureVector> X,
                 std::span<const int> y) {
    if (y.size() != X.size()) throw DataError("label count does not match example count");
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].dim() + (bias_augmented ? 1 : 0) != w.size())
            throw DataError("dimension mismatch at example " + std::to_string(i));
        const double margin = 1.0 - y[i] * dot(w, X[i], bias_augmented);
        if (margin > 0.0) loss += margin * margin;
    }
    return 0.5 * reg + C * loss;
}

double dual_objective(std::span<const double> w, std::span<const double> alpha, double C) {
    double ww = 0.0, aa = 0.0, sum = 0.0;
    for (double v : w) ww += v * v;
    for (double a : alpha) {
        aa += a * a;
        sum += a;
    }
    return 0.5 * ww + aa / (4.0 * C) - sum;
}

double objective(const BinaryLinearModel& model, std::span<const FeatureVector> X, std::span<const int> y) {
    model.validate();
    return objective(model.w, model.bias_augmented, model.C, X, y);
}

double decision_value(const BinaryLinearModel& model, const FeatureVector& x) {
    if (x.dim() != model.dim)
        throw DataError("dimension mismatch: model dim " + std::to_string(model.dim) + ", input dim " +
                        std::to_string(x.dim()));
    return dot(model.w, x, model.bias_augmented);
}

int predict_binary(const BinaryLinearModel& model, const FeatureVector& x) {
    return decision_value(model, x) >= 0.0 ? 1 : -1;
}

void MulticlassModel::validate() const {
    if (classes.empty()) throw DataError("multiclass model has no classes");
    if (classes.size() != models.size()) throw DataError("multiclass model: class/model count mismatch");
    if (!std::is_sorted(classes.begin(), classes.end()) ||
        std::adjacent_find(classes.begin(), classes.end()) != classes.end())
        throw DataError("multiclass model: class codes must be strictly ascending");
    for (const auto& m : models) {
        m.validate();
        if (m.dim != dim) throw DataError("multiclass model: member dims disagree");
        if (m.bias_augmented != models.front().bias_augmented)
            throw DataError("multiclass model: member bias flags disagree");
    }
}

bool MulticlassReport::all_converged() const {
    return std::all_of(per_class.begin(), per_class.end(), [](const auto& r) { return r.converged; });
}

int MulticlassReport::max_epochs() const {
    int m = 0;
    for (const auto& r : per_class) m = std::max(m, r.epochs);
    return m;
}

double MulticlassReport::max_violation() const {
    double m = 0;
    for (const auto& r : per_class) m = std::max(m, r.max_violation);
    return m;
}

MulticlassModel train_ovr(std::span<const FeatureVector> X, std::span<const std::uint8_t> labels,
                          const TrainConfig& cfg, MulticlassReport* report) {
    cfg.validate();
    if (X.empty()) throw DataError("training set is empty");
    if (labels.size() != X.size()) throw DataError("label count does not match example count");
    const auto dim = check_dims(X);

    const std::set<std::uint8_t> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw DataError("one-vs-rest training needs at least two classes");
    const std::vector<std::uint8_t> classes(distinct.begin(), distinct.end());

    std::vector<std::future<std::pair<BinaryLinearModel, TrainReport>>> jobs;
    jobs.reserve(classes.size());
    for (auto c : classes) {
        jobs.push_back(std::async(std::launch::async, [&, c] {
            std::vector<int> y(labels.size());
            for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == c ? 1 : -1;
            TrainReport r;
            auto m = train_binary(X, y, cfg, &r);
            return std::pair{std::move(m), r};
        }));
    }

    MulticlassModel out;
    out.classes = classes;
    out.dim = dim;
    MulticlassReport rep;
    for (auto& j : jobs) {
        auto [m, r] = j.get();
        out.models.push_back(std::move(m));
        rep.per_class.push_back(r);
    }
    if (report) *report = std::move(rep);
    return out;
}

std::vector<double> decision_values(const MulticlassModel& model, const FeatureVector& x) {
    std::vector<double> out;
    out.reserve(model.models.size());
    for (const auto& m : model.models) out.push_back(decision_value(m, x));
    return out;
}

std::uint8_t predict_multi(const MulticlassModel& model, const FeatureVector& x) {
    if (model.models.empty()) throw DataError("multiclass model has no classes");
    const auto dv = decision_values(model, x);
    // Classes are ascending, so the first maximum is the smallest code.
    std::size_t best = 0;
    for (std::size_t i = 1; i < dv.size(); ++i)
        if (dv[i] > dv[best]) best = i;
    return model.classes[best];
}

std::vector<double> default_C_grid() {
    std::vector<double> g(20);
    std::iota(g.begin(), g.end(), 1.0);
    return g;
}

namespace {
constexpr std::string_view kModelMagicStem = "SNOWMDL";
constexpr char kModelVersion = '1';
} // namespace

// Layout: magic, u8 bias flag, u32 dim, u32 n_classes, per class {u8 code, f64 weights},
// then a trailer of n_classes f64 regularization constants.
io::Bytes save_model(const MulticlassModel& model) {
    model.validate();
    io::ByteWriter w;
    w.raw(kModelMagicStem);
    w.u8(static_cast<std::uint8_t>(kModelVersion));
    const bool bias = model.models.front().bias_augmented;
    w.u8(bias ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(model.dim));
    w.u32(static_cast<std::uint32_t>(model.classes.size()));
    for (std::size_t k = 0; k < model.classes.size(); ++k) {
        w.u8(model.classes[k]);
        for (double v : model.models[k].w) w.f64(v);
    }
    for (const auto& m : model.models) w.f64(m.C);
    return std::move(w).take();
}

MulticlassModel load_model(std::span<const std::uint8_t> bytes) {
    io::ByteReader r(bytes, "model");
    r.expect_magic(kModelMagicStem);
    const auto version = static_cast<char>(r.u8());
    if (version != kModelVersion)
        throw DataError(std::string("model: version mismatch (found '") + version + "', expected '1')");
    const auto flag = r.u8();
    if (flag > 1) throw DataError("model: invalid bias flag");
    const bool bias = flag == 1;
    MulticlassModel m;
    m.dim = r.u32();
    if (m.dim == 0) throw DataError("model: dim must be positive");
    const auto n = r.u32();
    if (n == 0) throw DataError("model: no classes");
    const std::size_t slots = m.dim + (bias ? 1 : 0);
    if (r.remaining() / (1 + 8 * slots) < n) throw DataError("model: truncated payload");
    for (std::uint32_t k = 0; k < n; ++k) {
        m.classes.push_back(r.u8());
        BinaryLinearModel b;
        b.dim = m.dim;
        b.bias_augmented = bias;
        b.w.resize(slots);
        for (auto& v : b.w) v = r.f64();
        m.models.push_back(std::move(b));
    }
    for (auto& b : m.models) b.C = r.f64();
    r.expect_end();
    m.validate();
    return m;
}

void save_model_file(const std::string& path, const MulticlassModel& model) { io::write_file(path, save_model(model)); }

MulticlassModel load_model_file(const std::string& path) {
    auto b = io::read_file(path);
    return load_model(b);
}

} // namespace snow
