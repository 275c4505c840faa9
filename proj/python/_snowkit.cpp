#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "snow/cascade.hpp"
#include "snow/cli.hpp"
#include "snow/error.hpp"
#include "snow/eval.hpp"
#include "snow/features.hpp"
#include "snow/linsvm.hpp"
#include "snow/summarizer.hpp"

namespace py = pybind11;
using namespace snow;

namespace {

using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;
using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using U32Array = py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>;

std::vector<FeatureVector> rows_of(const F32Array& X) {
    if (X.ndim() != 2) throw UsageError("features must be a 2-d array");
    const auto r = X.unchecked<2>();
    std::vector<FeatureVector> out;
    out.reserve(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t i = 0; i < r.shape(0); ++i)
        out.emplace_back(std::vector<float>(r.data(i, 0), r.data(i, 0) + r.shape(1)));
    return out;
}

std::vector<std::uint8_t> codes_of(const U8Array& a) {
    if (a.ndim() != 1) throw UsageError("labels must be a 1-d array");
    return {a.data(), a.data() + a.size()};
}

F32Array matrix_of(const std::vector<FeatureRecord>& records, std::size_t dim) {
    F32Array X({records.size(), dim});
    auto w = X.mutable_unchecked<2>();
    for (std::size_t i = 0; i < records.size(); ++i)
        std::copy(records[i].vector.values().begin(), records[i].vector.values().end(), w.mutable_data(i, 0));
    return X;
}

py::dict store_dict(const FeatureStore& s) {
    U32Array ids(s.records.size());
    U8Array codes(s.records.size());
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        ids.mutable_data()[i] = s.records[i].id;
        codes.mutable_data()[i] = s.records[i].class_code;
    }
    py::dict d;
    d["source_tag"] = s.source_tag;
    d["dim"] = s.dim;
    d["ids"] = ids;
    d["codes"] = codes;
    d["features"] = matrix_of(s.records, s.dim);
    return d;
}

FeatureStore store_of(const std::string& tag, const U32Array& ids, const U8Array& codes, const F32Array& X) {
    const auto rows = rows_of(X);
    if (ids.ndim() != 1 || static_cast<std::size_t>(ids.size()) != rows.size() ||
        static_cast<std::size_t>(codes.size()) != rows.size())
        throw UsageError("ids, codes and features must have the same length");
    FeatureStore s;
    s.source_tag = tag;
    s.dim = static_cast<std::uint32_t>(X.shape(1));
    for (std::size_t i = 0; i < rows.size(); ++i) s.records.push_back({ids.data()[i], codes.data()[i], rows[i]});
    validate(s);
    return s;
}

TrainConfig config(double C, double tolerance, int max_epochs, std::uint64_t seed, bool bias) {
    TrainConfig cfg;
    cfg.C = C;
    cfg.tolerance = tolerance;
    cfg.max_epochs = max_epochs;
    cfg.seed = seed;
    cfg.bias_augmented = bias;
    cfg.validate();
    return cfg;
}

std::vector<FrameDecision> decisions_of(const U8Array& codes) {
    std::vector<FrameDecision> d;
    for (auto c : codes_of(codes)) {
        if (c > kNonUmpireCode) throw DataError("decision codes must be 0-5");
        d.push_back(c == kNonUmpireCode ? FrameDecision::discarded()
                                        : FrameDecision::from_class(static_cast<EventClass>(c)));
    }
    return d;
}

std::optional<std::string> vote_name(const std::optional<EventClass>& v) {
    if (!v) return std::nullopt;
    return std::string(event_class_name(*v));
}

py::tuple segment_tuple(const Segment& s) {
    return py::make_tuple(s.start_frame, s.end_frame, std::string(event_class_name(s.event)));
}

EventClass event_from(const py::handle& h) {
    if (py::isinstance<py::str>(h)) {
        const auto name = h.cast<std::string>();
        for (auto c : kEventClasses)
            if (event_class_name(c) == name) return c;
        throw DataError("unknown event '" + name + "'");
    }
    const auto code = h.cast<int>();
    if (code < 0 || code > 4) throw DataError("event codes must be 0-4");
    return static_cast<EventClass>(code);
}

} // namespace

PYBIND11_MODULE(_snowkit, m) {
    m.doc() = "Linear-SVM umpire cascade and event summarization";
    py::register_exception<Error>(m, "SnowError", PyExc_ValueError);

    m.attr("BASELINE_DIM") = kBaselineDim;
    m.attr("BASELINE_TAG") = kBaselineTag;

    m.def("load_store", [](const std::string& path) { return store_dict(load_store(path)); }, py::arg("path"));
    m.def(
        "save_store",
        [](const std::string& path, const std::string& tag, const U32Array& ids, const U8Array& codes,
           const F32Array& X) { save_store(path, store_of(tag, ids, codes, X)); },
        py::arg("path"), py::arg("source_tag"), py::arg("ids"), py::arg("codes"), py::arg("features"));

    m.def(
        "baseline_extract",
        [](const U8Array& rgb) {
            if (rgb.ndim() != 3 || rgb.shape(2) != 3) throw UsageError("image must be an H x W x 3 uint8 array");
            const RasterImage img(static_cast<int>(rgb.shape(1)), static_cast<int>(rgb.shape(0)),
                                  std::vector<std::uint8_t>(rgb.data(), rgb.data() + rgb.size()));
            const auto f = baseline_extract(img);
            return F32Array(f.dim(), f.values().data());
        },
        py::arg("rgb"));
    m.def(
        "extract_file",
        [](const std::string& path) {
            const auto f = baseline_extract(load_image(path));
            return F32Array(f.dim(), f.values().data());
        },
        py::arg("path"));

    py::class_<MulticlassModel>(m, "Model")
        .def_property_readonly("classes", [](const MulticlassModel& mm) { return mm.classes; })
        .def_property_readonly("dim", [](const MulticlassModel& mm) { return mm.dim; })
        .def_property_readonly("weights",
                               [](const MulticlassModel& mm) {
                                   std::vector<std::vector<double>> w;
                                   for (const auto& b : mm.models) w.push_back(b.w);
                                   return w;
                               })
        .def("predict",
             [](const MulticlassModel& mm, const F32Array& X) {
                 const auto rows = rows_of(X);
                 U8Array out(rows.size());
                 for (std::size_t i = 0; i < rows.size(); ++i) out.mutable_data()[i] = predict_multi(mm, rows[i]);
                 return out;
             })
        .def("decision_values",
             [](const MulticlassModel& mm, const F32Array& X) {
                 const auto rows = rows_of(X);
                 py::array_t<double> out({rows.size(), mm.classes.size()});
                 auto w = out.mutable_unchecked<2>();
                 for (std::size_t i = 0; i < rows.size(); ++i) {
                     const auto v = decision_values(mm, rows[i]);
                     for (std::size_t c = 0; c < v.size(); ++c) w(i, c) = v[c];
                 }
                 return out;
             })
        .def("to_bytes",
             [](const MulticlassModel& mm) {
                 const auto b = save_model(mm);
                 return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
             })
        .def_static("from_bytes",
                    [](const py::bytes& b) {
                        const std::string s = b;
                        return load_model(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
                    })
        .def("save", [](const MulticlassModel& mm, const std::string& path) { save_model_file(path, mm); })
        .def_static("load", [](const std::string& path) { return load_model_file(path); });

    m.def(
        "train",
        [](const F32Array& X, const U8Array& labels, double C, double tolerance, int max_epochs, std::uint64_t seed,
           bool bias) {
            const auto rows = rows_of(X);
            const auto l = codes_of(labels);
            MulticlassReport rep;
            auto model = train_ovr(rows, l, config(C, tolerance, max_epochs, seed, bias), &rep);
            py::dict r;
            r["converged"] = rep.all_converged();
            r["epochs"] = rep.max_epochs();
            r["max_violation"] = rep.max_violation();
            return py::make_tuple(std::move(model), r);
        },
        py::arg("X"), py::arg("labels"), py::arg("C") = 10.0, py::arg("tolerance") = 1e-4,
        py::arg("max_epochs") = 1000, py::arg("seed") = 0, py::arg("bias") = true);

    m.def(
        "kfold_cv",
        [](const F32Array& X, const U8Array& labels, int k, std::uint64_t seed, double C) {
            const auto r = kfold_cv(rows_of(X), codes_of(labels), config(C, 1e-4, 1000, seed, true), k, seed);
            py::dict d;
            d["fold_accuracies"] = r.fold_accuracies;
            d["fold_sizes"] = r.fold_sizes;
            d["mean_accuracy"] = r.mean_accuracy;
            d["warnings"] = r.warnings;
            return d;
        },
        py::arg("X"), py::arg("labels"), py::arg("k") = 10, py::arg("seed") = 0, py::arg("C") = 10.0);

    m.def(
        "stratified_split",
        [](const U8Array& labels, double test_fraction, std::uint64_t seed) {
            const auto s = stratified_split(codes_of(labels), test_fraction, seed);
            return py::make_tuple(s.train, s.test);
        },
        py::arg("labels"), py::arg("test_fraction") = 0.2, py::arg("seed") = 0);

    m.def(
        "vote", [](const U8Array& codes) { return vote_name(vote(decisions_of(codes))); }, py::arg("codes"),
        "Window vote over per-frame codes (0-4 pose, 5 discarded). None when no event wins.");
    m.def(
        "summarize",
        [](const U8Array& codes, std::size_t window, double fps, bool partial_tail) {
            WindowConfig cfg{window, fps, partial_tail};
            py::list out;
            for (const auto& s : summarize_decisions(decisions_of(codes), cfg)) out.append(segment_tuple(s));
            return out;
        },
        py::arg("codes"), py::arg("window") = 250, py::arg("fps") = 25.0, py::arg("partial_tail") = true);

    m.def(
        "match_events",
        [](const py::iterable& segments, const py::iterable& truth) {
            std::vector<Segment> segs;
            for (auto s : segments) {
                const auto t = s.cast<py::tuple>();
                segs.push_back({t[0].cast<std::int64_t>(), t[1].cast<std::int64_t>(), event_from(t[2]), {}});
            }
            std::vector<GroundTruthEvent> evs;
            for (auto e : truth) {
                const auto t = e.cast<py::tuple>();
                evs.push_back({t[0].cast<std::int64_t>(), t[1].cast<std::int64_t>(), event_from(t[2])});
            }
            const auto c = match_events(segs, evs);
            return py::make_tuple(c.tp, c.fp, c.fn);
        },
        py::arg("segments"), py::arg("truth"));
    m.def("tpr", [](std::size_t tp, std::size_t fp, std::size_t fn) { return tpr({tp, fp, fn}); });
    m.def("ppv", [](std::size_t tp, std::size_t fp, std::size_t fn) { return ppv({tp, fp, fn}); });
    m.def("format_ratio", &format_ratio);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a snow subcommand in-process; returns (exit_code, stdout, stderr).");
}
