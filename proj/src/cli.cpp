#include "snow/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "snow/cascade.hpp"
#include "snow/domain.hpp"
#include "snow/error.hpp"
#include "snow/eval.hpp"
#include "snow/features.hpp"
#include "snow/linsvm.hpp"
#include "snow/summarizer.hpp"

namespace fs = std::filesystem;

namespace snow::cli {

std::vector<double> parse_grid(const std::string& text) {
    auto bad = [&] { return UsageError("malformed --grid '" + text + "'"); };
    auto num = [&](std::string_view s) {
        std::string t(s);
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (t.empty() || *end != '\0' || !std::isfinite(v)) throw bad();
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        auto parts = detail::split(text, ':');
        if (parts.size() < 2 || parts.size() > 3) throw bad();
        const double lo = num(parts[0]);
        const double hi = num(parts[1]);
        const double step = parts.size() == 3 ? num(parts[2]) : 1.0;
        if (!(step > 0.0) || hi < lo) throw bad();
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    } else {
        for (auto p : detail::split(text, ',')) out.push_back(num(p));
    }
    if (out.empty()) throw bad();
    return out;
}

namespace {

struct TrainFlags {
    double C = 10.0;
    double tolerance = 1e-4;
    int max_epochs = 1000;
    bool no_bias = false;

    TrainConfig config(std::uint64_t seed) const {
        TrainConfig cfg;
        cfg.C = C;
        cfg.tolerance = tolerance;
        cfg.max_epochs = max_epochs;
        cfg.seed = seed;
        cfg.bias_augmented = !no_bias;
        cfg.validate();
        return cfg;
    }
};

void add_train_flags(CLI::App* sub, TrainFlags& f) {
    sub->add_option("--C", f.C, "regularization constant")->capture_default_str();
    sub->add_option("--tolerance", f.tolerance, "max projected-gradient violation")->capture_default_str();
    sub->add_option("--max-epochs", f.max_epochs, "epoch cap per binary model")->capture_default_str();
    sub->add_flag("--no-bias", f.no_bias, "disable constant-1 bias augmentation");
}

void echo_config(std::ostream& os, const TrainConfig& cfg) {
    os << "seed: " << cfg.seed << '\n'
       << "C: " << cfg.C << '\n'
       << "tolerance: " << cfg.tolerance << '\n'
       << "max_epochs: " << cfg.max_epochs << '\n'
       << "bias_augmented: " << (cfg.bias_augmented ? "true" : "false") << '\n';
}

void print_report(std::ostream& os, const std::string& label, const MulticlassModel& m,
                  const MulticlassReport& r) {
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
        const auto& cr = r.per_class[k];
        os << label << " class " << static_cast<int>(m.classes[k]) << ": epochs=" << cr.epochs
           << " final_violation=" << std::scientific << std::setprecision(3) << cr.max_violation
           << std::defaultfloat << std::setprecision(6) << " converged=" << (cr.converged ? "true" : "false")
           << '\n';
    }
}

int cmd_extract(const std::string& images, const std::string& manifest_path, const std::string& out_path,
                const std::string& tag, int dir_class_code, std::uint64_t seed, std::ostream& out,
                std::ostream& err) {
    if (images.empty() == manifest_path.empty()) throw UsageError("extract: give exactly one of --images or --manifest");
    if (dir_class_code < 0 || dir_class_code > kMaxClassCode) throw UsageError("extract: --class-code must be 0-5");

    struct Item {
        std::uint32_t id;
        std::uint8_t code;
        fs::path path;
    };
    std::vector<Item> items;
    if (!manifest_path.empty()) {
        const auto manifest = parse_manifest(io::read_text_file(manifest_path));
        const auto base = fs::path(manifest_path).parent_path();
        for (std::size_t i = 0; i < manifest.records.size(); ++i)
            items.push_back({static_cast<std::uint32_t>(i), manifest.records[i].class_code,
                             base / manifest.records[i].path});
    } else {
        if (!fs::is_directory(images)) throw DataError("extract: '" + images + "' is not a directory");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(images))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (std::size_t i = 0; i < files.size(); ++i)
            items.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(dir_class_code), files[i]});
    }
    if (items.empty()) throw DataError("extract: no images found");

    FeatureStore store;
    store.source_tag = tag;
    store.dim = static_cast<std::uint32_t>(kBaselineDim);
    std::vector<std::string> skipped;
    for (const auto& it : items) {
        try {
            store.records.push_back({it.id, it.code, baseline_extract(load_image(it.path.string()))});
        } catch (const DataError& e) {
            err << "warning: skipping " << it.path.string() << ": " << e.what() << '\n';
            skipped.push_back(it.path.string());
        }
    }
    if (store.records.empty()) throw DataError("extract: every image was unreadable");
    save_store(out_path, store);

    out << "command: extract\n"
        << "seed: " << seed << '\n'
        << "source_tag: " << tag << '\n'
        << "dim: " << store.dim << '\n'
        << "records: " << store.records.size() << '\n'
        << "skipped: " << skipped.size() << '\n';
    for (const auto& s : skipped) out << "skipped_file: " << s << '\n';
    out << "out: " << out_path << '\n';
    return kOk;
}

int cmd_train(const std::string& store_path, const std::string& task, const TrainFlags& flags,
              std::uint64_t seed, const std::string& out_path, std::ostream& out) {
    const auto cfg = flags.config(seed);
    const auto store = load_store(store_path);

    out << "command: train\n"
        << "task: " << task << '\n'
        << "source_tag: " << store.source_tag << '\n';
    echo_config(out, cfg);

    bool converged = true;
    if (task == "cascade") {
        MulticlassReport r1, r2;
        const auto c = train_cascade(store, cfg, &r1, &r2);
        save_cascade_file(out_path, c);
        print_report(out, "stage1", c.stage1, r1);
        print_report(out, "stage2", c.stage2, r2);
        converged = r1.all_converged() && r2.all_converged();
    } else {
        const auto t = task_from_name(task);
        if (!t) throw UsageError("train: --task must be presence, pose or cascade");
        MulticlassReport r;
        const auto m = *t == Task::Presence ? train_presence(store, cfg, &r) : train_pose(store, cfg, &r);
        save_model_file(out_path, m);
        print_report(out, task, m, r);
        converged = r.all_converged();
    }
    out << "converged: " << (converged ? "true" : "false") << '\n' << "out: " << out_path << '\n';
    return converged ? kOk : kNumericFailure;
}

int cmd_summarize(const std::string& cascade_path, const std::string& store_path, const WindowConfig& wcfg,
                  std::uint64_t seed, const std::string& out_path, std::string cut_path, std::ostream& out) {
    wcfg.validate();
    const auto cascade = load_cascade_file(cascade_path);
    auto store = load_store(store_path);
    if (store.source_tag != cascade.source_tag)
        throw DataError("summarize: frame store source '" + store.source_tag + "' does not match cascade source '" +
                        cascade.source_tag + "'");
    std::sort(store.records.begin(), store.records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    WindowSummarizer summarizer(wcfg);
    std::vector<Segment> segments;
    CascadeCounters counters;
    for (const auto& r : store.records)
        if (auto seg = summarizer.push(r.id, classify_frame(cascade, r.vector, &counters))) segments.push_back(*seg);
    if (auto seg = summarizer.finish()) segments.push_back(*seg);

    const auto doc = emit_summary(segments, wcfg);
    if (cut_path.empty()) cut_path = out_path + ".cuts";
    io::write_text_file(out_path, doc.text());
    io::write_text_file(cut_path, doc.cut_list());

    out << "command: summarize\n"
        << "seed: " << seed << '\n'
        << "source_tag: " << cascade.source_tag << '\n'
        << "fps: " << wcfg.fps << '\n'
        << "window: " << wcfg.window_frames << '\n'
        << "frames: " << store.records.size() << '\n'
        << "umpire_frames: " << counters.stage2_evaluations << '\n'
        << "segments: " << segments.size() << '\n';
    for (const auto& e : doc.entries)
        out << "segment: " << e.segment.start_frame << '-' << e.segment.end_frame << ' '
            << event_class_name(e.segment.event) << " duration=" << e.duration_seconds << "s\n";
    out << "out: " << out_path << '\n' << "cut_list: " << cut_path << '\n';
    return kOk;
}

std::string format_acc(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

int cmd_evaluate(const std::string& store_path, const std::string& task_name, const std::string& mode,
                 const TrainFlags& flags, int folds, double test_fraction, std::uint64_t seed,
                 const std::string& out_path, std::ostream& out) {
    const auto cfg = flags.config(seed);
    const auto task = task_from_name(task_name);
    if (!task) throw UsageError("evaluate: --task must be presence or pose");
    if (mode != "kfold" && mode != "jackknife" && mode != "holdout")
        throw UsageError("evaluate: --mode must be kfold, jackknife or holdout");
    const auto set = labeled_set(load_store(store_path), *task);

    std::ostringstream os;
    os << "command: evaluate\n"
       << "task: " << task_name << '\n'
       << "mode: " << mode << '\n'
       << "items: " << set.X.size() << '\n';
    echo_config(os, cfg);
    if (mode == "kfold") {
        const auto r = kfold_cv(set.X, set.labels, cfg, folds, seed);
        os << "folds: " << folds << '\n';
        for (const auto& w : r.warnings) os << "warning: " << w << '\n';
        for (std::size_t f = 0; f < r.fold_accuracies.size(); ++f)
            os << "fold " << f + 1 << ": size=" << r.fold_sizes[f] << " accuracy=" << format_acc(r.fold_accuracies[f])
               << '\n';
        os << "mean_accuracy: " << format_acc(r.mean_accuracy) << '\n';
    } else if (mode == "jackknife") {
        os << "trainings: " << set.X.size() << '\n';
        os << "accuracy: " << format_acc(jackknife(set.X, set.labels, cfg)) << '\n';
    } else {
        const auto r = holdout(set.X, set.labels, cfg, test_fraction, seed);
        os << "test_fraction: " << test_fraction << '\n';
        for (const auto& w : r.warnings) os << "warning: " << w << '\n';
        os << "train_size: " << r.train_size << '\n'
           << "test_size: " << r.test_size << '\n'
           << "train_accuracy: " << format_acc(r.train_accuracy) << '\n'
           << "test_accuracy: " << format_acc(r.test_accuracy) << '\n';
    }
    out << os.str();
    if (!out_path.empty()) io::write_text_file(out_path, os.str());
    return kOk;
}

int cmd_grid_search(const std::string& store_path, const std::string& task_name, const std::string& grid_text,
                    const TrainFlags& flags, int folds, std::uint64_t seed, const std::string& out_path,
                    std::ostream& out) {
    const auto cfg = flags.config(seed);
    const auto task = task_from_name(task_name);
    if (!task) throw UsageError("grid-search: --task must be presence or pose");
    const auto grid = parse_grid(grid_text);
    const auto set = labeled_set(load_store(store_path), *task);
    const auto r = grid_search_C(set.X, set.labels, grid, folds, seed, cfg);

    std::ostringstream os;
    os << "command: grid-search\n"
       << "task: " << task_name << '\n'
       << "seed: " << seed << '\n'
       << "folds: " << folds << '\n'
       << "grid: " << grid_text << '\n';
    for (const auto& w : r.warnings) os << "warning: " << w << '\n';
    for (const auto& row : r.table) os << "C=" << row.C << ": mean_accuracy=" << format_acc(row.mean_accuracy) << '\n';
    os << "best_C: " << r.best_C << '\n';
    out << os.str();
    if (!out_path.empty()) io::write_text_file(out_path, os.str());
    return kOk;
}

int cmd_metrics(const std::vector<std::string>& summaries, const std::vector<std::string>& truths,
                std::uint64_t seed, const std::string& out_path, std::ostream& out) {
    if (summaries.size() != truths.size())
        throw UsageError("metrics: give one --truth file per --summary file");
    std::ostringstream os;
    os << "command: metrics\n" << "seed: " << seed << '\n' << "video\tTP\tFP\tFN\n";
    EventCounts total;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto doc = parse_summary(io::read_text_file(summaries[i]));
        const auto truth = parse_ground_truth(io::read_text_file(truths[i]));
        std::vector<Segment> segs;
        for (const auto& e : doc.entries) segs.push_back(e.segment);
        const auto c = match_events(segs, truth);
        os << "V" << i + 1 << '\t' << c.tp << '\t' << c.fp << '\t' << c.fn << '\n';
        total += c;
    }
    os << "TOTAL\t" << total.tp << '\t' << total.fp << '\t' << total.fn << '\n';
    out << os.str();
    const auto t = tpr(total);
    const auto p = ppv(total);
    std::ostringstream tail;
    tail << "TPR: " << format_ratio(t) << '\n' << "PPV: " << format_ratio(p) << '\n';
    out << tail.str();
    if (!out_path.empty()) io::write_text_file(out_path, os.str() + tail.str());
    return kOk;
}

int cmd_validate_manifest(const std::string& path, std::uint64_t seed, std::ostream& out) {
    const auto m = parse_manifest(io::read_text_file(path));
    const auto report = check_class_balance(m);
    out << "command: validate-manifest\n"
        << "seed: " << seed << '\n'
        << "name: " << m.metadata.name << '\n'
        << "records: " << m.records.size() << '\n';
    for (const auto& [code, n] : report.counts)
        out << "class " << static_cast<int>(code) << " (" << class_code_name(code) << "): " << n << '\n';
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SNOW umpire-pose classification and event summarization toolkit", "snow"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_path;
    auto common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--seed", seed, "random seed")->capture_default_str();
        auto* o = sub->add_option("--out", out_path, "output path");
        if (out_required) o->required();
    };

    // extract
    std::string images, manifest, tag = kBaselineTag;
    int class_code = 0;
    auto* extract = app.add_subcommand("extract", "baseline features for a directory or manifest of images");
    auto* o_images = extract->add_option("--images", images, "directory of images (sorted by name)");
    extract->add_option("--manifest", manifest, "dataset manifest")->excludes(o_images);
    extract->add_option("--source-tag", tag, "feature source tag")->capture_default_str();
    extract->add_option("--class-code", class_code, "class code for directory mode")->capture_default_str();
    common(extract, true);

    // train / evaluate / grid-search
    std::string store, task;
    TrainFlags flags;
    auto* train = app.add_subcommand("train", "train a presence, pose or full cascade model");
    train->add_option("--store", store, "feature store")->required();
    train->add_option("--task", task, "presence | pose | cascade")->required();
    add_train_flags(train, flags);
    common(train, true);

    std::string mode = "kfold";
    int folds = 10;
    double test_fraction = 0.2;
    auto* evaluate = app.add_subcommand("evaluate", "k-fold, jackknife or hold-out accuracy");
    evaluate->add_option("--store", store, "feature store")->required();
    evaluate->add_option("--task", task, "presence | pose")->required();
    evaluate->add_option("--mode", mode, "kfold | jackknife | holdout")->capture_default_str();
    evaluate->add_option("--folds", folds, "number of folds")->capture_default_str();
    evaluate->add_option("--test-fraction", test_fraction, "hold-out test fraction")->capture_default_str();
    add_train_flags(evaluate, flags);
    common(evaluate, false);

    std::string grid = "1:20:1";
    auto* grid_search = app.add_subcommand("grid-search", "select C by stratified k-fold CV");
    grid_search->add_option("--store", store, "feature store")->required();
    grid_search->add_option("--task", task, "presence | pose")->required();
    grid_search->add_option("--grid", grid, "lo:hi[:step] or comma list")->capture_default_str();
    grid_search->add_option("--folds", folds, "number of folds")->capture_default_str();
    add_train_flags(grid_search, flags);
    common(grid_search, false);

    // summarize
    std::string cascade_path, cut_path;
    WindowConfig wcfg;
    bool no_tail = false;
    auto* summarize = app.add_subcommand("summarize", "cascade a frame-feature store and vote per window");
    summarize->add_option("--cascade", cascade_path, "cascade bundle")->required();
    summarize->add_option("--store", store, "frame features, ids = frame indices")->required();
    summarize->add_option("--window", wcfg.window_frames, "window length in frames")->capture_default_str();
    summarize->add_option("--fps", wcfg.fps, "frame rate")->capture_default_str();
    summarize->add_flag("--no-partial-tail", no_tail, "drop a final incomplete window");
    summarize->add_option("--cut-list", cut_path, "cut list path (default <out>.cuts)");
    common(summarize, true);

    // metrics
    std::vector<std::string> summaries, truths;
    auto* metrics = app.add_subcommand("metrics", "event-level TPR and PPV");
    metrics->add_option("--summary", summaries, "summary file (repeatable)")->required();
    metrics->add_option("--truth", truths, "ground-truth events file (repeatable)")->required();
    common(metrics, false);

    auto* validate_manifest = app.add_subcommand("validate-manifest", "parse a manifest and check class balance");
    validate_manifest->add_option("--manifest", manifest, "dataset manifest")->required();
    common(validate_manifest, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*extract) return cmd_extract(images, manifest, out_path, tag, class_code, seed, out, err);
        if (*train) return cmd_train(store, task, flags, seed, out_path, out);
        if (*summarize) {
            wcfg.allow_partial_tail = !no_tail;
            return cmd_summarize(cascade_path, store, wcfg, seed, out_path, cut_path, out);
        }
        if (*evaluate) return cmd_evaluate(store, task, mode, flags, folds, test_fraction, seed, out_path, out);
        if (*grid_search) return cmd_grid_search(store, task, grid, flags, folds, seed, out_path, out);
        if (*metrics) return cmd_metrics(summaries, truths, seed, out_path, out);
        if (*validate_manifest) return cmd_validate_manifest(manifest, seed, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

} // namespace snow::cli
