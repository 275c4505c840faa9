#include "snow/cascade.hpp"

#include <set>

#include "snow/error.hpp"

namespace snow {

namespace {
constexpr std::array<std::string_view, kDecisionKinds> kKindNames{"NoAction", "Six",  "NoBall",
                                                                  "Out",      "Wide", "Discarded"};
constexpr std::string_view kCascadeMagic = "SNOWCSC1";
} // namespace

std::string_view decision_kind_name(DecisionKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<DecisionKind> decision_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<DecisionKind>(i);
    return std::nullopt;
}

FrameDecision FrameDecision::event(EventClass c) {
    if (c == EventClass::NoAction) throw DataError("FrameDecision::event cannot carry NoAction");
    return FrameDecision(static_cast<DecisionKind>(code_of(c)));
}

FrameDecision FrameDecision::from_class(EventClass c) {
    return c == EventClass::NoAction ? no_action() : event(c);
}

std::optional<EventClass> FrameDecision::event_class() const {
    if (!is_event()) return std::nullopt;
    return static_cast<EventClass>(kind_);
}

void CascadeModel::validate() const {
    stage1.validate();
    stage2.validate();
    if (stage1.classes != std::vector<std::uint8_t>{0, 1})
        throw DataError("cascade: stage 1 must have exactly the classes NonUmpire(0) and Umpire(1)");
    if (stage2.classes != std::vector<std::uint8_t>{0, 1, 2, 3, 4})
        throw DataError("cascade: stage 2 must have exactly the five pose classes 0-4");
    if (stage1.dim != stage2.dim)
        throw DataError("cascade: stage dims disagree (" + std::to_string(stage1.dim) + " vs " +
                        std::to_string(stage2.dim) + ")");
}

CascadeModel make_cascade(MulticlassModel stage1, MulticlassModel stage2, std::string_view stage1_source,
                          std::string_view stage2_source) {
    if (stage1_source != stage2_source)
        throw DataError("cascade: stages use different feature sources ('" + std::string(stage1_source) +
                        "' vs '" + std::string(stage2_source) + "')");
    CascadeModel c{std::move(stage1), std::move(stage2), std::string(stage1_source)};
    c.validate();
    return c;
}

FrameDecision classify_frame(const CascadeModel& cascade, const FeatureVector& x, CascadeCounters* counters) {
    if (cascade.stage1.dim != cascade.stage2.dim) throw DataError("cascade: stage dims disagree");
    if (x.dim() != cascade.dim())
        throw DataError("dimension mismatch: cascade dim " + std::to_string(cascade.dim()) + ", frame dim " +
                        std::to_string(x.dim()));
    if (counters) ++counters->stage1_evaluations;
    const auto presence = predict_multi(cascade.stage1, x);
    if (presence != static_cast<std::uint8_t>(PresenceClass::Umpire)) return FrameDecision::discarded();

    if (counters) ++counters->stage2_evaluations;
    const auto pose = predict_multi(cascade.stage2, x);
    auto cls = event_class_from_code(pose);
    if (!cls) throw DataError("cascade: stage 2 produced a non-pose class code");
    return FrameDecision::from_class(*cls);
}

std::optional<Task> task_from_name(std::string_view name) {
    if (name == "presence") return Task::Presence;
    if (name == "pose") return Task::Pose;
    return std::nullopt;
}

LabeledSet labeled_set(const FeatureStore& store, Task task) {
    LabeledSet out;
    for (const auto& r : store.records) {
        if (task == Task::Presence) {
            out.X.push_back(r.vector);
            out.labels.push_back(r.class_code == kNonUmpireCode ? static_cast<std::uint8_t>(PresenceClass::NonUmpire)
                                                                : static_cast<std::uint8_t>(PresenceClass::Umpire));
        } else if (is_event_code(r.class_code)) {
            out.X.push_back(r.vector);
            out.labels.push_back(r.class_code);
        }
    }

    const std::set<std::uint8_t> present(out.labels.begin(), out.labels.end());
    if (task == Task::Presence) {
        if (!present.contains(0)) throw DataError("presence training: missing non-umpire class");
        if (!present.contains(1)) throw DataError("presence training: missing umpire classes");
    } else {
        for (auto c : kEventClasses)
            if (!present.contains(code_of(c)))
                throw DataError("pose training: missing class " + std::string(event_class_name(c)));
    }
    return out;
}

MulticlassModel train_presence(const FeatureStore& store, const TrainConfig& cfg, MulticlassReport* report) {
    auto set = labeled_set(store, Task::Presence);
    return train_ovr(set.X, set.labels, cfg, report);
}

MulticlassModel train_pose(const FeatureStore& store, const TrainConfig& cfg, MulticlassReport* report) {
    auto set = labeled_set(store, Task::Pose);
    return train_ovr(set.X, set.labels, cfg, report);
}

CascadeModel train_cascade(const FeatureStore& store, const TrainConfig& cfg, MulticlassReport* stage1_report,
                           MulticlassReport* stage2_report) {
    auto s1 = train_presence(store, cfg, stage1_report);
    auto s2 = train_pose(store, cfg, stage2_report);
    return make_cascade(std::move(s1), std::move(s2), store.source_tag, store.source_tag);
}

io::Bytes save_cascade(const CascadeModel& cascade) {
    cascade.validate();
    io::ByteWriter w;
    w.raw(kCascadeMagic);
    for (const auto* stage : {&cascade.stage1, &cascade.stage2}) {
        auto payload = save_model(*stage);
        w.u32(static_cast<std::uint32_t>(payload.size()));
        w.raw(payload);
    }
    w.str16(cascade.source_tag);
    return std::move(w).take();
}

CascadeModel load_cascade(std::span<const std::uint8_t> bytes) {
    io::ByteReader r(bytes, "cascade");
    r.expect_magic(kCascadeMagic);
    CascadeModel c;
    for (auto* stage : {&c.stage1, &c.stage2}) {
        const auto len = r.u32();
        *stage = load_model(r.take(len));
    }
    c.source_tag = r.str16();
    r.expect_end();
    c.validate();
    return c;
}

void save_cascade_file(const std::string& path, const CascadeModel& cascade) {
    io::write_file(path, save_cascade(cascade));
}

CascadeModel load_cascade_file(const std::string& path) {
    auto b = io::read_file(path);
    return load_cascade(b);
}

} // namespace snow
