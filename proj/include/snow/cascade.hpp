#pragma once
// Two-stage per-frame decision: umpire presence, then umpire pose.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "snow/domain.hpp"
#include "snow/features.hpp"
#include "snow/linsvm.hpp"

namespace snow {

// Tally slot / decision kind. Codes 0-4 coincide with EventClass; 5 marks a discarded frame.
enum class DecisionKind : std::uint8_t {
    NoAction = 0,
    Six = 1,
    NoBall = 2,
    Out = 3,
    Wide = 4,
    Discarded = 5,
};

inline constexpr std::size_t kDecisionKinds = 6;
std::string_view decision_kind_name(DecisionKind k);
std::optional<DecisionKind> decision_kind_from_name(std::string_view name);

class FrameDecision {
public:
    static constexpr FrameDecision discarded() { return FrameDecision(DecisionKind::Discarded); }
    static constexpr FrameDecision no_action() { return FrameDecision(DecisionKind::NoAction); }
    // Throws DataError for EventClass::NoAction.
    static FrameDecision event(EventClass c);
    // NoAction maps to no_action(); the four event classes to event().
    static FrameDecision from_class(EventClass c);

    constexpr DecisionKind kind() const { return kind_; }
    constexpr bool is_discarded() const { return kind_ == DecisionKind::Discarded; }
    constexpr bool is_no_action() const { return kind_ == DecisionKind::NoAction; }
    constexpr bool is_event() const { return !is_discarded() && !is_no_action(); }
    std::optional<EventClass> event_class() const;

    constexpr bool operator==(const FrameDecision&) const = default;

private:
    constexpr explicit FrameDecision(DecisionKind k) : kind_(k) {}
    DecisionKind kind_;
};

struct CascadeModel {
    MulticlassModel stage1; // classes {NonUmpire=0, Umpire=1}
    MulticlassModel stage2; // classes {0..4}
    std::string source_tag;

    std::size_t dim() const { return stage1.dim; }
    void validate() const;
    bool operator==(const CascadeModel&) const = default;
};

// Refuses inconsistent dims or differing feature sources.
CascadeModel make_cascade(MulticlassModel stage1, MulticlassModel stage2, std::string_view stage1_source,
                          std::string_view stage2_source);

struct CascadeCounters {
    std::size_t stage1_evaluations = 0;
    std::size_t stage2_evaluations = 0;
};

FrameDecision classify_frame(const CascadeModel& cascade, const FeatureVector& x,
                             CascadeCounters* counters = nullptr);

// Store code 5 becomes NonUmpire (0); every umpire code 0-4 merges into Umpire (1).
MulticlassModel train_presence(const FeatureStore& store, const TrainConfig& cfg,
                               MulticlassReport* report = nullptr);
// OvR over the five pose codes; non-umpire records are ignored.
MulticlassModel train_pose(const FeatureStore& store, const TrainConfig& cfg, MulticlassReport* report = nullptr);
CascadeModel train_cascade(const FeatureStore& store, const TrainConfig& cfg,
                           MulticlassReport* stage1_report = nullptr, MulticlassReport* stage2_report = nullptr);

// Labels for a task, usable with eval and grid search.
enum class Task { Presence, Pose };
struct LabeledSet {
    std::vector<FeatureVector> X;
    std::vector<std::uint8_t> labels;
};
LabeledSet labeled_set(const FeatureStore& store, Task task);
std::optional<Task> task_from_name(std::string_view name);

// SNOWCSC1: two length-prefixed SNOWMDL1 payloads, then the u16-prefixed source tag.
io::Bytes save_cascade(const CascadeModel& cascade);
CascadeModel load_cascade(std::span<const std::uint8_t> bytes);
void save_cascade_file(const std::string& path, const CascadeModel& cascade);
CascadeModel load_cascade_file(const std::string& path);

} // namespace snow
