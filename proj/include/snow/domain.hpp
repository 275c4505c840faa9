#pragma once
// Class taxonomy, dataset manifests and ground-truth events.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace snow {

// Umpire pose classes. Codes are part of every on-disk format.
enum class EventClass : std::uint8_t {
    NoAction = 0,
    Six = 1,
    NoBall = 2,
    Out = 3,
    Wide = 4,
};

// Canonical order, also the tie-breaking order.
inline constexpr std::array<EventClass, 5> kEventClasses{
    EventClass::NoAction, EventClass::Six, EventClass::NoBall, EventClass::Out, EventClass::Wide};

// The four classes that can appear in a summary.
inline constexpr std::array<EventClass, 4> kSummaryEvents{
    EventClass::Six, EventClass::NoBall, EventClass::Out, EventClass::Wide};

enum class PresenceClass : std::uint8_t {
    NonUmpire = 0,
    Umpire = 1,
};

// Label code used in manifests and feature stores for frames without an umpire.
inline constexpr std::uint8_t kNonUmpireCode = 5;
inline constexpr std::uint8_t kMaxClassCode = 5;

constexpr std::uint8_t code_of(EventClass c) { return static_cast<std::uint8_t>(c); }
constexpr bool is_event_code(std::uint8_t code) { return code <= 4; }
constexpr bool is_valid_class_code(std::uint8_t code) { return code <= kMaxClassCode; }

std::optional<EventClass> event_class_from_code(int code);
std::string_view event_class_name(EventClass c);
std::optional<EventClass> event_class_from_name(std::string_view name);
// Name for any store code, including "NonUmpire" for code 5.
std::string_view class_code_name(std::uint8_t code);

struct ManifestRecord {
    std::string id;
    std::string path;
    std::uint8_t class_code = 0;

    bool operator==(const ManifestRecord&) const = default;
};

struct ManifestMetadata {
    std::string name;
    int version = 1;

    bool operator==(const ManifestMetadata&) const = default;
};

struct DatasetManifest {
    ManifestMetadata metadata;
    std::vector<ManifestRecord> records;

    bool operator==(const DatasetManifest&) const = default;
};

// Text format: header `SNOWMAN 1 <name>` then `<id>\t<path>\t<class-code>` per line.
// Record indices in error messages are 1-based.
DatasetManifest parse_manifest(std::string_view text);
std::string serialize_manifest(const DatasetManifest& manifest);

struct BalanceReport {
    std::map<std::uint8_t, std::size_t> counts; // all six codes present, zero-filled
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kSnowImagesPerClass = 78;

// Warns for codes 0-4 that deviate from 78 images when the manifest is named "SNOW".
// Also warns on an empty manifest.
BalanceReport check_class_balance(const DatasetManifest& manifest);

struct GroundTruthEvent {
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
    EventClass event = EventClass::Out;

    bool operator==(const GroundTruthEvent&) const = default;
};

// One event per line: `<start_frame>\t<end_frame>\t<class-code>`. Blank lines ignored.
std::vector<GroundTruthEvent> parse_ground_truth(std::string_view text);
std::string serialize_ground_truth(const std::vector<GroundTruthEvent>& events);

// Throws DataError if the event violates start <= end, start >= 0, or class != NoAction.
void validate(const GroundTruthEvent& event);

namespace detail {
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> lines(std::string_view text);
std::optional<long long> parse_int(std::string_view s);
} // namespace detail

} // namespace snow
