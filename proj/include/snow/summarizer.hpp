#pragma once
// Fixed-size frame buffer, per-window majority vote and event segments.
//
// The stream is cut into tumbling windows of window_frames. Discarded frames
// never vote. NoAction votes, and suppresses the window when it strictly
// outnumbers the best event class. Ties among event classes go to the
// canonical order Six < NoBall < Out < Wide.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "snow/cascade.hpp"
#include "snow/domain.hpp"

namespace snow {

struct WindowConfig {
    std::size_t window_frames = 250;
    double fps = 25.0;
    bool allow_partial_tail = true;

    void validate() const;
};

// Count per DecisionKind code.
using Tally = std::array<std::size_t, kDecisionKinds>;

Tally tally_of(std::span<const FrameDecision> decisions);
std::optional<EventClass> vote_tally(const Tally& tally);
// Throws DataError on an empty list.
std::optional<EventClass> vote(std::span<const FrameDecision> decisions, const WindowConfig& cfg = {});

struct Segment {
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
    EventClass event = EventClass::Out;
    Tally tally{};

    bool operator==(const Segment&) const = default;
};

// Push frames in order; a Segment pops out whenever a full window votes for an event.
// Holds at most one window of decisions.
class WindowSummarizer {
public:
    explicit WindowSummarizer(WindowConfig cfg = {});

    // Frame indices must start at 0 and be contiguous.
    std::optional<Segment> push(std::int64_t frame_index, FrameDecision decision);
    // Votes the partial tail window if allowed and non-empty.
    std::optional<Segment> finish();

    std::size_t buffered() const { return buffer_.size(); }
    std::size_t peak_buffered() const { return peak_; }
    const WindowConfig& config() const { return cfg_; }

private:
    std::optional<Segment> close_window();

    WindowConfig cfg_;
    std::vector<FrameDecision> buffer_;
    std::int64_t window_start_ = 0;
    std::int64_t next_index_ = 0;
    std::size_t peak_ = 0;
    bool finished_ = false;
};

using IndexedDecision = std::pair<std::int64_t, FrameDecision>;

std::vector<Segment> summarize_stream(std::span<const IndexedDecision> stream, const WindowConfig& cfg = {});
// Indices implied 0, 1, 2, ...
std::vector<Segment> summarize_decisions(std::span<const FrameDecision> decisions, const WindowConfig& cfg = {});

struct SummaryEntry {
    Segment segment;
    double start_seconds = 0;
    double end_seconds = 0;   // end of the last frame, (end_frame + 1) / fps
    double duration_seconds = 0; // (end - start + 1) / fps
};

struct SummaryDocument {
    double fps = 25.0;
    std::size_t window_frames = 250;
    std::vector<SummaryEntry> entries;

    // SNOWSUM text: header, then `<start>\t<end>\t<event>\t<k:v,...>` per segment.
    std::string text() const;
    // `<start_s> <end_s> <event>` per line, seconds to 3 decimals.
    std::string cut_list() const;
};

// Throws DataError when segments overlap or are out of order.
SummaryDocument emit_summary(std::span<const Segment> segments, const WindowConfig& cfg = {});
SummaryDocument parse_summary(std::string_view text);

std::string format_tally(const Tally& tally);
Tally parse_tally(std::string_view text);

} // namespace snow
