#include "snow/summarizer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "snow/error.hpp"

namespace snow {

void WindowConfig::validate() const {
    if (window_frames < 1) throw UsageError("window_frames must be at least 1");
    if (!(fps > 0.0) || !std::isfinite(fps)) throw UsageError("fps must be positive");
}

Tally tally_of(std::span<const FrameDecision> decisions) {
    Tally t{};
    for (const auto& d : decisions) ++t[static_cast<std::size_t>(d.kind())];
    return t;
}

std::optional<EventClass> vote_tally(const Tally& tally) {
    std::optional<EventClass> best;
    std::size_t best_count = 0;
    for (auto c : kSummaryEvents) {
        const auto n = tally[code_of(c)];
        if (n > best_count) {
            best = c;
            best_count = n;
        }
    }
    if (!best) return std::nullopt;
    if (tally[code_of(EventClass::NoAction)] > best_count) return std::nullopt;
    return best;
}

std::optional<EventClass> vote(std::span<const FrameDecision> decisions, const WindowConfig& cfg) {
    cfg.validate();
    if (decisions.empty()) throw DataError("vote: empty decision list");
    return vote_tally(tally_of(decisions));
}

WindowSummarizer::WindowSummarizer(WindowConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    buffer_.reserve(cfg_.window_frames);
}

std::optional<Segment> WindowSummarizer::push(std::int64_t frame_index, FrameDecision decision) {
    if (finished_) throw DataError("summarizer: push after finish");
    if (frame_index != next_index_)
        throw DataError("summarizer: non-contiguous frame index " + std::to_string(frame_index) + " (expected " +
                        std::to_string(next_index_) + ")");
    ++next_index_;
    buffer_.push_back(decision);
    peak_ = std::max(peak_, buffer_.size());
    if (buffer_.size() == cfg_.window_frames) return close_window();
    return std::nullopt;
}

std::optional<Segment> WindowSummarizer::finish() {
    finished_ = true;
    if (buffer_.empty()) return std::nullopt;
    if (!cfg_.allow_partial_tail) {
        buffer_.clear();
        return std::nullopt;
    }
    return close_window();
}

std::optional<Segment> WindowSummarizer::close_window() {
    const auto tally = tally_of(buffer_);
    const auto start = window_start_;
    const auto end = window_start_ + static_cast<std::int64_t>(buffer_.size()) - 1;
    window_start_ = end + 1;
    buffer_.clear();
    auto winner = vote_tally(tally);
    if (!winner) return std::nullopt;
    return Segment{start, end, *winner, tally};
}

std::vector<Segment> summarize_stream(std::span<const IndexedDecision> stream, const WindowConfig& cfg) {
    WindowSummarizer s(cfg);
    std::vector<Segment> out;
    for (const auto& [idx, d] : stream)
        if (auto seg = s.push(idx, d)) out.push_back(*seg);
    if (auto seg = s.finish()) out.push_back(*seg);
    return out;
}

std::vector<Segment> summarize_decisions(std::span<const FrameDecision> decisions, const WindowConfig& cfg) {
    WindowSummarizer s(cfg);
    std::vector<Segment> out;
    std::int64_t i = 0;
    for (const auto& d : decisions)
        if (auto seg = s.push(i++, d)) out.push_back(*seg);
    if (auto seg = s.finish()) out.push_back(*seg);
    return out;
}

std::string format_tally(const Tally& tally) {
    std::string out;
    for (std::size_t k = 0; k < kDecisionKinds; ++k) {
        if (k) out += ',';
        out += decision_kind_name(static_cast<DecisionKind>(k));
        out += ':';
        out += std::to_string(tally[k]);
    }
    return out;
}

Tally parse_tally(std::string_view text) {
    Tally t{};
    if (text.empty()) return t;
    for (auto item : detail::split(text, ',')) {
        auto colon = item.find(':');
        if (colon == std::string_view::npos) throw DataError("summary: malformed tally item '" + std::string(item) + "'");
        auto kind = decision_kind_from_name(item.substr(0, colon));
        auto n = detail::parse_int(item.substr(colon + 1));
        if (!kind || !n || *n < 0) throw DataError("summary: malformed tally item '" + std::string(item) + "'");
        t[static_cast<std::size_t>(*kind)] = static_cast<std::size_t>(*n);
    }
    return t;
}

namespace {

void check_segment(const Segment& s, std::size_t window_frames) {
    if (s.event == EventClass::NoAction) throw DataError("summary: segment carries NoAction");
    if (s.start_frame < 0 || s.end_frame < s.start_frame) throw DataError("summary: invalid segment interval");
    if (static_cast<std::size_t>(s.end_frame - s.start_frame + 1) > window_frames)
        throw DataError("summary: segment longer than the window");
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec <= 17; ++prec) {
        char tmp[64];
        std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
        if (std::strtod(tmp, nullptr) == v) return tmp;
    }
    return buf;
}

} // namespace

SummaryDocument emit_summary(std::span<const Segment> segments, const WindowConfig& cfg) {
    cfg.validate();
    SummaryDocument doc;
    doc.fps = cfg.fps;
    doc.window_frames = cfg.window_frames;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        check_segment(s, cfg.window_frames);
        if (i > 0 && s.start_frame <= segments[i - 1].end_frame)
            throw DataError("summary: segments overlap or are out of order at segment " + std::to_string(i));
        doc.entries.push_back({s, s.start_frame / cfg.fps, (s.end_frame + 1) / cfg.fps,
                               (s.end_frame - s.start_frame + 1) / cfg.fps});
    }
    return doc;
}

std::string SummaryDocument::text() const {
    std::ostringstream os;
    os << "SNOWSUM 1 fps=" << format_number(fps) << " window=" << window_frames << '\n';
    for (const auto& e : entries)
        os << e.segment.start_frame << '\t' << e.segment.end_frame << '\t' << event_class_name(e.segment.event)
           << '\t' << format_tally(e.segment.tally) << '\n';
    return os.str();
}

std::string SummaryDocument::cut_list() const {
    std::string out;
    char buf[128];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%.3f %.3f %s\n", e.start_seconds, e.end_seconds,
                      std::string(event_class_name(e.segment.event)).c_str());
        out += buf;
    }
    return out;
}

SummaryDocument parse_summary(std::string_view text) {
    auto ls = detail::lines(text);
    if (ls.empty()) throw DataError("summary: missing header");
    auto head = detail::split(ls.front(), ' ');
    if (head.size() != 4 || head[0] != "SNOWSUM" || head[1] != "1" || !head[2].starts_with("fps=") ||
        !head[3].starts_with("window="))
        throw DataError("summary: malformed header");
    WindowConfig cfg;
    {
        std::string fps(head[2].substr(4));
        char* end = nullptr;
        cfg.fps = std::strtod(fps.c_str(), &end);
        if (fps.empty() || *end != '\0') throw DataError("summary: malformed fps");
        auto w = detail::parse_int(head[3].substr(7));
        if (!w || *w < 1) throw DataError("summary: malformed window");
        cfg.window_frames = static_cast<std::size_t>(*w);
    }
    std::vector<Segment> segs;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (ls[i].empty()) continue;
        auto f = detail::split(ls[i], '\t');
        if (f.size() != 4) throw DataError("summary: malformed segment at line " + std::to_string(i + 1));
        auto s = detail::parse_int(f[0]);
        auto e = detail::parse_int(f[1]);
        auto ev = event_class_from_name(f[2]);
        if (!s || !e || !ev) throw DataError("summary: malformed segment at line " + std::to_string(i + 1));
        segs.push_back({*s, *e, *ev, parse_tally(f[3])});
    }
    return emit_summary(segs, cfg);
}

} // namespace snow
