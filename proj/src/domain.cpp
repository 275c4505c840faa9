#include "snow/domain.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "snow/error.hpp"

namespace snow {

namespace detail {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines(std::string_view text) {
    auto out = split(text, '\n');
    for (auto& l : out)
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::optional<long long> parse_int(std::string_view s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

} // namespace detail

namespace {
constexpr std::array<std::string_view, 6> kCodeNames{"NoAction", "Six", "NoBall", "Out", "Wide",
                                                     "NonUmpire"};
}

std::optional<EventClass> event_class_from_code(int code) {
    if (code < 0 || code > 4) return std::nullopt;
    return static_cast<EventClass>(code);
}

std::string_view event_class_name(EventClass c) { return kCodeNames[code_of(c)]; }

std::optional<EventClass> event_class_from_name(std::string_view name) {
    for (auto c : kEventClasses)
        if (event_class_name(c) == name) return c;
    return std::nullopt;
}

std::string_view class_code_name(std::uint8_t code) {
    if (!is_valid_class_code(code)) return "Unknown";
    return kCodeNames[code];
}

DatasetManifest parse_manifest(std::string_view text) {
    auto ls = detail::lines(text);
    if (ls.empty()) throw DataError("manifest: missing header line");

    DatasetManifest m;
    {
        auto header = ls.front();
        auto parts = detail::split(header, ' ');
        if (parts.size() < 3 || parts[0] != "SNOWMAN")
            throw DataError("manifest: malformed header (expected 'SNOWMAN <version> <name>')");
        auto version = detail::parse_int(parts[1]);
        if (!version || *version != 1)
            throw DataError("manifest: unsupported version '" + std::string(parts[1]) + "'");
        m.metadata.version = static_cast<int>(*version);
        // Name is the rest of the line, spaces allowed.
        m.metadata.name = std::string(header.substr(parts[0].size() + parts[1].size() + 2));
        if (m.metadata.name.empty()) throw DataError("manifest: empty dataset name");
    }

    std::set<std::string, std::less<>> ids;
    for (std::size_t li = 1; li < ls.size(); ++li) {
        const auto index = std::to_string(li);
        auto fields = detail::split(ls[li], '\t');
        if (fields.size() != 3)
            throw DataError("manifest: malformed record at record " + index + " (expected 3 tab-separated fields)");
        if (fields[0].empty()) throw DataError("manifest: empty id at record " + index);
        if (fields[1].empty()) throw DataError("manifest: empty path at record " + index);
        auto code = detail::parse_int(fields[2]);
        if (!code) throw DataError("manifest: malformed class code at record " + index);
        if (*code < 0 || *code > kMaxClassCode)
            throw DataError("manifest: unknown class code at record " + index);
        if (!ids.emplace(fields[0]).second)
            throw DataError("manifest: duplicate id '" + std::string(fields[0]) + "' at record " + index);
        m.records.push_back({std::string(fields[0]), std::string(fields[1]),
                             static_cast<std::uint8_t>(*code)});
    }
    return m;
}

std::string serialize_manifest(const DatasetManifest& manifest) {
    std::ostringstream os;
    os << "SNOWMAN " << manifest.metadata.version << ' ' << manifest.metadata.name << '\n';
    for (const auto& r : manifest.records)
        os << r.id << '\t' << r.path << '\t' << static_cast<int>(r.class_code) << '\n';
    return os.str();
}

BalanceReport check_class_balance(const DatasetManifest& manifest) {
    BalanceReport report;
    for (std::uint8_t c = 0; c <= kMaxClassCode; ++c) report.counts[c] = 0;
    for (const auto& r : manifest.records) ++report.counts[r.class_code];

    if (manifest.records.empty()) report.warnings.emplace_back("manifest has no records");

    if (manifest.metadata.name == "SNOW") {
        for (std::uint8_t c = 0; c <= 4; ++c) {
            auto n = report.counts[c];
            if (n != kSnowImagesPerClass) {
                std::ostringstream os;
                os << "class " << class_code_name(c) << " has " << n << " images, expected "
                   << kSnowImagesPerClass;
                report.warnings.push_back(os.str());
            }
        }
    }
    return report;
}

void validate(const GroundTruthEvent& event) {
    if (event.start_frame < 0) throw DataError("ground truth: negative start frame");
    if (event.start_frame > event.end_frame) throw DataError("ground truth: start frame after end frame");
    if (event.event == EventClass::NoAction) throw DataError("ground truth: NoAction is not an event");
}

std::vector<GroundTruthEvent> parse_ground_truth(std::string_view text) {
    std::vector<GroundTruthEvent> out;
    std::size_t lineno = 0;
    for (auto line : detail::lines(text)) {
        ++lineno;
        if (line.empty()) continue;
        const auto where = " at line " + std::to_string(lineno);
        auto f = detail::split(line, '\t');
        if (f.size() != 3) throw DataError("ground truth: malformed line" + where);
        auto s = detail::parse_int(f[0]);
        auto e = detail::parse_int(f[1]);
        auto c = detail::parse_int(f[2]);
        if (!s || !e || !c) throw DataError("ground truth: non-integer field" + where);
        auto cls = event_class_from_code(static_cast<int>(*c));
        if (!cls) throw DataError("ground truth: unknown class code" + where);
        GroundTruthEvent ev{*s, *e, *cls};
        try {
            validate(ev);
        } catch (const DataError& err) {
            throw DataError(err.what() + where);
        }
        out.push_back(ev);
    }
    return out;
}

std::string serialize_ground_truth(const std::vector<GroundTruthEvent>& events) {
    std::ostringstream os;
    for (const auto& e : events)
        os << e.start_frame << '\t' << e.end_frame << '\t' << static_cast<int>(code_of(e.event)) << '\n';
    return os.str();
}

} // namespace snow
