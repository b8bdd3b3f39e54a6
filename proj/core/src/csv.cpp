#include "cohort_pulse/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "cohort_pulse/errors.hpp"

namespace cohort_pulse {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

std::optional<double> parse_value(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace

ParseResult parse_records(std::istream& in) {
    std::string raw;
    if (!std::getline(in, raw)) throw ParseError("input is empty, expected header row");
    if (strip_cr(raw) != kRecordCsvHeader)
        throw ParseError("malformed header: expected '" + std::string(kRecordCsvHeader) +
                         "', got '" + raw + "'");

    ParseResult result;
    std::vector<MeasureRecord> records;
    std::set<std::tuple<std::string, Measure, Instant>> seen;
    size_t line_no = 1;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = strip_cr(raw);
        if (line.empty()) continue;

        auto reject = [&](std::string reason) {
            result.rejections.push_back({line_no, std::move(reason)});
        };

        auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            reject("expected 5 fields, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty()) {
            reject("empty participant_id");
            continue;
        }
        auto ts = parse_instant(fields[1]);
        if (!ts) {
            reject("unparseable timestamp '" + std::string(fields[1]) + "'");
            continue;
        }
        auto measure = measure_from_name(fields[2]);
        if (!measure) {
            reject("unknown measure '" + std::string(fields[2]) + "'");
            continue;
        }
        auto value = parse_value(fields[3]);
        if (!value) {
            reject("unparseable value '" + std::string(fields[3]) + "'");
            continue;
        }
        if (!std::isfinite(*value)) {
            reject("non-finite value");
            continue;
        }
        if (!value_in_range(*measure, *value)) {
            reject("value " + format_double(*value) + " outside plausible range for " +
                   std::string(measure_name(*measure)));
            continue;
        }
        bool session = false;
        if (fields[4] == "true") {
            session = true;
        } else if (fields[4] != "false") {
            reject("session_flag must be 'true' or 'false'");
            continue;
        }
        auto key = std::make_tuple(std::string(fields[0]), *measure, *ts);
        if (!seen.insert(key).second) {
            reject("duplicate (participant, measure, timestamp)");
            continue;
        }
        records.push_back({std::string(fields[0]), *ts, *measure, *value, session});
    }

    result.accepted = records.size();
    result.rejected = result.rejections.size();
    result.records = RecordSet(std::move(records));
    return result;
}

ParseResult parse_records_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_records(in);
}

void serialize_records(const RecordSet& rs, std::ostream& out) {
    out << kRecordCsvHeader << '\n';
    for (const MeasureRecord& r : rs.records()) {
        out << r.participant_id << ',' << format_instant_utc(r.timestamp) << ','
            << measure_name(r.measure) << ',' << format_double(r.value) << ','
            << (r.session_flag ? "true" : "false") << '\n';
    }
}

std::string serialize_records(const RecordSet& rs) {
    std::ostringstream os;
    serialize_records(rs, os);
    return os.str();
}

std::string rejection_report_csv(const std::vector<RejectedRow>& rejections) {
    std::ostringstream os;
    os << "line,reason\n";
    for (const RejectedRow& r : rejections) {
        std::string reason = r.reason;
        for (char& c : reason)
            if (c == ',') c = ';';
        os << r.line << ',' << reason << '\n';
    }
    return os.str();
}

}  // namespace cohort_pulse
