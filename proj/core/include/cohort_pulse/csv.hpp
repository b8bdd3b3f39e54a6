#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cohort_pulse/records.hpp"

namespace cohort_pulse {

/// Wire schema: `participant_id,timestamp,measure,value,session_flag`.
inline constexpr std::string_view kRecordCsvHeader =
    "participant_id,timestamp,measure,value,session_flag";

struct RejectedRow {
    size_t line = 0;  // 1-based physical line number in the input
    std::string reason;
};

struct ParseResult {
    RecordSet records;
    std::vector<RejectedRow> rejections;
    size_t accepted = 0;
    size_t rejected = 0;
};

/// Parses the record CSV. A malformed header is fatal (ParseError); malformed
/// rows land in the rejection report. A repeated (participant, measure,
/// timestamp) key rejects the later occurrence.
ParseResult parse_records(std::istream& in);
ParseResult parse_records_file(const std::string& path);

/// Canonical serialization: header, then rows in input order with timestamps
/// re-emitted as ISO-8601 UTC and values in shortest round-trip form.
void serialize_records(const RecordSet& rs, std::ostream& out);
std::string serialize_records(const RecordSet& rs);

/// Rejection report as CSV `line,reason`.
std::string rejection_report_csv(const std::vector<RejectedRow>& rejections);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

/// Splits one CSV line on commas. No quoting: the schema's fields never
/// contain separators.
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace cohort_pulse
