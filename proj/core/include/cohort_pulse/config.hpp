#pragma once

#include <string>

#include "cohort_pulse/report.hpp"

namespace cohort_pulse {

/// Loads a run configuration from a JSON file. Unknown keys are rejected;
/// omitted blocks fall back to the built-in defaults (calendar, analyses,
/// simulator ranges). Throws ConfigError with the offending key in the
/// message.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);

/// Loads just a simulator block (the `simulate` CLI subcommand input).
SimConfig load_sim_config(const std::string& path);

/// Loads a period calendar file: rows of label/start/end plus an optional
/// precedence list and annotation dates.
CalendarConfig load_calendar_config(const std::string& path);

}  // namespace cohort_pulse
