#pragma once

#include <string>

#include "splatsim/core/json_util.hpp"
#include "splatsim/eval/bench.hpp"
#include "splatsim/eval/replay.hpp"

namespace splatsim {

// Aligned plain-text tables. The metric table has one row per camera plus
// an "all" row; `per_frame` adds one row per compared frame.
std::string format_metric_table(const MetricReport& report, bool per_frame = false);
// Measured row, the published reference row and the accounting check.
std::string format_timing_table(const TimingReport& report);

// Structured twins of the tables, with the same numbers.
Json metric_report_to_json(const MetricReport& report);
Json timing_report_to_json(const TimingReport& report);

}  // namespace splatsim
