#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tcps/core/types.hpp"

namespace tcps {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

/// Writes `t_ms,x,y,signal` rows (header included).
void write_curve_csv(std::ostream& out, const StepResponseCurve& curve);
void write_curve_csv(const std::string& path, const StepResponseCurve& curve);

/// Reads a curve file; the band is not stored in the file and must be
/// supplied by the caller.
StepResponseCurve read_curve_csv(std::istream& in, const StepBand& band, Setting setting = Setting::Haptic);
StepResponseCurve read_curve_csv(const std::string& path, const StepBand& band,
                                 Setting setting = Setting::Haptic);

/// Splits one CSV line on commas (no quoting; the formats here are numeric).
std::vector<std::string_view> split_csv_line(std::string_view line);

double parse_number(std::string_view field, std::size_t line_no);

}  // namespace tcps
