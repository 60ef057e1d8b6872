#include "tcps/core/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "tcps/error.hpp"

namespace tcps {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

void write_curve_csv(std::ostream& out, const StepResponseCurve& curve) {
  out << "t_ms,x,y,signal\n";
  for (const auto& s : curve.samples) {
    out << format_number(s.t_ms) << ',' << format_number(s.x) << ',' << format_number(s.y) << ','
        << format_number(s.signal) << '\n';
  }
}

void write_curve_csv(const std::string& path, const StepResponseCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  write_curve_csv(out, curve);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(Errc::MalformedCurve, "line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

StepResponseCurve read_curve_csv(std::istream& in, const StepBand& band, Setting setting) {
  StepResponseCurve curve;
  curve.band = band;
  curve.setting = setting;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("t_ms,x,y,signal", 0) != 0) {
        throw Error(Errc::MalformedCurve, "line 1: expected header t_ms,x,y,signal");
      }
      continue;
    }
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) throw Error(Errc::MalformedCurve, "line " + std::to_string(line_no) + ": expected 4 fields");
    curve.samples.push_back({parse_number(f[0], line_no), parse_number(f[1], line_no), parse_number(f[2], line_no),
                             parse_number(f[3], line_no)});
  }
  return curve;
}

StepResponseCurve read_curve_csv(const std::string& path, const StepBand& band, Setting setting) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path);
  return read_curve_csv(in, band, setting);
}

}  // namespace tcps
