#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace skewtorus::app {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_number(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (*begin == '+') ++begin;
  double value = 0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

AngleUnit parse_unit(const std::string& text) {
  if (text == "rad" || text == "radians") return AngleUnit::Radians;
  if (text == "deg" || text == "degrees") return AngleUnit::Degrees;
  throw ConfigError("unknown unit '" + text + "' (expected rad or deg)");
}

std::vector<int> parse_columns(const std::string& text) {
  std::vector<int> out;
  for (const auto& field : split(text)) {
    int v = -1;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || v < 0)
      throw ConfigError("bad column list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty column list");
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& field : split(text)) {
    const auto v = to_number(field);
    if (!v || !std::isfinite(*v)) throw ConfigError("bad number '" + field + "' in '" + text + "'");
    out.push_back(*v);
  }
  return out;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Dataset ingest_csv(const std::string& path, AngleUnit unit, const std::vector<int>& columns,
                   std::optional<int> group_column) {
  if (columns.empty()) throw ConfigError("no columns selected");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  const double scale = unit == AngleUnit::Degrees ? kPi / 180.0 : 1.0;
  int needed = *std::max_element(columns.begin(), columns.end());
  if (group_column) needed = std::max(needed, *group_column);
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split(t);
    if (static_cast<int>(fields.size()) <= needed)
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected at least " +
                      std::to_string(needed + 1) + " fields");
    std::vector<std::optional<double>> values;
    for (int c : columns) values.push_back(to_number(fields[static_cast<std::size_t>(c)]));
    if (first) {
      first = false;
      if (std::none_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); })) continue;
    }
    std::vector<double> angles;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!values[k] || !std::isfinite(*values[k]))
        throw DataError(path + ": line " + std::to_string(line_no) + ": non-numeric value '" +
                        fields[static_cast<std::size_t>(columns[k])] + "'");
      angles.push_back(*values[k] * scale);
    }
    data.points.emplace_back(std::move(angles));
    if (group_column) data.labels.push_back(fields[static_cast<std::size_t>(*group_column)]);
  }
  if (data.points.empty()) throw DataError(path + ": no data rows");
  return data;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace skewtorus::app
