#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewtorus/angles.hpp"

namespace skewtorus::app {

/// Bad input data: unreadable file, malformed row, empty table.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags or configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AngleUnit { Radians, Degrees };

AngleUnit parse_unit(const std::string& text);

struct Dataset {
  std::vector<TorusPoint> points;
  /// One label per row when a group column was requested, else empty.
  std::vector<std::string> labels;
  std::size_t dim() const { return points.empty() ? 0 : points.front().dim(); }
};

/// Reads selected 0-based columns of a comma-separated file. Lines starting
/// with '#' and blank lines are skipped. The first data line is taken as a
/// header when every selected field is non-numeric. Angles are converted to
/// radians and wrapped to [-pi, pi).
Dataset ingest_csv(const std::string& path, AngleUnit unit, const std::vector<int>& columns,
                   std::optional<int> group_column = std::nullopt);

/// "0,1" -> {0, 1}.
std::vector<int> parse_columns(const std::string& text);

/// Comma-separated reals, e.g. "0.5,-1".
std::vector<double> parse_reals(const std::string& text);

/// %.12g formatting used for every CSV number.
std::string format_number(double value);

/// Writes to a temporary sibling file, then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace skewtorus::app
