#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pathrep::cli {

/// One numerical check: a computed value compared against a threshold.
struct Check {
  enum class Kind { below, at_least, within };

  std::string name;
  double value = 0;
  Kind kind = Kind::below;
  double lower = 0;
  double upper = 0;
  std::string note;

  static Check below(std::string name, double value, double threshold, std::string note = {});
  static Check at_least(std::string name, double value, double threshold, std::string note = {});
  static Check within(std::string name, double value, double lo, double hi, std::string note = {});

  bool pass() const;
  std::string threshold_text() const;
};

/// Tolerance overrides keyed by check name; range checks take "name.lo" and
/// "name.hi". Throws std::invalid_argument naming the first unknown key.
void apply_overrides(std::vector<Check>& checks, const std::map<std::string, double>& overrides);
/// Keys accepted by apply_overrides for the given checks.
std::vector<std::string> override_keys(const std::vector<Check>& checks);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  /// Comma separated, header row, doubles as %.17e.
  std::string csv() const;
};

struct Report {
  std::string experiment;
  nlohmann::json config;
  std::vector<Check> checks;
  std::vector<Table> tables;
  /// Pre-rendered outputs: file suffix appended to the stem -> contents.
  std::vector<std::pair<std::string, std::string>> attachments;
  std::vector<std::string> files;

  bool pass() const;
  std::vector<std::string> failures() const;
  std::string text() const;
};

std::string format_double(double x);

/// Least-squares slope of -log(err) against log(n).
double fitted_order(const std::vector<double>& n, const std::vector<double>& err);

}  // namespace pathrep::cli
