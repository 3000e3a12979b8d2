#include "pathrep_cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pathrep::cli {

Check Check::below(std::string name, double value, double threshold, std::string note) {
  return Check{std::move(name), value, Kind::below, 0.0, threshold, std::move(note)};
}

Check Check::at_least(std::string name, double value, double threshold, std::string note) {
  return Check{std::move(name), value, Kind::at_least, threshold, 0.0, std::move(note)};
}

Check Check::within(std::string name, double value, double lo, double hi, std::string note) {
  return Check{std::move(name), value, Kind::within, lo, hi, std::move(note)};
}

bool Check::pass() const {
  if (std::isnan(value)) return false;
  switch (kind) {
    case Kind::below: return value < upper;
    case Kind::at_least: return value >= lower;
    case Kind::within: return value >= lower && value <= upper;
  }
  return false;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

double fitted_order(const std::vector<double>& n, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(n[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

std::string Check::threshold_text() const {
  switch (kind) {
    case Kind::below: return "< " + short_double(upper);
    case Kind::at_least: return ">= " + short_double(lower);
    case Kind::within: return "in [" + short_double(lower) + ", " + short_double(upper) + "]";
  }
  return {};
}

std::vector<std::string> override_keys(const std::vector<Check>& checks) {
  std::vector<std::string> keys;
  for (const auto& c : checks) {
    if (c.kind == Check::Kind::within) {
      keys.push_back(c.name + ".lo");
      keys.push_back(c.name + ".hi");
    } else {
      keys.push_back(c.name);
    }
  }
  return keys;
}

void apply_overrides(std::vector<Check>& checks, const std::map<std::string, double>& overrides) {
  std::set<std::string> used;
  for (auto& c : checks) {
    auto take = [&](const std::string& key, double& slot) {
      if (auto it = overrides.find(key); it != overrides.end()) {
        slot = it->second;
        used.insert(key);
      }
    };
    switch (c.kind) {
      case Check::Kind::below: take(c.name, c.upper); break;
      case Check::Kind::at_least: take(c.name, c.lower); break;
      case Check::Kind::within:
        take(c.name + ".lo", c.lower);
        take(c.name + ".hi", c.upper);
        break;
    }
  }
  for (const auto& [key, _] : overrides) {
    if (!used.count(key)) throw std::invalid_argument("unknown tolerance '" + key + "'");
  }
}

std::string Table::csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_double(v);
            else out << v;
          },
          row[i]);
    }
    out << '\n';
  }
  return out.str();
}

bool Report::pass() const {
  for (const auto& c : checks) {
    if (!c.pass()) return false;
  }
  return true;
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass()) out.push_back(c.name);
  }
  return out;
}

std::string Report::text() const {
  std::ostringstream out;
  out << "experiment: " << experiment << '\n';
  out << "config:\n" << config.dump(2) << '\n';
  out << "checks:\n";
  for (const auto& c : checks) {
    out << "  [" << (c.pass() ? "PASS" : "FAIL") << "] " << c.name << " = "
        << format_double(c.value) << " (" << c.threshold_text() << ")";
    if (!c.note.empty()) out << "  " << c.note;
    out << '\n';
  }
  if (!files.empty()) {
    out << "files:\n";
    for (const auto& f : files) out << "  " << f << '\n';
  }
  out << "result: " << (pass() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace pathrep::cli
