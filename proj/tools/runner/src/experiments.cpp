#include "pathrep_cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "pathrep_cli/acceptance.hpp"

namespace pathrep::cli {

namespace {

constexpr double kPi = std::numbers::pi;

int extra(const json& integrator, const char* key, int fallback) {
  if (integrator.is_object() && integrator.contains(key)) return integrator.at(key).get<int>();
  return fallback;
}

template <typename T>
T option(const json& block, const char* key, T fallback) {
  if (block.is_object() && block.contains(key)) return block.at(key).get<T>();
  return fallback;
}

std::vector<std::string> matrix_header(int d) {
  std::vector<std::string> h;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      h.push_back("re_" + std::to_string(i) + "_" + std::to_string(j));
      h.push_back("im_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  return h;
}

void append_matrix(std::vector<Cell>& row, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.emplace_back(m(i, j).real());
      row.emplace_back(m(i, j).imag());
    }
  }
}

double circular_distance(double a, double b) {
  const double d = std::remainder(a - b, 2.0 * kPi);
  return std::abs(d);
}

Vector random_vector(std::mt19937_64& rng, int n, double scale) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, -scale, scale);
  return v;
}

/// Checks shared by experiments that compare against an expected value.
void expectation_checks(const json& expect, const Matrix& value, double identity_tolerance,
                        std::vector<Check>& checks) {
  if (expect.is_null()) return;
  if (expect.is_string() && expect.get<std::string>() == "identity") {
    if (value.rows() != value.cols()) throw ConfigError("expect: identity needs a square result", "expect");
    checks.push_back(Check::below("identity_residual",
                                  distance(value, identity_matrix(static_cast<int>(value.rows())), Norm::operator2),
                                  identity_tolerance, "operator norm"));
  } else if (expect.is_object()) {
    const Matrix target = parse_matrix(expect.at("value"), "expect.value");
    if (target.rows() != value.rows() || target.cols() != value.cols()) {
      throw ConfigError("expect.value: shape does not match the result", "expect.value");
    }
    checks.push_back(Check::below("value_residual", distance(value, target, Norm::operator2), 1e-8,
                                  "operator norm"));
  }
}

Report transport_experiment(const ExperimentConfig& cfg) {
  const ConnectionForm a = build_connection(cfg.connection);
  const Path path = build_path(cfg.path);
  const IntegratorConfig integ = build_integrator(cfg.integrator);
  const int samples = std::max(2, extra(cfg.integrator, "samples", 11));
  const double b = path.core_begin(), e = path.core_end();

  Table table{"transport", {"u"}, {}};
  for (auto& h : matrix_header(a.fiber_dim())) table.header.push_back(h);
  for (int k = 0; k < samples; ++k) {
    const double u = k + 1 == samples ? e : b + (e - b) * k / (samples - 1);
    std::vector<Cell> row{u};
    append_matrix(row, transport(a, path, b, u, integ).map.matrix());
    table.rows.push_back(std::move(row));
  }

  const TransportResult full = transport(a, path, integ);
  Report r;
  r.tables.push_back(std::move(table));
  const bool ode = integ.method == TransportMethod::ode;
  r.checks.push_back(Check::below("error_estimate", full.error_estimate, ode ? 1e-8 : 1e-5,
                                  std::string("Richardson, ") + to_string(full.method) + ", " +
                                      std::to_string(full.steps) + " steps"));
  r.checks.push_back(Check::below("cocycle", cocycle_residual(a, path, b, 0.5 * (b + e), e, integ),
                                  1e-8, "split at the core midpoint"));
  expectation_checks(cfg.expect, full.map.matrix(), 1e-12, r.checks);
  return r;
}

Report convergence_experiment(const ExperimentConfig& cfg) {
  const ConnectionForm a = build_connection(cfg.connection);
  const Path path = build_path(cfg.path);
  const int n_min = extra(cfg.integrator, "n_min", 16);
  const int n_max = extra(cfg.integrator, "n_max", 4096);
  const int ref_steps = extra(cfg.integrator, "reference_steps", 65536);
  if (n_max < 2 * n_min) throw ConfigError("integrator.n_max: must be at least 2 n_min", "integrator.n_max");
  const double b = path.core_begin(), e = path.core_end();
  const Matrix ref = detail::integrate_ode(a, path, b, e, ref_steps);

  Table table{"convergence", {"n", "error_left", "error_midpoint", "error_ode"}, {}};
  std::vector<double> ns, left, mid;
  for (int n = n_min; n <= n_max; n *= 2) {
    ns.push_back(n);
    left.push_back(distance(detail::integrate_product(a, path, b, e, n, ProductRule::left), ref));
    mid.push_back(distance(detail::integrate_product(a, path, b, e, n, ProductRule::midpoint), ref));
    const double ode = distance(detail::integrate_ode(a, path, b, e, n), ref);
    table.rows.push_back({static_cast<long long>(n), left.back(), mid.back(), ode});
  }
  Report r;
  r.tables.push_back(std::move(table));
  const std::string note = "N = " + std::to_string(n_min) + ".." + std::to_string(n_max) +
                           ", reference RK4 with " + std::to_string(ref_steps) + " steps";
  r.checks.push_back(Check::within("order_left", fitted_order(ns, left), 0.9, 1.1, note));
  r.checks.push_back(Check::at_least("order_midpoint", fitted_order(ns, mid), 1.8, note));
  return r;
}

struct ReconstructSettings {
  double h = 1e-4;
  DifferenceScheme scheme = DifferenceScheme::central;
  int samples = 20;
  Box box;
  std::vector<int> counts;
};

ReconstructSettings reconstruct_settings(const json& j, int n) {
  ReconstructSettings s;
  s.h = option(j, "h", 1e-4);
  s.scheme = option<std::string>(j, "scheme", "central") == "one_sided" ? DifferenceScheme::one_sided
                                                                          : DifferenceScheme::central;
  s.samples = option(j, "samples", 20);
  s.box.lower = j.is_object() && j.contains("lower") ? parse_vector(j["lower"], "reconstruct.lower")
                                                     : Vector::Constant(n, -1.0);
  s.box.upper = j.is_object() && j.contains("upper") ? parse_vector(j["upper"], "reconstruct.upper")
                                                     : Vector::Constant(n, 1.0);
  s.counts = option(j, "counts", std::vector<int>(static_cast<std::size_t>(n), n > 2 ? 4 : 10));
  if (s.box.lower.size() != n || s.box.upper.size() != n || static_cast<int>(s.counts.size()) != n) {
    throw ConfigError("reconstruct: lower, upper and counts must match the chart dimension", "reconstruct");
  }
  return s;
}

Report reconstruct_from_table(const ExperimentConfig& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("reconstruct.oracle_csv: cannot read '" + file.string() + "'", "reconstruct.oracle_csv");
  int n = 0, d = 0;
  std::vector<OracleSample> samples = read_oracle_csv(in, &n, &d);
  const ReconstructSettings s = reconstruct_settings(cfg.reconstruct, n);
  const TransportOracle oracle = tabulated_oracle(samples);
  std::optional<ConnectionForm> a;
  if (!cfg.connection.is_null()) {
    a = build_connection(cfg.connection);
    if (a->chart_dim() != n || a->fiber_dim() != d) {
      throw ConfigError("connection: shape does not match the oracle table", "connection");
    }
  }

  // Every distinct (p, v) probe with the samples the scheme needs.
  std::vector<std::pair<Vector, Vector>> probes;
  for (const auto& smp : samples) {
    const bool seen = std::any_of(probes.begin(), probes.end(), [&](const auto& q) {
      return q.first == smp.p && q.second == smp.v;
    });
    if (!seen) probes.emplace_back(smp.p, smp.v);
  }
  Table table{"reconstruct", {}, {}};
  for (int i = 0; i < n; ++i) table.header.push_back("p" + std::to_string(i));
  for (int i = 0; i < n; ++i) table.header.push_back("v" + std::to_string(i));
  for (auto& h : matrix_header(d)) table.header.push_back(h);
  if (a) table.header.push_back("error");
  double worst = 0.0;
  for (const auto& [p, v] : probes) {
    const Matrix rec = reconstruct_at(oracle, p, v, s.h, s.scheme).matrix();
    std::vector<Cell> row;
    for (int i = 0; i < n; ++i) row.emplace_back(p(i));
    for (int i = 0; i < n; ++i) row.emplace_back(v(i));
    append_matrix(row, rec);
    if (a) {
      const double err = distance(rec, evaluate_connection(*a, p, v).matrix());
      worst = std::max(worst, err);
      row.emplace_back(err);
    }
    table.rows.push_back(std::move(row));
  }
  Report r;
  r.tables.push_back(std::move(table));
  if (a) {
    r.checks.push_back(Check::below("roundtrip", worst, 1e-4,
                                    std::to_string(probes.size()) + " tabulated probes"));
  }
  return r;
}

Report reconstruct_experiment(const ExperimentConfig& cfg, const std::filesystem::path& base_dir) {
  if (cfg.reconstruct.is_object() && cfg.reconstruct.contains("oracle_csv")) {
    std::filesystem::path file = cfg.reconstruct["oracle_csv"].get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return reconstruct_from_table(cfg, file);
  }
  const ConnectionForm a = build_connection(cfg.connection);
  const int n = a.chart_dim();
  const ReconstructSettings s = reconstruct_settings(cfg.reconstruct, n);
  const IntegratorConfig integ = build_integrator(cfg.integrator);
  const TransportOracle oracle = oracle_from_connection(a, integ);

  Table table{"reconstruct", {}, {}};
  for (int i = 0; i < n; ++i) table.header.push_back("p" + std::to_string(i));
  table.header.push_back("direction");
  table.header.push_back("error");
  double worst = 0.0;
  for (const Vector& p : grid_points(s.box, s.counts)) {
    const std::vector<Matrix> exact = a.components(p);
    for (int i = 0; i < n; ++i) {
      const Vector e = Vector::Unit(n, i);
      const double err = distance(reconstruct_at(oracle, p, e, s.h, s.scheme).matrix(), exact[static_cast<std::size_t>(i)]);
      worst = std::max(worst, err);
      std::vector<Cell> row;
      for (int k = 0; k < n; ++k) row.emplace_back(p(k));
      row.emplace_back(static_cast<long long>(i));
      row.emplace_back(err);
      table.rows.push_back(std::move(row));
    }
  }

  std::mt19937_64 rng(cfg.seed);
  double homogeneity = 0.0, additivity = 0.0;
  const bool central = s.scheme == DifferenceScheme::central;
  const double target = central ? 4.0 : 2.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  int measured = 0;
  auto draw = [&] {
    Vector p(n);
    for (int i = 0; i < n; ++i) p(i) = uniform(rng, s.box.lower(i), s.box.upper(i));
    return p;
  };
  for (int k = 0; k < s.samples; ++k) {
    const Vector p = draw();
    const Vector u = random_vector(rng, n, 1.0);
    const Vector v = random_vector(rng, n, 1.0);
    const double lambda = uniform(rng, 0.25, 4.0);
    homogeneity = std::max(homogeneity, homogeneity_residual(oracle, p, v, lambda, s.h));
    additivity = std::max(additivity, additivity_residual(oracle, p, u, v, s.h));
    const Matrix exact = evaluate_connection(a, p, v).matrix();
    const double e1 = distance(reconstruct_at(oracle, p, v, 1e-2, s.scheme).matrix(), exact);
    const double e2 = distance(reconstruct_at(oracle, p, v, 5e-3, s.scheme).matrix(), exact);
    // Below ~1e-10 the difference quotient error is rounding, not truncation.
    if (e2 > 1e-10) {
      const double q = e1 / e2;
      if (measured == 0 || std::abs(q - target) > std::abs(ratio - target)) ratio = q;
      ++measured;
    }
  }

  Report r;
  const std::size_t components = table.rows.size();
  r.tables.push_back(std::move(table));
  r.checks.push_back(Check::below("roundtrip", worst, 1e-4,
                                  std::to_string(components) + " components, h = " + format_double(s.h)));
  r.checks.push_back(Check::below("homogeneity", homogeneity, 1e-6, std::to_string(s.samples) + " probes"));
  r.checks.push_back(Check::below("additivity", additivity, 1e-6, std::to_string(s.samples) + " probes"));
  if (measured > 0) {
    r.checks.push_back(Check::within("order_ratio", ratio, target - 0.5, target + 0.5,
                                     "error(h = 1e-2) / error(h = 5e-3), worst of " +
                                         std::to_string(measured)));
  }
  return r;
}

Report tabulate_experiment(const ExperimentConfig& cfg) {
  const ConnectionForm a = build_connection(cfg.connection);
  const int n = a.chart_dim();
  const ReconstructSettings s = reconstruct_settings(cfg.reconstruct, n);
  const std::vector<double> times = option(cfg.reconstruct, "times", std::vector<double>{-s.h, s.h});
  const TransportOracle oracle = oracle_from_connection(a, build_integrator(cfg.integrator));
  const std::vector<Vector> points = grid_points(s.box, s.counts);
  std::vector<Vector> directions;
  for (int i = 0; i < n; ++i) directions.push_back(Vector::Unit(n, i));
  const std::vector<OracleSample> samples = tabulate(oracle, points, directions, times);

  std::ostringstream csv;
  write_oracle_csv(csv, n, a.fiber_dim(), samples);
  Report r;
  r.attachments.emplace_back(".csv", csv.str());
  return r;
}

Report holonomy_experiment(const ExperimentConfig& cfg) {
  const GlobalBundle b = build_bundle(cfg.bundle);
  GlobalTransportOptions opts;
  opts.integrator = build_integrator(cfg.integrator);
  GlobalTransportOptions dense;
  dense.integrator.method = TransportMethod::product;
  dense.integrator.rule = ProductRule::midpoint;
  dense.integrator.step = 1.0 / 8192.0;

  struct Case {
    std::string label;
    Path loop;
    std::optional<double> expected;
  };
  std::vector<Case> cases;
  const json& h = cfg.holonomy;
  const bool sphere = option<std::string>(cfg.bundle, "manifold", "") == "sphere";
  if (h.is_object() && h.contains("loops")) {
    const json& loops = h["loops"];
    const json expected = h.value("expected_angles", json::array());
    if (!expected.empty() && expected.size() != loops.size()) {
      throw ConfigError("holonomy.expected_angles: one angle per loop", "holonomy.expected_angles");
    }
    for (std::size_t i = 0; i < loops.size(); ++i) {
      std::optional<double> e;
      if (!expected.empty()) e = expected[i].get<double>();
      cases.push_back({"loop" + std::to_string(i), build_path(loops[i], "holonomy.loops[" + std::to_string(i) + "]"), e});
    }
  } else if (sphere) {
    const double phi0 = option(h, "phi0", 0.0);
    const auto thetas = option(h, "colatitudes", std::vector<double>{kPi / 6, kPi / 3, kPi / 2});
    for (double theta : thetas) {
      // Enclosed area of the cap, the holonomy angle of the round sphere.
      cases.push_back({"theta=" + format_double(theta), colatitude_loop(theta, phi0),
                       2.0 * kPi * (1.0 - std::cos(theta))});
    }
  } else if (option<std::string>(cfg.bundle, "manifold", "") == "circle") {
    cases.push_back({"circle_loop", circle_loop(option(h, "phi0", 0.0)), std::nullopt});
  } else {
    throw ConfigError("holonomy.loops: required for this bundle", "holonomy.loops");
  }

  Table table{"holonomy", {"loop", "trace_re", "trace_im", "angle", "expected", "error"}, {}};
  double worst_angle = 0.0, worst_oracle = 0.0;
  bool any_expected = false;
  for (const auto& c : cases) {
    const Matrix hol = loop_holonomy(b, c.loop, opts).map.matrix();
    const Matrix ref = loop_holonomy(b, c.loop, dense).map.matrix();
    worst_oracle = std::max(worst_oracle, distance(hol, ref));
    const Complex tr = hol.trace();
    double angle = std::numeric_limits<double>::quiet_NaN();
    if (b.fiber_dim() == 2) {
      try {
        angle = rotation_angle(hol);
      } catch (const Error&) {
      }
    }
    double expected = std::numeric_limits<double>::quiet_NaN();
    double err = std::numeric_limits<double>::quiet_NaN();
    if (c.expected) {
      any_expected = true;
      expected = *c.expected;
      err = circular_distance(angle, expected);
      worst_angle = std::isnan(err) ? err : std::max(worst_angle, err);
    }
    table.rows.push_back({c.label, tr.real(), tr.imag(), angle, expected, err});
  }
  Report r;
  r.tables.push_back(std::move(table));
  if (any_expected) r.checks.push_back(Check::below("angle_error", worst_angle, 1e-6, "mod 2 pi"));
  r.checks.push_back(Check::below("product_oracle", worst_oracle, 1e-6, "midpoint product, step 1/8192"));
  return r;
}

Report bordism_experiment(const ExperimentConfig& cfg) {
  const GlobalBundle b = build_bundle(cfg.bundle);
  const BordismWord w = build_word(cfg.word, b);
  BordismOptions opts;
  opts.integrator = build_integrator(cfg.integrator);
  const LinearMap m = evaluate_bordism(w, b, opts);

  Table table{"matrix", {"row", "col", "re", "im"}, {}};
  for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.matrix.cols(); ++j) {
      table.rows.push_back({static_cast<long long>(i), static_cast<long long>(j), m.matrix(i, j).real(),
                            m.matrix(i, j).imag()});
    }
  }
  Report r;
  r.tables.push_back(std::move(table));
  if (cfg.expect.is_string() && cfg.expect.get<std::string>() == "trace") {
    if (option<std::string>(cfg.word, "shape", "") != "circle") {
      throw ConfigError("expect: trace needs a word of shape circle", "expect");
    }
    const Path loop = build_path(cfg.word["path"], "word.path");
    const Complex tr = loop_holonomy(b, loop, GlobalTransportOptions{opts.integrator, {}, {}}).map.matrix().trace();
    r.checks.push_back(Check::below("trace_residual", std::abs(m.matrix(0, 0) - tr), 1e-8,
                                    "against the trace of the loop holonomy"));
  } else {
    expectation_checks(cfg.expect, m.matrix, 1e-8, r.checks);
  }
  return r;
}

Report verify_all(const ExperimentConfig& cfg) {
  std::vector<CriterionResult> results;
  try {
    results = run_acceptance(cfg.seed, cfg.tolerances);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("tolerances: ") + e.what(), "tolerances");
  }
  Report r = acceptance_report(results, cfg.seed);
  return r;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& base_dir) {
  validate(cfg);
  Report r;
  const std::string& kind = cfg.experiment;
  if (kind == "verify-all") {
    r = verify_all(cfg);
  } else {
    if (kind == "transport") r = transport_experiment(cfg);
    else if (kind == "convergence") r = convergence_experiment(cfg);
    else if (kind == "reconstruct") r = reconstruct_experiment(cfg, base_dir);
    else if (kind == "tabulate") r = tabulate_experiment(cfg);
    else if (kind == "holonomy") r = holonomy_experiment(cfg);
    else if (kind == "bordism") r = bordism_experiment(cfg);
    else throw ConfigError("unknown experiment '" + kind + "'", "experiment");
    try {
      apply_overrides(r.checks, cfg.tolerances);
    } catch (const std::invalid_argument& e) {
      std::string known;
      for (const auto& k : override_keys(r.checks)) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError(std::string(e.what()) + " (known: " + (known.empty() ? "none" : known) + ")",
                        "tolerances");
    }
  }
  r.experiment = kind;
  r.config = cfg.to_json();
  return r;
}

std::vector<std::filesystem::path> write_outputs(Report& report, const std::filesystem::path& dir,
                                                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : report.tables) {
    out.emplace_back(report.tables.size() == 1 ? stem + ".csv" : stem + "_" + t.name + ".csv", t.csv());
  }
  for (const auto& [suffix, contents] : report.attachments) out.emplace_back(stem + suffix, contents);
  out.emplace_back(stem + "_config.json", report.config.dump(2) + "\n");
  report.files.clear();
  for (const auto& [name, _] : out) report.files.push_back(name);
  report.files.push_back(stem + "_report.txt");
  out.emplace_back(report.files.back(), report.text());

  std::vector<std::filesystem::path> written;
  for (const auto& [name, contents] : out) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    f << contents;
    if (!f) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace pathrep::cli
