#include "pathrep_cli/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pathrep/pathrep.hpp"

namespace pathrep::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Limit {
  const char* name;
  Check::Kind kind;
  double lower;
  double upper;
};

const std::vector<Limit>& limits() {
  using K = Check::Kind;
  static const std::vector<Limit> table = {
      {"c1.cocycle", K::below, 0, 1e-8},
      {"c2.order_left", K::within, 0.9, 1.1},
      {"c2.order_midpoint", K::at_least, 1.8, 0},
      {"c3.gauge_covariance", K::below, 0, 1e-7},
      {"c4.constant_path", K::below, 0, 1e-12},
      {"c4.reparametrization", K::below, 0, 1e-8},
      {"c5.roundtrip", K::below, 0, 1e-4},
      {"c5.homogeneity", K::below, 0, 1e-6},
      {"c5.additivity", K::below, 0, 1e-6},
      {"c5.order_ratio", K::within, 3.5, 4.5},
      {"c6.holonomy_pi6", K::below, 0, 1e-6},
      {"c6.holonomy_pi3", K::below, 0, 1e-6},
      {"c6.holonomy_pi2", K::below, 0, 1e-6},
      {"c6.product_oracle", K::below, 0, 1e-6},
      {"c7.refinement", K::below, 0, 1e-10},
      {"c7.single_chart", K::below, 0, 1e-8},
      {"c7.cech_sphere", K::below, 0, 1e-10},
      {"c7.cech_circle", K::below, 0, 1e-10},
      {"c7.trace_invariance", K::below, 0, 1e-7},
      {"c8.snake_constant", K::below, 0, 1e-10},
      {"c8.snake_decorated", K::below, 0, 1e-8},
      {"c8.circle_trace", K::below, 0, 1e-8},
      {"c8.monoidal", K::below, 0, 1e-12},
      {"c8.sitting", K::below, 0, 1e-8},
  };
  return table;
}

Check check(const std::string& name, double value, std::string note = {}) {
  for (const auto& l : limits()) {
    if (name == l.name) return Check{name, value, l.kind, l.lower, l.upper, std::move(note)};
  }
  throw std::logic_error("no limit for check " + name);
}

double circular_distance(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

Path random_path(std::mt19937_64& rng, int dim = 2, double r = 1.0) {
  std::vector<Vector> points;
  for (int k = 0; k < 5; ++k) {
    Vector p(dim);
    for (int i = 0; i < dim; ++i) p(i) = uniform(rng, -r, r);
    points.push_back(std::move(p));
  }
  return spline_path(points);
}

Vector random_vector(std::mt19937_64& rng, int dim, double r) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = uniform(rng, -r, r);
  return v;
}

Matrix random_complex(std::mt19937_64& rng, int d, double scale) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = Complex(uniform(rng, -scale, scale), uniform(rng, -scale, scale));
  }
  return m;
}

std::vector<ConnectionForm> preset_cases(std::mt19937_64& rng) {
  return {
      zero_connection(2, 2),
      magnetic_connection(1.0),
      polynomial_example(),
      sphere_levi_civita(),
      constant_connection({random_complex(rng, 3, 0.6), random_complex(rng, 3, 0.6)}),
  };
}

// Great circle z = 0 from longitude phi0 to phi1, parameter in [0, 1].
Path equator_arc(double phi0, double phi1) {
  return Path(
      Chart(3), 0.0, 1.0,
      [=](double u) -> Vector {
        const double phi = phi0 + (phi1 - phi0) * u;
        return Vector{{std::cos(phi), std::sin(phi), 0.0}};
      },
      [=](double u) -> Vector {
        const double phi = phi0 + (phi1 - phi0) * u;
        return (phi1 - phi0) * Vector{{-std::sin(phi), std::cos(phi), 0.0}};
      },
      {}, false, "equator_arc");
}

// --- criteria ---------------------------------------------------------------

std::vector<Check> cocycle_criterion(std::mt19937_64& rng) {
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  double worst = 0.0;
  for (const auto& a : preset_cases(rng)) {
    const Path path = random_path(rng);
    for (int k = 0; k < 100; ++k) {
      double t[3] = {uniform(rng), uniform(rng), uniform(rng)};
      std::sort(t, t + 3);
      worst = std::max(worst, cocycle_residual(a, path, t[0], t[1], t[2], cfg));
    }
  }
  return {check("c1.cocycle", worst, "5 presets x 100 triples, step 1e-3")};
}

std::vector<Check> convergence_criterion(std::mt19937_64&) {
  const ConnectionForm a = magnetic_connection(1.0);
  const Path path = circle_arc(Vector{{0.3, -0.2}}, 0.8, 0.2, 2.6);
  const Matrix ref = detail::integrate_ode(a, path, 0.0, 1.0, 65536);
  std::vector<double> ns, left, mid;
  for (int n = 16; n <= 4096; n *= 2) {
    ns.push_back(n);
    left.push_back(distance(detail::integrate_product(a, path, 0.0, 1.0, n, ProductRule::left), ref));
    mid.push_back(
        distance(detail::integrate_product(a, path, 0.0, 1.0, n, ProductRule::midpoint), ref));
  }
  return {check("c2.order_left", fitted_order(ns, left), "N = 16..4096"),
          check("c2.order_midpoint", fitted_order(ns, mid), "N = 16..4096")};
}

std::vector<Check> gauge_criterion(std::mt19937_64& rng) {
  const auto cases = preset_cases(rng);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ConnectionForm& a = cases[static_cast<std::size_t>(k) % cases.size()];
    const GaugeField g = random_smooth_gauge(2, a.fiber_dim(), rng);
    const ConnectionForm ag = gauge_transform(a, g);
    const Path path = random_path(rng);
    double s = uniform(rng), t = uniform(rng);
    if (s > t) std::swap(s, t);
    const IntegratorConfig cfg;
    const int steps = cfg.steps_for(s, t);
    const Matrix f = detail::integrate_ode(a, path, s, t, steps);
    const Matrix fg = detail::integrate_ode(ag, path, s, t, steps);
    worst = std::max(worst, distance(g.value(path.position(t)) * f, fg * g.value(path.position(s))));
  }
  return {check("c3.gauge_covariance", worst, "50 random smooth gauges")};
}

std::vector<Check> identity_criterion(std::mt19937_64& rng) {
  double constant = 0.0;
  double reparam = 0.0;
  for (const auto& a : preset_cases(rng)) {
    const Path still = constant_path(random_vector(rng, 2, 1.0));
    const Matrix id = identity_matrix(a.fiber_dim());
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    constant = std::max(constant, distance(transport(a, still, cfg).map.matrix(), id));
    cfg.method = TransportMethod::product;
    constant = std::max(constant, distance(transport(a, still, cfg).map.matrix(), id));

    const Path path = random_path(rng);
    // Reparametrized paths run up to ~6x faster than the original; a finer
    // step keeps both solves well below the threshold.
    constexpr int kSteps = 8192;
    const Matrix base = detail::integrate_ode(a, path, 0.0, 1.0, kSteps);
    for (const auto& phi :
         {power_reparametrization(0.0, 1.0, 2.0), power_reparametrization(0.0, 1.0, 3.5),
          bump_reparametrization(0.0, 1.0), sitting_reparametrization(0.0, 1.0, 0.5),
          sitting_reparametrization(0.0, 1.0, 0.0)}) {
      const Path q = reparametrize(path, phi);
      reparam = std::max(reparam, distance(detail::integrate_ode(a, q, 0.0, 1.0, kSteps), base));
    }
  }
  return {check("c4.constant_path", constant, "ode and product"),
          check("c4.reparametrization", reparam, "power, bump and sitting maps, 8192 steps")};
}

std::vector<Check> reconstruction_criterion(std::mt19937_64& rng) {
  const Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  const auto grid = grid_points(box, {10, 10});
  double roundtrip = 0.0;
  for (const auto& a : {magnetic_connection(1.0), polynomial_example(), sphere_levi_civita()}) {
    roundtrip = std::max(roundtrip, roundtrip_error(a, grid, 1e-4));
  }

  double homogeneity = 0.0, additivity = 0.0;
  double ratio_worst = 4.0;
  for (const auto& a : {polynomial_example(), sphere_levi_civita()}) {
    const TransportOracle oracle = oracle_from_connection(a);
    for (int k = 0; k < 20; ++k) {
      const Vector p = random_vector(rng, 2, 1.0);
      const Vector u = random_vector(rng, 2, 1.0);
      const Vector v = random_vector(rng, 2, 1.0);
      const double lambda = uniform(rng, 0.25, 4.0);
      homogeneity = std::max(homogeneity, homogeneity_residual(oracle, p, v, lambda, 1e-4));
      additivity = std::max(additivity, additivity_residual(oracle, p, u, v, 1e-4));
    }
    for (int k = 0; k < 5; ++k) {
      const Vector p = random_vector(rng, 2, 1.0);
      const Vector v = random_vector(rng, 2, 1.0);
      const Matrix exact = evaluate_connection(a, p, v).matrix();
      const double e1 = distance(reconstruct_at(oracle, p, v, 1e-2).matrix(), exact);
      const double e2 = distance(reconstruct_at(oracle, p, v, 5e-3).matrix(), exact);
      const double ratio = e1 / e2;
      if (std::abs(ratio - 4.0) > std::abs(ratio_worst - 4.0) || std::isnan(ratio)) ratio_worst = ratio;
    }
  }
  return {check("c5.roundtrip", roundtrip, "10x10 grid, h = 1e-4, three presets"),
          check("c5.homogeneity", homogeneity, "h = 1e-4"),
          check("c5.additivity", additivity, "h = 1e-4"),
          check("c5.order_ratio", ratio_worst, "error(h = 1e-2) / error(h = 5e-3), worst case")};
}

std::vector<Check> holonomy_criterion(std::mt19937_64& rng) {
  const GlobalBundle b = sphere_tangent_bundle();
  const double phi0 = uniform(rng, 0.0, 2.0 * kPi);
  GlobalTransportOptions dense;
  dense.integrator.method = TransportMethod::product;
  dense.integrator.rule = ProductRule::midpoint;
  dense.integrator.step = 1.0 / 8192.0;
  std::vector<Check> out;
  double oracle = 0.0;
  const std::pair<const char*, double> cases[] = {
      {"c6.holonomy_pi6", kPi / 6}, {"c6.holonomy_pi3", kPi / 3}, {"c6.holonomy_pi2", kPi / 2}};
  for (const auto& [name, theta] : cases) {
    const Path loop = colatitude_loop(theta, phi0);
    const double expected = 2.0 * kPi * (1.0 - std::cos(theta));
    const double angle = loop_holonomy_angle(b, loop);
    out.push_back(check(name, circular_distance(angle, expected),
                        "angle " + format_double(angle)));
    oracle = std::max(oracle, circular_distance(loop_holonomy_angle(b, loop, dense), angle));
  }
  out.push_back(check("c6.product_oracle", oracle, "midpoint product, step 1/8192"));
  return out;
}

std::vector<Check> descent_criterion(std::mt19937_64& rng) {
  const GlobalBundle sphere = sphere_tangent_bundle();
  const Matrix gen = rotation(0.5 * kPi) * 0.7;
  const GlobalBundle circle =
      circle_bundle(rotation(uniform(rng, -3.0, 3.0)), rotation(uniform(rng, -3.0, 3.0)),
                    constant_connection({gen}));

  double refinement = 0.0;
  auto refine_gap = [&](const GlobalBundle& b, const Path& path) {
    const CutAssignment cut = subordinate_cut(path, b.atlas());
    const auto f = global_transport(b, path, cut).map.matrix();
    const auto g = global_transport(b, path, cut.refine()).map.matrix();
    refinement = std::max(refinement, distance(f, g));
  };
  refine_gap(sphere, colatitude_loop(kPi / 3, uniform(rng, 0.0, 2.0 * kPi)));
  refine_gap(sphere, colatitude_loop(kPi / 2, uniform(rng, 0.0, 2.0 * kPi)));
  refine_gap(circle, circle_loop(uniform(rng, 0.0, 2.0 * kPi)));

  // The arc stays inside chart 0; chart 1 covers longitudes above pi/3.
  const Path arc = equator_arc(1.9, 0.35);
  const Matrix direct = detail::integrate(sphere.connection(0), local_path(arc, sphere.atlas(), 0),
                                          0.0, 1.0, IntegratorConfig{});
  GlobalTransportOptions in_zero;
  in_zero.source_chart = 0;
  in_zero.target_chart = 0;
  double single = distance(global_transport(sphere, arc, in_zero).map.matrix(), direct);
  const CutAssignment forced{{0.0, 0.2, 0.45, 1.0}, {0, 1, 0}};
  single = std::max(single,
                    distance(global_transport(sphere, arc, forced, in_zero).map.matrix(), direct));

  // Regauge both charts; holonomy traces must not move.
  std::vector<GaugeField> h{random_smooth_gauge(2, 2, rng), random_smooth_gauge(2, 2, rng)};
  const GlobalBundle moved = sphere.regauge(h);
  double trace = 0.0;
  for (double theta : {kPi / 6, kPi / 3, kPi / 2}) {
    const Path loop = colatitude_loop(theta, uniform(rng, 0.0, 2.0 * kPi));
    trace = std::max(trace, std::abs(loop_holonomy(sphere, loop).map.matrix().trace() -
                                     loop_holonomy(moved, loop).map.matrix().trace()));
  }

  return {check("c7.refinement", refinement, "subordinate cut vs its midpoint refinement"),
          check("c7.single_chart", single, "glued (marched and forced cuts) vs chart transport"),
          check("c7.cech_sphere", check_cech_cocycle(sphere.cocycle(), 256)),
          check("c7.cech_circle", check_cech_cocycle(circle.cocycle(), 256)),
          check("c7.trace_invariance", trace, "random smooth regauging of both charts")};
}

std::vector<Check> bordism_criterion(std::mt19937_64& rng) {
  const GlobalBundle sphere = sphere_tangent_bundle();
  const GlobalBundle flat = circle_bundle(identity_matrix(2), identity_matrix(2));
  const double phi_c = uniform(rng, -3.0, 3.0);
  const GlobalBundle twisted = circle_bundle(rotation(phi_c), identity_matrix(2));

  const Path loop = colatitude_loop(kPi / 3, uniform(rng, 0.0, 2.0 * kPi));
  const Vector x = loop.start_point();
  const int cx = sphere.atlas().deepest_chart(x);

  double snake_constant = 0.0;
  for (Sign s : {Sign::plus, Sign::minus}) {
    snake_constant = std::max(snake_constant, snake_residual(sphere, x, cx, constant_path(x), s));
    const Vector y = Vector::Constant(1, uniform(rng, 0.0, 2.0 * kPi));
    snake_constant = std::max(
        snake_constant,
        snake_residual(twisted, y, twisted.atlas().deepest_chart(y), constant_path(y), s));
  }

  double snake_decorated = 0.0;
  for (Sign s : {Sign::plus, Sign::minus}) {
    snake_decorated = std::max(snake_decorated, snake_residual(sphere, x, cx, loop, s));
    const Path cl = circle_loop(uniform(rng, 0.0, 2.0 * kPi));
    snake_decorated = std::max(snake_decorated,
                               snake_residual(twisted, cl.start_point(),
                                              twisted.atlas().deepest_chart(cl.start_point()), cl, s));
  }

  // Circle word = trace of holonomy, against the closed forms too.
  double circle_trace = 0.0;
  auto circle_value = [](const GlobalBundle& b, const Path& l) {
    const Vector p = l.start_point();
    return evaluate_bordism(circle_word(p, b.atlas().deepest_chart(p), l), b).matrix(0, 0);
  };
  const Complex sphere_circle = circle_value(sphere, loop);
  circle_trace = std::max(circle_trace, std::abs(sphere_circle - loop_holonomy(sphere, loop).map.matrix().trace()));
  circle_trace = std::max(circle_trace, std::abs(sphere_circle - Complex(-2.0, 0.0)));
  const Path cl = circle_loop(uniform(rng, 0.0, 2.0 * kPi));
  circle_trace = std::max(circle_trace, std::abs(circle_value(flat, cl) - Complex(2.0, 0.0)));
  circle_trace = std::max(circle_trace,
                          std::abs(circle_value(twisted, cl) - Complex(2.0 * std::cos(phi_c), 0.0)));

  // Disjoint unions.
  const BordismWord w1 = circle_word(x, cx, loop);
  const BordismWord w2 = snake_word(x, cx, loop, Sign::plus);
  const BordismWord w3 = arc_word(loop, Sign::minus, cx);
  const Matrix e1 = evaluate_bordism(w1, sphere).matrix;
  const Matrix e2 = evaluate_bordism(w2, sphere).matrix;
  const Matrix e3 = evaluate_bordism(w3, sphere).matrix;
  double monoidal = distance(evaluate_bordism(tensor(w1, w2), sphere).matrix, kron(e1, e2));
  monoidal = std::max(monoidal,
                      distance(evaluate_bordism(tensor(w2, w3), sphere).matrix, kron(e2, e3)));
  monoidal = std::max(monoidal, distance(evaluate_bordism(tensor(w3, tensor(w1, w2)), sphere).matrix,
                                         kron(e3, kron(e1, e2))));

  // Sitting instances: reparametrize the decorating path, evaluation unchanged.
  double sitting = 0.0;
  BordismOptions fine;
  fine.integrator.step = 1.0 / 8192.0;
  const Matrix fine_circle = evaluate_bordism(circle_word(x, cx, loop), sphere, fine).matrix;
  for (double t : {0.0, 0.5}) {
    const Path q = reparametrize(loop, sitting_reparametrization(0.0, 1.0, t));
    for (Sign s : {Sign::plus, Sign::minus}) {
      sitting = std::max(sitting,
                         distance(evaluate_bordism(arc_word(q, s, cx), sphere, fine).matrix,
                                  evaluate_bordism(arc_word(loop, s, cx), sphere, fine).matrix));
    }
    sitting = std::max(sitting, distance(evaluate_bordism(circle_word(x, cx, q), sphere, fine).matrix,
                                         fine_circle));
  }

  return {check("c8.snake_constant", snake_constant, "both zig-zags, sphere and circle"),
          check("c8.snake_decorated", snake_decorated, "loops across charts"),
          check("c8.circle_trace", circle_trace, "sphere theta = pi/3, flat and twisted circle"),
          check("c8.monoidal", monoidal),
          check("c8.sitting", sitting, "t = 0 and t = 1/2")};
}

}  // namespace

bool CriterionResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.pass()) return false;
  }
  return true;
}

const char* criterion_title(int id) {
  switch (id) {
    case 1: return "cocycle identity";
    case 2: return "product-formula convergence";
    case 3: return "gauge covariance";
    case 4: return "constant path and reparametrization";
    case 5: return "reconstruction round trip";
    case 6: return "sphere holonomy";
    case 7: return "descent";
    case 8: return "bordism relations";
    default: return "unknown";
  }
}

std::vector<Check> acceptance_catalog() {
  std::vector<Check> out;
  for (const auto& l : limits()) out.push_back(Check{l.name, 0.0, l.kind, l.lower, l.upper, {}});
  return out;
}

CriterionResult run_criterion(int id, std::uint64_t seed,
                              const std::map<std::string, double>& overrides) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(id));
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: r.checks = cocycle_criterion(rng); break;
      case 2: r.checks = convergence_criterion(rng); break;
      case 3: r.checks = gauge_criterion(rng); break;
      case 4: r.checks = identity_criterion(rng); break;
      case 5: r.checks = reconstruction_criterion(rng); break;
      case 6: r.checks = holonomy_criterion(rng); break;
      case 7: r.checks = descent_criterion(rng); break;
      case 8: r.checks = bordism_criterion(rng); break;
      default: throw std::invalid_argument("criterion id must be 1..8");
    }
  } catch (const Error& e) {
    r.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // Only keys naming this criterion's checks apply here.
  std::map<std::string, double> mine;
  const std::string prefix = "c" + std::to_string(id) + ".";
  for (const auto& [k, v] : overrides) {
    if (k.rfind(prefix, 0) == 0) mine.emplace(k, v);
  }
  if (r.error.empty()) apply_overrides(r.checks, mine);
  return r;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::map<std::string, double>& overrides) {
  auto catalog = acceptance_catalog();
  apply_overrides(catalog, overrides);  // rejects unknown keys up front
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run_criterion(id, seed, overrides));
  return out;
}

Report acceptance_report(const std::vector<CriterionResult>& results, std::uint64_t seed) {
  Report report;
  report.experiment = "verify-all";
  report.config = {{"experiment", "verify-all"}, {"seed", seed}};
  Table table;
  table.name = "verify_all";
  table.header = {"criterion", "title", "check", "value", "threshold", "pass"};
  for (const auto& r : results) {
    if (!r.error.empty()) {
      Check failed = Check::below("c" + std::to_string(r.id) + ".error", 1.0, 0.0, r.error);
      report.checks.push_back(failed);
      table.rows.push_back({static_cast<long long>(r.id), r.title, failed.name, std::nan(""),
                            std::string("no error"), std::string("FAIL")});
      continue;
    }
    for (const auto& c : r.checks) {
      report.checks.push_back(c);
      table.rows.push_back({static_cast<long long>(r.id), r.title, c.name, c.value,
                            c.threshold_text(), std::string(c.pass() ? "PASS" : "FAIL")});
    }
  }
  report.tables.push_back(std::move(table));
  return report;
}

}  // namespace pathrep::cli
