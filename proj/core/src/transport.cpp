#include "pathrep/transport.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pathrep {

const char* to_string(TransportMethod m) {
  return m == TransportMethod::ode ? "ode" : "product";
}

const char* to_string(ProductRule r) { return r == ProductRule::left ? "left" : "midpoint"; }

int IntegratorConfig::steps_for(double s, double t) const {
  if (!(step > 0.0)) throw Error(ErrorCode::invalid_input, "integrator step must be positive");
  const double n = std::ceil(std::abs(t - s) / step - 1e-9);
  return std::max(1, static_cast<int>(n));
}

namespace {

void check_interval(const Path& path, double s, double t) {
  const double slack = 1e-12 * (1.0 + std::abs(path.begin()) + std::abs(path.end()));
  auto inside = [&](double u) {
    return u >= path.begin() - slack && u <= path.end() + slack;
  };
  if (!std::isfinite(s) || !std::isfinite(t) || !inside(s) || !inside(t)) {
    throw Error(ErrorCode::invalid_input, "transport interval lies outside the path domain");
  }
}

Matrix checked(Matrix f) {
  if (!all_finite(f)) throw Error(ErrorCode::evaluation, "transport is not finite (overflow)");
  return f;
}

void check_dims(const ConnectionForm& a, const Path& path) {
  if (a.chart_dim() != path.dim()) {
    throw Error(ErrorCode::invalid_input, "path and connection live in different charts");
  }
}

Matrix connection_along(const ConnectionForm& a, const Path& path, double u) {
  Matrix m = a.apply(path.position(u), path.velocity(u));
  if (!all_finite(m)) {
    throw Error(ErrorCode::evaluation,
                "connection is not finite along the path at u = " + std::to_string(u));
  }
  return m;
}

}  // namespace

namespace detail {

namespace {

Matrix rk4_uniform(const ConnectionForm& a, const Path& path, double s, double t, int steps) {
  const int d = a.fiber_dim();
  Matrix f = identity_matrix(d);
  if (s == t) return f;
  const double h = (t - s) / steps;
  // End stages are sampled one ulp inside [s, t] so that a path with a kink
  // at a cut contributes its one-sided velocity.
  Matrix m0 = connection_along(a, path, std::nextafter(s, t));
  for (int k = 0; k < steps; ++k) {
    const double u = s + k * h;
    const double u_next = (k + 1 == steps) ? std::nextafter(t, s) : s + (k + 1) * h;
    const Matrix mid = connection_along(a, path, u + 0.5 * h);
    Matrix m1 = connection_along(a, path, u_next);
    const Matrix k1 = m0 * f;
    const Matrix k2 = mid * (f + (0.5 * h) * k1);
    const Matrix k3 = mid * (f + (0.5 * h) * k2);
    const Matrix k4 = m1 * (f + h * k3);
    f += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    m0 = std::move(m1);
  }
  return f;
}

}  // namespace

Matrix integrate_ode(const ConnectionForm& a, const Path& path, double s, double t, int steps) {
  if (s == t) return identity_matrix(a.fiber_dim());
  const double lo = std::min(s, t);
  const double hi = std::max(s, t);
  std::vector<double> breaks{s};
  const auto& cuts = path.cuts();
  if (s < t) {
    for (double c : cuts) if (c > lo && c < hi) breaks.push_back(c);
  } else {
    for (auto it = cuts.rbegin(); it != cuts.rend(); ++it) if (*it > lo && *it < hi) breaks.push_back(*it);
  }
  breaks.push_back(t);
  if (breaks.size() == 2) return rk4_uniform(a, path, s, t, steps);
  // Steps are shared out in proportion to piece length.
  Matrix f = identity_matrix(a.fiber_dim());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double share = std::abs(breaks[k + 1] - breaks[k]) / (hi - lo);
    const int n = std::max(1, static_cast<int>(std::ceil(steps * share - 1e-9)));
    f = rk4_uniform(a, path, breaks[k], breaks[k + 1], n) * f;
  }
  return f;
}

Matrix integrate_product(const ConnectionForm& a, const Path& path, double s, double t, int n,
                         ProductRule rule) {
  const int d = a.fiber_dim();
  Matrix f = identity_matrix(d);
  if (s == t) return f;
  const double delta = (t - s) / n;
  const double offset = rule == ProductRule::midpoint ? 0.5 : 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s + (i + offset) * delta;
    f = expm(delta * connection_along(a, path, u)) * f;
  }
  return f;
}

Matrix integrate(const ConnectionForm& a, const Path& path, double s, double t,
                 const IntegratorConfig& config) {
  const int n = config.steps_for(s, t);
  return config.method == TransportMethod::ode ? integrate_ode(a, path, s, t, n)
                                               : integrate_product(a, path, s, t, n, config.rule);
}

}  // namespace detail

TransportResult transport_ode(const ConnectionForm& a, const Path& path, double s, double t,
                              int steps) {
  check_dims(a, path);
  check_interval(path, s, t);
  if (steps < 1) throw Error(ErrorCode::invalid_input, "steps must be >= 1");
  Matrix f = checked(detail::integrate_ode(a, path, s, t, steps));
  double estimate = 0.0;
  if (steps >= 2 && s != t) {
    estimate = distance(f, detail::integrate_ode(a, path, s, t, steps / 2)) / 15.0;
  }
  return TransportResult{GaugeMap(std::move(f)), TransportMethod::ode, steps, estimate};
}

TransportResult transport_product(const ConnectionForm& a, const Path& path, double s,
                                  double t, int n, ProductRule rule) {
  check_dims(a, path);
  check_interval(path, s, t);
  if (n < 1) throw Error(ErrorCode::invalid_input, "N must be >= 1");
  Matrix f = checked(detail::integrate_product(a, path, s, t, n, rule));
  double estimate = 0.0;
  if (n >= 2 && s != t) {
    const double order_gain = rule == ProductRule::midpoint ? 3.0 : 1.0;
    estimate = distance(f, detail::integrate_product(a, path, s, t, n / 2, rule)) / order_gain;
  }
  return TransportResult{GaugeMap(std::move(f)), TransportMethod::product, n, estimate};
}

TransportResult transport(const ConnectionForm& a, const Path& path, double s, double t,
                          const IntegratorConfig& config) {
  const int n = config.steps_for(s, t);
  return config.method == TransportMethod::ode
             ? transport_ode(a, path, s, t, n)
             : transport_product(a, path, s, t, n, config.rule);
}

TransportResult transport(const ConnectionForm& a, const Path& path,
                          const IntegratorConfig& config) {
  return transport(a, path, path.core_begin(), path.core_end(), config);
}

double cocycle_residual(const ConnectionForm& a, const Path& path, double x, double y, double z,
                        const IntegratorConfig& config) {
  check_dims(a, path);
  if (!(x <= y && y <= z)) throw Error(ErrorCode::invalid_input, "cocycle needs x <= y <= z");
  check_interval(path, x, z);
  auto f = [&](double s, double t) {
    return detail::integrate_ode(a, path, s, t, config.steps_for(s, t));
  };
  return distance(f(y, z) * f(x, y), f(x, z));
}

}  // namespace pathrep
