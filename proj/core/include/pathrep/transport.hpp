#pragma once

#include <optional>

#include "pathrep/connection.hpp"
#include "pathrep/path.hpp"

namespace pathrep {

enum class TransportMethod { ode, product };
enum class ProductRule { left, midpoint };

const char* to_string(TransportMethod m);
const char* to_string(ProductRule r);

struct TransportResult {
  GaugeMap map;
  TransportMethod method;
  int steps;
  /// Richardson estimate from a half-resolution solve.
  double error_estimate;
};

/// Integrator settings shared by everything that transports along paths.
struct IntegratorConfig {
  TransportMethod method = TransportMethod::ode;
  /// Target step size; an interval of length L uses ceil(L / step) steps.
  double step = 1.0 / 2048.0;
  ProductRule rule = ProductRule::midpoint;

  int steps_for(double s, double t) const;
};

/// Classical RK4 for d/du F = A(gamma(u), gamma'(u)) F, F(s) = I, with fixed
/// step (t - s)/steps. s > t integrates backwards. s == t gives I exactly.
/// Interior cuts of the path inside (s, t) are step boundaries; the steps are
/// shared among the pieces in proportion to their length.
TransportResult transport_ode(const ConnectionForm& a, const Path& path, double s, double t,
                              int steps);

/// Ordered product E_N ... E_1 with E_i = exp(delta A(gamma(u_i), gamma'(u_i))),
/// u_i the left end or midpoint of the i-th subinterval.
TransportResult transport_product(const ConnectionForm& a, const Path& path, double s,
                                  double t, int n, ProductRule rule);

/// Dispatches on `config.method` with step count from `config.step`.
TransportResult transport(const ConnectionForm& a, const Path& path, double s, double t,
                          const IntegratorConfig& config = {});
/// Transport over the core of the path.
TransportResult transport(const ConnectionForm& a, const Path& path,
                          const IntegratorConfig& config = {});

/// distance(F(y,z) F(x,y), F(x,z)) with ODE transports at `config.step`.
double cocycle_residual(const ConnectionForm& a, const Path& path, double x, double y,
                        double z, const IntegratorConfig& config = {});

namespace detail {
/// Unvalidated kernels returning the raw matrix; used by gluing code that
/// validates once at the end.
Matrix integrate_ode(const ConnectionForm& a, const Path& path, double s, double t, int steps);
Matrix integrate_product(const ConnectionForm& a, const Path& path, double s, double t, int n,
                         ProductRule rule);
Matrix integrate(const ConnectionForm& a, const Path& path, double s, double t,
                 const IntegratorConfig& config);
}  // namespace detail

}  // namespace pathrep
