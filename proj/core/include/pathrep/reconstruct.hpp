#pragma once

#include <functional>
#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pathrep/connection.hpp"
#include "pathrep/transport.hpp"

namespace pathrep {

/// Black-box transport along affine probes: (p, v, s, t) -> F(gamma|[s,t])
/// for gamma(u) = p + u v. Contract: F(p, v, s, s) = I and the cocycle
/// condition holds up to the oracle's own tolerance.
class TransportOracle {
 public:
  using Fn = std::function<Matrix(const Vector& p, const Vector& v, double s, double t)>;

  TransportOracle(Chart chart, int fiber_dim, Fn fn);

  const Chart& chart() const { return chart_; }
  int fiber_dim() const { return fiber_dim_; }

  /// Validated call; any failure is reported as an oracle error.
  Matrix operator()(const Vector& p, const Vector& v, double s, double t) const;

 private:
  Chart chart_;
  int fiber_dim_;
  Fn fn_;
};

/// Wraps RK4 transport of `a` along affine probes. The step count scales
/// with |t - s| (at least `min_steps`).
TransportOracle oracle_from_connection(const ConnectionForm& a,
                                       const IntegratorConfig& config = {}, int min_steps = 8);

/// (p, v, s, t) -> g(p + t v) F(p, v, s, t) g(p + s v)^-1.
TransportOracle gauge_oracle(const TransportOracle& f, const GaugeField& g);

/// Serialises calls into an oracle that is not safe for concurrent use.
TransportOracle serialized_oracle(const TransportOracle& f);

enum class DifferenceScheme { central, one_sided };

/// Central: (F(p,v;0,h) - F(p,v;0,-h)) / 2h.
/// One-sided: (F(p,v;0,h) - I) / h.
EndMap reconstruct_at(const TransportOracle& f, const Vector& p, const Vector& v, double h,
                      DifferenceScheme scheme = DifferenceScheme::central);

/// distance(A(lambda v) at step h/lambda, lambda A(v) at step h).
double homogeneity_residual(const TransportOracle& f, const Vector& p, const Vector& v,
                            double lambda, double h);

/// distance(A(u + v), A(u) + A(v)).
double additivity_residual(const TransportOracle& f, const Vector& p, const Vector& u,
                           const Vector& v, double h);

/// Reconstructs the components A_i(p) along coordinate directions.
std::vector<Matrix> reconstruct_components(const TransportOracle& f, const Vector& p, double h);

/// Max over grid points and coordinate directions of
/// distance(reconstruct_at(oracle(A)), A_i(p)).
double roundtrip_error(const ConnectionForm& a, std::span<const Vector> grid, double h,
                       const IntegratorConfig& config = {});

/// Uniform tensor grid over a box, `counts[i]` points per axis, endpoints included.
std::vector<Vector> grid_points(const Box& box, const std::vector<int>& counts);

// ---------------------------------------------------------------------------
// Tabulated oracles.
//
// CSV layout: header row
//   p0,...,p{n-1},v0,...,v{n-1},t,re_0_0,im_0_0,re_0_1,im_0_1,...
// then one row per sample of F(p, v; 0, t), matrix entries row-major.

struct OracleSample {
  Vector p;
  Vector v;
  double t = 0;
  Matrix value;
};

void write_oracle_csv(std::ostream& out, int chart_dim, int fiber_dim,
                      std::span<const OracleSample> samples);
std::vector<OracleSample> read_oracle_csv(std::istream& in, int* chart_dim, int* fiber_dim);

/// Samples the oracle at t in `times` for each (p, v) probe.
std::vector<OracleSample> tabulate(const TransportOracle& f, std::span<const Vector> points,
                                   std::span<const Vector> directions,
                                   std::span<const double> times);

/// Lookup oracle over tabulated F(p, v; 0, t). Requests with s != 0 use the
/// cocycle identity F(s, t) = F(0, t) F(0, s)^-1. (p, v, t) must match a row
/// to within `match_tolerance`.
TransportOracle tabulated_oracle(std::vector<OracleSample> samples,
                                 double match_tolerance = 1e-12);

}  // namespace pathrep
