#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pathrep/matcore.hpp"

namespace pathrep {

/// Axis-aligned box in a chart, used for sampling.
struct Box {
  Vector lower;
  Vector upper;
};

/// A Cartesian chart R^n.
struct Chart {
  int dim = 1;
  std::optional<Box> bounds;

  explicit Chart(int n = 1, std::optional<Box> box = std::nullopt);
};

/// Source of the component fields A_i(p) of an End(V)-valued 1-form.
class ConnectionField {
 public:
  virtual ~ConnectionField() = default;

  /// A_i(p) for i in [0, n).
  virtual std::vector<Matrix> components(const Vector& p) const = 0;
  /// A_p(v) = sum_i v_i A_i(p). Overrides must keep this linear in v.
  virtual Matrix apply(const Vector& p, const Vector& v) const;
};

class ConnectionForm {
 public:
  ConnectionForm(Chart chart, int fiber_dim, std::shared_ptr<const ConnectionField> field,
                 std::string name = "custom");

  const Chart& chart() const { return chart_; }
  int chart_dim() const { return chart_.dim; }
  int fiber_dim() const { return fiber_dim_; }
  const std::string& name() const { return name_; }

  std::vector<Matrix> components(const Vector& p) const;
  /// Unvalidated A_p(v) for integrator inner loops.
  Matrix apply(const Vector& p, const Vector& v) const { return field_->apply(p, v); }

 private:
  Chart chart_;
  int fiber_dim_;
  std::shared_ptr<const ConnectionField> field_;
  std::string name_;
};

/// Returns sum_i v_i A_i(p).
EndMap evaluate_connection(const ConnectionForm& a, const Vector& p, const Vector& v);

// ---------------------------------------------------------------------------
// Gauge fields

/// Source of p -> g(p) in GL(V), optionally with closed-form partials.
class GaugeSource {
 public:
  virtual ~GaugeSource() = default;
  virtual Matrix value(const Vector& p) const = 0;
  /// Partial derivatives d_i g(p), or nullopt if no closed form exists.
  virtual std::optional<std::vector<Matrix>> partials(const Vector& p) const;
};

enum class DifferenceRule { central, richardson };

struct DerivativeOptions {
  double step = 1e-5;
  DifferenceRule rule = DifferenceRule::central;
};

struct GaugeJet {
  Matrix value;
  Matrix inverse;
  std::vector<Matrix> partials;
};

class GaugeField {
 public:
  GaugeField(Chart chart, int fiber_dim, std::shared_ptr<const GaugeSource> source,
             std::string name = "custom");

  /// Convenience constructor from callables.
  static GaugeField from_functions(
      Chart chart, int fiber_dim, std::function<Matrix(const Vector&)> value,
      std::function<std::vector<Matrix>(const Vector&)> partials = nullptr);

  const Chart& chart() const { return chart_; }
  int fiber_dim() const { return fiber_dim_; }
  const std::string& name() const { return name_; }
  bool has_closed_form_derivative() const;

  Matrix value(const Vector& p) const { return source_->value(p); }
  std::vector<Matrix> partials(const Vector& p, const DerivativeOptions& opts = {}) const;
  /// Value, inverse, and partials at p. Throws singular_gauge if g(p) is singular.
  GaugeJet jet(const Vector& p, const DerivativeOptions& opts = {}) const;

  /// p -> g(p)^-1, with partials -g^-1 (d_i g) g^-1.
  GaugeField inverse(const DerivativeOptions& opts = {}) const;

 private:
  Chart chart_;
  int fiber_dim_;
  std::shared_ptr<const GaugeSource> source_;
  std::string name_;
};

/// A' = g A g^-1 + (dg) g^-1, the form whose transport satisfies
/// g(y) F_A(x,y) = F_A'(x,y) g(x) for the ODE d/dt F = A(gamma') F.
ConnectionForm gauge_transform(const ConnectionForm& a, const GaugeField& g,
                               const DerivativeOptions& opts = {});

// ---------------------------------------------------------------------------
// Presets

ConnectionForm zero_connection(int chart_dim, int fiber_dim);
/// A = sum_i X_i dx^i with constant X_i.
ConnectionForm constant_connection(const std::vector<Matrix>& components);
/// Scalar A = strength (x dy - y dx) on R^2.
ConnectionForm magnetic_connection(double strength = 1.0);
/// Levi-Civita connection of the unit round sphere in stereographic
/// coordinates w, written in the orthonormal frame (1/lambda) d/dw_i with
/// lambda = 2/(1+|w|^2): A = 2 (u dv - v du)/(1+|w|^2) J, J = [[0,-1],[1,0]].
ConnectionForm sphere_levi_civita();

struct PolynomialTerm {
  int component = 0;
  std::vector<int> exponents;
  Matrix coefficient;
};
/// A_i(p) = sum over terms with component i of coefficient * prod_j p_j^e_j.
ConnectionForm polynomial_connection(int chart_dim, int fiber_dim,
                                     std::vector<PolynomialTerm> terms);

/// Non-abelian rank-2 example used throughout tests:
/// A_x = [[0, y], [-1, x/2]], A_y = [[x, 1], [xy, 0]].
ConnectionForm polynomial_example();

/// Regular grid for sampled fields: `counts[i]` nodes spanning
/// [lower_i, upper_i].
struct SampleGrid {
  Vector lower;
  Vector upper;
  std::vector<int> counts;

  int dim() const { return static_cast<int>(counts.size()); }
  std::size_t size() const;
  Vector node(std::size_t flat_index) const;
};

/// Tensor-product cubic (Catmull-Rom) interpolation, C^1. Edge cells use
/// linearly extrapolated ghost nodes, so affine data is reproduced exactly;
/// points outside the box are clamped to it. values[node] holds the n
/// components at that node, first axis slowest.
ConnectionForm sampled_connection(SampleGrid grid, std::vector<std::vector<Matrix>> values);
/// Samples an existing form on a grid and interpolates it.
ConnectionForm sample_connection(const ConnectionForm& a, const SampleGrid& grid);

GaugeField constant_gauge(int chart_dim, const Matrix& g);
/// g(p) = exp((c . p) X) with closed-form derivative.
GaugeField exponential_gauge(const Vector& direction, const Matrix& generator);
/// Sampled gauge with cubic interpolation; partials come from the interpolant.
GaugeField sampled_gauge(SampleGrid grid, std::vector<Matrix> values);

/// Random smooth gauge g(p) = exp(s1(p) X1) exp(s2(p) X2) B with
/// s_k(p) = a_k + b_k . p + c_k sin(w_k . p). Closed-form partials.
/// Real-valued entries; B is well conditioned.
GaugeField random_smooth_gauge(int chart_dim, int fiber_dim, std::mt19937_64& rng);

/// Uniform double in [lo, hi) from raw 64-bit engine output (portable).
double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0);

}  // namespace pathrep
