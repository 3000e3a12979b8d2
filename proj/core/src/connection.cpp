#include "pathrep/connection.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pathrep {

Chart::Chart(int n, std::optional<Box> box) : dim(n), bounds(std::move(box)) {
  if (n < 1) throw Error(ErrorCode::invalid_input, "chart dimension must be >= 1");
  if (bounds && (bounds->lower.size() != n || bounds->upper.size() != n)) {
    throw Error(ErrorCode::invalid_input, "chart bounds have the wrong dimension");
  }
}

Matrix ConnectionField::apply(const Vector& p, const Vector& v) const {
  const auto parts = components(p);
  Matrix out = Matrix::Zero(parts.front().rows(), parts.front().cols());
  for (std::size_t i = 0; i < parts.size(); ++i) out += v(static_cast<Eigen::Index>(i)) * parts[i];
  return out;
}

ConnectionForm::ConnectionForm(Chart chart, int fiber_dim,
                               std::shared_ptr<const ConnectionField> field,
                               std::string name)
    : chart_(std::move(chart)),
      fiber_dim_(fiber_dim),
      field_(std::move(field)),
      name_(std::move(name)) {
  if (fiber_dim_ < 1) throw Error(ErrorCode::invalid_input, "fiber dimension must be >= 1");
  if (!field_) throw Error(ErrorCode::invalid_input, "connection field is null");
}

std::vector<Matrix> ConnectionForm::components(const Vector& p) const {
  if (p.size() != chart_.dim) {
    throw Error(ErrorCode::invalid_input, "point dimension does not match chart");
  }
  auto parts = field_->components(p);
  for (const auto& m : parts) {
    if (!all_finite(m)) throw Error(ErrorCode::evaluation, "connection component is not finite");
  }
  return parts;
}

EndMap evaluate_connection(const ConnectionForm& a, const Vector& p, const Vector& v) {
  if (p.size() != a.chart_dim() || v.size() != a.chart_dim()) {
    throw Error(ErrorCode::invalid_input, "point/tangent dimension does not match chart");
  }
  Matrix m = a.apply(p, v);
  if (!all_finite(m)) throw Error(ErrorCode::evaluation, "connection value is not finite");
  return EndMap(std::move(m));
}

// ---------------------------------------------------------------------------

std::optional<std::vector<Matrix>> GaugeSource::partials(const Vector&) const {
  return std::nullopt;
}

GaugeField::GaugeField(Chart chart, int fiber_dim, std::shared_ptr<const GaugeSource> source,
                       std::string name)
    : chart_(std::move(chart)),
      fiber_dim_(fiber_dim),
      source_(std::move(source)),
      name_(std::move(name)) {
  if (!source_) throw Error(ErrorCode::invalid_input, "gauge source is null");
}

namespace {

class FunctionGauge final : public GaugeSource {
 public:
  FunctionGauge(std::function<Matrix(const Vector&)> value,
                std::function<std::vector<Matrix>(const Vector&)> partials)
      : value_(std::move(value)), partials_(std::move(partials)) {}

  Matrix value(const Vector& p) const override { return value_(p); }
  std::optional<std::vector<Matrix>> partials(const Vector& p) const override {
    if (!partials_) return std::nullopt;
    return partials_(p);
  }

 private:
  std::function<Matrix(const Vector&)> value_;
  std::function<std::vector<Matrix>(const Vector&)> partials_;
};

std::vector<Matrix> central_partials(const GaugeSource& g, const Vector& p, int n, double h) {
  std::vector<Matrix> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector plus = p;
    Vector minus = p;
    plus(i) += h;
    minus(i) -= h;
    out.push_back((g.value(plus) - g.value(minus)) / (2.0 * h));
  }
  return out;
}

}  // namespace

GaugeField GaugeField::from_functions(Chart chart, int fiber_dim,
                                      std::function<Matrix(const Vector&)> value,
                                      std::function<std::vector<Matrix>(const Vector&)> partials) {
  return GaugeField(std::move(chart), fiber_dim,
                    std::make_shared<FunctionGauge>(std::move(value), std::move(partials)));
}

bool GaugeField::has_closed_form_derivative() const {
  Vector probe = Vector::Zero(chart_.dim);
  if (chart_.bounds) probe = 0.5 * (chart_.bounds->lower + chart_.bounds->upper);
  return source_->partials(probe).has_value();
}

std::vector<Matrix> GaugeField::partials(const Vector& p, const DerivativeOptions& opts) const {
  if (auto closed = source_->partials(p)) return *std::move(closed);
  const int n = chart_.dim;
  if (opts.rule == DifferenceRule::central) return central_partials(*source_, p, n, opts.step);
  auto coarse = central_partials(*source_, p, n, opts.step);
  auto fine = central_partials(*source_, p, n, opts.step / 2.0);
  for (int i = 0; i < n; ++i) fine[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return fine;
}

GaugeJet GaugeField::jet(const Vector& p, const DerivativeOptions& opts) const {
  GaugeJet out;
  out.value = value(p);
  try {
    out.inverse = pathrep::inverse(out.value);
  } catch (const Error& e) {
    throw Error(ErrorCode::singular_gauge, std::string("gauge '") + name_ + "': " + e.what());
  }
  out.partials = partials(p, opts);
  return out;
}

namespace {

class InverseGauge final : public GaugeSource {
 public:
  InverseGauge(GaugeField parent, DerivativeOptions opts)
      : parent_(std::move(parent)), opts_(opts) {}

  Matrix value(const Vector& p) const override { return inverse(parent_.value(p)); }
  std::optional<std::vector<Matrix>> partials(const Vector& p) const override {
    const GaugeJet j = parent_.jet(p, opts_);
    std::vector<Matrix> out;
    out.reserve(j.partials.size());
    for (const auto& d : j.partials) out.push_back(-j.inverse * d * j.inverse);
    return out;
  }

 private:
  GaugeField parent_;
  DerivativeOptions opts_;
};

}  // namespace

GaugeField GaugeField::inverse(const DerivativeOptions& opts) const {
  return GaugeField(chart_, fiber_dim_, std::make_shared<InverseGauge>(*this, opts),
                    name_ + "^-1");
}

namespace {

class GaugeTransformed final : public ConnectionField {
 public:
  GaugeTransformed(ConnectionForm a, GaugeField g, DerivativeOptions opts)
      : a_(std::move(a)), g_(std::move(g)), opts_(opts) {}

  std::vector<Matrix> components(const Vector& p) const override {
    const GaugeJet j = g_.jet(p, opts_);
    auto parts = a_.components(p);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      parts[i] = j.value * parts[i] * j.inverse + j.partials[i] * j.inverse;
    }
    return parts;
  }

  Matrix apply(const Vector& p, const Vector& v) const override {
    const GaugeJet j = g_.jet(p, opts_);
    Matrix dg = Matrix::Zero(j.value.rows(), j.value.cols());
    for (std::size_t i = 0; i < j.partials.size(); ++i) {
      dg += v(static_cast<Eigen::Index>(i)) * j.partials[i];
    }
    return j.value * a_.apply(p, v) * j.inverse + dg * j.inverse;
  }

 private:
  ConnectionForm a_;
  GaugeField g_;
  DerivativeOptions opts_;
};

}  // namespace

ConnectionForm gauge_transform(const ConnectionForm& a, const GaugeField& g,
                               const DerivativeOptions& opts) {
  if (a.chart_dim() != g.chart().dim || a.fiber_dim() != g.fiber_dim()) {
    throw Error(ErrorCode::invalid_input, "gauge and connection dimensions do not match");
  }
  return ConnectionForm(a.chart(), a.fiber_dim(),
                        std::make_shared<GaugeTransformed>(a, g, opts),
                        a.name() + "^" + g.name());
}

// ---------------------------------------------------------------------------
// Presets

namespace {

class ConstantField final : public ConnectionField {
 public:
  explicit ConstantField(std::vector<Matrix> parts) : parts_(std::move(parts)) {}
  std::vector<Matrix> components(const Vector&) const override { return parts_; }

 private:
  std::vector<Matrix> parts_;
};

class MagneticField final : public ConnectionField {
 public:
  explicit MagneticField(double strength) : strength_(strength) {}

  std::vector<Matrix> components(const Vector& p) const override {
    Matrix ax(1, 1);
    Matrix ay(1, 1);
    ax(0, 0) = -strength_ * p(1);
    ay(0, 0) = strength_ * p(0);
    return {ax, ay};
  }

  Matrix apply(const Vector& p, const Vector& v) const override {
    Matrix out(1, 1);
    out(0, 0) = v(0) * (-strength_ * p(1)) + v(1) * (strength_ * p(0));
    return out;
  }

 private:
  double strength_;
};

class SphereLeviCivita final : public ConnectionField {
 public:
  std::vector<Matrix> components(const Vector& p) const override {
    const double scale = 2.0 / (1.0 + p.squaredNorm());
    return {generator() * (-scale * p(1)), generator() * (scale * p(0))};
  }

  Matrix apply(const Vector& p, const Vector& v) const override {
    const double scale = 2.0 / (1.0 + p.squaredNorm());
    const double omega = v(0) * (-scale * p(1)) + v(1) * (scale * p(0));
    Matrix out(2, 2);
    out << 0.0, -omega, omega, 0.0;
    return out;
  }

 private:
  static Matrix generator() {
    Matrix j(2, 2);
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
  }
};

class PolynomialField final : public ConnectionField {
 public:
  PolynomialField(int n, int d, std::vector<PolynomialTerm> terms)
      : n_(n), d_(d), terms_(std::move(terms)) {}

  std::vector<Matrix> components(const Vector& p) const override {
    std::vector<Matrix> out(n_, Matrix::Zero(d_, d_));
    for (const auto& t : terms_) {
      double mono = 1.0;
      for (int j = 0; j < n_; ++j) {
        for (int e = 0; e < t.exponents[j]; ++e) mono *= p(j);
      }
      out[t.component] += mono * t.coefficient;
    }
    return out;
  }

 private:
  int n_;
  int d_;
  std::vector<PolynomialTerm> terms_;
};

}  // namespace

ConnectionForm zero_connection(int chart_dim, int fiber_dim) {
  return ConnectionForm(Chart(chart_dim), fiber_dim,
                        std::make_shared<ConstantField>(std::vector<Matrix>(
                            chart_dim, Matrix::Zero(fiber_dim, fiber_dim))),
                        "zero");
}

ConnectionForm constant_connection(const std::vector<Matrix>& components) {
  if (components.empty()) throw Error(ErrorCode::invalid_input, "no components");
  const auto d = components.front().rows();
  for (const auto& m : components) {
    if (m.rows() != d || m.cols() != d) {
      throw Error(ErrorCode::invalid_input, "components must be square and equal-sized");
    }
    if (!all_finite(m)) throw Error(ErrorCode::invalid_input, "non-finite component");
  }
  return ConnectionForm(Chart(static_cast<int>(components.size())), static_cast<int>(d),
                        std::make_shared<ConstantField>(components), "constant");
}

ConnectionForm magnetic_connection(double strength) {
  return ConnectionForm(Chart(2), 1, std::make_shared<MagneticField>(strength), "magnetic");
}

ConnectionForm sphere_levi_civita() {
  return ConnectionForm(Chart(2), 2, std::make_shared<SphereLeviCivita>(), "levi_civita");
}

ConnectionForm polynomial_connection(int chart_dim, int fiber_dim,
                                     std::vector<PolynomialTerm> terms) {
  for (const auto& t : terms) {
    if (t.component < 0 || t.component >= chart_dim) {
      throw Error(ErrorCode::invalid_input, "polynomial term component out of range");
    }
    if (static_cast<int>(t.exponents.size()) != chart_dim) {
      throw Error(ErrorCode::invalid_input, "polynomial term needs one exponent per coordinate");
    }
    if (std::any_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e < 0; })) {
      throw Error(ErrorCode::invalid_input, "negative exponent");
    }
    if (t.coefficient.rows() != fiber_dim || t.coefficient.cols() != fiber_dim ||
        !all_finite(t.coefficient)) {
      throw Error(ErrorCode::invalid_input, "polynomial coefficient has the wrong shape");
    }
  }
  return ConnectionForm(Chart(chart_dim), fiber_dim,
                        std::make_shared<PolynomialField>(chart_dim, fiber_dim, std::move(terms)),
                        "polynomial");
}

ConnectionForm polynomial_example() {
  auto mat = [](double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
  };
  std::vector<PolynomialTerm> terms = {
      {0, {0, 1}, mat(0, 1, 0, 0)},   // y e12
      {0, {0, 0}, mat(0, 0, -1, 0)},  // -e21
      {0, {1, 0}, mat(0, 0, 0, 0.5)}, // x/2 e22
      {1, {1, 0}, mat(1, 0, 0, 0)},   // x e11
      {1, {0, 0}, mat(0, 1, 0, 0)},   // e12
      {1, {1, 1}, mat(0, 0, 1, 0)},   // xy e21
  };
  return polynomial_connection(2, 2, std::move(terms));
}

// ---------------------------------------------------------------------------
// Sampled fields

std::size_t SampleGrid::size() const {
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  return total;
}

Vector SampleGrid::node(std::size_t flat_index) const {
  Vector p(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    const auto c = static_cast<std::size_t>(counts[i]);
    const auto k = flat_index % c;
    flat_index /= c;
    p(i) = lower(i) + (upper(i) - lower(i)) * static_cast<double>(k) / (counts[i] - 1);
  }
  return p;
}

namespace {

void validate_grid(const SampleGrid& g) {
  if (g.dim() < 1 || g.lower.size() != g.dim() || g.upper.size() != g.dim()) {
    throw Error(ErrorCode::invalid_input, "sample grid bounds do not match its dimension");
  }
  for (int i = 0; i < g.dim(); ++i) {
    if (g.counts[i] < 2 || !(g.upper(i) > g.lower(i))) {
      throw Error(ErrorCode::invalid_input, "sample grid needs >= 2 nodes and positive extent");
    }
  }
}

// Catmull-Rom weights for the stencil p[i-1..i+2] at local coordinate t.
void catmull_rom(double t, double w[4], double dw[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = 0.5 * (-t + 2 * t2 - t3);
  w[1] = 0.5 * (2 - 5 * t2 + 3 * t3);
  w[2] = 0.5 * (t + 4 * t2 - 3 * t3);
  w[3] = 0.5 * (-t2 + t3);
  dw[0] = 0.5 * (-1 + 4 * t - 3 * t2);
  dw[1] = 0.5 * (-10 * t + 9 * t2);
  dw[2] = 0.5 * (1 + 8 * t - 9 * t2);
  dw[3] = 0.5 * (-2 * t + 3 * t2);
}

/// Interpolates a list of matrices stored per node. Returns value and
/// gradient (one matrix per axis) for each stored slot.
class CubicGrid {
 public:
  CubicGrid(SampleGrid grid, std::vector<std::vector<Matrix>> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    validate_grid(grid_);
    if (values_.size() != grid_.size()) {
      throw Error(ErrorCode::invalid_input, "sample count does not match grid size");
    }
    slots_ = values_.front().size();
    for (const auto& node : values_) {
      if (node.size() != slots_) throw Error(ErrorCode::invalid_input, "ragged samples");
      for (const auto& m : node) {
        if (!all_finite(m)) throw Error(ErrorCode::invalid_input, "non-finite sample");
      }
    }
  }

  const SampleGrid& grid() const { return grid_; }

  void evaluate(const Vector& p, std::vector<Matrix>* value,
                std::vector<std::vector<Matrix>>* gradient) const {
    const int n = grid_.dim();
    // Per axis: node index, value weight, derivative weight. Ghost nodes past
    // the boundary are linear extrapolations (2 v_0 - v_1), which keeps the
    // interpolant exact on affine data up to the edge.
    struct Tap {
      int node;
      double w;
      double dw;
    };
    std::vector<std::vector<Tap>> taps(n);
    for (int i = 0; i < n; ++i) {
      const int count = grid_.counts[i];
      const double spacing = (grid_.upper(i) - grid_.lower(i)) / (count - 1);
      double x = (p(i) - grid_.lower(i)) / spacing;
      bool clamped = false;
      if (x < 0) { x = 0; clamped = true; }
      if (x > count - 1) { x = count - 1; clamped = true; }
      const int cell = std::min(static_cast<int>(std::floor(x)), count - 2);
      double w[4], dw[4];
      catmull_rom(x - cell, w, dw);
      for (int k = 0; k < 4; ++k) {
        const double d = clamped ? 0.0 : dw[k] / spacing;
        const int idx = cell + k - 1;
        if (idx < 0) {
          taps[i].push_back({0, 2 * w[k], 2 * d});
          taps[i].push_back({1, -w[k], -d});
        } else if (idx > count - 1) {
          taps[i].push_back({count - 1, 2 * w[k], 2 * d});
          taps[i].push_back({count - 2, -w[k], -d});
        } else {
          taps[i].push_back({idx, w[k], d});
        }
      }
    }
    const Matrix& proto = values_.front().front();
    if (value) value->assign(slots_, Matrix::Zero(proto.rows(), proto.cols()));
    if (gradient) {
      gradient->assign(slots_, std::vector<Matrix>(n, Matrix::Zero(proto.rows(), proto.cols())));
    }
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      std::size_t flat = 0;
      double weight = 1.0;
      for (int i = 0; i < n; ++i) {
        const Tap& t = taps[i][pick[i]];
        flat = flat * static_cast<std::size_t>(grid_.counts[i]) + static_cast<std::size_t>(t.node);
        weight *= t.w;
      }
      const auto& node = values_[flat];
      for (std::size_t k = 0; k < slots_; ++k) {
        if (value) (*value)[k] += weight * node[k];
        if (gradient) {
          for (int a = 0; a < n; ++a) {
            double g = 1.0;
            for (int i = 0; i < n; ++i) g *= (i == a) ? taps[i][pick[i]].dw : taps[i][pick[i]].w;
            (*gradient)[k][a] += g * node[k];
          }
        }
      }
      int axis = n - 1;
      while (axis >= 0 && ++pick[axis] == taps[axis].size()) pick[axis--] = 0;
      if (axis < 0) break;
    }
  }

 private:
  SampleGrid grid_;
  std::vector<std::vector<Matrix>> values_;
  std::size_t slots_ = 0;
};

class SampledField final : public ConnectionField {
 public:
  explicit SampledField(CubicGrid grid) : grid_(std::move(grid)) {}
  std::vector<Matrix> components(const Vector& p) const override {
    std::vector<Matrix> out;
    grid_.evaluate(p, &out, nullptr);
    return out;
  }

 private:
  CubicGrid grid_;
};

class SampledGauge final : public GaugeSource {
 public:
  explicit SampledGauge(CubicGrid grid) : grid_(std::move(grid)) {}
  Matrix value(const Vector& p) const override {
    std::vector<Matrix> out;
    grid_.evaluate(p, &out, nullptr);
    return out.front();
  }
  std::optional<std::vector<Matrix>> partials(const Vector& p) const override {
    std::vector<std::vector<Matrix>> grad;
    grid_.evaluate(p, nullptr, &grad);
    return grad.front();
  }

 private:
  CubicGrid grid_;
};

Box grid_box(const SampleGrid& g) { return Box{g.lower, g.upper}; }

}  // namespace

ConnectionForm sampled_connection(SampleGrid grid, std::vector<std::vector<Matrix>> values) {
  CubicGrid cubic(std::move(grid), std::move(values));
  const int n = cubic.grid().dim();
  Chart chart(n, grid_box(cubic.grid()));
  std::vector<Matrix> probe;
  cubic.evaluate(cubic.grid().lower, &probe, nullptr);
  if (static_cast<int>(probe.size()) != n) {
    throw Error(ErrorCode::invalid_input, "sampled connection needs one component per axis");
  }
  const int d = static_cast<int>(probe.front().rows());
  return ConnectionForm(chart, d, std::make_shared<SampledField>(std::move(cubic)), "sampled");
}

ConnectionForm sample_connection(const ConnectionForm& a, const SampleGrid& grid) {
  validate_grid(grid);
  if (grid.dim() != a.chart_dim()) throw Error(ErrorCode::invalid_input, "grid dimension mismatch");
  std::vector<std::vector<Matrix>> values;
  values.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values.push_back(a.components(grid.node(k)));
  return sampled_connection(grid, std::move(values));
}

GaugeField sampled_gauge(SampleGrid grid, std::vector<Matrix> values) {
  std::vector<std::vector<Matrix>> wrapped;
  wrapped.reserve(values.size());
  for (auto& v : values) wrapped.push_back({std::move(v)});
  CubicGrid cubic(std::move(grid), std::move(wrapped));
  Chart chart(cubic.grid().dim(), grid_box(cubic.grid()));
  std::vector<Matrix> probe;
  cubic.evaluate(cubic.grid().lower, &probe, nullptr);
  const int d = static_cast<int>(probe.front().rows());
  return GaugeField(chart, d, std::make_shared<SampledGauge>(std::move(cubic)), "sampled");
}

GaugeField constant_gauge(int chart_dim, const Matrix& g) {
  const Matrix value = GaugeMap(g).matrix();
  const int d = static_cast<int>(value.rows());
  return GaugeField::from_functions(
      Chart(chart_dim), d, [value](const Vector&) { return value; },
      [d, chart_dim](const Vector&) {
        return std::vector<Matrix>(chart_dim, Matrix::Zero(d, d));
      });
}

GaugeField exponential_gauge(const Vector& direction, const Matrix& generator) {
  const int n = static_cast<int>(direction.size());
  const int d = static_cast<int>(generator.rows());
  (void)EndMap(generator);  // validates shape
  return GaugeField::from_functions(
      Chart(n), d,
      [direction, generator](const Vector& p) { return expm(direction.dot(p) * generator); },
      [direction, generator, n](const Vector& p) {
        const Matrix e = expm(direction.dot(p) * generator);
        std::vector<Matrix> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) out.push_back(direction(i) * generator * e);
        return out;
      });
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

namespace {

struct ScalarProfile {
  double offset = 0;
  Vector slope;
  double amplitude = 0;
  Vector frequency;

  double value(const Vector& p) const {
    return offset + slope.dot(p) + amplitude * std::sin(frequency.dot(p));
  }
  double partial(const Vector& p, int i) const {
    return slope(i) + amplitude * frequency(i) * std::cos(frequency.dot(p));
  }
};

class RandomGauge final : public GaugeSource {
 public:
  RandomGauge(std::vector<ScalarProfile> profiles, std::vector<Matrix> generators, Matrix base)
      : profiles_(std::move(profiles)), generators_(std::move(generators)), base_(std::move(base)) {}

  Matrix value(const Vector& p) const override {
    Matrix out = base_;
    for (std::size_t k = generators_.size(); k-- > 0;) {
      out = expm(profiles_[k].value(p) * generators_[k]) * out;
    }
    return out;
  }

  std::optional<std::vector<Matrix>> partials(const Vector& p) const override {
    // g = E_1 E_2 ... E_K B; d_i E_k = s_k,i X_k E_k.
    const std::size_t k_count = generators_.size();
    std::vector<Matrix> factors;
    factors.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      factors.push_back(expm(profiles_[k].value(p) * generators_[k]));
    }
    // prefix[k] = E_1..E_k, suffix[k] = E_{k+1}..E_K B
    std::vector<Matrix> prefix(k_count + 1);
    std::vector<Matrix> suffix(k_count + 1);
    const auto d = base_.rows();
    prefix[0] = Matrix::Identity(d, d);
    for (std::size_t k = 0; k < k_count; ++k) prefix[k + 1] = prefix[k] * factors[k];
    suffix[k_count] = base_;
    for (std::size_t k = k_count; k-- > 0;) suffix[k] = factors[k] * suffix[k + 1];
    const int n = static_cast<int>(p.size());
    std::vector<Matrix> out(n, Matrix::Zero(d, d));
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < k_count; ++k) {
        out[i] += profiles_[k].partial(p, i) * prefix[k] * generators_[k] * suffix[k];
      }
    }
    return out;
  }

 private:
  std::vector<ScalarProfile> profiles_;
  std::vector<Matrix> generators_;
  Matrix base_;
};

Matrix random_matrix(int d, double scale, std::mt19937_64& rng) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = uniform(rng, -scale, scale);
  }
  return m;
}

}  // namespace

GaugeField random_smooth_gauge(int chart_dim, int fiber_dim, std::mt19937_64& rng) {
  std::vector<ScalarProfile> profiles;
  std::vector<Matrix> generators;
  for (int k = 0; k < 2; ++k) {
    ScalarProfile s;
    s.offset = uniform(rng, -1.0, 1.0);
    s.slope = Vector(chart_dim);
    s.frequency = Vector(chart_dim);
    for (int i = 0; i < chart_dim; ++i) {
      s.slope(i) = uniform(rng, -0.5, 0.5);
      s.frequency(i) = uniform(rng, -2.0, 2.0);
    }
    s.amplitude = uniform(rng, -0.5, 0.5);
    profiles.push_back(s);
    generators.push_back(random_matrix(fiber_dim, 0.5, rng));
  }
  Matrix base;
  do {
    base = identity_matrix(fiber_dim) + random_matrix(fiber_dim, 0.2, rng);
  } while (smallest_singular_value(base) < 0.3);
  return GaugeField(Chart(chart_dim), fiber_dim,
                    std::make_shared<RandomGauge>(std::move(profiles), std::move(generators),
                                                  std::move(base)),
                    "random");
}

}  // namespace pathrep
