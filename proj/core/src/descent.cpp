#include "pathrep/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace pathrep {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

class LineChart final : public ChartMap {
 public:
  std::string name() const override { return "line"; }
  int ambient_dim() const override { return 1; }
  int dim() const override { return 1; }
  double radius() const override { return kInf; }
  Vector to_chart(const Vector& x) const override { return x; }
  Vector from_chart(const Vector& w) const override { return w; }
  Vector push_forward(const Vector&, const Vector& dx) const override { return dx; }
  Vector pull_back(const Vector&, const Vector& dw) const override { return dw; }
};

class ArcChart final : public ChartMap {
 public:
  ArcChart(double centre, double radius, std::string name)
      : centre_(centre), radius_(radius), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  int ambient_dim() const override { return 1; }
  int dim() const override { return 1; }
  double radius() const override { return radius_; }
  Vector to_chart(const Vector& x) const override {
    return Vector::Constant(1, wrap_angle(x(0) - centre_));
  }
  Vector from_chart(const Vector& w) const override {
    return Vector::Constant(1, centre_ + w(0));
  }
  Vector push_forward(const Vector&, const Vector& dx) const override { return dx; }
  Vector pull_back(const Vector&, const Vector& dw) const override { return dw; }

 private:
  double centre_;
  double radius_;
  std::string name_;
};

// Stereographic projection from -c onto the plane spanned by (e1, e2):
// w = (x.e1, x.e2) / (1 + x.c).
class StereoChart final : public ChartMap {
 public:
  StereoChart(Vector c, Vector e1, Vector e2, std::string name)
      : c_(std::move(c)), e1_(std::move(e1)), e2_(std::move(e2)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  int ambient_dim() const override { return 3; }
  int dim() const override { return 2; }
  double radius() const override { return std::sqrt(3.0); }

  Vector to_chart(const Vector& x) const override {
    const double denom = 1.0 + x.dot(c_);
    if (!(denom > 0.0)) return Vector::Constant(2, kInf);
    return Vector{{x.dot(e1_) / denom, x.dot(e2_) / denom}};
  }
  Vector from_chart(const Vector& w) const override {
    const double r2 = w.squaredNorm();
    return ((1.0 - r2) * c_ + 2.0 * (w(0) * e1_ + w(1) * e2_)) / (1.0 + r2);
  }
  Vector push_forward(const Vector& x, const Vector& dx) const override {
    const double denom = 1.0 + x.dot(c_);
    const double ddenom = c_.dot(dx);
    return Vector{{e1_.dot(dx) / denom - x.dot(e1_) * ddenom / (denom * denom),
                   e2_.dot(dx) / denom - x.dot(e2_) * ddenom / (denom * denom)}};
  }
  Vector pull_back(const Vector& w, const Vector& dw) const override {
    const double r2 = w.squaredNorm();
    const double s = w.dot(dw);
    const Vector x = from_chart(w);
    return (-2.0 * s * c_ + 2.0 * (dw(0) * e1_ + dw(1) * e2_)) / (1.0 + r2) -
           x * (2.0 * s / (1.0 + r2));
  }

 private:
  Vector c_;
  Vector e1_;
  Vector e2_;
  std::string name_;
};

std::vector<Vector> line_samples(int count) {
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : -4.0 + 8.0 * k / (count - 1);
    out.push_back(Vector::Constant(1, t));
  }
  return out;
}

std::vector<Vector> circle_samples(int count) {
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) out.push_back(Vector::Constant(1, 2.0 * kPi * (k + 0.5) / count));
  return out;
}

// Fibonacci lattice.
std::vector<Vector> sphere_samples(int count) {
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    out.push_back(Vector{{r * std::cos(phi), r * std::sin(phi), z}});
  }
  return out;
}

double op_distance(const Matrix& a, const Matrix& b) { return distance(a, b, Norm::operator2); }

}  // namespace

double ChartMap::depth(const Vector& x) const {
  const double r = radius();
  if (std::isinf(r)) return 1.0;
  const Vector w = to_chart(x);
  if (!all_finite(w.cast<Complex>())) return -kInf;
  return 1.0 - w.norm() / r;
}

// ---------------------------------------------------------------------------

Atlas::Atlas(std::string name, std::vector<std::shared_ptr<const ChartMap>> charts,
             Sampler sampler)
    : name_(std::move(name)), charts_(std::move(charts)), sampler_(std::move(sampler)) {
  if (charts_.empty()) throw Error(ErrorCode::invalid_input, "atlas needs at least one chart");
  for (const auto& c : charts_) {
    if (!c || c->ambient_dim() != charts_.front()->ambient_dim() ||
        c->dim() != charts_.front()->dim()) {
      throw Error(ErrorCode::invalid_input, "atlas charts disagree in dimension");
    }
  }
  if (!sampler_) throw Error(ErrorCode::invalid_input, "atlas needs a point sampler");
}

const ChartMap& Atlas::chart(int i) const { return *chart_ptr(i); }

std::shared_ptr<const ChartMap> Atlas::chart_ptr(int i) const {
  if (i < 0 || i >= size()) {
    throw Error(ErrorCode::invalid_input, "chart index " + std::to_string(i) + " out of range");
  }
  return charts_[static_cast<std::size_t>(i)];
}

std::vector<int> Atlas::charts_containing(const Vector& x, double margin) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (charts_[static_cast<std::size_t>(i)]->depth(x) > margin) out.push_back(i);
  }
  return out;
}

int Atlas::deepest_chart(const Vector& x) const {
  int best = -1;
  double best_depth = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double d = charts_[static_cast<std::size_t>(i)]->depth(x);
    if (d > best_depth) {
      best = i;
      best_depth = d;
    }
  }
  return best;
}

Atlas line_atlas() {
  return Atlas("line", {std::make_shared<LineChart>()}, line_samples);
}

Atlas circle_atlas() {
  const double r = 0.75 * kPi;
  return Atlas("circle",
               {std::make_shared<ArcChart>(0.5 * kPi, r, "circle_0"),
                std::make_shared<ArcChart>(1.5 * kPi, r, "circle_1")},
               circle_samples);
}

Atlas sphere_atlas() {
  const Vector ex{{1.0, 0.0, 0.0}};
  const Vector ey{{0.0, 1.0, 0.0}};
  const Vector ez{{0.0, 0.0, 1.0}};
  return Atlas("sphere",
               {std::make_shared<StereoChart>(ex, ey, ez, "sphere_east"),
                std::make_shared<StereoChart>(-ex, ez, ey, "sphere_west")},
               sphere_samples);
}

// ---------------------------------------------------------------------------

TransitionCocycle::TransitionCocycle(Atlas atlas, int fiber_dim)
    : atlas_(std::move(atlas)), fiber_dim_(fiber_dim) {
  if (fiber_dim < 1) throw Error(ErrorCode::invalid_input, "fiber dimension must be >= 1");
}

void TransitionCocycle::set(int i, int j, GaugeField g_ij) {
  (void)atlas_.chart(i);
  (void)atlas_.chart(j);
  if (i == j) throw Error(ErrorCode::invalid_input, "g_ii is fixed to the identity");
  if (g_ij.fiber_dim() != fiber_dim_ || g_ij.chart().dim != atlas_.chart_dim()) {
    throw Error(ErrorCode::invalid_input, "transition has the wrong dimensions");
  }
  maps_.insert_or_assign({i, j}, std::move(g_ij));
}

bool TransitionCocycle::has(int i, int j) const { return i == j || maps_.count({i, j}) > 0; }

const GaugeField& TransitionCocycle::field(int i, int j) const {
  auto it = maps_.find({i, j});
  if (it == maps_.end()) {
    throw Error(ErrorCode::inconsistent_bundle, "no transition from chart " + std::to_string(i) +
                                                    " to chart " + std::to_string(j));
  }
  return it->second;
}

Matrix TransitionCocycle::value(int i, int j, const Vector& x) const {
  if (i == j) return identity_matrix(fiber_dim_);
  return field(i, j).value(atlas_.chart(i).to_chart(x));
}

std::vector<std::pair<int, int>> TransitionCocycle::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& [key, _] : maps_) out.push_back(key);
  return out;
}

namespace {

// Residual at one point over all charts containing it.
double cocycle_at(const TransitionCocycle& c, const Vector& x, const std::vector<int>& inside) {
  const Matrix id = identity_matrix(c.fiber_dim());
  double worst = 0.0;
  for (int i : inside) {
    for (int j : inside) {
      if (i == j) continue;
      const Matrix gij = c.value(i, j, x);
      worst = std::max(worst, op_distance(c.value(j, i, x) * gij, id));
      for (int k : inside) {
        if (k == i || k == j) continue;
        worst = std::max(worst, op_distance(c.value(j, k, x) * gij, c.value(i, k, x)));
      }
    }
  }
  return worst;
}

std::vector<Vector> overlap_samples(const TransitionCocycle& c, int samples) {
  if (samples < 1) throw Error(ErrorCode::sampling, "need at least one sample per overlap");
  const Atlas& atlas = c.atlas();
  const auto points = atlas.sample_points(samples * atlas.size() * 4);
  std::set<std::pair<int, int>> seen;
  std::vector<Vector> out;
  for (const auto& x : points) {
    const auto inside = atlas.charts_containing(x);
    if (inside.size() < 2) continue;
    for (int i : inside) {
      for (int j : inside) seen.insert({i, j});
    }
    out.push_back(x);
  }
  for (const auto& p : c.pairs()) {
    if (!seen.count(p)) {
      throw Error(ErrorCode::sampling, "no sample point in the overlap of charts " +
                                           std::to_string(p.first) + " and " +
                                           std::to_string(p.second));
    }
  }
  return out;
}

}  // namespace

double check_cech_cocycle(const TransitionCocycle& c, int samples) {
  if (samples < 1) throw Error(ErrorCode::sampling, "need at least one sample per overlap");
  if (c.atlas().size() == 1) return 0.0;
  return check_cech_cocycle(c, overlap_samples(c, samples));
}

double check_cech_cocycle(const TransitionCocycle& c, const std::vector<Vector>& points) {
  double worst = 0.0;
  for (const auto& x : points) {
    if (x.size() != c.atlas().ambient_dim()) {
      throw Error(ErrorCode::sampling, "sample point has the wrong dimension");
    }
    const auto inside = c.atlas().charts_containing(x);
    if (inside.size() < 2) throw Error(ErrorCode::sampling, "sample point is outside every overlap");
    worst = std::max(worst, cocycle_at(c, x, inside));
  }
  return worst;
}

double compatibility_residual(const TransitionCocycle& c, const std::vector<ConnectionForm>& forms,
                              int samples) {
  const Atlas& atlas = c.atlas();
  if (static_cast<int>(forms.size()) != atlas.size()) {
    throw Error(ErrorCode::invalid_input, "need one connection form per chart");
  }
  if (atlas.size() == 1) return 0.0;
  const int n = atlas.chart_dim();
  double worst = 0.0;
  for (const auto& x : overlap_samples(c, samples)) {
    const auto inside = atlas.charts_containing(x);
    for (int i : inside) {
      const ChartMap& ci = atlas.chart(i);
      const Vector wi = ci.to_chart(x);
      for (int j : inside) {
        if (i == j) continue;
        const ChartMap& cj = atlas.chart(j);
        const Vector wj = cj.to_chart(x);
        const GaugeJet jet = c.field(i, j).jet(wi);
        for (int k = 0; k < n; ++k) {
          const Vector vi = Vector::Unit(n, k);
          const Vector vj = cj.push_forward(x, ci.pull_back(wi, vi));
          const Matrix expected =
              jet.value * forms[static_cast<std::size_t>(i)].apply(wi, vi) * jet.inverse +
              jet.partials[static_cast<std::size_t>(k)] * jet.inverse;
          worst = std::max(worst, op_distance(forms[static_cast<std::size_t>(j)].apply(wj, vj),
                                              expected));
        }
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

GlobalBundle::GlobalBundle(TransitionCocycle cocycle, std::vector<ConnectionForm> forms,
                           double cocycle_res, double compat_res)
    : cocycle_(std::move(cocycle)),
      forms_(std::move(forms)),
      cocycle_residual_(cocycle_res),
      compatibility_residual_(compat_res) {}

GlobalBundle GlobalBundle::create(TransitionCocycle cocycle, std::vector<ConnectionForm> forms,
                                  const BundleCheckOptions& options) {
  const Atlas& atlas = cocycle.atlas();
  if (static_cast<int>(forms.size()) != atlas.size()) {
    throw Error(ErrorCode::invalid_input, "need one connection form per chart");
  }
  for (const auto& a : forms) {
    if (a.chart_dim() != atlas.chart_dim() || a.fiber_dim() != cocycle.fiber_dim()) {
      throw Error(ErrorCode::invalid_input, "connection form does not match the bundle");
    }
  }
  const double cres = check_cech_cocycle(cocycle, options.samples);
  if (!(cres <= options.cocycle_tolerance)) {
    throw Error(ErrorCode::inconsistent_bundle,
                "transition cocycle residual " + std::to_string(cres) + " exceeds tolerance");
  }
  const double ares = pathrep::compatibility_residual(cocycle, forms, options.samples);
  if (!(ares <= options.compatibility_tolerance)) {
    throw Error(ErrorCode::inconsistent_bundle,
                "connection forms are incompatible on overlaps (residual " +
                    std::to_string(ares) + ")");
  }
  return GlobalBundle(std::move(cocycle), std::move(forms), cres, ares);
}

const ConnectionForm& GlobalBundle::connection(int chart) const {
  (void)atlas().chart(chart);
  return forms_[static_cast<std::size_t>(chart)];
}

GlobalBundle GlobalBundle::regauge(const std::vector<GaugeField>& h,
                                   const BundleCheckOptions& options) const {
  const Atlas& a = atlas();
  if (static_cast<int>(h.size()) != a.size()) {
    throw Error(ErrorCode::invalid_input, "need one gauge per chart");
  }
  std::vector<ConnectionForm> forms;
  for (int i = 0; i < a.size(); ++i) {
    forms.push_back(gauge_transform(forms_[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(i)]));
  }
  TransitionCocycle next(a, fiber_dim());
  for (const auto& [i, j] : cocycle_.pairs()) {
    auto ci = a.chart_ptr(i);
    auto cj = a.chart_ptr(j);
    const GaugeField hi = h[static_cast<std::size_t>(i)];
    const GaugeField hj = h[static_cast<std::size_t>(j)];
    const GaugeField g = cocycle_.field(i, j);
    next.set(i, j,
             GaugeField::from_functions(Chart(a.chart_dim()),
                                        fiber_dim(), [=](const Vector& wi) -> Matrix {
                                          const Vector wj = cj->to_chart(ci->from_chart(wi));
                                          return hj.value(wj) * g.value(wi) *
                                                 inverse(hi.value(wi));
                                        }));
  }
  return create(std::move(next), std::move(forms), options);
}

GlobalBundle line_bundle(const ConnectionForm& a) {
  if (a.chart_dim() != 1) throw Error(ErrorCode::invalid_input, "line bundle needs a 1-d chart");
  return GlobalBundle::create(TransitionCocycle(line_atlas(), a.fiber_dim()), {a});
}

GlobalBundle circle_bundle(const Matrix& c_pi, const Matrix& c_zero,
                           std::optional<ConnectionForm> form) {
  const Matrix a = GaugeMap(c_pi).matrix();
  const Matrix b = GaugeMap(c_zero).matrix();
  const int d = static_cast<int>(a.rows());
  if (b.rows() != d) throw Error(ErrorCode::invalid_input, "transitions differ in dimension");
  const Matrix a_inv = inverse(a);
  const Matrix b_inv = inverse(b);
  auto zero = [d](const Vector&) { return std::vector<Matrix>(1, Matrix::Zero(d, d)); };
  TransitionCocycle c(circle_atlas(), d);
  // Chart-0 coordinate > 0 is the overlap around pi; chart-1 coordinate < 0 is the same overlap.
  c.set(0, 1, GaugeField::from_functions(
                  Chart(1), d, [a, b](const Vector& w) -> Matrix { return w(0) > 0 ? a : b; },
                  zero));
  c.set(1, 0, GaugeField::from_functions(
                  Chart(1), d,
                  [a_inv, b_inv](const Vector& w) -> Matrix { return w(0) < 0 ? a_inv : b_inv; },
                  zero));
  ConnectionForm local = form.value_or(zero_connection(1, d));
  return GlobalBundle::create(std::move(c), {local, local});
}

namespace {

GaugeField sphere_transition() {
  // Rotation by arg of the derivative of w -> i / w: -pi/2 - 2 arg w.
  auto angle = [](const Vector& w) { return -0.5 * kPi - 2.0 * std::atan2(w(1), w(0)); };
  return GaugeField::from_functions(
      Chart(2), 2, [angle](const Vector& w) -> Matrix { return rotation(angle(w)); },
      [angle](const Vector& w) -> std::vector<Matrix> {
        const double r2 = w.squaredNorm();
        const Matrix dr = rotation(angle(w) + 0.5 * kPi);  // d/dtheta R(theta)
        return {dr * (2.0 * w(1) / r2), dr * (-2.0 * w(0) / r2)};
      });
}

}  // namespace

GlobalBundle sphere_tangent_bundle() {
  TransitionCocycle c(sphere_atlas(), 2);
  c.set(0, 1, sphere_transition());
  c.set(1, 0, sphere_transition());
  const ConnectionForm a = sphere_levi_civita();
  return GlobalBundle::create(std::move(c), {a, a});
}

Path circle_loop(double phi0, int turns) {
  const double speed = 2.0 * kPi * turns;
  return Path(
      Chart(1), 0.0, 1.0, [=](double u) { return Vector::Constant(1, phi0 + speed * u); },
      [=](double) { return Vector::Constant(1, speed); }, {}, turns != 0, "circle_loop");
}

Path local_path(const Path& global, const Atlas& atlas, int chart) {
  auto c = atlas.chart_ptr(chart);
  if (global.dim() != c->ambient_dim()) {
    throw Error(ErrorCode::invalid_input, "path does not live in the atlas ambient space");
  }
  return Path(
      Chart(c->dim()), global.begin(), global.end(),
      [global, c](double u) { return c->to_chart(global.position(u)); },
      [global, c](double u) { return c->push_forward(global.position(u), global.velocity(u)); },
      global.cuts(), global.closed(), global.name() + "@" + c->name());
}

// ---------------------------------------------------------------------------

CutAssignment CutAssignment::refine() const {
  CutAssignment out;
  for (int s = 0; s < segments(); ++s) {
    const double a = cuts[static_cast<std::size_t>(s)];
    const double b = cuts[static_cast<std::size_t>(s) + 1];
    out.cuts.push_back(a);
    out.cuts.push_back(0.5 * (a + b));
    out.charts.push_back(charts[static_cast<std::size_t>(s)]);
    out.charts.push_back(charts[static_cast<std::size_t>(s)]);
  }
  if (!cuts.empty()) out.cuts.push_back(cuts.back());
  return out;
}

namespace {

std::string point_text(const Vector& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x(i));
  }
  return s + ")";
}

}  // namespace

CutAssignment subordinate_cut(const Path& path, const Atlas& atlas, double margin) {
  if (!(margin >= 0.0 && margin < 1.0)) {
    throw Error(ErrorCode::invalid_input, "cut margin must lie in [0, 1)");
  }
  if (path.dim() != atlas.ambient_dim()) {
    throw Error(ErrorCode::invalid_input, "path does not live in the atlas ambient space");
  }
  const double t0 = path.core_begin();
  const double t1 = path.core_end();
  auto depth = [&](int c, double u) { return atlas.chart(c).depth(path.position(u)); };
  auto best_at = [&](double u, int exclude) {
    int best = -1;
    double best_depth = margin;
    for (int c = 0; c < atlas.size(); ++c) {
      if (c == exclude) continue;
      const double d = depth(c, u);
      if (d > best_depth) {
        best = c;
        best_depth = d;
      }
    }
    if (best < 0) {
      throw Error(ErrorCode::coverage, "path point " + point_text(path.position(u)) +
                                           " at u = " + std::to_string(u) +
                                           " is not inside any chart");
    }
    return best;
  };

  // March: (start parameter, chart) per segment.
  std::vector<std::pair<double, int>> march{{t0, best_at(t0, -1)}};
  constexpr int kScan = 2048;
  const double du = (t1 - t0) / kScan;
  int k = 1;
  while (t1 > t0 && k <= kScan) {
    const int cur = march.back().second;
    const double start = march.back().first;
    while (k <= kScan && depth(cur, k == kScan ? t1 : t0 + k * du) > margin) ++k;
    if (k > kScan) break;
    double lo = std::max(start, t0 + (k - 1) * du);
    double hi = k == kScan ? t1 : t0 + k * du;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (depth(cur, mid) > margin ? lo : hi) = mid;
    }
    march.emplace_back(lo, best_at(lo, cur));
    if (march.size() > 100000) throw Error(ErrorCode::coverage, "chart march does not terminate");
  }

  std::vector<double> cuts;
  for (const auto& [u, _] : march) cuts.push_back(u);
  for (double c : path.cuts()) cuts.push_back(c);
  cuts.push_back(t1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  CutAssignment out;
  out.cuts.push_back(cuts.front());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double mid = 0.5 * (cuts[s] + cuts[s + 1]);
    auto it = std::upper_bound(march.begin(), march.end(), mid,
                               [](double m, const auto& e) { return m < e.first; });
    out.charts.push_back(std::prev(it)->second);
    out.cuts.push_back(cuts[s + 1]);
  }
  if (out.charts.empty()) {
    // Degenerate core: one empty segment.
    out.cuts.push_back(t1);
    out.charts.push_back(march.front().second);
  }
  return out;
}

void validate_cut(const Path& path, const Atlas& atlas, const CutAssignment& cut) {
  if (cut.charts.empty() || cut.cuts.size() != cut.charts.size() + 1) {
    throw Error(ErrorCode::invalid_input, "cut assignment needs one chart per segment");
  }
  const double tol = 1e-12 * (1.0 + std::abs(path.core_begin()) + std::abs(path.core_end()));
  if (std::abs(cut.cuts.front() - path.core_begin()) > tol ||
      std::abs(cut.cuts.back() - path.core_end()) > tol) {
    throw Error(ErrorCode::invalid_input, "cut assignment does not span the path core");
  }
  for (int s = 0; s < cut.segments(); ++s) {
    const double a = cut.cuts[static_cast<std::size_t>(s)];
    const double b = cut.cuts[static_cast<std::size_t>(s) + 1];
    if (b < a) throw Error(ErrorCode::invalid_input, "cut values must be non-decreasing");
    const ChartMap& chart = atlas.chart(cut.charts[static_cast<std::size_t>(s)]);
    constexpr int kChecks = 16;
    for (int k = 0; k <= kChecks; ++k) {
      const double u = a + (b - a) * k / kChecks;
      if (!(chart.depth(path.position(u)) > 0.0)) {
        throw Error(ErrorCode::coverage, "segment " + std::to_string(s) + " leaves chart " +
                                             chart.name() + " at u = " + std::to_string(u));
      }
    }
  }
}

namespace {

Matrix frame_change(const GlobalBundle& b, int from, int to, const Vector& x) {
  if (from == to) return identity_matrix(b.fiber_dim());
  const Atlas& atlas = b.atlas();
  if (!(atlas.chart(from).depth(x) > 0.0) || !(atlas.chart(to).depth(x) > 0.0)) {
    throw Error(ErrorCode::coverage, "frame change between charts " + std::to_string(from) +
                                         " and " + std::to_string(to) + " outside their overlap");
  }
  return b.cocycle().value(from, to, x);
}

}  // namespace

GlobalTransport global_transport(const GlobalBundle& b, const Path& path, const CutAssignment& cut,
                                 const GlobalTransportOptions& options) {
  const Atlas& atlas = b.atlas();
  validate_cut(path, atlas, cut);
  const int first = cut.charts.front();
  const int last = cut.charts.back();
  const int source = options.source_chart.value_or(first);
  const int target = options.target_chart.value_or(last);
  (void)atlas.chart(source);
  (void)atlas.chart(target);

  Matrix f = frame_change(b, source, first, path.position(cut.cuts.front()));
  for (int s = 0; s < cut.segments(); ++s) {
    const int c = cut.charts[static_cast<std::size_t>(s)];
    const double u0 = cut.cuts[static_cast<std::size_t>(s)];
    const double u1 = cut.cuts[static_cast<std::size_t>(s) + 1];
    if (u1 > u0) {
      f = detail::integrate(b.connection(c), local_path(path, atlas, c), u0, u1,
                            options.integrator) *
          f;
    }
    const int next = s + 1 < cut.segments() ? cut.charts[static_cast<std::size_t>(s) + 1] : target;
    f = frame_change(b, c, next, path.position(u1)) * f;
  }
  if (!all_finite(f)) throw Error(ErrorCode::evaluation, "glued transport is not finite");
  return GlobalTransport{GaugeMap(std::move(f)), source, target};
}

GlobalTransport global_transport(const GlobalBundle& b, const Path& path,
                                 const GlobalTransportOptions& options) {
  return global_transport(b, path, subordinate_cut(path, b.atlas()), options);
}

GlobalTransport loop_holonomy(const GlobalBundle& b, const Path& loop,
                              const GlobalTransportOptions& options) {
  const Atlas& atlas = b.atlas();
  const CutAssignment cut = subordinate_cut(loop, atlas);
  const int home = options.source_chart.value_or(cut.charts.front());
  const ChartMap& chart = atlas.chart(home);
  const Vector x0 = loop.position(loop.core_begin());
  const Vector x1 = loop.position(loop.core_end());
  if (!(chart.depth(x1) > 0.0) ||
      (chart.to_chart(x0) - chart.to_chart(x1)).norm() > 1e-9 * (1.0 + x0.norm())) {
    throw Error(ErrorCode::invalid_input, "holonomy needs a closed path");
  }
  GlobalTransportOptions opts = options;
  opts.source_chart = home;
  opts.target_chart = options.target_chart.value_or(home);
  return global_transport(b, loop, cut, opts);
}

double rotation_angle(const Matrix& m, double tolerance) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw Error(ErrorCode::not_a_rotation, "rotation angle needs a 2x2 matrix");
  }
  if (m.imag().cwiseAbs().maxCoeff() > tolerance) {
    throw Error(ErrorCode::not_a_rotation, "holonomy has imaginary entries");
  }
  const Eigen::Matrix2d r = m.real();
  const double orth = (r.transpose() * r - Eigen::Matrix2d::Identity()).norm();
  if (orth > tolerance || r.determinant() <= 0.0) {
    throw Error(ErrorCode::not_a_rotation,
                "holonomy is not a rotation (orthogonality defect " + std::to_string(orth) + ")");
  }
  double angle = std::atan2(r(1, 0) - r(0, 1), r(0, 0) + r(1, 1));
  if (angle <= -kPi) angle += 2.0 * kPi;
  return angle;
}

double loop_holonomy_angle(const GlobalBundle& b, const Path& loop,
                           const GlobalTransportOptions& options) {
  return rotation_angle(loop_holonomy(b, loop, options).map.matrix());
}

}  // namespace pathrep
