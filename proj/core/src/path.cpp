#include "pathrep/path.hpp"

#include <cmath>
#include <numbers>

namespace pathrep {

Path::Path(Chart chart, double begin, double end, CurveFn position, CurveFn velocity,
           std::vector<double> cuts, bool closed, std::string name)
    : chart_(std::move(chart)),
      begin_(begin),
      end_(end),
      position_(std::move(position)),
      velocity_(std::move(velocity)),
      cuts_(std::move(cuts)),
      closed_(closed),
      name_(std::move(name)) {
  if (!(begin_ <= end_) || !std::isfinite(begin_) || !std::isfinite(end_)) {
    throw Error(ErrorCode::invalid_input, "path domain must be a finite interval");
  }
  if (!position_ || !velocity_) throw Error(ErrorCode::invalid_input, "path curve is empty");
  if (cuts_.empty()) cuts_ = {begin_, end_};
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    if (cuts_[i] < begin_ || cuts_[i] > end_) {
      throw Error(ErrorCode::invalid_input, "cut value outside the path domain");
    }
    if (i > 0 && cuts_[i] < cuts_[i - 1]) {
      throw Error(ErrorCode::invalid_input, "cut values must be nondecreasing");
    }
  }
  start_ = position_(cuts_.front());
  finish_ = closed_ ? start_ : position_(cuts_.back());
  if (start_.size() != chart_.dim) {
    throw Error(ErrorCode::invalid_input, "path dimension does not match its chart");
  }
}

Path Path::with_cuts(std::vector<double> cuts) const {
  const bool same_core =
      !cuts.empty() && cuts.front() == core_begin() && cuts.back() == core_end();
  Path out(chart_, begin_, end_, position_, velocity_, std::move(cuts), closed_ && same_core,
           name_);
  if (same_core) {
    out.start_ = start_;
    out.finish_ = finish_;
  }
  return out;
}

Path Path::with_endpoints(Vector start, Vector finish) const {
  if (start.size() != dim() || finish.size() != dim()) {
    throw Error(ErrorCode::invalid_input, "endpoint dimension mismatch");
  }
  Path out = *this;
  out.closed_ = start == finish;
  out.start_ = std::move(start);
  out.finish_ = std::move(finish);
  return out;
}

Path affine_path(const Vector& origin, const Vector& direction, double begin, double end) {
  if (origin.size() != direction.size()) {
    throw Error(ErrorCode::invalid_input, "origin and direction dimensions differ");
  }
  return Path(Chart(static_cast<int>(origin.size())), begin, end,
              [origin, direction](double u) -> Vector { return origin + u * direction; },
              [direction](double) -> Vector { return direction; }, {}, false, "affine");
}

Path constant_path(const Vector& point, double begin, double end) {
  const auto n = point.size();
  return Path(Chart(static_cast<int>(n)), begin, end,
              [point](double) -> Vector { return point; },
              [n](double) -> Vector { return Vector::Zero(n); }, {}, true, "constant");
}

Path circle_arc(const Vector& center, double radius, double angle0, double angle1) {
  if (center.size() != 2) throw Error(ErrorCode::invalid_input, "circle arc lives in R^2");
  const double sweep = angle1 - angle0;
  const double turns = sweep / (2.0 * std::numbers::pi);
  const bool closed = sweep != 0.0 && std::abs(turns - std::round(turns)) < 1e-12;
  return Path(
      Chart(2), 0.0, 1.0,
      [=](double u) -> Vector {
        const double a = angle0 + u * sweep;
        return center + radius * Vector{{std::cos(a), std::sin(a)}};
      },
      [=](double u) -> Vector {
        const double a = angle0 + u * sweep;
        return radius * sweep * Vector{{-std::sin(a), std::cos(a)}};
      },
      {}, closed, "circle_arc");
}

Path colatitude_loop_chart(double theta) {
  return circle_arc(Vector::Zero(2), std::tan(theta / 2.0), 0.0, 2.0 * std::numbers::pi);
}

Path colatitude_loop(double theta, double phi0) {
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  constexpr double kTurn = 2.0 * std::numbers::pi;
  return Path(
      Chart(3), 0.0, 1.0,
      [=](double u) -> Vector {
        const double phi = phi0 + kTurn * u;
        return Vector{{st * std::cos(phi), st * std::sin(phi), ct}};
      },
      [=](double u) -> Vector {
        const double phi = phi0 + kTurn * u;
        return kTurn * st * Vector{{-std::sin(phi), std::cos(phi), 0.0}};
      },
      {}, true, "colatitude_loop");
}

namespace {

struct CubicSpline1D {
  std::vector<double> y;
  std::vector<double> m;  // second derivatives at knots
  double begin = 0;
  double h = 1;

  CubicSpline1D(std::vector<double> values, double b, double step)
      : y(std::move(values)), m(y.size(), 0.0), begin(b), h(step) {
    const std::size_t n = y.size();
    if (n < 3) return;
    // Natural spline: tridiagonal system for interior second derivatives.
    std::vector<double> diag(n - 2, 4.0);
    std::vector<double> rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      rhs[i - 1] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
    }
    for (std::size_t i = 1; i < n - 2; ++i) {
      const double w = 1.0 / diag[i - 1];
      diag[i] -= w;
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i-- > 0;) {
      const double next = (i + 1 < n - 2) ? m[i + 2] : 0.0;
      m[i + 1] = (rhs[i] - next) / diag[i];
    }
  }

  std::size_t cell(double u) const {
    const double x = (u - begin) / h;
    const auto last = y.size() - 2;
    if (x <= 0) return 0;
    return std::min(static_cast<std::size_t>(x), last);
  }

  double value(double u) const {
    const std::size_t k = cell(u);
    const double a = begin + h * static_cast<double>(k + 1) - u;
    const double b = u - (begin + h * static_cast<double>(k));
    return (m[k] * a * a * a + m[k + 1] * b * b * b) / (6.0 * h) +
           (y[k] / h - m[k] * h / 6.0) * a + (y[k + 1] / h - m[k + 1] * h / 6.0) * b;
  }

  double derivative(double u) const {
    const std::size_t k = cell(u);
    const double a = begin + h * static_cast<double>(k + 1) - u;
    const double b = u - (begin + h * static_cast<double>(k));
    return (-m[k] * a * a + m[k + 1] * b * b) / (2.0 * h) - (y[k] / h - m[k] * h / 6.0) +
           (y[k + 1] / h - m[k + 1] * h / 6.0);
  }
};

}  // namespace

Path spline_path(const std::vector<Vector>& waypoints, double begin, double end) {
  if (waypoints.size() < 2) throw Error(ErrorCode::invalid_input, "spline needs >= 2 waypoints");
  if (!(end > begin)) throw Error(ErrorCode::invalid_input, "spline domain must be nondegenerate");
  const auto n = waypoints.front().size();
  for (const auto& w : waypoints) {
    if (w.size() != n) throw Error(ErrorCode::invalid_input, "waypoint dimensions differ");
  }
  const double h = (end - begin) / static_cast<double>(waypoints.size() - 1);
  std::vector<CubicSpline1D> axes;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> ys;
    for (const auto& w : waypoints) ys.push_back(w(i));
    axes.emplace_back(std::move(ys), begin, h);
  }
  auto eval = [axes, n](double u, bool deriv) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i) = deriv ? axes[i].derivative(u) : axes[i].value(u);
    }
    return out;
  };
  // Knots are cuts: the curve is only C^2 across them.
  std::vector<double> knots;
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    knots.push_back(k + 1 == waypoints.size() ? end : begin + h * static_cast<double>(k));
  }
  Path p(Chart(static_cast<int>(n)), begin, end, [eval](double u) { return eval(u, false); },
         [eval](double u) { return eval(u, true); }, std::move(knots), false, "spline");
  return p.with_endpoints(waypoints.front(), waypoints.back());
}

// ---------------------------------------------------------------------------

Reparametrization identity_reparametrization() {
  return Reparametrization{[](double u) { return u; }, [](double) { return 1.0; }, "identity",
                           true};
}

Reparametrization power_reparametrization(double begin, double end, double k) {
  if (!(k >= 1.0)) throw Error(ErrorCode::invalid_reparametrization, "power must be >= 1");
  const double len = end - begin;
  return Reparametrization{
      [=](double u) { return begin + len * std::pow((u - begin) / len, k); },
      [=](double u) { return k * std::pow((u - begin) / len, k - 1.0); }, "power", false};
}

double smooth_step(double x) {
  const double s = 3.0 * x - 1.0;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double f = std::exp(-1.0 / s);
  const double g = std::exp(-1.0 / (1.0 - s));
  return f / (f + g);
}

double smooth_step_derivative(double x) {
  const double s = 3.0 * x - 1.0;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double f = std::exp(-1.0 / s);
  const double g = std::exp(-1.0 / (1.0 - s));
  const double df = f / (s * s);
  const double dg = -g / ((1.0 - s) * (1.0 - s));
  return 3.0 * (df * (f + g) - f * (df + dg)) / ((f + g) * (f + g));
}

Reparametrization bump_reparametrization(double begin, double end) {
  return sitting_reparametrization(begin, end, 0.0);
}

Reparametrization sitting_reparametrization(double begin, double end, double t) {
  if (t < 0.0 || t > 1.0) {
    throw Error(ErrorCode::invalid_reparametrization, "homotopy parameter must be in [0, 1]");
  }
  const double len = end - begin;
  return Reparametrization{
      [=](double x) {
        if (x == begin) return begin;
        if (x == end) return end;
        const double y = (x - begin) / len;
        return begin + len * (t * y + (1.0 - t) * smooth_step(y));
      },
      [=](double x) {
        const double y = (x - begin) / len;
        return t + (1.0 - t) * smooth_step_derivative(y);
      },
      t == 0.0 ? "bump" : "sitting", t == 1.0};
}

namespace {

double lowest_preimage(const std::function<double(double)>& phi, double lo, double hi,
                       double value) {
  if (phi(lo) >= value) return lo;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (phi(mid) >= value) hi = mid; else lo = mid;
  }
  return hi;
}

double highest_preimage(const std::function<double(double)>& phi, double lo, double hi,
                        double value) {
  if (phi(hi) <= value) return hi;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (phi(mid) <= value) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace

Path reparametrize(const Path& path, const Reparametrization& phi) {
  if (phi.is_identity) return path;
  if (!phi.map || !phi.derivative) {
    throw Error(ErrorCode::invalid_reparametrization, "reparametrization is empty");
  }
  const double a = path.begin();
  const double b = path.end();
  const double scale = 1.0 + std::abs(a) + std::abs(b);
  if (std::abs(phi.map(a) - a) > 1e-12 * scale || std::abs(phi.map(b) - b) > 1e-12 * scale) {
    throw Error(ErrorCode::invalid_reparametrization,
                "reparametrization must map the domain onto itself");
  }
  constexpr int kSamples = 1024;
  double previous = phi.map(a);
  for (int k = 0; k <= kSamples; ++k) {
    const double u = a + (b - a) * k / kSamples;
    const double value = phi.map(u);
    const double slope = phi.derivative(u);
    if (!std::isfinite(value) || !std::isfinite(slope) || slope < -1e-12 ||
        value < previous - 1e-12 * scale) {
      throw Error(ErrorCode::invalid_reparametrization,
                  "reparametrization is not orientation preserving");
    }
    previous = value;
  }
  std::vector<double> cuts;
  const auto& old = path.cuts();
  for (std::size_t i = 0; i < old.size(); ++i) {
    const bool last = i + 1 == old.size();
    double c = last ? highest_preimage(phi.map, a, b, old[i])
                    : lowest_preimage(phi.map, a, b, old[i]);
    if (!cuts.empty()) c = std::max(c, cuts.back());
    cuts.push_back(c);
  }
  auto position = [path, map = phi.map](double u) { return path.position(map(u)); };
  auto velocity = [path, map = phi.map, deriv = phi.derivative](double u) -> Vector {
    return deriv(u) * path.velocity(map(u));
  };
  Path out(path.chart(), a, b, position, velocity, std::move(cuts), false,
           path.name() + "*" + phi.name);
  return out.with_endpoints(path.start_point(), path.end_point());
}

}  // namespace pathrep
