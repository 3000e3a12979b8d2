#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pathrep/connection.hpp"

namespace pathrep {

/// A C^1 curve u -> gamma(u) in R^n over [begin, end], with ordered cut
/// values. Evaluation happens on the core [cuts.front(), cuts.back()].
///
/// Endpoints of the core are stored explicitly so that closed loops can
/// declare `end_point() == start_point()` bit-for-bit; bordism words match
/// locations exactly.
class Path {
 public:
  using CurveFn = std::function<Vector(double)>;

  Path(Chart chart, double begin, double end, CurveFn position, CurveFn velocity,
       std::vector<double> cuts = {}, bool closed = false, std::string name = "custom");

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim; }
  double begin() const { return begin_; }
  double end() const { return end_; }
  const std::string& name() const { return name_; }

  Vector position(double u) const { return position_(u); }
  Vector velocity(double u) const { return velocity_(u); }

  const std::vector<double>& cuts() const { return cuts_; }
  double core_begin() const { return cuts_.front(); }
  double core_end() const { return cuts_.back(); }
  bool closed() const { return closed_; }

  const Vector& start_point() const { return start_; }
  const Vector& end_point() const { return finish_; }

  Path with_cuts(std::vector<double> cuts) const;
  /// Same curve; declared endpoints are replaced by the given ones.
  Path with_endpoints(Vector start, Vector finish) const;

 private:
  Chart chart_;
  double begin_;
  double end_;
  CurveFn position_;
  CurveFn velocity_;
  std::vector<double> cuts_;
  bool closed_;
  std::string name_;
  Vector start_;
  Vector finish_;
};

/// gamma(u) = origin + u * direction on [begin, end].
Path affine_path(const Vector& origin, const Vector& direction, double begin = 0.0,
                 double end = 1.0);
Path constant_path(const Vector& point, double begin = 0.0, double end = 1.0);
/// Circle arc in R^2 on [0, 1]: angle runs linearly from `angle0` to `angle1`.
/// Marked closed when the sweep is a whole number of turns.
Path circle_arc(const Vector& center, double radius, double angle0, double angle1);
/// Colatitude circle theta of the unit sphere, seen in the stereographic chart
/// centred at the north pole: a circle of radius tan(theta/2), traversed once
/// counterclockwise on [0, 1].
Path colatitude_loop_chart(double theta);
/// Colatitude circle on the unit sphere in R^3, counterclockwise about +z,
/// starting at longitude `phi0`, parameter in [0, 1].
Path colatitude_loop(double theta, double phi0 = 0.0);
/// Natural cubic spline through waypoints at uniform parameters on
/// [begin, end]; the velocity is the spline's analytic derivative.
Path spline_path(const std::vector<Vector>& waypoints, double begin = 0.0, double end = 1.0);

/// An orientation-preserving, possibly non-strict, C^1 self-map of a
/// parameter interval.
struct Reparametrization {
  std::function<double(double)> map;
  std::function<double(double)> derivative;
  std::string name = "custom";
  bool is_identity = false;
};

Reparametrization identity_reparametrization();
/// u -> begin + (end-begin) ((u-begin)/(end-begin))^k, k >= 1.
Reparametrization power_reparametrization(double begin, double end, double k);
/// Smooth step b: 0 on [0,1/3], 1 on [2/3,1], rescaled to [begin, end].
Reparametrization bump_reparametrization(double begin, double end);
/// x -> t x + (1 - t) b(x): orientation preserving for t in (0, 1], sitting
/// at both ends for t = 0.
Reparametrization sitting_reparametrization(double begin, double end, double t);

/// Smooth bump b on R with b = 0 below 1/3 and b = 1 above 2/3.
double smooth_step(double x);
double smooth_step_derivative(double x);

/// gamma o phi. Cuts are pulled back through preimages: the first and
/// interior cuts use the smallest preimage, the last cut the largest, so
/// sitting intervals stay inside the core. Throws invalid_reparametrization if
/// phi decreases anywhere or does not map the domain onto itself.
Path reparametrize(const Path& path, const Reparametrization& phi);

}  // namespace pathrep
