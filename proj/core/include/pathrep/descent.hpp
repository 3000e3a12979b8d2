#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathrep/connection.hpp"
#include "pathrep/path.hpp"
#include "pathrep/transport.hpp"

namespace pathrep {

/// A coordinate chart of an embedded manifold: ambient points x <-> chart
/// coordinates w, valid on the ball |w| < radius().
class ChartMap {
 public:
  virtual ~ChartMap() = default;
  virtual std::string name() const = 0;
  virtual int ambient_dim() const = 0;
  virtual int dim() const = 0;
  /// Radius of the coordinate ball; infinity for charts covering all of R^n.
  virtual double radius() const = 0;
  virtual Vector to_chart(const Vector& x) const = 0;
  virtual Vector from_chart(const Vector& w) const = 0;
  /// Chart velocity of an ambient tangent vector dx at x.
  virtual Vector push_forward(const Vector& x, const Vector& dx) const = 0;
  /// Ambient tangent vector of a chart velocity dw at w.
  virtual Vector pull_back(const Vector& w, const Vector& dw) const = 0;

  /// 1 - |w|/radius; positive exactly on the chart interior.
  double depth(const Vector& x) const;
};

class Atlas {
 public:
  using Sampler = std::function<std::vector<Vector>(int count)>;

  Atlas(std::string name, std::vector<std::shared_ptr<const ChartMap>> charts, Sampler sampler);

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(charts_.size()); }
  const ChartMap& chart(int i) const;
  std::shared_ptr<const ChartMap> chart_ptr(int i) const;
  int ambient_dim() const { return charts_.front()->ambient_dim(); }
  int chart_dim() const { return charts_.front()->dim(); }

  /// Charts whose depth at x exceeds `margin`.
  std::vector<int> charts_containing(const Vector& x, double margin = 0.0) const;
  /// Chart of greatest depth at x (lowest index on ties); -1 if x is interior to none.
  int deepest_chart(const Vector& x) const;
  /// Deterministic, roughly uniform points on the manifold.
  std::vector<Vector> sample_points(int count) const { return sampler_(count); }

 private:
  std::string name_;
  std::vector<std::shared_ptr<const ChartMap>> charts_;
  Sampler sampler_;
};

/// R with the identity chart.
Atlas line_atlas();
/// The circle as angles phi in R (mod 2 pi); charts centred at pi/2 and
/// 3 pi/2 with coordinate wrap(phi - centre) and radius 3 pi / 4. The two
/// overlap components are around phi = pi and phi = 0.
Atlas circle_atlas();
/// The unit sphere in R^3; two stereographic charts centred at +e_x and -e_x,
/// each of angular radius 120 degrees (coordinate radius sqrt 3). Coordinates
/// are oriented by the outward normal; in complex form the transition is
/// w_A w_B = i.
Atlas sphere_atlas();

/// Transition functions g_ij, each a gauge field in chart-i coordinates, with
/// the convention X^j = g_ij X^i. g_ii is implicitly the identity.
class TransitionCocycle {
 public:
  TransitionCocycle(Atlas atlas, int fiber_dim);

  const Atlas& atlas() const { return atlas_; }
  int fiber_dim() const { return fiber_dim_; }

  void set(int i, int j, GaugeField g_ij);
  bool has(int i, int j) const;
  const GaugeField& field(int i, int j) const;
  /// g_ij at the ambient point x. Identity when i == j.
  Matrix value(int i, int j, const Vector& x) const;
  /// Ordered pairs (i, j), i != j, with a transition.
  std::vector<std::pair<int, int>> pairs() const;

 private:
  Atlas atlas_;
  int fiber_dim_;
  std::map<std::pair<int, int>, GaugeField> maps_;
};

/// Max over sampled points and chart pairs/triples of
/// operator_distance(g_jk g_ij, g_ik), including g_ji g_ij = I. `samples`
/// scales the global sample lattice; every declared overlap must receive
/// at least one point or a sampling error is raised.
double check_cech_cocycle(const TransitionCocycle& c, int samples);
/// Same, at explicit ambient points; each must lie in at least two charts.
double check_cech_cocycle(const TransitionCocycle& c, const std::vector<Vector>& points);

/// Max over sampled overlap points, ordered pairs and coordinate directions of
/// the distance between A_j and gauge_transform(A_i, g_ij), compared as forms
/// on the same ambient tangent vector.
double compatibility_residual(const TransitionCocycle& c, const std::vector<ConnectionForm>& forms,
                              int samples);

struct BundleCheckOptions {
  int samples = 64;
  double cocycle_tolerance = 1e-10;
  double compatibility_tolerance = 1e-7;
};

/// Atlas, transition cocycle, and one local connection form per chart,
/// validated on construction.
class GlobalBundle {
 public:
  /// Throws inconsistent_bundle if the cocycle or compatibility residual
  /// exceeds its tolerance.
  static GlobalBundle create(TransitionCocycle cocycle, std::vector<ConnectionForm> forms,
                             const BundleCheckOptions& options = {});

  const Atlas& atlas() const { return cocycle_.atlas(); }
  const TransitionCocycle& cocycle() const { return cocycle_; }
  const ConnectionForm& connection(int chart) const;
  int fiber_dim() const { return cocycle_.fiber_dim(); }
  double cocycle_residual() const { return cocycle_residual_; }
  double compatibility_residual() const { return compatibility_residual_; }

  /// Changes local frames by h_i (chart-i gauge fields): A_i -> h_i . A_i and
  /// g_ij -> h_j g_ij h_i^-1. The result is validated like create().
  GlobalBundle regauge(const std::vector<GaugeField>& h,
                       const BundleCheckOptions& options = {}) const;

 private:
  GlobalBundle(TransitionCocycle cocycle, std::vector<ConnectionForm> forms, double cocycle_res,
               double compat_res);

  TransitionCocycle cocycle_;
  std::vector<ConnectionForm> forms_;
  double cocycle_residual_;
  double compatibility_residual_;
};

GlobalBundle line_bundle(const ConnectionForm& a);
/// Rank-d bundle over the circle atlas with constant transitions: g_01 = c_pi
/// on the overlap around pi and c_zero on the overlap around 0. The same
/// local form is used in both charts (zero by default), so it must commute
/// with the transitions.
GlobalBundle circle_bundle(const Matrix& c_pi, const Matrix& c_zero,
                           std::optional<ConnectionForm> form = std::nullopt);
/// Tangent bundle of the unit sphere with its Levi-Civita connection, in the
/// orthonormal stereographic frame of each chart.
GlobalBundle sphere_tangent_bundle();

/// A global path on the circle: phi(u) = phi0 + 2 pi turns u on [0, 1],
/// closed when `turns` is a nonzero integer.
Path circle_loop(double phi0 = 0.0, int turns = 1);

/// The chart-coordinate image of a global path (same parameter domain and
/// cuts). Only meaningful where the path stays in the chart.
Path local_path(const Path& global, const Atlas& atlas, int chart);

/// Refined cut values t_0 < ... < t_m and the chart used on each segment.
struct CutAssignment {
  std::vector<double> cuts;
  std::vector<int> charts;

  int segments() const { return static_cast<int>(charts.size()); }
  /// Inserts the midpoint of every segment, keeping each segment's chart.
  CutAssignment refine() const;
};

/// Greedy march over the core of `path`: keep the current chart while its
/// depth stays above `margin`, switch to the deepest chart where it drops to
/// `margin`. The original cuts of the path are kept. Throws coverage if a
/// point of the path is not interior to some chart with depth above margin.
CutAssignment subordinate_cut(const Path& path, const Atlas& atlas, double margin = 0.05);

/// Throws coverage unless every segment's image is interior to its chart.
void validate_cut(const Path& path, const Atlas& atlas, const CutAssignment& cut);

struct GlobalTransportOptions {
  IntegratorConfig integrator{};
  /// Frame at the start / end of the path; default the first / last segment chart.
  std::optional<int> source_chart;
  std::optional<int> target_chart;
};

struct GlobalTransport {
  GaugeMap map;
  int source_chart;
  int target_chart;
};

/// F = C_m F_m ... C_1 F_1: segment transports in their charts, composed with
/// the transition g_{i_s, i_{s+1}} at each junction and optional frame changes
/// at the two ends.
GlobalTransport global_transport(const GlobalBundle& b, const Path& path, const CutAssignment& cut,
                                 const GlobalTransportOptions& options = {});
/// Uses subordinate_cut with the default margin.
GlobalTransport global_transport(const GlobalBundle& b, const Path& path,
                                 const GlobalTransportOptions& options = {});

/// Holonomy of a closed path expressed in the frame of the chart it starts in.
GlobalTransport loop_holonomy(const GlobalBundle& b, const Path& loop,
                              const GlobalTransportOptions& options = {});

/// Rotation angle in (-pi, pi] of a rank-2 holonomy. Throws not_a_rotation
/// unless the holonomy is within 1e-6 of SO(2).
double loop_holonomy_angle(const GlobalBundle& b, const Path& loop,
                           const GlobalTransportOptions& options = {});
double rotation_angle(const Matrix& m, double tolerance = 1e-6);

}  // namespace pathrep
