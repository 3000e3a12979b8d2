#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pathrep/path.hpp"
#include "support/oracles.hpp"

namespace pathrep {
namespace {

constexpr double kPi = std::numbers::pi;

// Central difference of the position, for comparing against analytic velocities.
Vector numeric_velocity(const Path& p, double u, double h = 1e-6) {
  return (p.position(u + h) - p.position(u - h)) / (2 * h);
}

TEST(Path, AffineBasics) {
  const Path p = affine_path(Vector{{1.0, 2.0}}, Vector{{0.5, -1.0}}, -1.0, 3.0);
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.cuts(), (std::vector<double>{-1.0, 3.0}));
  EXPECT_LT((p.position(2.0) - Vector{{2.0, 0.0}}).norm(), 1e-15);
  EXPECT_LT((p.velocity(0.7) - Vector{{0.5, -1.0}}).norm(), 1e-15);
  EXPECT_LT((p.start_point() - Vector{{0.5, 3.0}}).norm(), 1e-15);
  EXPECT_FALSE(p.closed());
}

TEST(Path, RejectsBadInput) {
  EXPECT_THROW(affine_path(Vector::Zero(2), Vector::Zero(3)), Error);
  EXPECT_THROW(affine_path(Vector::Zero(2), Vector::Zero(2), 1.0, 0.0), Error);
  EXPECT_THROW(circle_arc(Vector::Zero(3), 1.0, 0.0, 1.0), Error);
  EXPECT_THROW(spline_path({Vector::Zero(2)}), Error);
  const Path p = affine_path(Vector::Zero(2), Vector::Ones(2));
  EXPECT_THROW(p.with_cuts({0.0, 2.0}), Error);
  EXPECT_THROW(p.with_cuts({0.0, 0.6, 0.4, 1.0}), Error);
}

TEST(Path, CircleArcVelocityAndClosure) {
  const Path open = circle_arc(Vector{{0.2, -0.1}}, 0.7, 0.3, 2.0);
  EXPECT_FALSE(open.closed());
  for (double u : {0.1, 0.5, 0.9}) {
    EXPECT_LT((open.velocity(u) - numeric_velocity(open, u)).norm(), 1e-8);
    EXPECT_NEAR((open.position(u) - Vector{{0.2, -0.1}}).norm(), 0.7, 1e-15);
  }
  const Path loop = circle_arc(Vector::Zero(2), 1.0, 0.5, 0.5 + 2 * kPi);
  EXPECT_TRUE(loop.closed());
  EXPECT_TRUE(loop.start_point() == loop.end_point());
}

TEST(Path, SplineInterpolatesWithAnalyticVelocity) {
  const std::vector<Vector> pts{Vector{{0.0, 0.0}}, Vector{{1.0, 0.5}}, Vector{{0.3, -0.7}},
                                Vector{{-0.5, 0.2}}, Vector{{0.0, 1.0}}};
  const Path p = spline_path(pts, 0.0, 2.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_LT((p.position(0.5 * static_cast<double>(i)) - pts[i]).norm(), 1e-14);
  }
  for (double u : {0.13, 0.77, 1.21, 1.9}) {
    EXPECT_LT((p.velocity(u) - numeric_velocity(p, u)).norm(), 1e-7);
  }
  // Knots are declared as cuts since the spline is only C^2 across them.
  EXPECT_EQ(p.cuts(), (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
}

TEST(Path, ColatitudeLoopOnSphere) {
  const double theta = 0.9;
  const Path p = colatitude_loop(theta, 0.4);
  EXPECT_TRUE(p.closed());
  EXPECT_TRUE(p.start_point() == p.end_point());
  for (double u : {0.0, 0.25, 0.6}) {
    const Vector x = p.position(u);
    EXPECT_NEAR(x.norm(), 1.0, 1e-15);
    EXPECT_NEAR(x(2), std::cos(theta), 1e-15);
    EXPECT_NEAR(x.dot(p.velocity(u)), 0.0, 1e-14);
    EXPECT_LT((p.velocity(u) - numeric_velocity(p, u)).norm(), 1e-7);
  }
  // Counterclockwise about +z.
  const Vector x = p.position(0.0), v = p.velocity(0.0);
  EXPECT_GT(x(0) * v(1) - x(1) * v(0), 0.0);
}

TEST(Path, ColatitudeLoopChartRadius) {
  const Path p = colatitude_loop_chart(kPi / 3);
  for (double u : {0.0, 0.3, 0.8}) EXPECT_NEAR(p.position(u).norm(), std::tan(kPi / 6), 1e-15);
}

TEST(SmoothStep, FlatOutsideMiddleThird) {
  EXPECT_EQ(smooth_step(0.0), 0.0);
  EXPECT_EQ(smooth_step(1.0 / 3.0 - 1e-9), 0.0);
  EXPECT_EQ(smooth_step(2.0 / 3.0 + 1e-9), 1.0);
  EXPECT_EQ(smooth_step_derivative(0.1), 0.0);
  double prev = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_GE(smooth_step(x), prev);
    prev = smooth_step(x);
  }
  for (double x : {0.4, 0.5, 0.6}) {
    EXPECT_NEAR(smooth_step_derivative(x), (smooth_step(x + 1e-6) - smooth_step(x - 1e-6)) / 2e-6, 1e-6);
  }
}

struct NamedReparam {
  const char* name;
  Reparametrization phi;
};

class ReparametrizationProperties : public ::testing::TestWithParam<int> {
 protected:
  static std::vector<NamedReparam> all() {
    return {{"power2", power_reparametrization(-1.0, 2.0, 2.0)},
            {"power3.5", power_reparametrization(-1.0, 2.0, 3.5)},
            {"bump", bump_reparametrization(-1.0, 2.0)},
            {"sitting0.5", sitting_reparametrization(-1.0, 2.0, 0.5)},
            {"sitting0", sitting_reparametrization(-1.0, 2.0, 0.0)}};
  }
};

TEST_P(ReparametrizationProperties, FixesEndsMonotoneWithMatchingDerivative) {
  const auto r = all()[static_cast<std::size_t>(GetParam())];
  EXPECT_NEAR(r.phi.map(-1.0), -1.0, 1e-15) << r.name;
  EXPECT_NEAR(r.phi.map(2.0), 2.0, 1e-15) << r.name;
  double prev = -1.0;
  for (int i = 1; i < 300; ++i) {
    const double u = -1.0 + 3.0 * i / 300.0;
    EXPECT_GE(r.phi.map(u), prev) << r.name;
    EXPECT_GE(r.phi.derivative(u), 0.0) << r.name;
    const double fd = (r.phi.map(u + 1e-6) - r.phi.map(u - 1e-6)) / 2e-6;
    EXPECT_NEAR(r.phi.derivative(u), fd, 1e-5 * (1 + std::abs(fd))) << r.name << " at " << u;
    prev = r.phi.map(u);
  }
}

INSTANTIATE_TEST_SUITE_P(Maps, ReparametrizationProperties, ::testing::Range(0, 5));

TEST(Reparametrize, ComposesPositionAndVelocity) {
  const Path p = circle_arc(Vector::Zero(2), 1.0, 0.0, 2.0);
  const Reparametrization phi = power_reparametrization(0.0, 1.0, 2.0);
  const Path q = reparametrize(p, phi);
  for (double u : {0.1, 0.5, 0.9}) {
    EXPECT_LT((q.position(u) - p.position(u * u)).norm(), 1e-15);
    EXPECT_LT((q.velocity(u) - 2 * u * p.velocity(u * u)).norm(), 1e-14);
  }
  EXPECT_TRUE(q.start_point() == p.start_point());
}

TEST(Reparametrize, SittingMapStopsAtEnds) {
  const Path p = affine_path(Vector::Zero(2), Vector::Ones(2));
  const Path q = reparametrize(p, sitting_reparametrization(0.0, 1.0, 0.0));
  EXPECT_EQ(q.velocity(0.2).norm(), 0.0);
  EXPECT_EQ(q.velocity(0.8).norm(), 0.0);
  EXPECT_GT(q.velocity(0.5).norm(), 0.0);
}

TEST(Reparametrize, RejectsDecreasingMaps) {
  const Path p = affine_path(Vector::Zero(1), Vector::Ones(1));
  Reparametrization reverse{[](double u) { return 1.0 - u; }, [](double) { return -1.0; }, "reverse"};
  try {
    reparametrize(p, reverse);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_reparametrization);
  }
  EXPECT_THROW(power_reparametrization(0.0, 1.0, 0.5), Error);
  EXPECT_THROW(sitting_reparametrization(0.0, 1.0, 1.5), Error);
}

}  // namespace
}  // namespace pathrep
