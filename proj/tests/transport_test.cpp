#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pathrep/transport.hpp"
#include "pathrep_cli/report.hpp"
#include "support/oracles.hpp"

namespace pathrep {
namespace {

constexpr double kPi = std::numbers::pi;

Path random_spline(std::mt19937_64& rng) {
  std::vector<Vector> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(oracle::random_vector(rng, 2, 1.0));
  return spline_path(pts);
}

TEST(Transport, ConstantFormAlongLineIsExponential) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    const std::vector<Matrix> x{oracle::random_matrix(rng, 3, 1.0, true), oracle::random_matrix(rng, 3, 1.0, true)};
    const ConnectionForm a = constant_connection(x);
    const Vector v = oracle::random_vector(rng, 2, 1.0);
    const Path p = affine_path(oracle::random_vector(rng, 2, 1.0), v, 0.0, 1.5);
    const Matrix gen = (v(0) * x[0] + v(1) * x[1]) * 1.5;
    const Matrix expected = oracle::series_exp(gen);
    const double scale = norm(expected);
    EXPECT_LT(distance(transport(a, p).map.matrix(), expected), 1e-11 * scale);
    IntegratorConfig product;
    product.method = TransportMethod::product;
    for (ProductRule rule : {ProductRule::left, ProductRule::midpoint}) {
      product.rule = rule;
      // All factors commute, so the product is exact up to rounding.
      EXPECT_LT(distance(transport(a, p, product).map.matrix(), expected), 1e-11 * scale);
    }
  }
}

TEST(Transport, MagneticArcMatchesFlux) {
  for (double strength : {0.5, 1.0, 3.0}) {
    const ConnectionForm a = magnetic_connection(strength);
    const Path p = circle_arc(Vector{{0.3, -0.2}}, 0.8, 0.2, 2.6);
    const double flux = oracle::magnetic_arc_flux(0.3, -0.2, 0.8, 0.2, 2.6);
    const Matrix f = transport(a, p).map.matrix();
    EXPECT_NEAR(f(0, 0).real(), std::exp(strength * flux), 1e-11 * std::exp(strength * flux));
    EXPECT_EQ(f(0, 0).imag(), 0.0);
  }
}

TEST(Transport, MagneticFluxBySimpsonOnSpline) {
  std::mt19937_64 rng(2);
  const Path p = random_spline(rng);
  const auto integrand = [&](long double u) {
    const Vector x = p.position(static_cast<double>(u));
    const Vector v = p.velocity(static_cast<double>(u));
    return static_cast<long double>(x(0) * v(1) - x(1) * v(0));
  };
  // The integrand is only piecewise smooth; integrate knot to knot.
  long double flux = 0;
  for (std::size_t i = 0; i + 1 < p.cuts().size(); ++i) flux += oracle::simpson(integrand, p.cuts()[i], p.cuts()[i + 1], 2000);
  const Matrix f = transport(magnetic_connection(), p).map.matrix();
  EXPECT_NEAR(f(0, 0).real(), std::exp(static_cast<double>(flux)), 1e-10);
}

TEST(Transport, NonAbelianMatchesMagnusReference) {
  std::mt19937_64 rng(3);
  for (const auto& a : {polynomial_example(), sphere_levi_civita()}) {
    for (int k = 0; k < 3; ++k) {
      const Path p = random_spline(rng);
      Matrix ref = Matrix::Identity(2, 2);
      for (std::size_t i = 0; i + 1 < p.cuts().size(); ++i) {
        ref = oracle::reference_transport(a, p, p.cuts()[i], p.cuts()[i + 1], 500) * ref;
      }
      EXPECT_LT(distance(transport(a, p).map.matrix(), ref), 1e-10 * norm(ref)) << a.name();
    }
  }
}

TEST(Transport, PolynomialExampleHandGeneratorAgrees) {
  // Reference built from the written-out generator, not from the library form.
  const Path p = circle_arc(Vector{{0.1, 0.2}}, 0.6, 0.0, 3.0);
  const oracle::Generator m = [&](long double u) {
    const Vector x = p.position(static_cast<double>(u));
    const Vector v = p.velocity(static_cast<double>(u));
    return oracle::polynomial_example_generator(x(0), x(1), v(0), v(1));
  };
  const Matrix ref = oracle::narrow(oracle::magnus4(m, 0.0L, 1.0L, 2000, 2));
  EXPECT_LT(distance(transport(polynomial_example(), p).map.matrix(), ref), 1e-11);
}

TEST(Transport, TrivialIntervalIsExactIdentity) {
  const Path p = affine_path(Vector::Zero(2), Vector::Ones(2));
  const Matrix f = transport(polynomial_example(), p, 0.4, 0.4).map.matrix();
  EXPECT_EQ(f, Matrix::Identity(2, 2));
}

TEST(Transport, BackwardIsInverse) {
  std::mt19937_64 rng(4);
  const Path p = random_spline(rng);
  const ConnectionForm a = polynomial_example();
  const Matrix fwd = transport(a, p, 0.2, 0.9).map.matrix();
  const Matrix back = transport(a, p, 0.9, 0.2).map.matrix();
  EXPECT_LT(distance(back * fwd, Matrix::Identity(2, 2)), 1e-11);
}

TEST(Transport, CocycleProperty) {
  std::mt19937_64 rng(5);
  const std::vector<ConnectionForm> forms{polynomial_example(), sphere_levi_civita(), magnetic_connection(2.0)};
  for (int k = 0; k < 60; ++k) {
    const ConnectionForm& a = forms[static_cast<std::size_t>(k) % forms.size()];
    const Path p = random_spline(rng);
    std::vector<double> t{uniform(rng), uniform(rng), uniform(rng)};
    std::sort(t.begin(), t.end());
    EXPECT_LT(cocycle_residual(a, p, t[0], t[1], t[2]), 1e-9) << k;
  }
  EXPECT_THROW(cocycle_residual(forms[0], random_spline(rng), 0.5, 0.2, 0.9), Error);
}

TEST(Transport, GaugeCovariance) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    const ConnectionForm a = k % 2 ? polynomial_example() : sphere_levi_civita();
    const GaugeField g = random_smooth_gauge(2, 2, rng);
    const ConnectionForm ag = gauge_transform(a, g);
    const Path p = random_spline(rng);
    const Matrix f = transport(a, p).map.matrix();
    const Matrix fg = transport(ag, p).map.matrix();
    const Matrix lhs = g.value(p.end_point()) * f;
    const Matrix rhs = fg * g.value(p.start_point());
    EXPECT_LT(distance(lhs, rhs), 1e-8 * (1 + norm(lhs)));
  }
}

TEST(Transport, ReparametrizationInvariance) {
  std::mt19937_64 rng(7);
  const ConnectionForm a = polynomial_example();
  const Path p = random_spline(rng);
  const Matrix base = detail::integrate_ode(a, p, 0.0, 1.0, 8192);
  for (const auto& phi : {power_reparametrization(0.0, 1.0, 2.0), bump_reparametrization(0.0, 1.0),
                          sitting_reparametrization(0.0, 1.0, 0.0)}) {
    const Matrix q = detail::integrate_ode(a, reparametrize(p, phi), 0.0, 1.0, 8192);
    EXPECT_LT(distance(q, base), 1e-8) << phi.name;
  }
}

TEST(Transport, ConstantPathIsIdentity) {
  const Path still = constant_path(Vector{{0.3, 0.4}});
  for (const auto& a : {polynomial_example(), sphere_levi_civita()}) {
    EXPECT_LT(distance(transport(a, still).map.matrix(), Matrix::Identity(2, 2)), 1e-15);
  }
}

TEST(Transport, ConvergenceOrders) {
  const ConnectionForm a = polynomial_example();
  const Path p = circle_arc(Vector{{0.1, 0.2}}, 0.6, 0.0, 3.0);
  const Matrix ref = oracle::reference_transport(a, p, 0.0, 1.0, 2000);
  std::vector<double> ns, left, mid, rk;
  for (int n = 16; n <= 256; n *= 2) {
    ns.push_back(n);
    left.push_back(distance(transport_product(a, p, 0.0, 1.0, n, ProductRule::left).map.matrix(), ref));
    mid.push_back(distance(transport_product(a, p, 0.0, 1.0, n, ProductRule::midpoint).map.matrix(), ref));
    rk.push_back(distance(transport_ode(a, p, 0.0, 1.0, n).map.matrix(), ref));
  }
  EXPECT_NEAR(cli::fitted_order(ns, left), 1.0, 0.1);
  EXPECT_NEAR(cli::fitted_order(ns, mid), 2.0, 0.1);
  EXPECT_NEAR(cli::fitted_order(ns, rk), 4.0, 0.3);
}

TEST(Transport, SplitsAtCutsKeepsFourthOrder) {
  // A path with a kink at u = 0.37: without splitting, RK4 straddles it.
  const Path kinked(
      Chart(2), 0.0, 1.0,
      [](double u) { return u < 0.37 ? Vector{{u, 0.0}} : Vector{{0.37, u - 0.37}}; },
      [](double u) { return u < 0.37 ? Vector{{1.0, 0.0}} : Vector{{0.0, 1.0}}; }, {0.0, 0.37, 1.0});
  const ConnectionForm a = polynomial_example();
  const Matrix ref = oracle::reference_transport(a, kinked, 0.37, 1.0, 500) *
                     oracle::reference_transport(a, kinked, 0.0, 0.37, 500);
  EXPECT_LT(distance(transport_ode(a, kinked, 0.0, 1.0, 200).map.matrix(), ref), 1e-9);
}

TEST(Transport, ErrorEstimateTracksError) {
  const ConnectionForm a = polynomial_example();
  const Path p = circle_arc(Vector{{0.1, 0.2}}, 0.6, 0.0, 3.0);
  const Matrix ref = oracle::reference_transport(a, p, 0.0, 1.0, 2000);
  IntegratorConfig cfg;
  cfg.method = TransportMethod::product;
  cfg.step = 1.0 / 128;
  const TransportResult r = transport(a, p, cfg);
  const double err = distance(r.map.matrix(), ref);
  EXPECT_GT(r.error_estimate, 0.2 * err);
  EXPECT_LT(r.error_estimate, 5.0 * err);
  EXPECT_EQ(r.steps, 128);
}

TEST(Transport, Validation) {
  const Path p = affine_path(Vector::Zero(2), Vector::Ones(2));
  EXPECT_THROW(transport(polynomial_example(), p, 0.0, 2.0), Error);
  EXPECT_THROW(transport(polynomial_example(), affine_path(Vector::Zero(3), Vector::Ones(3))), Error);
  EXPECT_THROW(transport_ode(polynomial_example(), p, 0.0, 1.0, 0), Error);
  EXPECT_THROW(transport_product(polynomial_example(), p, 0.0, 1.0, 0, ProductRule::left), Error);
  IntegratorConfig bad;
  bad.step = 0;
  EXPECT_THROW(transport(polynomial_example(), p, bad), Error);
}

TEST(Transport, BlowUpIsEvaluationError) {
  const ConnectionForm a = constant_connection({Matrix::Constant(1, 1, 800.0)});
  const Path p = affine_path(Vector::Zero(1), Vector::Ones(1), 0.0, 10.0);
  try {
    transport(a, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::evaluation);
  }
}

TEST(Transport, StepsFor) {
  IntegratorConfig cfg;
  cfg.step = 0.1;
  EXPECT_EQ(cfg.steps_for(0.0, 1.0), 10);
  EXPECT_EQ(cfg.steps_for(1.0, 0.0), 10);
  EXPECT_GE(cfg.steps_for(0.0, 0.01), 1);
}

}  // namespace
}  // namespace pathrep
