#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pathrep/connection.hpp"
#include "support/oracles.hpp"

namespace pathrep {
namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

TEST(Connection, PolynomialExampleMatchesHandFormula) {
  const ConnectionForm a = polynomial_example();
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Vector p = oracle::random_vector(rng, 2, 2.0);
    const Vector v = oracle::random_vector(rng, 2, 2.0);
    const Matrix expected = oracle::narrow(oracle::polynomial_example_generator(p(0), p(1), v(0), v(1)));
    EXPECT_LT(distance(evaluate_connection(a, p, v).matrix(), expected), 1e-14);
  }
}

TEST(Connection, MagneticComponents) {
  const ConnectionForm a = magnetic_connection(2.5);
  const auto c = a.components(Vector{{0.3, -0.7}});
  EXPECT_LT(distance(c[0], scalar(2.5 * 0.7)), 1e-15);
  EXPECT_LT(distance(c[1], scalar(2.5 * 0.3)), 1e-15);
}

TEST(Connection, SphereLeviCivitaFormula) {
  const ConnectionForm a = sphere_levi_civita();
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Vector w = oracle::random_vector(rng, 2, 3.0);
    const Vector v = oracle::random_vector(rng, 2, 1.0);
    const double f = 2.0 * (w(0) * v(1) - w(1) * v(0)) / (1.0 + w.squaredNorm());
    EXPECT_LT(distance(evaluate_connection(a, w, v).matrix(), j * f), 1e-14);
  }
}

TEST(Connection, PolynomialTermsReproduceExample) {
  auto term = [](int comp, int ex, int ey, int r, int c, double value) {
    Matrix m = Matrix::Zero(2, 2);
    m(r, c) = value;
    return PolynomialTerm{comp, {ex, ey}, m};
  };
  const ConnectionForm built = polynomial_connection(
      2, 2,
      {term(0, 0, 1, 0, 1, 1.0), term(0, 0, 0, 1, 0, -1.0), term(0, 1, 0, 1, 1, 0.5),
       term(1, 1, 0, 0, 0, 1.0), term(1, 0, 0, 0, 1, 1.0), term(1, 1, 1, 1, 0, 1.0)});
  const ConnectionForm ref = polynomial_example();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector p = oracle::random_vector(rng, 2, 2.0);
    for (int i = 0; i < 2; ++i) EXPECT_LT(distance(built.components(p)[i], ref.components(p)[i]), 1e-15);
  }
}

TEST(Connection, PolynomialRejectsBadTerms) {
  EXPECT_THROW(polynomial_connection(2, 1, {PolynomialTerm{2, {0, 0}, scalar(1)}}), Error);
  EXPECT_THROW(polynomial_connection(2, 1, {PolynomialTerm{0, {0}, scalar(1)}}), Error);
  EXPECT_THROW(polynomial_connection(2, 1, {PolynomialTerm{0, {0, -1}, scalar(1)}}), Error);
  EXPECT_THROW(polynomial_connection(2, 1, {PolynomialTerm{0, {0, 0}, Matrix::Zero(2, 2)}}), Error);
}

TEST(Connection, EvaluateIsLinearInTangent) {
  const ConnectionForm a = polynomial_example();
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const Vector p = oracle::random_vector(rng, 2, 1.0);
    const Vector u = oracle::random_vector(rng, 2, 1.0);
    const Vector v = oracle::random_vector(rng, 2, 1.0);
    const double s = std::uniform_real_distribution<double>(-3, 3)(rng);
    const Matrix lhs = evaluate_connection(a, p, s * u + v).matrix();
    const Matrix rhs = s * evaluate_connection(a, p, u).matrix() + evaluate_connection(a, p, v).matrix();
    EXPECT_LT(distance(lhs, rhs), 1e-13);
  }
}

TEST(Connection, ValidatesDimensions) {
  const ConnectionForm a = magnetic_connection();
  EXPECT_THROW(evaluate_connection(a, Vector::Zero(3), Vector::Zero(2)), Error);
  EXPECT_THROW(evaluate_connection(a, Vector::Zero(2), Vector::Zero(1)), Error);
  EXPECT_THROW(Chart(0), Error);
  EXPECT_THROW(zero_connection(2, 0), Error);
  EXPECT_THROW(constant_connection({}), Error);
  EXPECT_THROW(constant_connection({Matrix::Zero(2, 2), Matrix::Zero(3, 3)}), Error);
}

TEST(Connection, NonFiniteValueIsEvaluationError) {
  const ConnectionForm a = magnetic_connection();
  try {
    evaluate_connection(a, Vector{{INFINITY, 0.0}}, Vector{{0.0, 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::evaluation);
  }
}

TEST(Gauge, ConstantGaugeConjugates) {
  std::mt19937_64 rng(5);
  const Matrix g = oracle::random_matrix(rng, 2, 1.0, true) + Matrix::Identity(2, 2) * 2.0;
  const ConnectionForm a = polynomial_example();
  const ConnectionForm ag = gauge_transform(a, constant_gauge(2, g));
  const Vector p{{0.4, -0.3}};
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(distance(ag.components(p)[i], g * a.components(p)[i] * g.inverse()), 1e-13);
  }
}

TEST(Gauge, PureGaugeOfZeroIsLogDerivative) {
  Matrix x(2, 2);
  x << 0.2, -1.0, 0.7, 0.1;
  const Vector c{{0.6, -1.3}};
  const ConnectionForm ag = gauge_transform(zero_connection(2, 2), exponential_gauge(c, x));
  const Vector p{{0.3, 0.8}};
  for (int i = 0; i < 2; ++i) EXPECT_LT(distance(ag.components(p)[i], c(i) * x), 1e-13);
}

TEST(Gauge, NumericPartialsMatchClosedForm) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const GaugeField g = random_smooth_gauge(2, 3, rng);
    ASSERT_TRUE(g.has_closed_form_derivative());
    const GaugeField numeric = GaugeField::from_functions(g.chart(), 3, [g](const Vector& p) { return g.value(p); });
    EXPECT_FALSE(numeric.has_closed_form_derivative());
    const Vector p = oracle::random_vector(rng, 2, 1.0);
    const auto exact = g.partials(p);
    const auto central = numeric.partials(p, {1e-4, DifferenceRule::central});
    const auto rich = numeric.partials(p, {1e-3, DifferenceRule::richardson});
    for (int i = 0; i < 2; ++i) {
      const double scale = 1 + norm(exact[i]);
      EXPECT_LT(distance(central[i], exact[i]), 1e-6 * scale);
      EXPECT_LT(distance(rich[i], exact[i]), 1e-8 * scale);
    }
  }
}

TEST(Gauge, InverseFieldPartials) {
  std::mt19937_64 rng(7);
  const GaugeField g = random_smooth_gauge(2, 2, rng);
  const GaugeField gi = g.inverse();
  const Vector p{{0.1, 0.2}};
  EXPECT_LT(distance(gi.value(p) * g.value(p), Matrix::Identity(2, 2)), 1e-12);
  const auto dg = g.partials(p);
  const auto dgi = gi.partials(p);
  // d(g g^-1) = 0.
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(norm(dg[i] * gi.value(p) + g.value(p) * dgi[i]), 1e-11);
  }
}

TEST(Gauge, SingularGaugeIsReported) {
  const GaugeField g = GaugeField::from_functions(Chart(1), 1, [](const Vector& p) { return scalar(p(0)); });
  try {
    g.jet(Vector::Zero(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_gauge);
  }
  EXPECT_NO_THROW(g.jet(Vector::Ones(1)));
}

TEST(Gauge, TransformComposes) {
  // (A^g)^h = A^(hg) with A^g = g A g^-1 + dg g^-1.
  std::mt19937_64 rng(8);
  const GaugeField g = random_smooth_gauge(2, 2, rng);
  const GaugeField h = random_smooth_gauge(2, 2, rng);
  const GaugeField hg = GaugeField::from_functions(
      Chart(2), 2, [g, h](const Vector& p) { return Matrix(h.value(p) * g.value(p)); },
      [g, h](const Vector& p) {
        const auto dg = g.partials(p);
        const auto dh = h.partials(p);
        std::vector<Matrix> out;
        for (int i = 0; i < 2; ++i) out.push_back(dh[i] * g.value(p) + h.value(p) * dg[i]);
        return out;
      });
  const ConnectionForm a = polynomial_example();
  const ConnectionForm twice = gauge_transform(gauge_transform(a, g), h);
  const ConnectionForm once = gauge_transform(a, hg);
  for (int k = 0; k < 10; ++k) {
    const Vector p = oracle::random_vector(rng, 2, 1.0);
    for (int i = 0; i < 2; ++i) EXPECT_LT(distance(twice.components(p)[i], once.components(p)[i]), 1e-11);
  }
}

TEST(Sampled, GridNodes) {
  const SampleGrid grid{Vector{{0.0, -1.0}}, Vector{{1.0, 1.0}}, {3, 5}};
  EXPECT_EQ(grid.size(), 15u);
  EXPECT_LT((grid.node(0) - Vector{{0.0, -1.0}}).norm(), 1e-15);
  EXPECT_LT((grid.node(14) - Vector{{1.0, 1.0}}).norm(), 1e-15);
}

TEST(Sampled, ReproducesAffineFieldsExactly) {
  // A_x = 1 + 2x - y, A_y = 0.5 y.
  const ConnectionForm affine = polynomial_connection(
      2, 1,
      {PolynomialTerm{0, {0, 0}, scalar(1)}, PolynomialTerm{0, {1, 0}, scalar(2)},
       PolynomialTerm{0, {0, 1}, scalar(-1)}, PolynomialTerm{1, {0, 1}, scalar(0.5)}});
  const ConnectionForm s = sample_connection(affine, SampleGrid{Vector{{-1.0, -1.0}}, Vector{{1.0, 1.0}}, {7, 6}});
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const Vector p = oracle::random_vector(rng, 2, 1.0);
    for (int i = 0; i < 2; ++i) EXPECT_LT(distance(s.components(p)[i], affine.components(p)[i]), 1e-13);
  }
}

TEST(Sampled, InteriorErrorShrinksWithSpacing) {
  const ConnectionForm a = sphere_levi_civita();
  auto max_error = [&](int nodes) {
    const ConnectionForm s = sample_connection(a, SampleGrid{Vector{{-2.0, -2.0}}, Vector{{2.0, 2.0}}, {nodes, nodes}});
    double worst = 0;
    std::mt19937_64 rng(10);
    for (int k = 0; k < 200; ++k) {
      const Vector p = oracle::random_vector(rng, 2, 1.0);
      for (int i = 0; i < 2; ++i) worst = std::max(worst, distance(s.components(p)[i], a.components(p)[i]));
    }
    return worst;
  };
  const double coarse = max_error(21);
  const double fine = max_error(41);
  EXPECT_LT(fine, coarse / 5);
  EXPECT_LT(fine, 1e-3);
}

TEST(Sampled, RejectsBadGrids) {
  EXPECT_THROW(sample_connection(magnetic_connection(), SampleGrid{Vector{{0.0}}, Vector{{1.0}}, {4}}), Error);
  EXPECT_THROW(sample_connection(magnetic_connection(), SampleGrid{Vector{{0.0, 0.0}}, Vector{{1.0, 1.0}}, {1, 4}}), Error);
}

TEST(Uniform, DeterministicAndInRange) {
  std::mt19937_64 a(42), b(42);
  for (int k = 0; k < 1000; ++k) {
    const double x = uniform(a, -2.0, 3.0);
    EXPECT_EQ(x, uniform(b, -2.0, 3.0));
    EXPECT_GE(x, -2.0);
    EXPECT_LT(x, 3.0);
  }
}

}  // namespace
}  // namespace pathrep
