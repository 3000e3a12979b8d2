#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pathrep/matcore.hpp"
#include "support/oracles.hpp"

namespace pathrep {
namespace {

TEST(EndMap, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(EndMap(Matrix::Zero(2, 3)), Error);
  Matrix m = Matrix::Identity(2, 2);
  m(1, 0) = std::nan("");
  try {
    EndMap bad(m);
    FAIL() << "accepted NaN";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_input);
  }
}

TEST(EndMap, FieldIsRealOnlyWithoutImaginaryParts) {
  EXPECT_EQ(EndMap::identity(3).field(), Field::real);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = Complex(0.0, 1e-300);
  EXPECT_EQ(EndMap(m).field(), Field::complex);
}

TEST(EndMap, ArithmeticChecksDimensions) {
  EXPECT_THROW(EndMap::zero(2) + EndMap::zero(3), Error);
  EXPECT_THROW(EndMap::zero(2) * EndMap::zero(3), Error);
  const EndMap a(rotation(0.3));
  EXPECT_LT(distance((a * Complex(2.0)).matrix(), (a + a).matrix()), 1e-15);
}

TEST(GaugeMap, RejectsSingular) {
  Matrix m(2, 2);
  m << 1, 2, 2, 4;
  try {
    GaugeMap g(m);
    FAIL() << "accepted a singular matrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_matrix);
  }
  Matrix tiny = Matrix::Identity(2, 2) * 1e-11;
  EXPECT_THROW(GaugeMap{tiny}, Error);
  EXPECT_NO_THROW(GaugeMap(tiny, 1e-12));
}

TEST(Expm, ZeroAndDiagonal) {
  EXPECT_EQ(expm(Matrix::Zero(3, 3)), Matrix::Identity(3, 3));
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1.5;
  d(1, 1) = Complex(-2.0, 0.5);
  d(2, 2) = Complex(0.0, std::numbers::pi);
  const Matrix e = expm(d);
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(e(i, i) - std::exp(d(i, i))), 1e-14 * std::abs(std::exp(d(i, i))) + 1e-15);
}

TEST(Expm, RotationGenerator) {
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  for (double t : {0.1, 1.0, 2.5, 10.0, -7.0}) {
    EXPECT_LT(distance(expm(j * t), rotation(t)), 1e-13 * (1 + std::abs(t)));
  }
}

struct ExpmCase {
  int dim;
  double scale;
  bool complex;
};

class ExpmAgainstSeries : public ::testing::TestWithParam<ExpmCase> {};

TEST_P(ExpmAgainstSeries, MatchesExtendedPrecision) {
  const auto c = GetParam();
  std::mt19937_64 rng(1234 + c.dim);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = oracle::random_matrix(rng, c.dim, c.scale, c.complex);
    const Matrix ref = oracle::series_exp(a);
    EXPECT_LT(distance(expm(a), ref), 1e-13 * norm(ref) * (1 + norm(a))) << a;
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, ExpmAgainstSeries,
                         ::testing::Values(ExpmCase{1, 0.5, false}, ExpmCase{2, 0.01, false},
                                           ExpmCase{2, 1.0, true}, ExpmCase{3, 3.0, true},
                                           ExpmCase{4, 0.3, false}, ExpmCase{5, 2.0, true}));

TEST(Expm, DeterminantIsExpTrace) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const Matrix a = oracle::random_matrix(rng, 3, 1.5, true);
    const Complex det = expm(a).determinant();
    const Complex expected = std::exp(a.trace());
    EXPECT_LT(std::abs(det - expected), 1e-12 * std::abs(expected));
  }
}

TEST(Expm, CommutingSumFactors) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = oracle::random_matrix(rng, 3, 1.0, true);
    const Matrix b = a * a * Complex(0.3) + a * Complex(-0.2);
    EXPECT_LT(distance(expm(a + b), expm(a) * expm(b)), 1e-12 * norm(expm(a + b)));
  }
}

TEST(MatrixExponential, ValidatesAndReturnsGauge) {
  const GaugeMap g = matrix_exponential(EndMap::zero(2));
  EXPECT_EQ(g.matrix(), Matrix::Identity(2, 2));
}

TEST(Inverse, RoundTripAndSingular) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = oracle::random_matrix(rng, 4, 1.0, true) + Matrix::Identity(4, 4) * 3.0;
    EXPECT_LT(distance(inverse(a) * a, Matrix::Identity(4, 4)), 1e-13);
  }
  EXPECT_THROW(inverse(Matrix::Zero(2, 2)), Error);
  const GaugeMap g(rotation(0.4));
  EXPECT_LT(distance(matrix_inverse(g).matrix(), rotation(-0.4)), 1e-15);
}

TEST(Norms, FrobeniusAndOperator) {
  Matrix m(2, 2);
  m << 3, 0, 0, 4;
  EXPECT_DOUBLE_EQ(norm(m), 5.0);
  EXPECT_DOUBLE_EQ(norm(m, Norm::operator2), 4.0);
  EXPECT_NEAR(condition_number(m), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(smallest_singular_value(m), 3.0, 1e-15);
  EXPECT_THROW(distance(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), Error);
}

TEST(Kron, MixedProductProperty) {
  std::mt19937_64 rng(10);
  const Matrix a = oracle::random_matrix(rng, 2, 1.0, true);
  const Matrix b = oracle::random_matrix(rng, 3, 1.0, true);
  const Matrix c = oracle::random_matrix(rng, 2, 1.0, true);
  const Matrix d = oracle::random_matrix(rng, 3, 1.0, true);
  EXPECT_LT(distance(kron(a, b) * kron(c, d), kron(a * c, b * d)), 1e-13);
  // First factor is the slow index.
  EXPECT_EQ(kron(a, b)(3 + 1, 3 + 2), a(1, 1) * b(1, 2));
}

TEST(Rotation, IsOrthogonalWithUnitDeterminant) {
  for (double t : {-3.0, -0.5, 0.0, 1.0, 6.0}) {
    const Matrix r = rotation(t);
    EXPECT_LT(distance(r.adjoint() * r, Matrix::Identity(2, 2)), 1e-15);
    EXPECT_NEAR(r.determinant().real(), 1.0, 1e-15);
  }
}

}  // namespace
}  // namespace pathrep
