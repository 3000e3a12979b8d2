#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pathrep/bordism.hpp"
#include "support/oracles.hpp"

namespace pathrep {
namespace {

constexpr double kPi = std::numbers::pi;

// Index-by-index Kronecker product, first factor outer.
Matrix kron_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_input;
}

struct SphereFixture : ::testing::Test {
  GlobalBundle b = sphere_tangent_bundle();
  Path loop = colatitude_loop(1.1, 0.4);
  Vector x = loop.start_point();
  int chart = b.atlas().deepest_chart(x);
};

TEST_F(SphereFixture, SnakeIsIdentityForBothSigns) {
  const Path open = colatitude_loop(1.1, 0.4).with_cuts({0.0, 0.1});
  for (const Path& p : {loop, open}) {
    for (Sign s : {Sign::plus, Sign::minus}) {
      const LinearMap m = evaluate_bordism(snake_word(x, chart, p, s), b);
      EXPECT_EQ(m.source.tags, std::vector<Sign>{s});
      EXPECT_LT(distance(m.matrix, Matrix::Identity(2, 2), Norm::operator2), 1e-12) << to_string(s);
    }
  }
}

TEST_F(SphereFixture, SnakeCancelsEvenWithCoarseTransport) {
  BordismOptions coarse;
  coarse.integrator.method = TransportMethod::product;
  coarse.integrator.step = 0.25;
  EXPECT_LT(snake_residual(b, x, chart, loop, Sign::plus, coarse), 1e-12);
  EXPECT_LT(snake_residual(b, x, chart, loop, Sign::minus, coarse), 1e-12);
}

TEST_F(SphereFixture, CircleIsTraceOfHolonomy) {
  GlobalTransportOptions frames;
  frames.source_chart = chart;
  frames.target_chart = chart;
  const Matrix h = global_transport(b, loop, frames).map.matrix();
  const LinearMap m = evaluate_bordism(circle_word(x, chart, loop), b);
  ASSERT_EQ(m.matrix.rows(), 1);
  ASSERT_EQ(m.matrix.cols(), 1);
  EXPECT_LT(std::abs(m.matrix(0, 0) - h.trace()), 1e-12);
  EXPECT_NEAR(m.matrix(0, 0).real(), 2 * std::cos(oracle::cap_area(1.1)), 1e-8);
}

TEST_F(SphereFixture, ArcsUseTransportAndItsDual) {
  const Path open = loop.with_cuts({0.0, 0.1});
  GlobalTransportOptions frames;
  frames.source_chart = chart;
  frames.target_chart = chart;
  const Matrix f = global_transport(b, open, frames).map.matrix();
  EXPECT_LT(distance(evaluate_bordism(arc_word(open, Sign::plus, chart), b).matrix, f), 1e-14);
  const Matrix dual = evaluate_bordism(arc_word(open, Sign::minus, chart), b).matrix;
  EXPECT_LT(distance(dual, f.inverse().transpose()), 1e-12);
  // The pairing is preserved: dual^T f = I.
  EXPECT_LT(distance(dual.transpose() * f, Matrix::Identity(2, 2)), 1e-12);
}

TEST_F(SphereFixture, TensorIsKronecker) {
  const Path first = loop.with_cuts({0.0, 0.1});
  const Path other = colatitude_loop(2.0, 0.2);
  const int other_chart = b.atlas().deepest_chart(other.start_point());
  const BordismWord a = arc_word(first, Sign::plus, chart);
  const BordismWord c = arc_word(other, Sign::minus, other_chart);
  const Matrix fa = evaluate_bordism(a, b).matrix;
  const Matrix fc = evaluate_bordism(c, b).matrix;
  const LinearMap both = evaluate_bordism(tensor(a, c), b);
  EXPECT_EQ(both.source.tags, (std::vector<Sign>{Sign::plus, Sign::minus}));
  EXPECT_EQ(both.source.dimension(), 4);
  EXPECT_LT(distance(both.matrix, kron_oracle(fa, fc)), 1e-13);
  // Padding: a one-slice word against the three-slice snake.
  const LinearMap padded = evaluate_bordism(tensor(a, snake_word(x, chart, loop)), b);
  EXPECT_LT(distance(padded.matrix, kron_oracle(fa, Matrix::Identity(2, 2))), 1e-11);
}

TEST_F(SphereFixture, PermutationSlice) {
  BordismWord w;
  w.source.points = {{Sign::plus, x, chart}, {Sign::minus, x, chart}};
  w.slices = {{Perm{{1, 0}}}};
  const LinearMap m = evaluate_bordism(w, b);
  EXPECT_EQ(m.target.tags, (std::vector<Sign>{Sign::minus, Sign::plus}));
  EXPECT_EQ(m.matrix, permutation_matrix({1, 0}, 2));
}

TEST_F(SphereFixture, CoevAndEvIndexConvention) {
  for (PairOrder order : {PairOrder::plus_minus, PairOrder::minus_plus}) {
    BordismWord up;
    up.slices = {{Coev{x, chart, order}}};
    const Matrix col = evaluate_bordism(up, b).matrix;
    BordismWord down;
    down.source.points = {{order == PairOrder::plus_minus ? Sign::plus : Sign::minus, x, chart},
                          {order == PairOrder::plus_minus ? Sign::minus : Sign::plus, x, chart}};
    down.slices = {{Ev{x, chart, order}}};
    const Matrix row = evaluate_bordism(down, b).matrix;
    ASSERT_EQ(col.rows(), 4);
    ASSERT_EQ(row.cols(), 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(col(i * 2 + j, 0), i == j ? Complex(1) : Complex(0));
        EXPECT_EQ(row(0, i * 2 + j), i == j ? Complex(1) : Complex(0));
      }
  }
}

TEST_F(SphereFixture, EmptyWordIsUnit) {
  const LinearMap m = evaluate_bordism(BordismWord{}, b);
  EXPECT_EQ(m.source.dimension(), 1);
  EXPECT_EQ(m.matrix, Matrix::Identity(1, 1));
}

TEST_F(SphereFixture, CompositionErrors) {
  const Vector elsewhere = colatitude_loop(1.1, 0.5).start_point();
  BordismWord wrong_place;
  wrong_place.source.points = {{Sign::minus, x, chart}, {Sign::plus, x, chart}};
  wrong_place.slices = {{Ev{elsewhere, chart, PairOrder::minus_plus}}};
  EXPECT_EQ(code_of([&] { evaluate_bordism(wrong_place, b); }), ErrorCode::composition);

  BordismWord wrong_sign = wrong_place;
  wrong_sign.source.points = {{Sign::plus, x, chart}, {Sign::plus, x, chart}};
  wrong_sign.slices = {{Ev{x, chart, PairOrder::minus_plus}}};
  EXPECT_EQ(code_of([&] { word_target(wrong_sign, b); }), ErrorCode::composition);

  BordismWord leftover;
  leftover.source.points = {{Sign::plus, x, chart}, {Sign::plus, x, chart}};
  leftover.slices = {{identity_token()}};
  EXPECT_EQ(code_of([&] { word_target(leftover, b); }), ErrorCode::composition);

  BordismWord bad_target = arc_word(loop, Sign::plus, chart);
  bad_target.target->points[0].sign = Sign::minus;
  EXPECT_EQ(code_of([&] { word_target(bad_target, b); }), ErrorCode::composition);

  BordismWord arc_from_elsewhere = arc_word(loop, Sign::plus, chart);
  arc_from_elsewhere.source.points[0].location = elsewhere;
  EXPECT_EQ(code_of([&] { word_target(arc_from_elsewhere, b); }), ErrorCode::composition);

  EXPECT_EQ(code_of([&] { snake_word(elsewhere, chart, loop); }), ErrorCode::composition);
}

TEST(Bordism, PermutationMatrixMovesFactors) {
  std::mt19937_64 rng(1);
  const std::vector<int> sigma{2, 0, 1};
  const int d = 3;
  const Matrix p = permutation_matrix(sigma, d);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Matrix> v;
    for (int k = 0; k < 3; ++k) v.push_back(oracle::random_matrix(rng, d, 1.0, false).col(0));
    const Matrix in = kron_oracle(kron_oracle(v[0], v[1]), v[2]);
    const Matrix out = kron_oracle(kron_oracle(v[2], v[0]), v[1]);
    EXPECT_LT(distance(p * in, out), 1e-13);
  }
  EXPECT_LT(distance(p.adjoint() * p, Matrix::Identity(27, 27)), 1e-15);
  EXPECT_THROW(permutation_matrix({0, 0}, 2), Error);
}

TEST(Bordism, DualTransportIsInverseTranspose) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const Matrix m = oracle::random_matrix(rng, 3, 1.0, false) + 2.0 * Matrix::Identity(3, 3);
    const Matrix d = dual_transport(GaugeMap(m)).matrix();
    EXPECT_LT(distance(d.transpose() * m, Matrix::Identity(3, 3)), 1e-12);
  }
}

TEST(Bordism, CircleOnFlatCircleBundle) {
  for (double phi : {0.0, 0.7, 2.5}) {
    const GlobalBundle b = circle_bundle(rotation(phi), identity_matrix(2));
    const Path loop = circle_loop(kPi / 2);
    const LinearMap m = evaluate_bordism(circle_word(loop.start_point(), 0, loop), b);
    EXPECT_NEAR(m.matrix(0, 0).real(), 2 * std::cos(phi), 1e-12);
    EXPECT_LT(snake_residual(b, loop.start_point(), 0, loop), 1e-12);
  }
}

TEST(Bordism, ObjectPointsMustLieInTheirChart) {
  const GlobalBundle b = circle_bundle(rotation(0.3), identity_matrix(2));
  ObjectConfig cfg;
  cfg.points = {{Sign::plus, Vector::Constant(1, -kPi / 2), 0}};
  EXPECT_THROW(evaluate_object(cfg, b), Error);
  cfg.points[0].chart = 1;
  EXPECT_EQ(evaluate_object(cfg, b).dimension(), 2);
}

}  // namespace
}  // namespace pathrep
