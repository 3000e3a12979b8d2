#include "pathrep/matcore.hpp"

#include <array>
#include <cmath>

namespace pathrep {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::singular_matrix: return "singular-matrix";
    case ErrorCode::singular_gauge: return "singular-gauge";
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::invalid_reparametrization: return "invalid-reparametrization";
    case ErrorCode::oracle: return "oracle";
    case ErrorCode::sampling: return "sampling";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::inconsistent_bundle: return "inconsistent-bundle";
    case ErrorCode::not_a_rotation: return "not-a-rotation";
    case ErrorCode::composition: return "composition";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        return false;
      }
    }
  }
  return true;
}

Matrix identity_matrix(int dim) { return Matrix::Identity(dim, dim); }

namespace {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::invalid_input,
                std::string(what) + " must be a non-empty square matrix");
  }
  if (!all_finite(m)) {
    throw Error(ErrorCode::invalid_input,
                std::string(what) + " has non-finite entries");
  }
}

double one_norm(const Matrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

EndMap::EndMap(Matrix m) : m_(std::move(m)) { require_square_finite(m_, "EndMap"); }

EndMap EndMap::zero(int dim) { return EndMap(Matrix::Zero(dim, dim)); }
EndMap EndMap::identity(int dim) { return EndMap(identity_matrix(dim)); }

Field EndMap::field() const {
  return (m_.imag().array() == 0.0).all() ? Field::real : Field::complex;
}

EndMap EndMap::operator+(const EndMap& other) const {
  if (dim() != other.dim()) throw Error(ErrorCode::invalid_input, "dimension mismatch");
  return EndMap(m_ + other.m_);
}

EndMap EndMap::operator-(const EndMap& other) const {
  if (dim() != other.dim()) throw Error(ErrorCode::invalid_input, "dimension mismatch");
  return EndMap(m_ - other.m_);
}

EndMap EndMap::operator*(const EndMap& other) const {
  if (dim() != other.dim()) throw Error(ErrorCode::invalid_input, "dimension mismatch");
  return EndMap(m_ * other.m_);
}

EndMap EndMap::operator*(Complex scale) const { return EndMap(m_ * scale); }

GaugeMap::GaugeMap(Matrix m, double singular_tolerance) : m_(std::move(m)) {
  require_square_finite(m_, "GaugeMap");
  const double sigma = smallest_singular_value(m_);
  if (!(sigma > singular_tolerance)) {
    throw Error(ErrorCode::singular_matrix,
                "smallest singular value " + std::to_string(sigma) +
                    " is not above tolerance");
  }
}

GaugeMap GaugeMap::identity(int dim) { return GaugeMap(identity_matrix(dim)); }

GaugeMap GaugeMap::operator*(const GaugeMap& other) const {
  if (dim() != other.dim()) throw Error(ErrorCode::invalid_input, "dimension mismatch");
  return GaugeMap(m_ * other.m_);
}

double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s.maxCoeff() / s.minCoeff();
}

double norm(const Matrix& m, Norm kind) {
  if (kind == Norm::frobenius) return m.norm();
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

namespace {

// Pade coefficients b_k of the [m/m] approximant to exp.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// 1-norm bounds below which the corresponding degree needs no scaling.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& b) {
  const Eigen::Index d = a.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix a2 = a * a;
  Matrix power = id;
  Matrix u_inner = Matrix::Zero(d, d);
  Matrix v = Matrix::Zero(d, d);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const Eigen::Index d = a.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& m) {
  const Eigen::Index d = m.rows();
  if (d == 1) {
    Matrix r(1, 1);
    r(0, 0) = std::exp(m(0, 0));
    return r;
  }
  const double n1 = one_norm(m);
  if (n1 == 0.0) return Matrix::Identity(d, d);
  if (n1 <= kTheta3) return pade_low(m, kPade3);
  if (n1 <= kTheta5) return pade_low(m, kPade5);
  if (n1 <= kTheta7) return pade_low(m, kPade7);
  if (n1 <= kTheta9) return pade_low(m, kPade9);
  int squarings = 0;
  if (n1 > kTheta13) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(n1 / kTheta13))));
  }
  Matrix r = pade13(m / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

GaugeMap matrix_exponential(const EndMap& m) { return GaugeMap(expm(m.matrix())); }

Matrix inverse(const Matrix& m, double singular_tolerance) {
  require_square_finite(m, "matrix");
  const double sigma = smallest_singular_value(m);
  if (!(sigma > singular_tolerance)) {
    throw Error(ErrorCode::singular_matrix,
                "cannot invert: smallest singular value " + std::to_string(sigma));
  }
  if (m.rows() == 1) {
    Matrix r(1, 1);
    r(0, 0) = 1.0 / m(0, 0);
    return r;
  }
  return m.fullPivLu().inverse();
}

GaugeMap matrix_inverse(const GaugeMap& m) { return GaugeMap(inverse(m.matrix())); }

double distance(const Matrix& a, const Matrix& b, Norm kind) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::invalid_input, "dimension mismatch in distance");
  }
  return norm(a - b, kind);
}

double operator_distance(const EndMap& a, const EndMap& b, Norm kind) {
  return distance(a.matrix(), b.matrix(), kind);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

Matrix rotation(double angle) {
  Matrix r(2, 2);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

}  // namespace pathrep
