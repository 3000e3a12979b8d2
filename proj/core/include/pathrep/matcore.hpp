#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pathrep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
/// Points and tangent vectors of a chart are always real.
using Vector = Eigen::VectorXd;

enum class Field { real, complex };

enum class ErrorCode {
  invalid_input,
  singular_matrix,
  singular_gauge,
  evaluation,
  invalid_reparametrization,
  oracle,
  sampling,
  coverage,
  inconsistent_bundle,
  not_a_rotation,
  composition,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kSingularTolerance = 1e-10;

enum class Norm { frobenius, operator2 };

/// An element of End(V): a square matrix with finite entries.
class EndMap {
 public:
  explicit EndMap(Matrix m);

  static EndMap zero(int dim);
  static EndMap identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  /// Real iff every imaginary part is exactly zero.
  Field field() const;
  const Matrix& matrix() const { return m_; }

  EndMap operator+(const EndMap& other) const;
  EndMap operator-(const EndMap& other) const;
  EndMap operator*(const EndMap& other) const;
  EndMap operator*(Complex scale) const;

 private:
  Matrix m_;
};

/// An element of GL(V). Construction rejects matrices whose smallest singular
/// value does not exceed the singularity tolerance.
class GaugeMap {
 public:
  explicit GaugeMap(Matrix m, double singular_tolerance = kSingularTolerance);

  static GaugeMap identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  Field field() const { return as_end().field(); }
  const Matrix& matrix() const { return m_; }
  EndMap as_end() const { return EndMap(m_); }

  GaugeMap operator*(const GaugeMap& other) const;

 private:
  Matrix m_;
};

bool all_finite(const Matrix& m);
Matrix identity_matrix(int dim);
double smallest_singular_value(const Matrix& m);
double condition_number(const Matrix& m);
double norm(const Matrix& m, Norm kind = Norm::frobenius);

/// Scaling and squaring with diagonal Pade approximants (degrees 3..13).
/// Unchecked kernel used inside integrators; `matrix_exponential` is the
/// validated entry point.
Matrix expm(const Matrix& m);

GaugeMap matrix_exponential(const EndMap& m);

/// Throws singular_matrix when the smallest singular value is below tolerance.
Matrix inverse(const Matrix& m, double singular_tolerance = kSingularTolerance);
GaugeMap matrix_inverse(const GaugeMap& m);

double distance(const Matrix& a, const Matrix& b, Norm kind = Norm::frobenius);
double operator_distance(const EndMap& a, const EndMap& b,
                         Norm kind = Norm::frobenius);

/// Kronecker product with the first factor as the slow (outer) index.
Matrix kron(const Matrix& a, const Matrix& b);

/// Real 2x2 rotation by `angle` (counterclockwise).
Matrix rotation(double angle);

}  // namespace pathrep
