#include "pathrep/reconstruct.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace pathrep {

TransportOracle::TransportOracle(Chart chart, int fiber_dim, Fn fn)
    : chart_(std::move(chart)), fiber_dim_(fiber_dim), fn_(std::move(fn)) {
  if (!fn_) throw Error(ErrorCode::invalid_input, "oracle callable is empty");
}

Matrix TransportOracle::operator()(const Vector& p, const Vector& v, double s, double t) const {
  if (p.size() != chart_.dim || v.size() != chart_.dim) {
    throw Error(ErrorCode::invalid_input, "oracle probe dimension does not match chart");
  }
  Matrix out;
  try {
    out = fn_(p, v, s, t);
  } catch (const Error& e) {
    throw Error(ErrorCode::oracle, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::oracle, e.what());
  }
  if (out.rows() != fiber_dim_ || out.cols() != fiber_dim_) {
    throw Error(ErrorCode::oracle, "oracle returned a matrix of the wrong size");
  }
  if (!all_finite(out)) throw Error(ErrorCode::oracle, "oracle returned non-finite values");
  return out;
}

TransportOracle oracle_from_connection(const ConnectionForm& a, const IntegratorConfig& config,
                                       int min_steps) {
  return TransportOracle(a.chart(), a.fiber_dim(),
                         [a, config, min_steps](const Vector& p, const Vector& v, double s,
                                                double t) -> Matrix {
                           if (s == t) return identity_matrix(a.fiber_dim());
                           const Path probe =
                               affine_path(p, v, std::min(s, t), std::max(s, t));
                           const int steps = std::max(min_steps, config.steps_for(s, t));
                           return detail::integrate_ode(a, probe, s, t, steps);
                         });
}

TransportOracle gauge_oracle(const TransportOracle& f, const GaugeField& g) {
  if (f.chart().dim != g.chart().dim || f.fiber_dim() != g.fiber_dim()) {
    throw Error(ErrorCode::invalid_input, "gauge does not match oracle dimensions");
  }
  return TransportOracle(f.chart(), f.fiber_dim(),
                         [f, g](const Vector& p, const Vector& v, double s, double t) -> Matrix {
                           const Vector x = p + s * v;
                           const Vector y = p + t * v;
                           return g.value(y) * f(p, v, s, t) * inverse(g.value(x));
                         });
}

TransportOracle serialized_oracle(const TransportOracle& f) {
  auto mutex = std::make_shared<std::mutex>();
  return TransportOracle(f.chart(), f.fiber_dim(),
                         [f, mutex](const Vector& p, const Vector& v, double s, double t) {
                           std::lock_guard lock(*mutex);
                           return f(p, v, s, t);
                         });
}

EndMap reconstruct_at(const TransportOracle& f, const Vector& p, const Vector& v, double h,
                      DifferenceScheme scheme) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::invalid_input, "difference step must be positive");
  }
  const Matrix forward = f(p, v, 0.0, h);
  if (scheme == DifferenceScheme::one_sided) {
    return EndMap((forward - identity_matrix(f.fiber_dim())) / h);
  }
  const Matrix backward = f(p, v, 0.0, -h);
  return EndMap((forward - backward) / (2.0 * h));
}

double homogeneity_residual(const TransportOracle& f, const Vector& p, const Vector& v,
                            double lambda, double h) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::invalid_input, "lambda must be positive");
  if (lambda == 1.0) return 0.0;
  const EndMap scaled = reconstruct_at(f, p, lambda * v, h / lambda);
  const EndMap base = reconstruct_at(f, p, v, h);
  return operator_distance(scaled, base * lambda);
}

double additivity_residual(const TransportOracle& f, const Vector& p, const Vector& u,
                           const Vector& v, double h) {
  const EndMap sum = reconstruct_at(f, p, u + v, h);
  return operator_distance(sum, reconstruct_at(f, p, u, h) + reconstruct_at(f, p, v, h));
}

std::vector<Matrix> reconstruct_components(const TransportOracle& f, const Vector& p, double h) {
  std::vector<Matrix> out;
  const int n = f.chart().dim;
  for (int i = 0; i < n; ++i) {
    out.push_back(reconstruct_at(f, p, Vector::Unit(n, i), h).matrix());
  }
  return out;
}

double roundtrip_error(const ConnectionForm& a, std::span<const Vector> grid, double h,
                       const IntegratorConfig& config) {
  const TransportOracle oracle = oracle_from_connection(a, config);
  double worst = 0.0;
  for (const Vector& p : grid) {
    const auto exact = a.components(p);
    const auto rebuilt = reconstruct_components(oracle, p, h);
    for (std::size_t i = 0; i < exact.size(); ++i) {
      worst = std::max(worst, distance(rebuilt[i], exact[i]));
    }
  }
  return worst;
}

std::vector<Vector> grid_points(const Box& box, const std::vector<int>& counts) {
  const auto n = box.lower.size();
  if (box.upper.size() != n || static_cast<Eigen::Index>(counts.size()) != n) {
    throw Error(ErrorCode::invalid_input, "grid box and counts disagree in dimension");
  }
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw Error(ErrorCode::invalid_input, "grid counts must be positive");
    total *= static_cast<std::size_t>(c);
  }
  std::vector<Vector> out;
  out.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    Vector p(n);
    for (Eigen::Index i = n; i-- > 0;) {
      const auto c = static_cast<std::size_t>(counts[i]);
      const auto idx = rem % c;
      rem /= c;
      p(i) = c == 1 ? box.lower(i)
                    : box.lower(i) + (box.upper(i) - box.lower(i)) * static_cast<double>(idx) /
                                         static_cast<double>(c - 1);
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void put(std::ostream& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  out << buf;
}

}  // namespace

void write_oracle_csv(std::ostream& out, int chart_dim, int fiber_dim,
                      std::span<const OracleSample> samples) {
  for (int i = 0; i < chart_dim; ++i) out << 'p' << i << ',';
  for (int i = 0; i < chart_dim; ++i) out << 'v' << i << ',';
  out << 't';
  for (int i = 0; i < fiber_dim; ++i) {
    for (int j = 0; j < fiber_dim; ++j) out << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
  }
  out << '\n';
  for (const auto& s : samples) {
    if (s.p.size() != chart_dim || s.v.size() != chart_dim || s.value.rows() != fiber_dim ||
        s.value.cols() != fiber_dim) {
      throw Error(ErrorCode::invalid_input, "oracle sample has the wrong shape");
    }
    for (int i = 0; i < chart_dim; ++i) { put(out, s.p(i)); out << ','; }
    for (int i = 0; i < chart_dim; ++i) { put(out, s.v(i)); out << ','; }
    put(out, s.t);
    for (int i = 0; i < fiber_dim; ++i) {
      for (int j = 0; j < fiber_dim; ++j) {
        out << ',';
        put(out, s.value(i, j).real());
        out << ',';
        put(out, s.value(i, j).imag());
      }
    }
    out << '\n';
  }
}

std::vector<OracleSample> read_oracle_csv(std::istream& in, int* chart_dim, int* fiber_dim) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::oracle, "oracle table is empty");
  int n = 0;
  int columns = 0;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      ++columns;
      if (!cell.empty() && cell[0] == 'p') ++n;
    }
  }
  const int entries = columns - 2 * n - 1;
  const int d = static_cast<int>(std::lround(std::sqrt(entries / 2.0)));
  if (n < 1 || entries <= 0 || 2 * d * d != entries) {
    throw Error(ErrorCode::oracle, "oracle table header is malformed");
  }
  std::vector<OracleSample> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::oracle, "row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(values.size()) != columns) {
      throw Error(ErrorCode::oracle, "row " + std::to_string(row) + ": wrong column count");
    }
    OracleSample s;
    s.p = Eigen::Map<Vector>(values.data(), n);
    s.v = Eigen::Map<Vector>(values.data() + n, n);
    s.t = values[2 * n];
    s.value = Matrix(d, d);
    int k = 2 * n + 1;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j, k += 2) s.value(i, j) = Complex(values[k], values[k + 1]);
    }
    out.push_back(std::move(s));
  }
  if (chart_dim) *chart_dim = n;
  if (fiber_dim) *fiber_dim = d;
  return out;
}

std::vector<OracleSample> tabulate(const TransportOracle& f, std::span<const Vector> points,
                                   std::span<const Vector> directions,
                                   std::span<const double> times) {
  std::vector<OracleSample> out;
  for (const auto& p : points) {
    for (const auto& v : directions) {
      for (double t : times) out.push_back(OracleSample{p, v, t, f(p, v, 0.0, t)});
    }
  }
  return out;
}

TransportOracle tabulated_oracle(std::vector<OracleSample> samples, double match_tolerance) {
  if (samples.empty()) throw Error(ErrorCode::oracle, "oracle table has no rows");
  const int n = static_cast<int>(samples.front().p.size());
  const int d = static_cast<int>(samples.front().value.rows());
  auto table = std::make_shared<const std::vector<OracleSample>>(std::move(samples));
  auto lookup = [table, match_tolerance, d](const Vector& p, const Vector& v, double t) -> Matrix {
    if (t == 0.0) return identity_matrix(d);
    for (const auto& s : *table) {
      const double scale = 1.0 + p.norm() + v.norm() + std::abs(t);
      if ((s.p - p).norm() <= match_tolerance * scale &&
          (s.v - v).norm() <= match_tolerance * scale &&
          std::abs(s.t - t) <= match_tolerance * scale) {
        return s.value;
      }
    }
    throw Error(ErrorCode::oracle, "no tabulated sample for the requested probe");
  };
  return TransportOracle(Chart(n), d,
                         [lookup](const Vector& p, const Vector& v, double s, double t) -> Matrix {
                           if (s == t) return identity_matrix(static_cast<int>(lookup(p, v, 0.0).rows()));
                           return lookup(p, v, t) * inverse(lookup(p, v, s));
                         });
}

}  // namespace pathrep
