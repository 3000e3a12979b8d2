#include "pathrep/bordism.hpp"

#include <algorithm>
#include <numeric>

namespace pathrep {

const char* to_string(Sign s) { return s == Sign::plus ? "+" : "-"; }

bool SignedPoint::operator==(const SignedPoint& other) const {
  return sign == other.sign && chart == other.chart && location.size() == other.location.size() &&
         location == other.location;
}

int FiberSpace::dimension() const {
  int n = 1;
  for (std::size_t i = 0; i < tags.size(); ++i) n *= fiber_dim;
  return n;
}

namespace {

void check_point(const SignedPoint& p, const Atlas& atlas) {
  if (p.location.size() != atlas.ambient_dim()) {
    throw Error(ErrorCode::invalid_input, "point does not live in the atlas ambient space");
  }
  if (!(atlas.chart(p.chart).depth(p.location) > 0.0)) {
    throw Error(ErrorCode::coverage, "point lies outside its chart " + atlas.chart(p.chart).name());
  }
}

std::string describe(const SignedPoint& p) {
  std::string s = std::string(to_string(p.sign)) + "(";
  for (Eigen::Index i = 0; i < p.location.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p.location(i));
  }
  return s + ")@" + std::to_string(p.chart);
}

void expect_point(const SignedPoint& got, const SignedPoint& want, const char* what) {
  if (!(got == want)) {
    throw Error(ErrorCode::composition, std::string(what) + ": expected " + describe(want) +
                                            ", got " + describe(got));
  }
}

Matrix vec_identity(int d) {
  Matrix v = Matrix::Zero(d * d, 1);
  for (int i = 0; i < d; ++i) v(i * d + i, 0) = 1.0;
  return v;
}

std::vector<SignedPoint> pair_points(const Vector& x, int chart, PairOrder order) {
  const SignedPoint plus{Sign::plus, x, chart};
  const SignedPoint minus{Sign::minus, x, chart};
  if (order == PairOrder::plus_minus) return {plus, minus};
  return {minus, plus};
}

int inputs_of(const Token& t) {
  return std::visit(
      [](const auto& tok) -> int {
        using T = std::decay_t<decltype(tok)>;
        if constexpr (std::is_same_v<T, Arc>) return 1;
        if constexpr (std::is_same_v<T, Coev>) return 0;
        if constexpr (std::is_same_v<T, Ev>) return 2;
        if constexpr (std::is_same_v<T, Perm>) return static_cast<int>(tok.sigma.size());
      },
      t);
}

int outputs_of(const Token& t) {
  return std::visit(
      [](const auto& tok) -> int {
        using T = std::decay_t<decltype(tok)>;
        if constexpr (std::is_same_v<T, Arc>) return 1;
        if constexpr (std::is_same_v<T, Coev>) return 2;
        if constexpr (std::is_same_v<T, Ev>) return 0;
        if constexpr (std::is_same_v<T, Perm>) return static_cast<int>(tok.sigma.size());
      },
      t);
}

void check_sigma(const std::vector<int>& sigma) {
  std::vector<int> sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i)) {
      throw Error(ErrorCode::invalid_input, "Perm needs a permutation of 0..n-1");
    }
  }
}

struct Step {
  std::vector<SignedPoint> outputs;
  Matrix map;
};

// Applies one token to its input points. `with_map` false skips transports.
Step apply_token(const Token& token, const std::vector<SignedPoint>& in, const GlobalBundle& b,
                 const BordismOptions& options, bool with_map) {
  const Atlas& atlas = b.atlas();
  const int d = b.fiber_dim();
  return std::visit(
      [&](const auto& tok) -> Step {
        using T = std::decay_t<decltype(tok)>;
        if constexpr (std::is_same_v<T, Arc>) {
          const SignedPoint& p = in.front();
          const int source = tok.source_chart.value_or(p.chart);
          expect_point(p, SignedPoint{tok.sign, tok.path.start_point(), source}, "arc source");
          const CutAssignment cut = subordinate_cut(tok.path, atlas);
          const int target = tok.target_chart.value_or(cut.charts.back());
          SignedPoint out{tok.sign, tok.path.end_point(), target};
          check_point(out, atlas);
          Matrix m;
          if (with_map) {
            GlobalTransportOptions opts;
            opts.integrator = options.integrator;
            opts.source_chart = source;
            opts.target_chart = target;
            const GaugeMap f = global_transport(b, tok.path, cut, opts).map;
            m = tok.sign == Sign::plus ? f.matrix() : dual_transport(f).matrix();
          }
          return Step{{std::move(out)}, std::move(m)};
        } else if constexpr (std::is_same_v<T, Coev>) {
          auto out = pair_points(tok.location, tok.chart, tok.order);
          for (const auto& q : out) check_point(q, atlas);
          return Step{std::move(out), with_map ? vec_identity(d) : Matrix()};
        } else if constexpr (std::is_same_v<T, Ev>) {
          const auto want = pair_points(tok.location, tok.chart, tok.order);
          expect_point(in[0], want[0], "evaluation input");
          expect_point(in[1], want[1], "evaluation input");
          return Step{{}, with_map ? Matrix(vec_identity(d).transpose()) : Matrix()};
        } else {
          check_sigma(tok.sigma);
          std::vector<SignedPoint> out;
          for (int s : tok.sigma) out.push_back(in[static_cast<std::size_t>(s)]);
          return Step{std::move(out), with_map ? permutation_matrix(tok.sigma, d) : Matrix()};
        }
      },
      token);
}

struct Evaluation {
  ObjectConfig target;
  Matrix matrix;
};

Evaluation run(const BordismWord& w, const GlobalBundle& b, const BordismOptions& options,
               bool with_map) {
  const int d = b.fiber_dim();
  for (const auto& p : w.source.points) check_point(p, b.atlas());
  std::vector<SignedPoint> current = w.source.points;
  Matrix total;
  if (with_map) total = identity_matrix(evaluate_object(w.source, b).dimension());
  for (std::size_t s = 0; s < w.slices.size(); ++s) {
    const Slice& slice = w.slices[s];
    std::size_t consumed = 0;
    std::vector<SignedPoint> next;
    Matrix slice_map = Matrix::Identity(1, 1);
    for (const Token& token : slice) {
      const auto k = static_cast<std::size_t>(inputs_of(token));
      if (consumed + k > current.size()) {
        throw Error(ErrorCode::composition,
                    "slice " + std::to_string(s) + " consumes more points than available");
      }
      std::vector<SignedPoint> in(current.begin() + static_cast<std::ptrdiff_t>(consumed),
                                  current.begin() + static_cast<std::ptrdiff_t>(consumed + k));
      consumed += k;
      Step step = apply_token(token, in, b, options, with_map);
      next.insert(next.end(), step.outputs.begin(), step.outputs.end());
      if (with_map) slice_map = kron(slice_map, step.map);
    }
    if (consumed != current.size()) {
      throw Error(ErrorCode::composition, "slice " + std::to_string(s) + " leaves " +
                                              std::to_string(current.size() - consumed) +
                                              " points unconsumed");
    }
    if (with_map) total = slice_map * total;
    current = std::move(next);
  }
  ObjectConfig target{current};
  if (w.target && !(*w.target == target)) {
    throw Error(ErrorCode::composition, "word does not end at its declared target");
  }
  (void)d;
  return Evaluation{std::move(target), std::move(total)};
}

}  // namespace

FiberSpace evaluate_object(const ObjectConfig& cfg, const GlobalBundle& b) {
  FiberSpace out;
  out.fiber_dim = b.fiber_dim();
  for (const auto& p : cfg.points) {
    check_point(p, b.atlas());
    out.tags.push_back(p.sign);
  }
  return out;
}

GaugeMap dual_transport(const GaugeMap& f) {
  return GaugeMap(inverse(f.matrix()).transpose());
}

Token identity_token() { return Perm{{0}}; }

Token identity_token(int strands) {
  if (strands < 0) throw Error(ErrorCode::invalid_input, "strand count must be >= 0");
  std::vector<int> sigma(static_cast<std::size_t>(strands));
  std::iota(sigma.begin(), sigma.end(), 0);
  return Perm{std::move(sigma)};
}

LinearMap evaluate_bordism(const BordismWord& w, const GlobalBundle& b,
                           const BordismOptions& options) {
  Evaluation e = run(w, b, options, true);
  return LinearMap{evaluate_object(w.source, b), evaluate_object(e.target, b),
                   std::move(e.matrix)};
}

ObjectConfig word_target(const BordismWord& w, const GlobalBundle& b) {
  return run(w, b, {}, false).target;
}

BordismWord tensor(const BordismWord& a, const BordismWord& b) {
  BordismWord out;
  out.source.points = a.source.points;
  out.source.points.insert(out.source.points.end(), b.source.points.begin(),
                           b.source.points.end());
  int width_a = static_cast<int>(a.source.points.size());
  int width_b = static_cast<int>(b.source.points.size());
  const std::size_t n = std::max(a.slices.size(), b.slices.size());
  auto advance = [](const Slice& s, int& width) {
    for (const Token& t : s) width += outputs_of(t) - inputs_of(t);
  };
  for (std::size_t k = 0; k < n; ++k) {
    Slice sa = k < a.slices.size() ? a.slices[k] : Slice{identity_token(width_a)};
    Slice sb = k < b.slices.size() ? b.slices[k] : Slice{identity_token(width_b)};
    advance(sa, width_a);
    advance(sb, width_b);
    sa.insert(sa.end(), sb.begin(), sb.end());
    out.slices.push_back(std::move(sa));
  }
  if (a.target && b.target) {
    ObjectConfig t = *a.target;
    t.points.insert(t.points.end(), b.target->points.begin(), b.target->points.end());
    out.target = std::move(t);
  }
  return out;
}

Matrix permutation_matrix(const std::vector<int>& sigma, int d) {
  check_sigma(sigma);
  const int n = static_cast<int>(sigma.size());
  int dim = 1;
  for (int i = 0; i < n; ++i) dim *= d;
  Matrix m = Matrix::Zero(dim, dim);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (int in = 0; in < dim; ++in) {
    int rem = in;
    for (int i = n; i-- > 0;) {
      digits[static_cast<std::size_t>(i)] = rem % d;
      rem /= d;
    }
    int out = 0;
    for (int i = 0; i < n; ++i) out = out * d + digits[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
    m(out, in) = 1.0;
  }
  return m;
}

// ---------------------------------------------------------------------------

BordismWord arc_word(const Path& path, Sign sign, int chart) {
  BordismWord w;
  w.source.points = {SignedPoint{sign, path.start_point(), chart}};
  w.slices = {{Arc{path, sign, chart, chart}}};
  w.target = ObjectConfig{{SignedPoint{sign, path.end_point(), chart}}};
  return w;
}

BordismWord snake_word(const Vector& x, int chart, const Path& path, Sign strand) {
  if (path.start_point() != x) {
    throw Error(ErrorCode::composition, "snake path must start at the snake point");
  }
  const Vector y = path.end_point();
  BordismWord w;
  w.source.points = {SignedPoint{strand, x, chart}};
  w.target = w.source;
  const Arc minus{path, Sign::minus, chart, chart};
  const Arc plus{path, Sign::plus, chart, chart};
  if (strand == Sign::plus) {
    // |+>  ->  |+ - +>  ->  |+ -(y) +(y)>  ->  |+>
    w.slices = {
        {Coev{x, chart, PairOrder::plus_minus}, identity_token()},
        {identity_token(), minus, plus},
        {identity_token(), Ev{y, chart, PairOrder::minus_plus}},
    };
  } else {
    // |->  ->  |- + ->  ->  |-(y) +(y) ->  ->  |->
    w.slices = {
        {identity_token(), Coev{x, chart, PairOrder::plus_minus}},
        {minus, plus, identity_token()},
        {Ev{y, chart, PairOrder::minus_plus}, identity_token()},
    };
  }
  return w;
}

BordismWord circle_word(const Vector& x, int chart, const Path& loop) {
  BordismWord w;
  w.target = ObjectConfig{};
  w.slices = {
      {Coev{x, chart, PairOrder::plus_minus}},
      {Arc{loop, Sign::plus, chart, chart}, identity_token()},
      {Ev{x, chart, PairOrder::plus_minus}},
  };
  return w;
}

double snake_residual(const GlobalBundle& b, const Vector& x, int chart, const Path& path,
                      Sign strand, const BordismOptions& options) {
  const LinearMap m = evaluate_bordism(snake_word(x, chart, path, strand), b, options);
  return distance(m.matrix, identity_matrix(b.fiber_dim()), Norm::operator2);
}

}  // namespace pathrep
