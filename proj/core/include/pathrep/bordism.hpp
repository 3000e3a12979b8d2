#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "pathrep/descent.hpp"

namespace pathrep {

enum class Sign { plus, minus };
const char* to_string(Sign s);

/// A point of the manifold carrying an orientation and the chart whose frame
/// describes its fiber.
struct SignedPoint {
  Sign sign = Sign::plus;
  Vector location;
  int chart = 0;

  /// Exact comparison; locations are matched bit-for-bit.
  bool operator==(const SignedPoint& other) const;
};

/// Ordered points; the empty configuration is the monoidal unit.
struct ObjectConfig {
  std::vector<SignedPoint> points;
  bool operator==(const ObjectConfig& other) const = default;
};

/// Ordered tensor factorization: V_x for + points, V*_x for - points.
struct FiberSpace {
  std::vector<Sign> tags;
  int fiber_dim = 1;

  /// fiber_dim ^ (number of factors); 1 for the unit.
  int dimension() const;
};

/// Fiber spaces of a configuration; checks every point lies in its chart.
FiberSpace evaluate_object(const ObjectConfig& cfg, const GlobalBundle& b);

/// Inverse transpose: the transport on dual fibers preserving the pairing.
GaugeMap dual_transport(const GaugeMap& f);

// ---------------------------------------------------------------------------
// Generators.

/// A strand decorated by a path. Input point (sign, path start, source chart),
/// output (sign, path end, target chart). Without an explicit source chart the
/// incoming point's chart is used; without a target chart, the chart of the
/// last cut segment.
struct Arc {
  Path path;
  Sign sign = Sign::plus;
  std::optional<int> source_chart;
  std::optional<int> target_chart;
};

enum class PairOrder { plus_minus, minus_plus };

/// 0-handle: empty -> two points at x, canonical element of V (x) V*.
struct Coev {
  Vector location;
  int chart = 0;
  PairOrder order = PairOrder::plus_minus;
};

/// 1-handle: two points at x -> empty, the evaluation pairing.
struct Ev {
  Vector location;
  int chart = 0;
  PairOrder order = PairOrder::minus_plus;
};

/// Strand permutation: output factor i is input factor sigma[i].
struct Perm {
  std::vector<int> sigma;
};

using Token = std::variant<Arc, Coev, Ev, Perm>;
/// Parallel arrangement of tokens; the first token is the outermost tensor factor.
using Slice = std::vector<Token>;

/// Identity on one strand.
Token identity_token();
/// Identity on n strands.
Token identity_token(int strands);

struct BordismWord {
  ObjectConfig source;
  std::vector<Slice> slices;
  /// Checked against the composed boundary when present.
  std::optional<ObjectConfig> target;
};

struct LinearMap {
  FiberSpace source;
  FiberSpace target;
  Matrix matrix;
};

struct BordismOptions {
  IntegratorConfig integrator{};
};

/// Composite of slice maps. Each slice acts on the current configuration;
/// tokens consume their input points left to right. Mismatched signs,
/// locations, charts or counts raise a composition error.
LinearMap evaluate_bordism(const BordismWord& w, const GlobalBundle& b,
                           const BordismOptions& options = {});

/// Target configuration of a word (also validates composition).
ObjectConfig word_target(const BordismWord& w, const GlobalBundle& b);

/// Disjoint union: sources concatenated, slices run side by side, the shorter
/// word padded with identities.
BordismWord tensor(const BordismWord& a, const BordismWord& b);

/// Matrix of the permutation of `n` tensor factors of dimension d.
Matrix permutation_matrix(const std::vector<int>& sigma, int d);

// ---------------------------------------------------------------------------
// Standard words.

/// One strand of sign `sign` along `path`, frames in `chart` at both ends.
BordismWord arc_word(const Path& path, Sign sign, int chart);

/// Zig-zag on a single strand of sign `strand` at x. The cancelling pair
/// carries `path` (from x back to x, or anywhere) on both of its strands.
BordismWord snake_word(const Vector& x, int chart, const Path& path, Sign strand = Sign::plus);

/// Coev at x, the loop on the + strand, Ev at x; evaluates to tr(holonomy).
BordismWord circle_word(const Vector& x, int chart, const Path& loop);

/// Operator-norm distance of the snake evaluation from the identity.
double snake_residual(const GlobalBundle& b, const Vector& x, int chart, const Path& path,
                      Sign strand = Sign::plus, const BordismOptions& options = {});

}  // namespace pathrep
