#include "pathrep_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace pathrep::cli {

ConfigError::ConfigError(const std::string& message, std::string key, int line, int column)
    : std::runtime_error(message), key_(std::move(key)), line_(line), column_(column) {}

namespace {

std::string join(const std::string& key, const std::string& child) {
  return key.empty() ? child : key + "." + child;
}

std::string indexed(const std::string& key, std::size_t i) {
  return key + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what, key);
}

/// Object reader that rejects keys it was not asked about.
class Block {
 public:
  Block(const json& j, std::string key) : j_(j), key_(std::move(key)) {
    if (!j_.is_object()) fail(key_, "expected an object");
  }

  bool has(const std::string& name) const { return j_.contains(name); }
  std::string key(const std::string& name) const { return join(key_, name); }

  const json& at(const std::string& name) {
    seen_.insert(name);
    if (!j_.contains(name)) fail(key(name), "missing");
    return j_.at(name);
  }
  const json* find(const std::string& name) {
    seen_.insert(name);
    auto it = j_.find(name);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& name) {
    const json& v = at(name);
    if (!v.is_number()) fail(key(name), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key(name), "expected a finite number");
    return x;
  }
  double number(const std::string& name, double fallback) {
    return has(name) ? number(name) : (seen_.insert(name), fallback);
  }
  int integer(const std::string& name) {
    const json& v = at(name);
    if (!v.is_number_integer()) fail(key(name), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& name, int fallback) {
    return has(name) ? integer(name) : (seen_.insert(name), fallback);
  }
  std::string string(const std::string& name) {
    const json& v = at(name);
    if (!v.is_string()) fail(key(name), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& name, const std::string& fallback) {
    return has(name) ? string(name) : (seen_.insert(name), fallback);
  }

  /// Call after reading; rejects unknown keys.
  void finish() const {
    for (const auto& [name, _] : j_.items()) {
      if (!seen_.count(name)) fail(key(name), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string key_;
  std::set<std::string> seen_;
};

Complex parse_entry(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(key, "expected a number or [re, im]");
}

Sign parse_sign(const json& j, const std::string& key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+" || s == "plus") return Sign::plus;
    if (s == "-" || s == "minus") return Sign::minus;
  }
  fail(key, "expected \"+\" or \"-\"");
}

PairOrder parse_order(const json& j, const std::string& key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+-") return PairOrder::plus_minus;
    if (s == "-+") return PairOrder::minus_plus;
  }
  fail(key, "expected \"+-\" or \"-+\"");
}

std::vector<Matrix> parse_matrices(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail(key, "expected a non-empty array of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_matrix(j[i], indexed(key, i)));
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].rows() != out[0].rows()) fail(indexed(key, i), "fiber dimension mismatch");
  }
  return out;
}

Reparametrization build_reparametrization(const json& j, const std::string& key, double begin,
                                          double end) {
  Block r(j, key);
  const std::string kind = r.string("kind");
  Reparametrization phi;
  if (kind == "identity") {
    phi = identity_reparametrization();
  } else if (kind == "power") {
    const double k = r.number("exponent");
    if (k < 1.0) fail(r.key("exponent"), "must be >= 1");
    phi = power_reparametrization(begin, end, k);
  } else if (kind == "bump") {
    phi = bump_reparametrization(begin, end);
  } else if (kind == "sitting") {
    const double t = r.number("t");
    if (t < 0.0 || t > 1.0) fail(r.key("t"), "must lie in [0, 1]");
    phi = sitting_reparametrization(begin, end, t);
  } else {
    fail(r.key("kind"), "unknown reparametrization '" + kind + "'");
  }
  r.finish();
  return phi;
}

const char* path_kind_list = "affine, constant, circle_arc, spline, colatitude_loop, "
                             "colatitude_loop_chart, circle_loop";

}  // namespace

Matrix parse_matrix(const json& j, const std::string& key) {
  if (j.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty()) fail(key, "expected a square matrix (array of rows)");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != j.size()) fail(indexed(key, r), "row length must equal row count");
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_entry(row[c], indexed(indexed(key, r), c));
    }
  }
  if (!all_finite(m)) fail(key, "entries must be finite");
  return m;
}

Vector parse_vector(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) fail(key, "expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(indexed(key, i), "expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  if (!v.allFinite()) fail(key, "entries must be finite");
  return v;
}

ConnectionForm build_connection(const json& j, const std::string& key) {
  Block c(j, key);
  const std::string preset = c.string("preset");
  auto build = [&]() -> ConnectionForm {
    if (preset == "zero") {
      const int n = c.integer("chart_dim", 2);
      const int d = c.integer("fiber_dim", 1);
      if (n < 1) fail(c.key("chart_dim"), "must be positive");
      if (d < 1) fail(c.key("fiber_dim"), "must be positive");
      return zero_connection(n, d);
    }
    if (preset == "constant") return constant_connection(parse_matrices(c.at("components"), c.key("components")));
    if (preset == "magnetic") return magnetic_connection(c.number("strength", 1.0));
    if (preset == "sphere_levi_civita") return sphere_levi_civita();
    if (preset == "polynomial_example") return polynomial_example();
    if (preset == "polynomial") {
      const int n = c.integer("chart_dim");
      const int d = c.integer("fiber_dim");
      const std::string tkey = c.key("terms");
      const json& terms = c.at("terms");
      if (!terms.is_array()) fail(tkey, "expected an array");
      std::vector<PolynomialTerm> out;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        Block t(terms[i], indexed(tkey, i));
        PolynomialTerm term;
        term.component = t.integer("component");
        const json& e = t.at("exponents");
        if (!e.is_array()) fail(t.key("exponents"), "expected an array of integers");
        for (std::size_t k = 0; k < e.size(); ++k) {
          if (!e[k].is_number_integer() || e[k].get<int>() < 0) {
            fail(indexed(t.key("exponents"), k), "expected a non-negative integer");
          }
          term.exponents.push_back(e[k].get<int>());
        }
        term.coefficient = parse_matrix(t.at("coefficient"), t.key("coefficient"));
        t.finish();
        out.push_back(std::move(term));
      }
      return polynomial_connection(n, d, std::move(out));
    }
    if (preset == "sampled") {
      const ConnectionForm source = build_connection(c.at("source"), c.key("source"));
      SampleGrid grid;
      grid.lower = parse_vector(c.at("lower"), c.key("lower"));
      grid.upper = parse_vector(c.at("upper"), c.key("upper"));
      const json& counts = c.at("counts");
      if (!counts.is_array()) fail(c.key("counts"), "expected an array of integers");
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!counts[i].is_number_integer()) fail(indexed(c.key("counts"), i), "expected an integer");
        grid.counts.push_back(counts[i].get<int>());
      }
      return sample_connection(source, grid);
    }
    fail(c.key("preset"), "unknown connection preset '" + preset +
                              "' (zero, constant, magnetic, polynomial, polynomial_example, "
                              "sphere_levi_civita, sampled)");
  };
  try {
    ConnectionForm a = build();
    c.finish();
    return a;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what(), key);
  }
}

Path build_path(const json& j, const std::string& key) {
  Block p(j, key);
  const std::string kind = p.string("kind");
  auto build = [&]() -> Path {
    if (kind == "affine") {
      return affine_path(parse_vector(p.at("origin"), p.key("origin")),
                         parse_vector(p.at("direction"), p.key("direction")),
                         p.number("begin", 0.0), p.number("end", 1.0));
    }
    if (kind == "constant") {
      return constant_path(parse_vector(p.at("point"), p.key("point")), p.number("begin", 0.0),
                           p.number("end", 1.0));
    }
    if (kind == "circle_arc") {
      return circle_arc(parse_vector(p.at("center"), p.key("center")), p.number("radius"),
                        p.number("angle0"), p.number("angle1"));
    }
    if (kind == "spline") {
      const json& w = p.at("waypoints");
      if (!w.is_array() || w.size() < 2) fail(p.key("waypoints"), "expected at least two points");
      std::vector<Vector> pts;
      for (std::size_t i = 0; i < w.size(); ++i) pts.push_back(parse_vector(w[i], indexed(p.key("waypoints"), i)));
      return spline_path(pts, p.number("begin", 0.0), p.number("end", 1.0));
    }
    if (kind == "colatitude_loop") return colatitude_loop(p.number("theta"), p.number("phi0", 0.0));
    if (kind == "colatitude_loop_chart") return colatitude_loop_chart(p.number("theta"));
    if (kind == "circle_loop") return circle_loop(p.number("phi0", 0.0), p.integer("turns", 1));
    fail(p.key("kind"), "unknown path kind '" + kind + "' (" + path_kind_list + ")");
  };
  try {
    Path path = build();
    if (const json* cuts = p.find("cuts")) {
      if (!cuts->is_array()) fail(p.key("cuts"), "expected an array of numbers");
      std::vector<double> values;
      for (std::size_t i = 0; i < cuts->size(); ++i) {
        if (!(*cuts)[i].is_number()) fail(indexed(p.key("cuts"), i), "expected a number");
        values.push_back((*cuts)[i].get<double>());
      }
      path = path.with_cuts(std::move(values));
    }
    if (const json* r = p.find("reparametrization")) {
      path = reparametrize(path, build_reparametrization(*r, p.key("reparametrization"),
                                                         path.begin(), path.end()));
    }
    p.finish();
    return path;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what(), key);
  }
}

IntegratorConfig build_integrator(const json& j, const std::string& key) {
  IntegratorConfig cfg;
  if (j.is_null()) return cfg;
  Block b(j, key);
  const std::string method = b.string("method", "ode");
  if (method == "ode") cfg.method = TransportMethod::ode;
  else if (method == "product") cfg.method = TransportMethod::product;
  else fail(b.key("method"), "unknown method '" + method + "' (ode, product)");
  const std::string rule = b.string("rule", "midpoint");
  if (rule == "midpoint") cfg.rule = ProductRule::midpoint;
  else if (rule == "left") cfg.rule = ProductRule::left;
  else fail(b.key("rule"), "unknown rule '" + rule + "' (left, midpoint)");
  if (b.has("steps") && b.has("step")) fail(b.key("steps"), "give either step or steps");
  if (b.has("steps")) {
    const int n = b.integer("steps");
    if (n < 1) fail(b.key("steps"), "must be positive");
    cfg.step = 1.0 / n;
  } else {
    cfg.step = b.number("step", cfg.step);
    if (!(cfg.step > 0.0)) fail(b.key("step"), "must be positive");
  }
  // Experiment-specific integrator settings, read by the experiments.
  for (const char* extra : {"n_min", "n_max", "reference_steps", "samples"}) {
    if (b.has(extra)) {
      const int n = b.integer(extra);
      if (n < 1) fail(b.key(extra), "must be positive");
    }
  }
  b.finish();
  return cfg;
}

GlobalBundle build_bundle(const json& j, const std::string& key) {
  Block b(j, key);
  const std::string manifold = b.string("manifold");
  try {
    GlobalBundle out = [&]() -> GlobalBundle {
      if (manifold == "sphere") return sphere_tangent_bundle();
      if (manifold == "line") return line_bundle(build_connection(b.at("connection"), b.key("connection")));
      if (manifold == "circle") {
        const Matrix c_pi = parse_matrix(b.at("c_pi"), b.key("c_pi"));
        const Matrix c_zero = b.has("c_zero") ? parse_matrix(b.at("c_zero"), b.key("c_zero"))
                                              : (b.find("c_zero"), identity_matrix(static_cast<int>(c_pi.rows())));
        std::optional<ConnectionForm> form;
        if (const json* c = b.find("connection")) form = build_connection(*c, b.key("connection"));
        return circle_bundle(c_pi, c_zero, form);
      }
      fail(b.key("manifold"), "unknown manifold '" + manifold + "' (line, circle, sphere)");
    }();
    b.finish();
    return out;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what(), key);
  }
}

namespace {

int point_chart(const GlobalBundle& b, const Vector& x, Block& blk) {
  if (blk.has("chart")) {
    const int c = blk.integer("chart");
    if (c < 0 || c >= b.atlas().size()) fail(blk.key("chart"), "no such chart");
    return c;
  }
  blk.find("chart");
  const int c = b.atlas().deepest_chart(x);
  if (c < 0) fail(blk.key("point"), "point lies in no chart");
  return c;
}

BordismWord explicit_word(Block& w, const GlobalBundle& b) {
  struct Named {
    Vector location;
    int chart;
  };
  std::map<std::string, Named> points;
  if (const json* pts = w.find("points")) {
    if (!pts->is_object()) fail(w.key("points"), "expected an object of named points");
    for (const auto& [name, entry] : pts->items()) {
      Block p(entry, join(w.key("points"), name));
      const Vector x = parse_vector(p.at("location"), p.key("location"));
      const int chart = p.has("chart") ? p.integer("chart") : (p.find("chart"), b.atlas().deepest_chart(x));
      if (chart < 0 || chart >= b.atlas().size()) fail(p.key("chart"), "no such chart");
      p.finish();
      points.emplace(name, Named{x, chart});
    }
  }
  std::map<std::string, Path> paths;
  if (const json* ps = w.find("paths")) {
    if (!ps->is_object()) fail(w.key("paths"), "expected an object of named paths");
    for (const auto& [name, entry] : ps->items()) {
      paths.emplace(name, build_path(entry, join(w.key("paths"), name)));
    }
  }
  auto point = [&](const json& j, const std::string& key) -> const Named& {
    if (!j.is_string()) fail(key, "expected a point name");
    auto it = points.find(j.get<std::string>());
    if (it == points.end()) fail(key, "unknown point '" + j.get<std::string>() + "'");
    return it->second;
  };

  BordismWord word;
  const std::string skey = w.key("source");
  if (const json* src = w.find("source")) {
    if (!src->is_array()) fail(skey, "expected an array of [sign, point]");
    for (std::size_t i = 0; i < src->size(); ++i) {
      const json& e = (*src)[i];
      if (!e.is_array() || e.size() != 2) fail(indexed(skey, i), "expected [sign, point]");
      const Named& p = point(e[1], indexed(indexed(skey, i), 1));
      word.source.points.push_back(SignedPoint{parse_sign(e[0], indexed(indexed(skey, i), 0)), p.location, p.chart});
    }
  }
  const std::string lkey = w.key("slices");
  const json& slices = w.at("slices");
  if (!slices.is_array()) fail(lkey, "expected an array of slices");
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const std::string sk = indexed(lkey, s);
    if (!slices[s].is_array()) fail(sk, "expected an array of tokens");
    Slice slice;
    for (std::size_t t = 0; t < slices[s].size(); ++t) {
      const std::string tk = indexed(sk, t);
      Block tok(slices[s][t], tk);
      if (tok.has("arc")) {
        const json& name = tok.at("arc");
        if (!name.is_string() || !paths.count(name.get<std::string>())) fail(tok.key("arc"), "unknown path");
        Arc arc{paths.at(name.get<std::string>()), Sign::plus, std::nullopt, std::nullopt};
        if (const json* sg = tok.find("sign")) arc.sign = parse_sign(*sg, tok.key("sign"));
        if (tok.has("source_chart")) arc.source_chart = tok.integer("source_chart");
        if (tok.has("target_chart")) arc.target_chart = tok.integer("target_chart");
        slice.emplace_back(std::move(arc));
      } else if (tok.has("coev")) {
        const Named& p = point(tok.at("coev"), tok.key("coev"));
        Coev c{p.location, p.chart, PairOrder::plus_minus};
        if (const json* o = tok.find("order")) c.order = parse_order(*o, tok.key("order"));
        slice.emplace_back(c);
      } else if (tok.has("ev")) {
        const Named& p = point(tok.at("ev"), tok.key("ev"));
        Ev e{p.location, p.chart, PairOrder::minus_plus};
        if (const json* o = tok.find("order")) e.order = parse_order(*o, tok.key("order"));
        slice.emplace_back(e);
      } else if (tok.has("perm")) {
        const json& sigma = tok.at("perm");
        if (!sigma.is_array()) fail(tok.key("perm"), "expected an array of indices");
        Perm p;
        for (const auto& v : sigma) {
          if (!v.is_number_integer()) fail(tok.key("perm"), "expected integer indices");
          p.sigma.push_back(v.get<int>());
        }
        slice.emplace_back(std::move(p));
      } else if (tok.has("id")) {
        const int n = tok.integer("id");
        if (n < 0) fail(tok.key("id"), "must be non-negative");
        slice.push_back(identity_token(n));
      } else {
        fail(tk, "expected one of arc, coev, ev, perm, id");
      }
      tok.finish();
    }
    word.slices.push_back(std::move(slice));
  }
  return word;
}

}  // namespace

BordismWord build_word(const json& j, const GlobalBundle& b, const std::string& key) {
  Block w(j, key);
  const std::string shape = w.string("shape", "explicit");
  try {
    BordismWord word = [&]() -> BordismWord {
      if (shape == "explicit") return explicit_word(w, b);
      if (shape == "snake" || shape == "circle" || shape == "arc") {
        const Path path = build_path(w.at("path"), w.key("path"));
        const Vector x = w.has("point") ? parse_vector(w.at("point"), w.key("point")) : path.start_point();
        w.find("point");
        const int chart = point_chart(b, x, w);
        const Sign strand = w.has("strand") ? parse_sign(w.at("strand"), w.key("strand")) : Sign::plus;
        w.find("strand");
        if (shape == "snake") return snake_word(x, chart, path, strand);
        if (shape == "circle") return circle_word(x, chart, path);
        return arc_word(path, strand, chart);
      }
      fail(w.key("shape"), "unknown word shape '" + shape + "' (explicit, snake, circle, arc)");
    }();
    w.finish();
    word_target(word, b);
    return word;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what(), key);
  }
}

std::string ExperimentConfig::stem() const { return name.empty() ? experiment : name; }

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  if (!name.empty()) j["name"] = name;
  j["seed"] = seed;
  if (!output_dir.empty()) j["output_dir"] = output_dir;
  const std::pair<const char*, const json*> blocks[] = {
      {"connection", &connection}, {"path", &path},         {"integrator", &integrator},
      {"bundle", &bundle},         {"word", &word},         {"reconstruct", &reconstruct},
      {"holonomy", &holonomy},     {"expect", &expect}};
  for (const auto& [k, v] : blocks) {
    if (!v->is_null()) j[k] = *v;
  }
  if (!tolerances.empty()) j["tolerances"] = tolerances;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  Block top(j, "");
  ExperimentConfig cfg;
  cfg.experiment = top.string("experiment");
  if (std::find_if(std::begin(kExperimentKinds), std::end(kExperimentKinds),
                   [&](const char* k) { return cfg.experiment == k; }) == std::end(kExperimentKinds)) {
    fail("experiment", "unknown experiment '" + cfg.experiment + "'");
  }
  cfg.name = top.string("name", "");
  if (cfg.name.find_first_of("/\\") != std::string::npos) fail("name", "must not contain path separators");
  if (const json* s = top.find("seed")) {
    if (!s->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  cfg.output_dir = top.string("output_dir", "");
  for (auto [k, slot] : {std::pair{"connection", &cfg.connection}, std::pair{"path", &cfg.path},
                         std::pair{"integrator", &cfg.integrator}, std::pair{"bundle", &cfg.bundle},
                         std::pair{"word", &cfg.word}, std::pair{"reconstruct", &cfg.reconstruct},
                         std::pair{"holonomy", &cfg.holonomy}, std::pair{"expect", &cfg.expect}}) {
    if (const json* v = top.find(k)) *slot = *v;
  }
  if (const json* t = top.find("tolerances")) {
    if (!t->is_object()) fail("tolerances", "expected an object of name: value");
    for (const auto& [name, value] : t->items()) {
      if (!value.is_number()) fail("tolerances." + name, "expected a number");
      cfg.tolerances[name] = value.get<double>();
    }
  }
  top.finish();
  validate(cfg);
  return cfg;
}

namespace {

void require(const json& block, const char* key, const std::string& experiment) {
  if (block.is_null()) fail(key, "required by experiment '" + experiment + "'");
}

void validate_reconstruct(const json& j) {
  if (j.is_null()) return;
  Block r(j, "reconstruct");
  if (r.number("h", 1e-4) <= 0.0) fail(r.key("h"), "must be positive");
  if (const json* lo = r.find("lower")) parse_vector(*lo, r.key("lower"));
  if (const json* hi = r.find("upper")) parse_vector(*hi, r.key("upper"));
  if (const json* c = r.find("counts")) {
    if (!c->is_array() || c->empty()) fail(r.key("counts"), "expected an array of integers");
    for (std::size_t i = 0; i < c->size(); ++i) {
      if (!(*c)[i].is_number_integer() || (*c)[i].get<int>() < 1) fail(indexed(r.key("counts"), i), "expected a positive integer");
    }
  }
  if (const json* t = r.find("times")) {
    if (!t->is_array()) fail(r.key("times"), "expected an array of numbers");
    for (std::size_t i = 0; i < t->size(); ++i) {
      if (!(*t)[i].is_number()) fail(indexed(r.key("times"), i), "expected a number");
    }
  }
  const std::string scheme = r.string("scheme", "central");
  if (scheme != "central" && scheme != "one_sided") fail(r.key("scheme"), "expected central or one_sided");
  if (const json* o = r.find("oracle_csv")) {
    if (!o->is_string()) fail(r.key("oracle_csv"), "expected a file name");
  }
  if (r.integer("samples", 20) < 1) fail(r.key("samples"), "must be positive");
  r.finish();
}

void validate_holonomy(const json& j) {
  if (j.is_null()) return;
  Block h(j, "holonomy");
  if (const json* t = h.find("colatitudes")) {
    if (!t->is_array()) fail(h.key("colatitudes"), "expected an array of numbers");
    for (std::size_t i = 0; i < t->size(); ++i) {
      if (!(*t)[i].is_number()) fail(indexed(h.key("colatitudes"), i), "expected a number");
    }
  }
  h.number("phi0", 0.0);
  if (const json* loops = h.find("loops")) {
    if (!loops->is_array()) fail(h.key("loops"), "expected an array of paths");
    for (std::size_t i = 0; i < loops->size(); ++i) build_path((*loops)[i], indexed(h.key("loops"), i));
  }
  if (const json* e = h.find("expected_angles")) {
    if (!e->is_array()) fail(h.key("expected_angles"), "expected an array of numbers");
  }
  h.finish();
}

void validate_expect(const json& j) {
  if (j.is_null()) return;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "identity" || s == "trace") return;
    fail("expect", "unknown expectation '" + s + "' (identity, trace, or {\"value\": matrix})");
  }
  Block e(j, "expect");
  parse_matrix(e.at("value"), e.key("value"));
  e.finish();
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  const std::string& kind = cfg.experiment;
  build_integrator(cfg.integrator);
  validate_expect(cfg.expect);
  validate_reconstruct(cfg.reconstruct);
  validate_holonomy(cfg.holonomy);
  if (kind == "transport" || kind == "convergence") {
    require(cfg.connection, "connection", kind);
    require(cfg.path, "path", kind);
    const ConnectionForm a = build_connection(cfg.connection);
    const Path p = build_path(cfg.path);
    if (p.dim() != a.chart_dim()) fail("path", "dimension does not match the connection's chart");
  } else if (kind == "reconstruct" || kind == "tabulate") {
    const bool from_file = cfg.reconstruct.is_object() && cfg.reconstruct.contains("oracle_csv");
    if (!from_file || kind == "tabulate") require(cfg.connection, "connection", kind);
    if (!cfg.connection.is_null()) build_connection(cfg.connection);
  } else if (kind == "holonomy") {
    require(cfg.bundle, "bundle", kind);
    build_bundle(cfg.bundle);
  } else if (kind == "bordism") {
    require(cfg.bundle, "bundle", kind);
    require(cfg.word, "word", kind);
    build_word(cfg.word, build_bundle(cfg.bundle));
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string& experiment) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    int line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what(),
                      {}, line, column);
  }
  if (!experiment.empty() && j.is_object()) {
    if (!j.contains("experiment")) {
      j["experiment"] = experiment;
    } else if (j["experiment"] != experiment) {
      const json& named = j["experiment"];
      fail("experiment", "config is for '" + (named.is_string() ? named.get<std::string>() : named.dump()) +
                             "', not '" + experiment + "'");
    }
  }
  return config_from_json(j);
}

ExperimentConfig parse_config_file(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), experiment);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.key(), e.line(), e.column());
  }
}

std::pair<std::string, double> parse_tolerance(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("tolerance '" + text + "' is not name=value");
  const std::string name = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(x)) {
    throw ConfigError("tolerance '" + text + "' has no numeric value", name);
  }
  return {name, x};
}

}  // namespace pathrep::cli
