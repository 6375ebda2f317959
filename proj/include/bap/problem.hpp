#ifndef BAP_PROBLEM_HPP
#define BAP_PROBLEM_HPP

#include "bap/oracle.hpp"
#include "bap/solvers.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bap {

using json = nlohmann::json;

struct SchemaIssue {
  std::string path;
  std::string message;
};

class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(std::vector<SchemaIssue> issues)
      : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}
  const std::vector<SchemaIssue>& issues() const { return issues_; }

 private:
  static std::string summarize(const std::vector<SchemaIssue>& issues) {
    std::string s = "invalid problem spec:";
    for (const auto& i : issues) s += "\n  " + (i.path.empty() ? std::string("<root>") : i.path) + ": " + i.message;
    return s;
  }
  std::vector<SchemaIssue> issues_;
};

struct OracleSpec {
  Box bbox;
  double resolution = 0.01;
};

struct SolverSpec {
  SolverParams params;
  std::optional<Vector> start;
  std::optional<Vector> start_b;
  int starts = 8;
};

struct ProblemSpec {
  std::string name;
  int dimension = 0;
  NormSpec norm = NormSpec::euclidean();
  std::vector<SetExpr> a_parts;
  std::vector<SetExpr> b_parts;
  bool a_is_list = false;
  bool b_is_list = false;
  SolverSpec solver;
  std::optional<OracleSpec> oracle;
  std::vector<std::string> outputs{"report"};
  json expect;  // corpus ground truth, kept verbatim

  SetExpr set_a() const { return a_parts.size() == 1 ? a_parts.front() : make_intersection(a_parts); }
  SetExpr set_b() const { return b_parts.size() == 1 ? b_parts.front() : make_intersection(b_parts); }
};

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

inline json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json norm_json(const NormSpec& n) {
  json o;
  if (n.is_infinity()) o["p"] = "inf";
  else o["p"] = n.p();
  return o;
}

inline json function_json(const ConvexFunction& f) {
  json o;
  if (const auto* af = std::get_if<AffineFunction>(&f)) {
    o["kind"] = "affine";
    o["g"] = vec_json(af->g);
    o["d"] = af->d;
  } else if (const auto* qf = std::get_if<QuadraticFunction>(&f)) {
    o["kind"] = "quadratic";
    json rows = json::array();
    for (Eigen::Index i = 0; i < qf->q.rows(); ++i) rows.push_back(vec_json(qf->q.row(i).transpose()));
    o["q"] = rows;
    o["g"] = vec_json(qf->g);
    o["d"] = qf->d;
  } else {
    const auto& ef = std::get<ExpFunction>(f);
    o["kind"] = "exp";
    o["coord"] = ef.coord;
    o["c"] = ef.c;
    o["g"] = vec_json(ef.g);
    o["d"] = ef.d;
  }
  return o;
}

}  // namespace detail

inline json set_to_json(const SetExpr& s) {
  using detail::vec_json;
  json o;
  switch (s.kind()) {
    case SetKind::Halfspace: {
      const auto& h = *s.as<Halfspace>();
      o = {{"type", "halfspace"}, {"normal", vec_json(h.normal)}, {"offset", h.offset}};
      break;
    }
    case SetKind::Box: {
      const auto& b = *s.as<Box>();
      o = {{"type", "box"}, {"lo", vec_json(b.lo)}, {"hi", vec_json(b.hi)}};
      break;
    }
    case SetKind::NormBall: {
      const auto& b = *s.as<NormBall>();
      o = {{"type", "ball"}, {"center", vec_json(b.center)}, {"radius", b.radius}, {"norm", detail::norm_json(b.norm)}};
      break;
    }
    case SetKind::Ellipsoid: {
      const auto& e = *s.as<Ellipsoid>();
      o = {{"type", "ellipsoid"}, {"center", vec_json(e.center)}, {"semiaxes", vec_json(e.semiaxes)}};
      break;
    }
    case SetKind::PolytopeH: {
      json hs = json::array();
      for (const auto& h : s.as<PolytopeH>()->halfspaces) hs.push_back({{"normal", vec_json(h.normal)}, {"offset", h.offset}});
      o = {{"type", "polytope"}, {"halfspaces", hs}};
      break;
    }
    case SetKind::AffineSubspace: {
      const auto& af = *s.as<AffineSubspace>();
      json basis = json::array();
      for (Eigen::Index j = 0; j < af.basis.cols(); ++j) basis.push_back(vec_json(af.basis.col(j)));
      o = {{"type", "affine"}, {"point", vec_json(af.point)}, {"basis", basis}};
      break;
    }
    case SetKind::SegmentSet: {
      const auto& seg = s.as<SegmentSet>()->seg;
      o = {{"type", "segment"}, {"a0", vec_json(seg.a0)}, {"a1", vec_json(seg.a1)}};
      break;
    }
    case SetKind::Intersection: {
      json parts = json::array();
      for (const auto& p : s.as<Intersection>()->parts) parts.push_back(set_to_json(p));
      o = {{"type", "intersection"}, {"parts", parts}};
      break;
    }
    case SetKind::Cylinder: {
      const auto& c = *s.as<Cylinder>();
      o = {{"type", "cylinder"},
           {"cross_section", set_to_json(*c.cross_section)},
           {"axis_point", vec_json(c.axis_point)},
           {"axis_dir", vec_json(c.axis_dir)}};
      if (c.extent) o["extent"] = json::array({c.extent->first, c.extent->second});
      else o["extent"] = "full";
      break;
    }
    case SetKind::VoronoiCell: {
      const auto& v = *s.as<VoronoiCell>();
      json sites = json::array();
      for (const auto& p : v.sites) sites.push_back(vec_json(p));
      o = {{"type", "voronoi"}, {"sites", sites}, {"competitor", set_to_json(*v.competitor)}};
      break;
    }
    case SetKind::SublevelSet: {
      const auto& sl = *s.as<SublevelSet>();
      o = {{"type", "sublevel"}, {"function", detail::function_json(sl.f)}, {"level", sl.level}};
      break;
    }
  }
  return o;
}

inline json solver_to_json(const SolverSpec& s) {
  const SolverParams& p = s.params;
  json o;
  o["method"] = to_string(p.method);
  o["tol"] = p.tol;
  o["max_iter"] = p.max_iter;
  o["step"] = {{"schedule", p.step.kind == StepSchedule::Kind::Constant ? "constant" : "diminishing"}, {"c", p.step.c}};
  o["blowup_radius"] = p.blowup_radius;
  o["seed"] = p.seed;
  o["start_radius"] = p.start_radius;
  o["inner_iter"] = p.inner_iter;
  o["starts"] = s.starts;
  if (s.start) o["start"] = detail::vec_json(*s.start);
  if (s.start_b) o["start_b"] = detail::vec_json(*s.start_b);
  return o;
}

inline json problem_to_json(const ProblemSpec& spec) {
  json o;
  if (!spec.name.empty()) o["name"] = spec.name;
  o["dimension"] = spec.dimension;
  o["norm"] = detail::norm_json(spec.norm);
  auto side = [](const std::vector<SetExpr>& parts, bool list) {
    if (!list) return set_to_json(parts.front());
    json a = json::array();
    for (const auto& p : parts) a.push_back(set_to_json(p));
    return a;
  };
  o["set_a"] = side(spec.a_parts, spec.a_is_list);
  o["set_b"] = side(spec.b_parts, spec.b_is_list);
  o["solver"] = solver_to_json(spec.solver);
  if (spec.oracle) {
    o["oracle"] = {{"bbox", {{"lo", detail::vec_json(spec.oracle->bbox.lo)}, {"hi", detail::vec_json(spec.oracle->bbox.hi)}}},
                   {"resolution", spec.oracle->resolution}};
  }
  o["outputs"] = spec.outputs;
  if (!spec.expect.is_null()) o["expect"] = spec.expect;
  return o;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

class SpecParser {
 public:
  std::vector<SchemaIssue> issues;
  int dim = 0;

  void fail(const std::string& path, const std::string& msg) { issues.push_back({path, msg}); }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
  static std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

  const json* field(const json& o, const std::string& path, const char* key, bool required = true) {
    if (!o.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = o.find(key);
    if (it == o.end()) {
      if (required) fail(join(path, key), "missing field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& o, const std::string& path, const char* key, bool required = true) {
    const json* f = field(o, path, key, required);
    if (!f) return std::nullopt;
    if (!f->is_number()) {
      fail(join(path, key), "expected a number");
      return std::nullopt;
    }
    const double v = f->get<double>();
    if (!std::isfinite(v)) {
      fail(join(path, key), "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<Vector> vector_at(const json& v, const std::string& path, Eigen::Index expect_dim) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(index(path, i), "expected a number");
        return std::nullopt;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
      if (!std::isfinite(out[static_cast<Eigen::Index>(i)])) {
        fail(index(path, i), "must be finite");
        return std::nullopt;
      }
    }
    if (expect_dim > 0 && out.size() != expect_dim) {
      fail(path, "dimension mismatch: expected " + std::to_string(expect_dim) + ", got " + std::to_string(out.size()));
      return std::nullopt;
    }
    return out;
  }

  std::optional<Vector> vec(const json& o, const std::string& path, const char* key, bool required = true) {
    const json* f = field(o, path, key, required);
    if (!f) return std::nullopt;
    return vector_at(*f, join(path, key), dim);
  }

  std::optional<NormSpec> norm(const json& o, const std::string& path) {
    const json* p = field(o, path, "p");
    if (!p) return std::nullopt;
    const std::string pp = join(path, "p");
    if (p->is_string()) {
      const auto s = p->get<std::string>();
      if (s == "inf" || s == "infinity") return NormSpec::infinity();
      fail(pp, "expected a number >= 1 or \"inf\"");
      return std::nullopt;
    }
    if (!p->is_number() || !(p->get<double>() >= 1.0) || !std::isfinite(p->get<double>())) {
      fail(pp, "expected a number >= 1 or \"inf\"");
      return std::nullopt;
    }
    return NormSpec::lp(p->get<double>());
  }

  template <class Make>
  std::optional<SetExpr> build(const std::string& path, Make&& make) {
    try {
      return make();
    } catch (const std::exception& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }

  std::optional<ConvexFunction> function(const json& o, const std::string& path) {
    const json* k = field(o, path, "kind");
    if (!k) return std::nullopt;
    const std::string kind = k->is_string() ? k->get<std::string>() : "";
    auto g = vec(o, path, "g");
    auto d = number(o, path, "d", false);
    if (kind == "affine") {
      if (!g) return std::nullopt;
      return AffineFunction{*g, d.value_or(0.0)};
    }
    if (kind == "quadratic") {
      const json* q = field(o, path, "q");
      if (!q || !g) return std::nullopt;
      if (!q->is_array() || q->size() != static_cast<std::size_t>(dim)) {
        fail(join(path, "q"), "expected " + std::to_string(dim) + " rows");
        return std::nullopt;
      }
      Matrix m(dim, dim);
      for (std::size_t i = 0; i < q->size(); ++i) {
        auto row = vector_at((*q)[i], index(join(path, "q"), i), dim);
        if (!row) return std::nullopt;
        m.row(static_cast<Eigen::Index>(i)) = row->transpose();
      }
      return QuadraticFunction{m, *g, d.value_or(0.0)};
    }
    if (kind == "exp") {
      auto coord = number(o, path, "coord");
      auto c = number(o, path, "c", false);
      if (!coord || !g) return std::nullopt;
      if (*coord != std::floor(*coord) || *coord < 0 || *coord >= dim) {
        fail(join(path, "coord"), "expected a coordinate index in [0, dimension)");
        return std::nullopt;
      }
      return ExpFunction{static_cast<Eigen::Index>(*coord), c.value_or(1.0), *g, d.value_or(0.0)};
    }
    fail(join(path, "kind"), "unknown function kind (expected affine, quadratic or exp)");
    return std::nullopt;
  }

  std::optional<SetExpr> set(const json& o, const std::string& path) {
    const json* t = field(o, path, "type");
    if (!t) return std::nullopt;
    if (!t->is_string()) {
      fail(join(path, "type"), "expected a string");
      return std::nullopt;
    }
    const std::string type = t->get<std::string>();
    if (type == "halfspace") {
      auto n = vec(o, path, "normal");
      auto c = number(o, path, "offset");
      if (!n || !c) return std::nullopt;
      return build(path, [&] { return make_halfspace(*n, *c); });
    }
    if (type == "box") {
      auto lo = vec(o, path, "lo");
      auto hi = vec(o, path, "hi");
      if (!lo || !hi) return std::nullopt;
      return build(path, [&] { return make_box(*lo, *hi); });
    }
    if (type == "ball") {
      auto c = vec(o, path, "center");
      auto r = number(o, path, "radius");
      std::optional<NormSpec> ns = NormSpec::euclidean();
      if (const json* nj = field(o, path, "norm", false)) ns = norm(*nj, join(path, "norm"));
      if (r && !(*r > 0.0)) {
        fail(join(path, "radius"), "must be positive");
        return std::nullopt;
      }
      if (!c || !r || !ns) return std::nullopt;
      return build(path, [&] { return make_ball(*c, *r, *ns); });
    }
    if (type == "ellipsoid") {
      auto c = vec(o, path, "center");
      auto s = vec(o, path, "semiaxes");
      if (s && (s->array() <= 0.0).any()) {
        fail(join(path, "semiaxes"), "must be positive");
        return std::nullopt;
      }
      if (!c || !s) return std::nullopt;
      return build(path, [&] { return make_ellipsoid(*c, *s); });
    }
    if (type == "polytope") {
      const json* hs = field(o, path, "halfspaces");
      if (!hs) return std::nullopt;
      const std::string hp = join(path, "halfspaces");
      if (!hs->is_array() || hs->empty()) {
        fail(hp, "expected a nonempty array");
        return std::nullopt;
      }
      std::vector<Halfspace> list;
      for (std::size_t i = 0; i < hs->size(); ++i) {
        auto n = vec((*hs)[i], index(hp, i), "normal");
        auto c = number((*hs)[i], index(hp, i), "offset");
        if (!n || !c) return std::nullopt;
        if (n->norm() == 0.0) {
          fail(join(index(hp, i), "normal"), "must be nonzero");
          return std::nullopt;
        }
        list.push_back({*n, *c});
      }
      return build(path, [&] { return make_polytope(list); });
    }
    if (type == "affine") {
      auto p = vec(o, path, "point");
      const json* b = field(o, path, "basis", false);
      Matrix basis(dim, 0);
      if (b) {
        if (!b->is_array()) {
          fail(join(path, "basis"), "expected an array of vectors");
          return std::nullopt;
        }
        basis.resize(dim, static_cast<Eigen::Index>(b->size()));
        for (std::size_t j = 0; j < b->size(); ++j) {
          auto v = vector_at((*b)[j], index(join(path, "basis"), j), dim);
          if (!v) return std::nullopt;
          basis.col(static_cast<Eigen::Index>(j)) = *v;
        }
      }
      if (!p) return std::nullopt;
      return build(path, [&] { return make_affine(*p, basis); });
    }
    if (type == "segment") {
      auto a0 = vec(o, path, "a0");
      auto a1 = vec(o, path, "a1");
      if (!a0 || !a1) return std::nullopt;
      return build(path, [&] { return make_segment(*a0, *a1); });
    }
    if (type == "intersection") {
      const json* ps = field(o, path, "parts");
      if (!ps) return std::nullopt;
      auto parts = set_list(*ps, join(path, "parts"));
      if (!parts) return std::nullopt;
      return build(path, [&] { return make_intersection(*parts); });
    }
    if (type == "cylinder") {
      const json* cs = field(o, path, "cross_section");
      auto ap = vec(o, path, "axis_point");
      auto ad = vec(o, path, "axis_dir");
      std::optional<SetExpr> cross;
      if (cs) cross = set(*cs, join(path, "cross_section"));
      std::optional<std::pair<double, double>> extent;
      if (const json* ex = field(o, path, "extent", false)) {
        if (ex->is_string() && ex->get<std::string>() == "full") {
          extent = std::nullopt;
        } else if (ex->is_array() && ex->size() == 2 && (*ex)[0].is_number() && (*ex)[1].is_number()) {
          extent = std::pair{(*ex)[0].get<double>(), (*ex)[1].get<double>()};
        } else {
          fail(join(path, "extent"), "expected \"full\" or [t_lo, t_hi]");
          return std::nullopt;
        }
      }
      if (!cross || !ap || !ad) return std::nullopt;
      return build(path, [&] { return make_cylinder(*cross, *ap, *ad, extent); });
    }
    if (type == "voronoi") {
      const json* ss = field(o, path, "sites");
      const json* cj = field(o, path, "competitor");
      if (!ss || !cj) return std::nullopt;
      if (!ss->is_array() || ss->empty()) {
        fail(join(path, "sites"), "expected a nonempty array of points");
        return std::nullopt;
      }
      std::vector<Vector> sites;
      for (std::size_t i = 0; i < ss->size(); ++i) {
        auto v = vector_at((*ss)[i], index(join(path, "sites"), i), dim);
        if (!v) return std::nullopt;
        sites.push_back(*v);
      }
      auto comp = set(*cj, join(path, "competitor"));
      if (!comp) return std::nullopt;
      return build(path, [&] { return make_voronoi(sites, *comp); });
    }
    if (type == "sublevel") {
      const json* fj = field(o, path, "function");
      auto level = number(o, path, "level");
      if (!fj) return std::nullopt;
      auto f = function(*fj, join(path, "function"));
      if (!f || !level) return std::nullopt;
      return build(path, [&] { return make_sublevel(*f, *level); });
    }
    fail(join(path, "type"), "unknown variant tag \"" + type + "\"");
    return std::nullopt;
  }

  std::optional<std::vector<SetExpr>> set_list(const json& a, const std::string& path) {
    if (!a.is_array() || a.empty()) {
      fail(path, "expected a nonempty array of sets");
      return std::nullopt;
    }
    std::vector<SetExpr> out;
    bool ok = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto s = set(a[i], index(path, i));
      if (s) out.push_back(*s);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }
};

}  // namespace detail

inline ProblemSpec parse_problem_json(const json& root) {
  detail::SpecParser ps;
  ProblemSpec spec;
  if (!root.is_object()) throw SchemaError(std::vector<SchemaIssue>{{"", "expected a top-level object"}});
  static const char* known[] = {"name", "description", "dimension", "norm", "set_a", "set_b",
                                "solver", "oracle", "outputs", "expect"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) ps.fail(it.key(), "unknown field");
  }
  if (auto nm = root.find("name"); nm != root.end()) {
    if (nm->is_string()) spec.name = nm->get<std::string>();
    else ps.fail("name", "expected a string");
  }
  auto dim = ps.number(root, "", "dimension");
  if (dim && (*dim < 1 || *dim != std::floor(*dim))) {
    ps.fail("dimension", "expected a positive integer");
    dim.reset();
  }
  if (!dim) throw SchemaError(ps.issues);
  spec.dimension = static_cast<int>(*dim);
  ps.dim = spec.dimension;

  if (const json* n = ps.field(root, "", "norm")) {
    if (auto ns = ps.norm(*n, "norm")) spec.norm = *ns;
  }
  auto side = [&](const char* key, std::vector<SetExpr>& parts, bool& is_list) {
    const json* s = ps.field(root, "", key);
    if (!s) return;
    if (s->is_array()) {
      is_list = true;
      if (auto l = ps.set_list(*s, key)) parts = *l;
    } else if (auto one = ps.set(*s, key)) {
      parts = {*one};
    }
  };
  side("set_a", spec.a_parts, spec.a_is_list);
  side("set_b", spec.b_parts, spec.b_is_list);

  if (const json* sj = ps.field(root, "", "solver", false)) {
    SolverParams& p = spec.solver.params;
    if (auto v = ps.number(*sj, "solver", "tol", false)) {
      if (*v > 0) p.tol = *v;
      else ps.fail("solver.tol", "must be positive");
    }
    if (auto v = ps.number(*sj, "solver", "max_iter", false)) {
      if (*v >= 1 && *v == std::floor(*v)) p.max_iter = static_cast<int>(*v);
      else ps.fail("solver.max_iter", "expected an integer >= 1");
    }
    if (auto v = ps.number(*sj, "solver", "blowup_radius", false)) {
      if (*v > 0) p.blowup_radius = *v;
      else ps.fail("solver.blowup_radius", "must be positive");
    }
    if (auto v = ps.number(*sj, "solver", "seed", false)) {
      if (*v >= 0 && *v == std::floor(*v)) p.seed = static_cast<std::uint64_t>(*v);
      else ps.fail("solver.seed", "expected a nonnegative integer");
    }
    if (auto v = ps.number(*sj, "solver", "start_radius", false)) {
      if (*v > 0) p.start_radius = *v;
      else ps.fail("solver.start_radius", "must be positive");
    }
    if (auto v = ps.number(*sj, "solver", "inner_iter", false)) {
      if (*v >= 1 && *v == std::floor(*v)) p.inner_iter = static_cast<int>(*v);
      else ps.fail("solver.inner_iter", "expected an integer >= 1");
    }
    if (auto v = ps.number(*sj, "solver", "starts", false)) {
      if (*v >= 2 && *v == std::floor(*v)) spec.solver.starts = static_cast<int>(*v);
      else ps.fail("solver.starts", "expected an integer >= 2");
    }
    if (const json* m = ps.field(*sj, "solver", "method", false)) {
      const std::string s = m->is_string() ? m->get<std::string>() : "";
      if (s == "auto") p.method = Method::Auto;
      else if (s == "alternating") p.method = Method::Alternating;
      else if (s == "descent") p.method = Method::Descent;
      else if (s == "simultaneous") p.method = Method::Simultaneous;
      else ps.fail("solver.method", "expected auto, alternating, descent or simultaneous");
    }
    if (const json* st = ps.field(*sj, "solver", "step", false)) {
      if (const json* k = ps.field(*st, "solver.step", "schedule", false)) {
        const std::string s = k->is_string() ? k->get<std::string>() : "";
        if (s == "constant") p.step.kind = StepSchedule::Kind::Constant;
        else if (s == "diminishing") p.step.kind = StepSchedule::Kind::Diminishing;
        else ps.fail("solver.step.schedule", "expected constant or diminishing");
      }
      if (auto c = ps.number(*st, "solver.step", "c", false)) {
        if (*c >= 0) p.step.c = *c;
        else ps.fail("solver.step.c", "must be >= 0");
      }
    }
    spec.solver.start = ps.vec(*sj, "solver", "start", false);
    spec.solver.start_b = ps.vec(*sj, "solver", "start_b", false);
  }

  if (const json* oj = ps.field(root, "", "oracle", false)) {
    const json* bb = ps.field(*oj, "oracle", "bbox");
    auto res = ps.number(*oj, "oracle", "resolution");
    if (res && !(*res > 0)) {
      ps.fail("oracle.resolution", "must be positive");
      res.reset();
    }
    if (bb) {
      auto lo = ps.vec(*bb, "oracle.bbox", "lo");
      auto hi = ps.vec(*bb, "oracle.bbox", "hi");
      if (lo && hi && res) {
        if ((lo->array() > hi->array()).any()) ps.fail("oracle.bbox", "requires lo <= hi");
        else spec.oracle = OracleSpec{Box{*lo, *hi}, *res};
      }
    }
  }

  if (const json* oj = ps.field(root, "", "outputs", false)) {
    spec.outputs.clear();
    if (!oj->is_array()) {
      ps.fail("outputs", "expected an array");
    } else {
      for (std::size_t i = 0; i < oj->size(); ++i) {
        const json& e = (*oj)[i];
        if (e.is_string() && (e == "report" || e == "plotdata")) spec.outputs.push_back(e.get<std::string>());
        else ps.fail("outputs[" + std::to_string(i) + "]", "expected \"report\" or \"plotdata\"");
      }
    }
  }
  if (auto ex = root.find("expect"); ex != root.end()) spec.expect = *ex;

  if (!ps.issues.empty()) throw SchemaError(ps.issues);
  return spec;
}

inline ProblemSpec parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::vector<SchemaIssue>{{"", std::string("malformed JSON: ") + e.what()}});
  }
  return parse_problem_json(root);
}

inline std::string print_problem(const ProblemSpec& spec) { return problem_to_json(spec).dump(2); }

inline bool same_params(const SolverSpec& a, const SolverSpec& b) {
  const SolverParams& p = a.params;
  const SolverParams& q = b.params;
  auto same_opt = [](const std::optional<Vector>& x, const std::optional<Vector>& y) {
    return x.has_value() == y.has_value() && (!x || same_vector(*x, *y));
  };
  return p.tol == q.tol && p.max_iter == q.max_iter && p.step.kind == q.step.kind && p.step.c == q.step.c &&
         p.blowup_radius == q.blowup_radius && p.seed == q.seed && p.method == q.method &&
         p.start_radius == q.start_radius && p.inner_iter == q.inner_iter && a.starts == b.starts &&
         same_opt(a.start, b.start) && same_opt(a.start_b, b.start_b);
}

inline bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
  auto same_parts = [](const std::vector<SetExpr>& x, const std::vector<SetExpr>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] == y[i])) return false;
    return true;
  };
  const bool same_oracle = a.oracle.has_value() == b.oracle.has_value() &&
                           (!a.oracle || (same_vector(a.oracle->bbox.lo, b.oracle->bbox.lo) &&
                                          same_vector(a.oracle->bbox.hi, b.oracle->bbox.hi) &&
                                          a.oracle->resolution == b.oracle->resolution));
  return a.name == b.name && a.dimension == b.dimension && a.norm == b.norm && same_parts(a.a_parts, b.a_parts) &&
         same_parts(a.b_parts, b.b_parts) && a.a_is_list == b.a_is_list && a.b_is_list == b.b_is_list &&
         same_params(a.solver, b.solver) && same_oracle && a.outputs == b.outputs && a.expect == b.expect;
}

}  // namespace bap

#endif  // BAP_PROBLEM_HPP
