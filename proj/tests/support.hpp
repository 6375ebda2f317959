#ifndef BAP_TESTS_SUPPORT_HPP
#define BAP_TESTS_SUPPORT_HPP

#include "bap/report.hpp"
#include "bap_corpus.hpp"

#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bap::testing {

inline ProblemSpec corpus_spec(const std::string& file) {
  for (const auto& e : builtin_corpus())
    if (e.file == file) return parse_problem(e.text);
  throw std::runtime_error("no corpus file " + file);
}

inline SetExpr box_a() { return make_box(make_vector({-2, -2}), make_vector({2, 0})); }
inline SetExpr ellipse_b() { return make_ellipsoid(make_vector({0, 2}), make_vector({2, 1})); }

// ---------------------------------------------------------------------------
// Randomized projection instances.

enum class Variant {
  Halfspace,
  Box,
  Ball2,
  Ball1,
  Ball3,
  BallInf,
  Ellipsoid,
  Polytope,
  Affine,
  Segment,
  Intersection,
  CylinderBall,
  CylinderEllipse,
  SublevelAffine,
  SublevelQuadratic,
  SublevelExp,
};

inline const std::vector<std::pair<Variant, const char*>>& all_variants() {
  static const std::vector<std::pair<Variant, const char*>> v = {
      {Variant::Halfspace, "halfspace"},
      {Variant::Box, "box"},
      {Variant::Ball2, "ball_p2"},
      {Variant::Ball1, "ball_p1"},
      {Variant::Ball3, "ball_p3"},
      {Variant::BallInf, "ball_pinf"},
      {Variant::Ellipsoid, "ellipsoid"},
      {Variant::Polytope, "polytope"},
      {Variant::Affine, "affine"},
      {Variant::Segment, "segment"},
      {Variant::Intersection, "intersection"},
      {Variant::CylinderBall, "cylinder_ball"},
      {Variant::CylinderEllipse, "cylinder_ellipsoid"},
      {Variant::SublevelAffine, "sublevel_affine"},
      {Variant::SublevelQuadratic, "sublevel_quadratic"},
      {Variant::SublevelExp, "sublevel_exp"},
  };
  return v;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Vector gaussian(Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng_);
    return v;
  }
  Vector uniform_vec(Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Vector unit(Eigen::Index n) {
    Vector v = gaussian(n);
    while (v.norm() < 1e-3) v = gaussian(n);
    return v / v.norm();
  }

  SetExpr make(Variant kind, Eigen::Index n) {
    switch (kind) {
      case Variant::Halfspace: return make_halfspace(gaussian(n), uniform(-2, 2));
      case Variant::Box: {
        const Vector lo = uniform_vec(n, -3, 1);
        return make_box(lo, lo + uniform_vec(n, 0.1, 3));
      }
      case Variant::Ball2: return make_ball(uniform_vec(n, -2, 2), uniform(0.2, 3), NormSpec::euclidean());
      case Variant::Ball1: return make_ball(uniform_vec(n, -2, 2), uniform(0.2, 3), NormSpec::lp(1));
      case Variant::Ball3: return make_ball(uniform_vec(n, -2, 2), uniform(0.2, 3), NormSpec::lp(3));
      case Variant::BallInf: return make_ball(uniform_vec(n, -2, 2), uniform(0.2, 3), NormSpec::infinity());
      case Variant::Ellipsoid: return make_ellipsoid(uniform_vec(n, -2, 2), uniform_vec(n, 0.2, 3));
      case Variant::Polytope: {
        const Vector c = uniform_vec(n, -1, 1);
        std::vector<Halfspace> hs;
        const int m = integer(static_cast<int>(n) + 1, 7);
        for (int i = 0; i < m; ++i) {
          const Vector a = unit(n);
          hs.push_back({a, a.dot(c) + uniform(0.1, 2)});
        }
        return make_polytope(hs);
      }
      case Variant::Affine: {
        const int k = integer(1, static_cast<int>(n) - 1);
        Matrix basis(n, k);
        for (int j = 0; j < k; ++j) basis.col(j) = gaussian(n);
        return make_affine(uniform_vec(n, -2, 2), basis);
      }
      case Variant::Segment: return make_segment(uniform_vec(n, -3, 3), uniform_vec(n, -3, 3));
      case Variant::Intersection: {
        const Vector c = uniform_vec(n, -1, 1);
        const Vector a = unit(n);
        return make_intersection({make_ball(c + 0.3 * unit(n), uniform(0.8, 2.5)),
                                  make_halfspace(a, a.dot(c) + uniform(0.0, 0.5)),
                                  make_box(c - uniform_vec(n, 0.2, 2), c + uniform_vec(n, 0.2, 2))});
      }
      case Variant::CylinderBall: {
        const Vector p = uniform_vec(n, -2, 2);
        std::optional<std::pair<double, double>> extent;
        if (integer(0, 1) == 1) {
          const double t0 = uniform(-3, 1);
          extent = std::pair{t0, t0 + uniform(0, 3)};
        }
        return make_cylinder(make_ball(p, uniform(0.2, 2)), p, unit(n), extent);
      }
      case Variant::CylinderEllipse: {
        const Vector p = uniform_vec(n, -2, 2);
        Vector axis = Vector::Zero(n);
        axis[integer(0, static_cast<int>(n) - 1)] = 1.0;
        std::optional<std::pair<double, double>> extent;
        if (integer(0, 1) == 1) {
          const double t0 = uniform(-3, 1);
          extent = std::pair{t0, t0 + uniform(0, 3)};
        }
        return make_cylinder(make_ellipsoid(p, uniform_vec(n, 0.2, 3)), p, axis, extent);
      }
      case Variant::SublevelAffine: return make_sublevel(AffineFunction{gaussian(n), uniform(-1, 1)}, uniform(-1, 1));
      case Variant::SublevelQuadratic: {
        const Matrix m = Matrix::NullaryExpr(n, n, [&] { return uniform(-1, 1); });
        const Matrix q = m.transpose() * m + 0.1 * Matrix::Identity(n, n);
        const Vector g = gaussian(n);
        const Vector x0 = uniform_vec(n, -1, 1);
        const double value = 0.5 * x0.dot(q * x0) + g.dot(x0);
        return make_sublevel(QuadraticFunction{q, g, 0.0}, value + uniform(0.1, 2));
      }
      case Variant::SublevelExp: {
        const Eigen::Index coord = integer(0, static_cast<int>(n) - 1);
        const Vector g = gaussian(n);
        const Vector x0 = uniform_vec(n, -1, 1);
        const double c = uniform(0.2, 2);
        const double value = c * std::exp(x0[coord]) + g.dot(x0);
        return make_sublevel(ExpFunction{coord, c, g, 0.0}, value + uniform(0.1, 2));
      }
    }
    throw std::logic_error("unhandled variant");
  }

 private:
  std::mt19937_64 rng_;
};

struct ProjectionStats {
  int instances = 0;
  double idempotence = 0.0;         // max ||P(Px) - Px||
  double variational = 0.0;         // max <x - Px, c - Px> / (1 + ||x - Px|| ||c - Px||)
  double nonexpansive = 0.0;        // max ||Px - Py|| - ||x - y||
  double membership = 0.0;          // max violation of the defining constraints at Px
  int not_converged = 0;
};

inline ProjectionStats run_projection_suite(Variant kind, int instances, std::uint64_t seed) {
  Sampler smp(seed);
  ProjectionStats st;
  for (int i = 0; i < instances; ++i) {
    const Eigen::Index n = smp.integer(2, 3);
    const SetExpr s = smp.make(kind, n);
    const Vector x = smp.gaussian(n, 4.0);
    const Vector y = smp.gaussian(n, 4.0);
    const ProjectionResult px = euclid_project(s, x);
    const ProjectionResult py = euclid_project(s, y);
    const ProjectionResult ppx = euclid_project(s, px.point);
    st.not_converged += (px.converged && py.converged) ? 0 : 1;
    st.idempotence = std::max(st.idempotence, (ppx.point - px.point).norm());
    st.nonexpansive = std::max(st.nonexpansive, (px.point - py.point).norm() - (x - y).norm());
    st.membership = std::max(st.membership, -constraint_slack(s, px.point));
    for (int k = 0; k < 4; ++k) {
      const Vector c = euclid_project(s, smp.gaussian(n, 4.0)).point;
      const double scale = 1.0 + (x - px.point).norm() * (c - px.point).norm();
      st.variational = std::max(st.variational, (x - px.point).dot(c - px.point) / scale);
    }
    ++st.instances;
  }
  return st;
}

/// Dykstra over axis-aligned halfspaces against the closed-form box projection.
inline double dykstra_box_disagreement(int instances, std::uint64_t seed) {
  Sampler smp(seed);
  double worst = 0.0;
  ProjectionParams pp;
  pp.tol = 1e-12;
  pp.max_iter = 20000;
  for (int i = 0; i < instances; ++i) {
    const Eigen::Index n = smp.integer(2, 3);
    const Vector lo = smp.uniform_vec(n, -3, 1);
    const Vector hi = lo + smp.uniform_vec(n, 0.1, 3);
    std::vector<SetExpr> parts;
    for (Eigen::Index k = 0; k < n; ++k) {
      Vector e = Vector::Zero(n);
      e[k] = 1.0;
      parts.push_back(make_halfspace(e, hi[k]));
      parts.push_back(make_halfspace(-e, -lo[k]));
    }
    const Vector x = smp.gaussian(n, 4.0);
    const Vector p = dykstra_project(std::span<const SetExpr>(parts), x, pp).point;
    const Vector q = euclid_project(make_box(lo, hi), x).point;
    worst = std::max(worst, (p - q).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Structural checks shared by the unit suite and the acceptance binary.

struct PropertyStats {
  int boundary_identity_checked = 0;
  int boundary_identity_failed = 0;
  int boundary_points_checked = 0;
  int boundary_points_failed = 0;
  int segment_pairs_checked = 0;
  int segment_pairs_failed = 0;
  std::vector<std::string> failures;
};

/// Boundary distance identity, boundary membership of converged BAPs and the
/// segment-of-BAPs check, on every 2-D corpus instance.
inline PropertyStats run_property_suite() {
  PropertyStats st;
  for (const auto& entry : builtin_corpus()) {
    const ProblemSpec spec = parse_problem(entry.text);
    if (spec.dimension != 2) continue;
    const SetExpr A = spec.set_a();
    const SetExpr B = spec.set_b();
    if (spec.oracle) {
      const auto bi = verify_boundary_identity(A, B, spec.norm, spec.oracle->bbox, spec.oracle->resolution);
      ++st.boundary_identity_checked;
      if (!bi.holds.value_or(false)) {
        ++st.boundary_identity_failed;
        st.failures.push_back(entry.file + ": boundary identity " + bi.note);
      }
    }
    const SolveStage solved = run_solve(spec);
    std::vector<BapResult> runs;
    if (solved.multistart) runs = solved.multistart->runs;
    else runs = {solved.primary};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : runs)
      if (r.converged) best = std::min(best, r.distance);
    for (const auto& r : runs) {
      if (!r.converged || r.distance <= 10.0 * spec.solver.params.tol) continue;
      ++st.boundary_points_checked;
      const bool ok = contains(A, r.a, 1e-6) && contains(B, r.b, 1e-6) && is_boundary_point(A, r.a, 1e-6) &&
                      is_boundary_point(B, r.b, 1e-6);
      if (!ok) {
        ++st.boundary_points_failed;
        st.failures.push_back(entry.file + ": converged pair off the boundary");
      }
    }
    const double share = 1e-9 * (1.0 + best);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (std::size_t j = i + 1; j < runs.size(); ++j) {
        const auto& p = runs[i];
        const auto& q = runs[j];
        if (!p.converged || !q.converged || std::abs(p.distance - best) > share || std::abs(q.distance - best) > share) continue;
        ++st.segment_pairs_checked;
        bool ok = true;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
          const Vector at = (1 - t) * p.a + t * q.a;
          const Vector bt = (1 - t) * p.b + t * q.b;
          ok = ok && contains(A, at, 1e-6) && contains(B, bt, 1e-6) && std::abs(norm_eval(spec.norm, at - bt) - best) <= 1e-6;
        }
        if (!ok) {
          ++st.segment_pairs_failed;
          st.failures.push_back(entry.file + ": interpolated pair is not optimal");
        }
      }
    }
  }
  return st;
}

}  // namespace bap::testing

#endif  // BAP_TESTS_SUPPORT_HPP
