#ifndef BAP_SET_QUERIES_HPP
#define BAP_SET_QUERIES_HPP

#include "bap/projection.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace bap {

inline constexpr double kMembershipTol = 1e-9;
inline constexpr double kBoundaryTol = 1e-7;

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Slack of the cylinder cross-section at z (z on the hyperplane through the
/// axis point), ignoring the axis coordinate of an ellipsoidal cross-section.
inline double cylinder_cross_slack(const Cylinder& cyl, const Vector& z) {
  if (const auto* ball = cyl.cross_section->as<NormBall>()) return ball->radius - (z - ball->center).norm();
  const auto& el = *cyl.cross_section->as<Ellipsoid>();
  Eigen::Index k = 0;
  cyl.axis_dir.cwiseAbs().maxCoeff(&k);
  double rho2 = 0.0;
  double smin = kInf;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (i == k) continue;
    const double q = (z[i] - el.center[i]) / el.semiaxes[i];
    rho2 += q * q;
    smin = std::min(smin, el.semiaxes[i]);
  }
  return (1.0 - std::sqrt(rho2)) * smin;
}

}  // namespace detail

/// Signed, distance-like slack of the tightest defining constraint: positive
/// in the interior, zero on an active constraint, negative outside.
inline double constraint_slack(const SetExpr& s, const Vector& x) {
  require_dim(x, s.dim(), "point");
  using detail::kInf;
  switch (s.kind()) {
    case SetKind::Halfspace: {
      const auto& h = *s.as<Halfspace>();
      return (h.offset - h.normal.dot(x)) / h.normal.norm();
    }
    case SetKind::Box: {
      const auto& b = *s.as<Box>();
      return std::min((x - b.lo).minCoeff(), (b.hi - x).minCoeff());
    }
    case SetKind::NormBall: {
      const auto& b = *s.as<NormBall>();
      return b.radius - norm_eval(b.norm, x - b.center);
    }
    case SetKind::Ellipsoid: {
      const auto& e = *s.as<Ellipsoid>();
      const double rho = std::sqrt(((x - e.center).array() / e.semiaxes.array()).square().sum());
      return (1.0 - rho) * e.semiaxes.minCoeff();
    }
    case SetKind::PolytopeH: {
      double m = kInf;
      for (const auto& h : s.as<PolytopeH>()->halfspaces) m = std::min(m, (h.offset - h.normal.dot(x)) / h.normal.norm());
      return m;
    }
    case SetKind::AffineSubspace: {
      if (s.affine_frame().cols() == s.dim()) return kInf;
      return -euclid_project(s, x).distance;
    }
    case SetKind::SegmentSet: {
      const auto& seg = s.as<SegmentSet>()->seg;
      if (s.dim() == 1 && seg.nondegenerate()) {
        const double lo = std::min(seg.a0[0], seg.a1[0]);
        const double hi = std::max(seg.a0[0], seg.a1[0]);
        return std::min(x[0] - lo, hi - x[0]);
      }
      return -euclid_project(s, x).distance;
    }
    case SetKind::Intersection: {
      double m = kInf;
      for (const auto& p : s.as<Intersection>()->parts) m = std::min(m, constraint_slack(p, x));
      return m;
    }
    case SetKind::Cylinder: {
      const auto& cyl = *s.as<Cylinder>();
      const double t = cyl.axis_dir.dot(x - cyl.axis_point);
      const Vector z = x - t * cyl.axis_dir;
      double m = detail::cylinder_cross_slack(cyl, z);
      if (cyl.extent) m = std::min({m, t - cyl.extent->first, cyl.extent->second - t});
      return m;
    }
    case SetKind::VoronoiCell: {
      const auto& vc = *s.as<VoronoiCell>();
      double site = kInf;
      for (const auto& p : vc.sites) site = std::min(site, (p - x).norm());
      return 0.5 * (euclid_project(*vc.competitor, x).distance - site);
    }
    case SetKind::SublevelSet: {
      const auto& sl = *s.as<SublevelSet>();
      const double gap = sl.level - detail::eval_function(sl.f, x);
      const double g = detail::eval_gradient(sl.f, x).norm();
      return g > 0.0 ? gap / g : (gap >= 0.0 ? kInf : gap);
    }
  }
  return -kInf;
}

inline bool contains(const SetExpr& s, const Vector& x, double tol = kMembershipTol) {
  require_dim(x, s.dim(), "point");
  switch (s.kind()) {
    case SetKind::Halfspace: {
      const auto& h = *s.as<Halfspace>();
      return h.normal.dot(x) <= h.offset + tol * h.normal.norm();
    }
    case SetKind::Box: {
      const auto& b = *s.as<Box>();
      return ((x.array() >= b.lo.array() - tol) && (x.array() <= b.hi.array() + tol)).all();
    }
    case SetKind::PolytopeH:
      for (const auto& h : s.as<PolytopeH>()->halfspaces)
        if (h.normal.dot(x) > h.offset + tol * h.normal.norm()) return false;
      return true;
    case SetKind::Intersection:
      for (const auto& p : s.as<Intersection>()->parts)
        if (!contains(p, x, tol)) return false;
      return true;
    default:
      return constraint_slack(s, x) >= -tol;
  }
}

/// True iff some defining constraint is active within tol. Throws
/// PreconditionError when x is not in s.
inline bool is_boundary_point(const SetExpr& s, const Vector& x, double tol = kBoundaryTol) {
  if (!contains(s, x, tol)) throw PreconditionError("is_boundary_point: point is not in the set");
  return constraint_slack(s, x) <= tol;
}

/// All defining inequalities hold strictly.
inline bool strictly_inside(const SetExpr& s, const Vector& x) { return constraint_slack(s, x) > 0.0; }

// ---------------------------------------------------------------------------
// Strict convexity.

enum class Verdict { Yes, No, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

struct StrictConvexityVerdict {
  Verdict value = Verdict::Unknown;
  std::optional<Segment> witness;  // a boundary segment when value == No
};

namespace detail {

inline StrictConvexityVerdict yes() { return {Verdict::Yes, std::nullopt}; }
inline StrictConvexityVerdict unknown() { return {Verdict::Unknown, std::nullopt}; }
inline StrictConvexityVerdict no(Vector a, Vector b) { return {Verdict::No, Segment(std::move(a), std::move(b))}; }

/// Big-M bounding rows used to keep facet LPs bounded.
inline void add_bounding_box(PolyhedralSystem& sys, double m) {
  const Eigen::Index n = sys.dim();
  Matrix rows(2 * n, n);
  rows << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  detail::append_rows(sys.a, sys.b, rows, Vector::Constant(2 * n, m));
}

inline double system_scale(const PolyhedralSystem& sys) {
  double m = 1.0;
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
    const double rn = sys.a.row(i).norm();
    if (rn > 0) m = std::max(m, std::abs(sys.b[i]) / rn);
  }
  for (Eigen::Index i = 0; i < sys.e.rows(); ++i) {
    const double rn = sys.e.row(i).norm();
    if (rn > 0) m = std::max(m, std::abs(sys.f[i]) / rn);
  }
  return m;
}

/// A nondegenerate segment inside the face {x in P : row i tight}, if any.
inline std::optional<Segment> facet_segment(const PolyhedralSystem& sys, Eigen::Index row) {
  const Eigen::Index n = sys.dim();
  PolyhedralSystem face = sys;
  const double big = 1e3 * system_scale(sys);
  add_bounding_box(face, big);
  detail::append_rows(face.e, face.f, sys.a.row(row), Vector::Constant(1, sys.b[row]));
  const Matrix dirs = orthogonal_complement(sys.a.row(row).transpose(), n);
  for (Eigen::Index k = 0; k < dirs.cols(); ++k) {
    const Vector v = dirs.col(k);
    auto hi = lp::maximize(face.a, face.b, face.e, face.f, v);
    if (hi.status != lp::Status::Optimal) return std::nullopt;
    auto lo = lp::maximize(face.a, face.b, face.e, face.f, -v);
    if (lo.status != lp::Status::Optimal) return std::nullopt;
    if (hi.value + lo.value > 1e-9 * big) {
      return Segment(lo.x, hi.x);
    }
  }
  return std::nullopt;
}

inline StrictConvexityVerdict classify_polyhedral(const PolyhedralSystem& sys) {
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
    if (auto seg = facet_segment(sys, i)) return {Verdict::No, seg};
  }
  if (sys.e.rows() > 0) {
    // A flat polyhedron is its own boundary; any segment inside it is a witness.
    PolyhedralSystem flat = sys;
    const double big = 1e3 * system_scale(sys);
    add_bounding_box(flat, big);
    const Eigen::Index n = sys.dim();
    for (Eigen::Index k = 0; k < n; ++k) {
      const Vector v = Vector::Unit(n, k);
      auto hi = lp::maximize(flat.a, flat.b, flat.e, flat.f, v);
      auto lo = lp::maximize(flat.a, flat.b, flat.e, flat.f, -v);
      if (hi.status == lp::Status::Optimal && lo.status == lp::Status::Optimal && hi.value + lo.value > 1e-9 * big) {
        return {Verdict::No, Segment(lo.x, hi.x)};
      }
    }
  }
  return yes();
}

}  // namespace detail

inline StrictConvexityVerdict classify_strict_convexity(const SetExpr& s) {
  using namespace detail;
  const Eigen::Index n = s.dim();
  if (n == 1) return yes();  // closed intervals, rays and lines have no boundary segments
  switch (s.kind()) {
    case SetKind::Halfspace: {
      const auto& h = *s.as<Halfspace>();
      const Vector p0 = h.normal * (h.offset / h.normal.squaredNorm());
      const Vector v = orthogonal_complement(h.normal, n).col(0);
      return no(p0 - v, p0 + v);
    }
    case SetKind::Box: {
      const auto& b = *s.as<Box>();
      Eigen::Index j = -1;
      for (Eigen::Index k = 0; k < n; ++k)
        if (b.lo[k] < b.hi[k]) {
          j = k;
          break;
        }
      if (j < 0) return yes();
      const Eigen::Index i = j == 0 ? 1 : 0;
      Vector p = 0.5 * (b.lo + b.hi);
      p[i] = b.hi[i];
      Vector a0 = p, a1 = p;
      a0[j] = b.lo[j];
      a1[j] = b.hi[j];
      return no(a0, a1);
    }
    case SetKind::NormBall: {
      const auto& b = *s.as<NormBall>();
      if (is_strictly_convex_norm(b.norm)) return yes();
      const Vector e1 = Vector::Unit(n, 0) * b.radius;
      const Vector e2 = Vector::Unit(n, 1) * b.radius;
      if (b.norm.is_infinity()) return no(b.center + e1 - e2, b.center + e1 + e2);
      return no(b.center + e1, b.center + e2);
    }
    case SetKind::Ellipsoid:
      return yes();
    case SetKind::PolytopeH:
      return classify_polyhedral(*polyhedral_system(s));
    case SetKind::AffineSubspace: {
      const auto& af = *s.as<AffineSubspace>();
      const Matrix& q = s.affine_frame();
      if (q.cols() == 0 || q.cols() == n) return yes();
      return no(af.point, af.point + q.col(0));
    }
    case SetKind::SegmentSet: {
      const auto& seg = s.as<SegmentSet>()->seg;
      if (!seg.nondegenerate()) return yes();
      return {Verdict::No, seg};
    }
    case SetKind::Intersection: {
      const auto& parts = s.as<Intersection>()->parts;
      bool all_yes = true;
      for (const auto& p : parts) all_yes = all_yes && classify_strict_convexity(p).value == Verdict::Yes;
      if (all_yes) return yes();
      if (auto sys = polyhedral_system(s)) return classify_polyhedral(*sys);
      for (const auto& p : parts) {
        auto v = classify_strict_convexity(p);
        if (v.value != Verdict::No || !v.witness) continue;
        bool survives = true;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
          const Vector q = segment_point(*v.witness, t);
          if (!contains(s, q, kMembershipTol) || constraint_slack(s, q) > kBoundaryTol) {
            survives = false;
            break;
          }
        }
        if (survives) return v;
      }
      return unknown();
    }
    case SetKind::Cylinder: {
      const auto& cyl = *s.as<Cylinder>();
      // A unit direction orthogonal to the axis and the cross-section radius
      // along it.
      Vector v;
      double r;
      if (const auto* ball = cyl.cross_section->as<NormBall>()) {
        v = orthogonal_complement(cyl.axis_dir, n).col(0);
        r = ball->radius;
      } else {
        const auto& el = *cyl.cross_section->as<Ellipsoid>();
        Eigen::Index k = 0;
        cyl.axis_dir.cwiseAbs().maxCoeff(&k);
        const Eigen::Index j = k == 0 ? 1 : 0;
        v = Vector::Unit(n, j);
        r = el.semiaxes[j];
      }
      if (!cyl.extent || cyl.extent->first < cyl.extent->second) {
        const Vector q = cyl.axis_point + r * v;
        const double t0 = cyl.extent ? cyl.extent->first : -1.0;
        const double t1 = cyl.extent ? cyl.extent->second : 1.0;
        return no(q + t0 * cyl.axis_dir, q + t1 * cyl.axis_dir);
      }
      const Vector z0 = cyl.axis_point + cyl.extent->first * cyl.axis_dir;
      return no(z0 - 0.5 * r * v, z0 + 0.5 * r * v);
    }
    case SetKind::VoronoiCell:
      return unknown();
    case SetKind::SublevelSet: {
      const auto& sl = *s.as<SublevelSet>();
      if (const auto* af = std::get_if<AffineFunction>(&sl.f)) {
        const Vector p0 = af->g * ((sl.level - af->d) / af->g.squaredNorm());
        const Vector v = orthogonal_complement(af->g, n).col(0);
        return no(p0 - v, p0 + v);
      }
      if (const auto* qf = std::get_if<QuadraticFunction>(&sl.f)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(qf->q);
        return es.eigenvalues().minCoeff() > 1e-12 ? yes() : unknown();
      }
      const auto& ef = std::get<ExpFunction>(sl.f);
      if (n == 2 && ef.c > 0.0 && ef.g[1 - ef.coord] != 0.0) return yes();
      return unknown();
    }
  }
  return unknown();
}

// ---------------------------------------------------------------------------
// Recession cones.

struct RecessionCone {
  enum class Kind { Bounded, Polyhedral, Lines, Unknown };
  Kind kind = Kind::Unknown;
  Matrix ineq;  // rows n_i: <n_i, d> <= 0
  Matrix eq;    // rows e_j: <e_j, d> = 0
  Matrix lines; // Lines: orthonormal basis of the lineality space
};

inline const char* to_string(RecessionCone::Kind k) {
  switch (k) {
    case RecessionCone::Kind::Bounded: return "bounded";
    case RecessionCone::Kind::Polyhedral: return "polyhedral";
    case RecessionCone::Kind::Lines: return "lines";
    case RecessionCone::Kind::Unknown: return "unknown";
  }
  return "?";
}

inline RecessionCone recession_cone_generators(const SetExpr& s) {
  using K = RecessionCone::Kind;
  const Eigen::Index n = s.dim();
  RecessionCone rc;
  rc.ineq = Matrix(0, n);
  rc.eq = Matrix(0, n);
  rc.lines = Matrix(n, 0);
  auto bounded = [&] {
    rc.kind = K::Bounded;
    rc.eq = Matrix::Identity(n, n);
    return rc;
  };
  switch (s.kind()) {
    case SetKind::NormBall:
    case SetKind::Ellipsoid:
    case SetKind::Box:
    case SetKind::SegmentSet:
      return bounded();
    case SetKind::Halfspace:
      rc.kind = K::Polyhedral;
      rc.ineq = s.as<Halfspace>()->normal.transpose();
      return rc;
    case SetKind::PolytopeH:
      rc.kind = K::Polyhedral;
      rc.ineq = detail::stack_halfspaces(s.as<PolytopeH>()->halfspaces).first;
      return rc;
    case SetKind::AffineSubspace: {
      const Matrix& q = s.affine_frame();
      if (q.cols() == 0) return bounded();
      rc.kind = K::Lines;
      rc.lines = q;
      rc.eq = orthogonal_complement(q, n).transpose();
      return rc;
    }
    case SetKind::Cylinder: {
      const auto& cyl = *s.as<Cylinder>();
      if (cyl.extent) return bounded();
      rc.kind = K::Lines;
      rc.lines = cyl.axis_dir;
      rc.eq = orthogonal_complement(cyl.axis_dir, n).transpose();
      return rc;
    }
    case SetKind::Intersection: {
      bool any_unknown = false;
      bool all_lines = true;
      for (const auto& p : s.as<Intersection>()->parts) {
        RecessionCone sub = recession_cone_generators(p);
        if (sub.kind == K::Bounded) return bounded();
        if (sub.kind == K::Unknown) {
          any_unknown = true;
          continue;
        }
        all_lines = all_lines && sub.kind == K::Lines;
        if (sub.ineq.rows() > 0) {
          rc.ineq.conservativeResize(rc.ineq.rows() + sub.ineq.rows(), n);
          rc.ineq.bottomRows(sub.ineq.rows()) = sub.ineq;
        }
        if (sub.eq.rows() > 0) {
          rc.eq.conservativeResize(rc.eq.rows() + sub.eq.rows(), n);
          rc.eq.bottomRows(sub.eq.rows()) = sub.eq;
        }
      }
      if (any_unknown) {
        RecessionCone u;
        u.ineq = Matrix(0, n);
        u.eq = Matrix(0, n);
        u.lines = Matrix(n, 0);
        return u;
      }
      if (all_lines) {
        rc.kind = K::Lines;
        rc.lines = orthogonal_complement(rc.eq.transpose(), n);
        if (rc.lines.cols() == 0) return bounded();
      } else {
        rc.kind = K::Polyhedral;
      }
      return rc;
    }
    default:
      return rc;
  }
}

/// A nonzero direction in both cones (max-norm 1), found by the 2n linear
/// programs max +/- d_i over {cone constraints, |d|_inf <= 1}. nullopt means
/// the cones meet only at 0; callers must not use this on Unknown cones.
inline std::optional<Vector> shared_recession_ray(const RecessionCone& a, const RecessionCone& b) {
  const Eigen::Index n = a.ineq.cols();
  PolyhedralSystem sys{Matrix(0, n), Vector(0), Matrix(0, n), Vector(0)};
  for (const RecessionCone* c : {&a, &b}) {
    if (c->ineq.rows() > 0) detail::append_rows(sys.a, sys.b, c->ineq, Vector::Zero(c->ineq.rows()));
    if (c->eq.rows() > 0) detail::append_rows(sys.e, sys.f, c->eq, Vector::Zero(c->eq.rows()));
  }
  detail::add_bounding_box(sys, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      auto sol = lp::maximize(sys.a, sys.b, sys.e, sys.f, sgn * Vector::Unit(n, i));
      if (sol.status == lp::Status::Optimal && sol.value > 1e-9) return sol.x;
    }
  }
  return std::nullopt;
}

/// nullopt when boundedness cannot be decided from the cone description.
inline std::optional<bool> is_bounded(const SetExpr& s) {
  RecessionCone rc = recession_cone_generators(s);
  switch (rc.kind) {
    case RecessionCone::Kind::Bounded:
      return true;
    case RecessionCone::Kind::Unknown:
      return std::nullopt;
    default:
      return !shared_recession_ray(rc, rc).has_value();
  }
}

// ---------------------------------------------------------------------------
// Directions of boundary segments.

namespace detail {

inline void push_unique_subspace(std::vector<Matrix>& out, const Matrix& basis) {
  if (basis.cols() == 0) return;
  for (const auto& m : out) {
    if (m.cols() == basis.cols() && subspace_intersection_dim(m, basis) == basis.cols()) return;
  }
  out.push_back(basis);
}

inline std::optional<std::vector<Matrix>> polyhedral_face_directions(const PolyhedralSystem& sys) {
  const Eigen::Index n = sys.dim();
  if (sys.a.rows() > 2000) return std::nullopt;
  const double big = 1e3 * system_scale(sys);
  std::vector<Matrix> out;
  // Implicit equalities of the whole polyhedron: when present, P is flat
  // and is its own boundary.
  auto implicit_rows = [&](const PolyhedralSystem& base) -> std::optional<Matrix> {
    PolyhedralSystem bounded = base;
    add_bounding_box(bounded, big);
    if (!lp::feasible(bounded.a, bounded.b, bounded.e, bounded.f)) return std::nullopt;
    Matrix rows = base.e;
    for (Eigen::Index j = 0; j < base.a.rows(); ++j) {
      // max slack of row j over the face
      auto sol = lp::maximize(bounded.a, bounded.b, bounded.e, bounded.f, -base.a.row(j).transpose());
      if (sol.status != lp::Status::Optimal) continue;
      const double slack = base.b[j] + sol.value;
      if (slack <= 1e-9 * big * std::max(1.0, base.a.row(j).norm())) {
        rows.conservativeResize(rows.rows() + 1, n);
        rows.bottomRows(1) = base.a.row(j);
      }
    }
    return rows;
  };
  auto whole = implicit_rows(sys);
  if (!whole) return out;
  if (whole->rows() > 0) push_unique_subspace(out, orthogonal_complement(whole->transpose(), n));
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
    PolyhedralSystem face = sys;
    detail::append_rows(face.e, face.f, sys.a.row(i), Vector::Constant(1, sys.b[i]));
    auto rows = implicit_rows(face);
    if (!rows) continue;
    push_unique_subspace(out, orthogonal_complement(rows->transpose(), n));
  }
  return out;
}

}  // namespace detail

/// Direction subspaces (orthonormal column bases) of the boundary faces of
/// dimension >= 1. Empty for strictly convex sets; nullopt when unsupported.
inline std::optional<std::vector<Matrix>> boundary_segments_directions(const SetExpr& s) {
  const Eigen::Index n = s.dim();
  std::vector<Matrix> out;
  if (n == 1) return out;
  switch (s.kind()) {
    case SetKind::Ellipsoid:
      return out;
    case SetKind::NormBall:
      if (is_strictly_convex_norm(s.as<NormBall>()->norm)) return out;
      return detail::polyhedral_face_directions(*polyhedral_system(s));
    case SetKind::Halfspace:
      out.push_back(orthogonal_complement(s.as<Halfspace>()->normal, n));
      return out;
    case SetKind::Box: {
      const auto& b = *s.as<Box>();
      std::vector<Eigen::Index> nondeg;
      for (Eigen::Index k = 0; k < n; ++k)
        if (b.lo[k] < b.hi[k]) nondeg.push_back(k);
      const std::size_t m = nondeg.size();
      if (m > 20) return std::nullopt;
      // Faces keep a subset of the free coordinates; a full-dimensional box
      // is not its own boundary face.
      const std::uint32_t last = m == static_cast<std::size_t>(n) ? (1u << m) - 1u : (1u << m);
      for (std::uint32_t mask = 1; mask < last; ++mask) {
        Matrix basis(n, 0);
        for (std::size_t k = 0; k < m; ++k) {
          if (!(mask & (1u << k))) continue;
          basis.conservativeResize(n, basis.cols() + 1);
          basis.col(basis.cols() - 1) = Vector::Unit(n, nondeg[k]);
        }
        detail::push_unique_subspace(out, basis);
      }
      return out;
    }
    case SetKind::PolytopeH:
      return detail::polyhedral_face_directions(*polyhedral_system(s));
    case SetKind::AffineSubspace: {
      const Matrix& q = s.affine_frame();
      if (q.cols() > 0 && q.cols() < n) out.push_back(q);
      return out;
    }
    case SetKind::SegmentSet: {
      const auto& seg = s.as<SegmentSet>()->seg;
      if (seg.nondegenerate()) out.push_back(seg.direction().normalized());
      return out;
    }
    case SetKind::Cylinder: {
      const auto& cyl = *s.as<Cylinder>();
      if (!cyl.extent || cyl.extent->first < cyl.extent->second) out.push_back(cyl.axis_dir);
      // flat end caps
      if (cyl.extent) out.push_back(orthogonal_complement(cyl.axis_dir, n));
      return out;
    }
    case SetKind::Intersection: {
      if (auto sys = polyhedral_system(s)) return detail::polyhedral_face_directions(*sys);
      for (const auto& p : s.as<Intersection>()->parts)
        if (classify_strict_convexity(p).value != Verdict::Yes) return std::nullopt;
      return out;
    }
    case SetKind::SublevelSet: {
      const auto& sl = *s.as<SublevelSet>();
      if (const auto* af = std::get_if<AffineFunction>(&sl.f)) {
        out.push_back(orthogonal_complement(af->g, n));
        return out;
      }
      if (classify_strict_convexity(s).value == Verdict::Yes) return out;
      return std::nullopt;
    }
    case SetKind::VoronoiCell:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace bap

#endif  // BAP_SET_QUERIES_HPP
