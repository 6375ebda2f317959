#ifndef BAP_SET_EXPR_HPP
#define BAP_SET_EXPR_HPP

#include "bap/geometry.hpp"
#include "bap/linprog.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bap {

class SetExpr;

/// {x : <normal, x> <= offset}
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// Axis-aligned box [lo, hi].
struct Box {
  Vector lo;
  Vector hi;
};

/// {x : ||x - center||_p <= radius}
struct NormBall {
  Vector center;
  double radius = 1.0;
  NormSpec norm = NormSpec::euclidean();
};

/// Axis-aligned ellipsoid {x : sum_i ((x_i - c_i) / s_i)^2 <= 1}.
struct Ellipsoid {
  Vector center;
  Vector semiaxes;
};

/// Finite intersection of halfspaces.
struct PolytopeH {
  std::vector<Halfspace> halfspaces;
};

/// point + span(basis columns). An empty basis is the singleton {point}.
struct AffineSubspace {
  Vector point;
  Matrix basis;
};

struct SegmentSet {
  Segment seg;
};

struct Intersection {
  std::vector<SetExpr> parts;
};

/// Cross-section (a Euclidean ball, or an ellipsoid when the axis is a
/// coordinate direction) centred on the axis point, swept along the axis over
/// the whole line or over [t_lo, t_hi].
struct Cylinder {
  std::shared_ptr<const SetExpr> cross_section;
  Vector axis_point;
  Vector axis_dir;
  std::optional<std::pair<double, double>> extent;  // nullopt: full line

  bool full_line() const { return !extent.has_value(); }
};

/// Points at least as close (Euclidean) to the site set as to the competitor.
struct VoronoiCell {
  std::vector<Vector> sites;
  std::shared_ptr<const SetExpr> competitor;
};

/// f(x) = <g, x> + d
struct AffineFunction {
  Vector g;
  double d = 0.0;
};

/// f(x) = 1/2 x^T Q x + <g, x> + d with Q symmetric positive semidefinite.
struct QuadraticFunction {
  Matrix q;
  Vector g;
  double d = 0.0;
};

/// f(x) = c * exp(x_coord) + <g, x> + d with c >= 0.
struct ExpFunction {
  Eigen::Index coord = 0;
  double c = 1.0;
  Vector g;
  double d = 0.0;
};

using ConvexFunction = std::variant<AffineFunction, QuadraticFunction, ExpFunction>;

struct SublevelSet {
  ConvexFunction f;
  double level = 0.0;
};

enum class SetKind {
  Halfspace,
  Box,
  NormBall,
  Ellipsoid,
  PolytopeH,
  AffineSubspace,
  SegmentSet,
  Intersection,
  Cylinder,
  VoronoiCell,
  SublevelSet
};

inline const char* to_string(SetKind k) {
  switch (k) {
    case SetKind::Halfspace: return "halfspace";
    case SetKind::Box: return "box";
    case SetKind::NormBall: return "ball";
    case SetKind::Ellipsoid: return "ellipsoid";
    case SetKind::PolytopeH: return "polytope";
    case SetKind::AffineSubspace: return "affine";
    case SetKind::SegmentSet: return "segment";
    case SetKind::Intersection: return "intersection";
    case SetKind::Cylinder: return "cylinder";
    case SetKind::VoronoiCell: return "voronoi";
    case SetKind::SublevelSet: return "sublevel";
  }
  return "?";
}

/// An immutable closed convex set. Every constructor validates the node and
/// throws std::invalid_argument (or DimensionError) on a violated invariant.
class SetExpr {
 public:
  using Node = std::variant<Halfspace, Box, NormBall, Ellipsoid, PolytopeH, AffineSubspace, SegmentSet,
                            Intersection, Cylinder, VoronoiCell, SublevelSet>;

  explicit SetExpr(Halfspace h);
  explicit SetExpr(Box b);
  explicit SetExpr(NormBall b);
  explicit SetExpr(Ellipsoid e);
  explicit SetExpr(PolytopeH p);
  explicit SetExpr(AffineSubspace a);
  explicit SetExpr(SegmentSet s);
  explicit SetExpr(Intersection i);
  explicit SetExpr(Cylinder c);
  explicit SetExpr(VoronoiCell v);
  explicit SetExpr(SublevelSet s);

  Eigen::Index dim() const { return dim_; }
  SetKind kind() const { return static_cast<SetKind>(node_.index()); }
  const Node& node() const { return node_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }

  /// Orthonormal basis of the linear part; only meaningful for AffineSubspace.
  const Matrix& affine_frame() const { return frame_; }

  friend bool operator==(const SetExpr& a, const SetExpr& b);

 private:
  Node node_;
  Eigen::Index dim_ = 0;
  Matrix frame_;
};

// ---------------------------------------------------------------------------
// Convenience factories.

inline SetExpr make_halfspace(Vector normal, double offset) { return SetExpr(Halfspace{std::move(normal), offset}); }
inline SetExpr make_box(Vector lo, Vector hi) { return SetExpr(Box{std::move(lo), std::move(hi)}); }
inline SetExpr make_ball(Vector center, double radius, NormSpec norm = NormSpec::euclidean()) {
  return SetExpr(NormBall{std::move(center), radius, norm});
}
inline SetExpr make_ellipsoid(Vector center, Vector semiaxes) {
  return SetExpr(Ellipsoid{std::move(center), std::move(semiaxes)});
}
inline SetExpr make_polytope(std::vector<Halfspace> hs) { return SetExpr(PolytopeH{std::move(hs)}); }
inline SetExpr make_affine(Vector point, Matrix basis) { return SetExpr(AffineSubspace{std::move(point), std::move(basis)}); }
inline SetExpr make_segment(Vector a0, Vector a1) { return SetExpr(SegmentSet{Segment(std::move(a0), std::move(a1))}); }
inline SetExpr make_intersection(std::vector<SetExpr> parts) { return SetExpr(Intersection{std::move(parts)}); }
inline SetExpr make_cylinder(SetExpr cross, Vector axis_point, Vector axis_dir,
                             std::optional<std::pair<double, double>> extent = std::nullopt) {
  return SetExpr(Cylinder{std::make_shared<const SetExpr>(std::move(cross)), std::move(axis_point),
                          std::move(axis_dir), extent});
}
inline SetExpr make_voronoi(std::vector<Vector> sites, SetExpr competitor) {
  return SetExpr(VoronoiCell{std::move(sites), std::make_shared<const SetExpr>(std::move(competitor))});
}
inline SetExpr make_sublevel(ConvexFunction f, double level) { return SetExpr(SublevelSet{std::move(f), level}); }

// ---------------------------------------------------------------------------
// Validation.

namespace detail {

inline void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + " must have finite coordinates");
}

inline double eval_function(const ConvexFunction& f, const Vector& x) {
  return std::visit(
      [&](const auto& fn) -> double {
        using F = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<F, AffineFunction>) {
          return fn.g.dot(x) + fn.d;
        } else if constexpr (std::is_same_v<F, QuadraticFunction>) {
          return 0.5 * x.dot(fn.q * x) + fn.g.dot(x) + fn.d;
        } else {
          return fn.c * std::exp(x[fn.coord]) + fn.g.dot(x) + fn.d;
        }
      },
      f);
}

inline Vector eval_gradient(const ConvexFunction& f, const Vector& x) {
  return std::visit(
      [&](const auto& fn) -> Vector {
        using F = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<F, AffineFunction>) {
          return fn.g;
        } else if constexpr (std::is_same_v<F, QuadraticFunction>) {
          return fn.q * x + fn.g;
        } else {
          Vector g = fn.g;
          g[fn.coord] += fn.c * std::exp(x[fn.coord]);
          return g;
        }
      },
      f);
}

inline Eigen::Index function_dim(const ConvexFunction& f) {
  return std::visit([](const auto& fn) -> Eigen::Index { return fn.g.size(); }, f);
}

/// Halfspace rows of a polyhedral node as (N, c) with N x <= c.
inline std::pair<Matrix, Vector> stack_halfspaces(const std::vector<Halfspace>& hs) {
  const Eigen::Index n = hs.front().normal.size();
  Matrix a(static_cast<Eigen::Index>(hs.size()), n);
  Vector b(static_cast<Eigen::Index>(hs.size()));
  for (std::size_t i = 0; i < hs.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = hs[i].normal.transpose();
    b[static_cast<Eigen::Index>(i)] = hs[i].offset;
  }
  return {a, b};
}

}  // namespace detail

inline SetExpr::SetExpr(Halfspace h) : node_(std::move(h)) {
  const auto& hs = std::get<Halfspace>(node_);
  detail::check_finite(hs.normal, "halfspace normal");
  if (hs.normal.size() == 0) throw DimensionError("halfspace normal must have dimension >= 1");
  if (hs.normal.norm() == 0.0) throw std::invalid_argument("halfspace normal must be nonzero");
  if (!std::isfinite(hs.offset)) throw std::invalid_argument("halfspace offset must be finite");
  dim_ = hs.normal.size();
}

inline SetExpr::SetExpr(Box b) : node_(std::move(b)) {
  const auto& bx = std::get<Box>(node_);
  if (bx.lo.size() != bx.hi.size()) throw DimensionError("box bounds differ in dimension");
  if (bx.lo.size() == 0) throw DimensionError("box must have dimension >= 1");
  detail::check_finite(bx.lo, "box lo");
  detail::check_finite(bx.hi, "box hi");
  if ((bx.lo.array() > bx.hi.array()).any()) throw std::invalid_argument("box requires lo <= hi");
  dim_ = bx.lo.size();
}

inline SetExpr::SetExpr(NormBall b) : node_(std::move(b)) {
  const auto& nb = std::get<NormBall>(node_);
  if (nb.center.size() == 0) throw DimensionError("ball center must have dimension >= 1");
  detail::check_finite(nb.center, "ball center");
  if (!(nb.radius > 0.0) || !std::isfinite(nb.radius)) throw std::invalid_argument("ball radius must be positive");
  dim_ = nb.center.size();
}

inline SetExpr::SetExpr(Ellipsoid e) : node_(std::move(e)) {
  const auto& el = std::get<Ellipsoid>(node_);
  if (el.center.size() != el.semiaxes.size()) throw DimensionError("ellipsoid center and semiaxes differ in dimension");
  if (el.center.size() == 0) throw DimensionError("ellipsoid must have dimension >= 1");
  detail::check_finite(el.center, "ellipsoid center");
  detail::check_finite(el.semiaxes, "ellipsoid semiaxes");
  if ((el.semiaxes.array() <= 0.0).any()) throw std::invalid_argument("ellipsoid semiaxes must be positive");
  dim_ = el.center.size();
}

inline SetExpr::SetExpr(PolytopeH p) : node_(std::move(p)) {
  const auto& poly = std::get<PolytopeH>(node_);
  if (poly.halfspaces.empty()) throw std::invalid_argument("polytope needs at least one halfspace");
  dim_ = poly.halfspaces.front().normal.size();
  for (const auto& h : poly.halfspaces) {
    SetExpr check(h);
    if (check.dim() != dim_) throw DimensionError("polytope halfspaces differ in dimension");
  }
  auto [a, b] = detail::stack_halfspaces(poly.halfspaces);
  if (!lp::feasible(a, b, Matrix(0, dim_), Vector(0))) throw std::invalid_argument("polytope is empty");
}

inline SetExpr::SetExpr(AffineSubspace a) : node_(std::move(a)) {
  auto& aff = std::get<AffineSubspace>(node_);
  if (aff.point.size() == 0) throw DimensionError("affine point must have dimension >= 1");
  detail::check_finite(aff.point, "affine point");
  dim_ = aff.point.size();
  if (aff.basis.cols() == 0) aff.basis.resize(dim_, 0);
  if (aff.basis.rows() != dim_) throw DimensionError("affine basis vectors differ in dimension from the point");
  if (!aff.basis.allFinite()) throw std::invalid_argument("affine basis must be finite");
  if (numerical_rank(aff.basis) != aff.basis.cols()) {
    throw std::invalid_argument("affine basis vectors must be linearly independent");
  }
  frame_ = orthonormal_basis(aff.basis);
}

inline SetExpr::SetExpr(SegmentSet s) : node_(std::move(s)) {
  const auto& seg = std::get<SegmentSet>(node_).seg;
  if (seg.a0.size() != seg.a1.size() || seg.a0.size() == 0) throw DimensionError("segment endpoints differ in dimension");
  detail::check_finite(seg.a0, "segment endpoint");
  detail::check_finite(seg.a1, "segment endpoint");
  dim_ = seg.dim();
}

inline SetExpr::SetExpr(Intersection i) : node_(std::move(i)) {
  const auto& parts = std::get<Intersection>(node_).parts;
  if (parts.empty()) throw std::invalid_argument("intersection needs at least one part");
  dim_ = parts.front().dim();
  for (const auto& p : parts)
    if (p.dim() != dim_) throw DimensionError("intersection parts differ in dimension");
}

inline SetExpr::SetExpr(Cylinder c) : node_(std::move(c)) {
  auto& cyl = std::get<Cylinder>(node_);
  if (!cyl.cross_section) throw std::invalid_argument("cylinder needs a cross-section");
  dim_ = cyl.axis_point.size();
  if (dim_ < 2) throw DimensionError("cylinder needs dimension >= 2");
  require_dim(cyl.axis_dir, dim_, "cylinder axis_dir");
  if (cyl.cross_section->dim() != dim_) throw DimensionError("cylinder cross-section differs in dimension");
  detail::check_finite(cyl.axis_point, "cylinder axis_point");
  detail::check_finite(cyl.axis_dir, "cylinder axis_dir");
  const double len = cyl.axis_dir.norm();
  if (std::abs(len - 1.0) > 1e-9) throw std::invalid_argument("cylinder axis_dir must have unit Euclidean norm");
  if (std::abs(len - 1.0) > 1e-15) cyl.axis_dir /= len;
  if (cyl.extent) {
    if (!std::isfinite(cyl.extent->first) || !std::isfinite(cyl.extent->second) ||
        cyl.extent->first > cyl.extent->second) {
      throw std::invalid_argument("cylinder extent must satisfy t_lo <= t_hi");
    }
  }
  const double scale = 1.0 + cyl.axis_point.cwiseAbs().maxCoeff();
  if (const auto* ball = cyl.cross_section->as<NormBall>()) {
    if (!ball->norm.is_euclidean()) throw std::invalid_argument("cylinder ball cross-section must be Euclidean");
    if ((ball->center - cyl.axis_point).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("cylinder cross-section must be centred on axis_point");
    }
  } else if (const auto* ell = cyl.cross_section->as<Ellipsoid>()) {
    if ((ell->center - cyl.axis_point).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("cylinder cross-section must be centred on axis_point");
    }
    Eigen::Index k = 0;
    const double m = cyl.axis_dir.cwiseAbs().maxCoeff(&k);
    if (std::abs(m - 1.0) > 1e-12) {
      throw std::invalid_argument("ellipsoidal cross-section requires a coordinate axis direction");
    }
    cyl.axis_dir.setZero();
    cyl.axis_dir[k] = m > 0 ? 1.0 : -1.0;
  } else {
    throw std::invalid_argument("cylinder cross-section must be a ball or an ellipsoid");
  }
}

inline SetExpr::SetExpr(VoronoiCell v) : node_(std::move(v)) {
  const auto& vc = std::get<VoronoiCell>(node_);
  if (!vc.competitor) throw std::invalid_argument("voronoi cell needs a competitor set");
  if (vc.sites.empty()) throw std::invalid_argument("voronoi cell needs at least one site");
  dim_ = vc.competitor->dim();
  for (const auto& s : vc.sites) {
    require_dim(s, dim_, "voronoi site");
    detail::check_finite(s, "voronoi site");
  }
}

inline SetExpr::SetExpr(SublevelSet s) : node_(std::move(s)) {
  const auto& sl = std::get<SublevelSet>(node_);
  dim_ = detail::function_dim(sl.f);
  if (dim_ == 0) throw DimensionError("sublevel function must have dimension >= 1");
  if (!std::isfinite(sl.level)) throw std::invalid_argument("sublevel level must be finite");
  std::visit(
      [&](const auto& fn) {
        using F = std::decay_t<decltype(fn)>;
        detail::check_finite(fn.g, "sublevel gradient term");
        if constexpr (std::is_same_v<F, AffineFunction>) {
          if (fn.g.norm() == 0.0 && fn.d > sl.level) throw std::invalid_argument("sublevel set is empty");
        } else if constexpr (std::is_same_v<F, QuadraticFunction>) {
          if (fn.q.rows() != dim_ || fn.q.cols() != dim_) throw DimensionError("quadratic Q must be n x n");
          if ((fn.q - fn.q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + fn.q.cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("quadratic Q must be symmetric");
          }
          Eigen::SelfAdjointEigenSolver<Matrix> es(fn.q);
          if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("quadratic Q must be positive semidefinite");
          }
        } else {
          if (fn.coord < 0 || fn.coord >= dim_) throw std::invalid_argument("exp coordinate out of range");
          if (!(fn.c >= 0.0) || !std::isfinite(fn.c)) throw std::invalid_argument("exp coefficient must be >= 0");
        }
      },
      sl.f);
}

// ---------------------------------------------------------------------------
// Structural equality.

namespace detail {

inline bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline bool same_function(const ConvexFunction& a, const ConvexFunction& b) {
  if (a.index() != b.index()) return false;
  if (const auto* fa = std::get_if<AffineFunction>(&a)) {
    const auto& fb = std::get<AffineFunction>(b);
    return same_vector(fa->g, fb.g) && fa->d == fb.d;
  }
  if (const auto* fa = std::get_if<QuadraticFunction>(&a)) {
    const auto& fb = std::get<QuadraticFunction>(b);
    return same_matrix(fa->q, fb.q) && same_vector(fa->g, fb.g) && fa->d == fb.d;
  }
  const auto& fa = std::get<ExpFunction>(a);
  const auto& fb = std::get<ExpFunction>(b);
  return fa.coord == fb.coord && fa.c == fb.c && same_vector(fa.g, fb.g) && fa.d == fb.d;
}

}  // namespace detail

inline bool operator==(const SetExpr& a, const SetExpr& b) {
  if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
  switch (a.kind()) {
    case SetKind::Halfspace: {
      const auto &x = *a.as<Halfspace>(), &y = *b.as<Halfspace>();
      return same_vector(x.normal, y.normal) && x.offset == y.offset;
    }
    case SetKind::Box: {
      const auto &x = *a.as<Box>(), &y = *b.as<Box>();
      return same_vector(x.lo, y.lo) && same_vector(x.hi, y.hi);
    }
    case SetKind::NormBall: {
      const auto &x = *a.as<NormBall>(), &y = *b.as<NormBall>();
      return same_vector(x.center, y.center) && x.radius == y.radius && x.norm == y.norm;
    }
    case SetKind::Ellipsoid: {
      const auto &x = *a.as<Ellipsoid>(), &y = *b.as<Ellipsoid>();
      return same_vector(x.center, y.center) && same_vector(x.semiaxes, y.semiaxes);
    }
    case SetKind::PolytopeH: {
      const auto &x = *a.as<PolytopeH>(), &y = *b.as<PolytopeH>();
      if (x.halfspaces.size() != y.halfspaces.size()) return false;
      for (std::size_t i = 0; i < x.halfspaces.size(); ++i) {
        if (!same_vector(x.halfspaces[i].normal, y.halfspaces[i].normal) ||
            x.halfspaces[i].offset != y.halfspaces[i].offset)
          return false;
      }
      return true;
    }
    case SetKind::AffineSubspace: {
      const auto &x = *a.as<AffineSubspace>(), &y = *b.as<AffineSubspace>();
      return same_vector(x.point, y.point) && detail::same_matrix(x.basis, y.basis);
    }
    case SetKind::SegmentSet:
      return a.as<SegmentSet>()->seg == b.as<SegmentSet>()->seg;
    case SetKind::Intersection:
      return a.as<Intersection>()->parts == b.as<Intersection>()->parts;
    case SetKind::Cylinder: {
      const auto &x = *a.as<Cylinder>(), &y = *b.as<Cylinder>();
      return *x.cross_section == *y.cross_section && same_vector(x.axis_point, y.axis_point) &&
             same_vector(x.axis_dir, y.axis_dir) && x.extent == y.extent;
    }
    case SetKind::VoronoiCell: {
      const auto &x = *a.as<VoronoiCell>(), &y = *b.as<VoronoiCell>();
      if (x.sites.size() != y.sites.size() || !(*x.competitor == *y.competitor)) return false;
      for (std::size_t i = 0; i < x.sites.size(); ++i)
        if (!same_vector(x.sites[i], y.sites[i])) return false;
      return true;
    }
    case SetKind::SublevelSet: {
      const auto &x = *a.as<SublevelSet>(), &y = *b.as<SublevelSet>();
      return x.level == y.level && detail::same_function(x.f, y.f);
    }
  }
  return false;
}

/// True for the variants that are finite intersections of halfspaces.
inline bool is_polyhedral(const SetExpr& s) {
  if (s.dim() == 1 && s.kind() != SetKind::VoronoiCell) return true;
  switch (s.kind()) {
    case SetKind::Halfspace:
    case SetKind::Box:
    case SetKind::PolytopeH:
    case SetKind::AffineSubspace:
    case SetKind::SegmentSet:
      return true;
    case SetKind::NormBall: {
      const auto& b = *s.as<NormBall>();
      return b.norm.is_infinity() || b.norm.p() == 1.0 || s.dim() == 1;
    }
    case SetKind::Intersection:
      for (const auto& p : s.as<Intersection>()->parts)
        if (!is_polyhedral(p)) return false;
      return true;
    default:
      return false;
  }
}

}  // namespace bap

#endif  // BAP_SET_EXPR_HPP
