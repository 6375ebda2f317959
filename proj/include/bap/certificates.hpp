#ifndef BAP_CERTIFICATES_HPP
#define BAP_CERTIFICATES_HPP

#include "bap/solvers.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bap {

// ---------------------------------------------------------------------------
// Uniqueness.

enum class UniquenessVerdict { AtMostOne, NotUnique, Unknown };

inline const char* to_string(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::AtMostOne: return "at_most_one";
    case UniquenessVerdict::NotUnique: return "not_unique";
    case UniquenessVerdict::Unknown: return "unknown";
  }
  return "?";
}

struct UniquenessCertificate {
  UniquenessVerdict verdict = UniquenessVerdict::Unknown;
  std::string fired_rule = "none";
  std::string corollary;  // set when the fired theorem specializes to a single-set corollary
  std::string trace;
  std::optional<std::pair<BapResult, BapResult>> witness;
};

struct UniquenessOptions {
  double tol = 1e-10;                // solver tolerance used by witnesses
  std::vector<BapResult> witnesses;  // candidate BAPs, e.g. from multistart
};

namespace detail {

inline bool all_strictly_convex(const std::vector<SetExpr>& parts, std::ostringstream& log, const char* side) {
  bool ok = true;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto v = classify_strict_convexity(parts[i]);
    log << side << "[" << i << "] " << to_string(parts[i].kind()) << ": strictly convex " << to_string(v.value) << "\n";
    ok = ok && v.value == Verdict::Yes;
  }
  return ok;
}

/// 0 when the pair fails every clause, else the first clause (1..3) that holds.
inline int pair_clause(const SetExpr& ai, const SetExpr& bj, std::ostringstream& log) {
  if (classify_strict_convexity(ai).value == Verdict::Yes) return 1;
  if (classify_strict_convexity(bj).value == Verdict::Yes) return 2;
  const auto da = boundary_segments_directions(ai);
  const auto db = boundary_segments_directions(bj);
  if (!da || !db) {
    log << "  boundary segment directions unknown\n";
    return 0;
  }
  for (const auto& u : *da) {
    for (const auto& v : *db) {
      if (subspace_intersection_dim(u, v) >= 1) {
        log << "  parallel boundary directions found (dims " << u.cols() << ", " << v.cols() << ")\n";
        return 0;
      }
    }
  }
  return 3;
}

/// Linear part of an intersection of affine subspaces, or nullopt when some
/// part is not affine.
inline std::optional<Matrix> affine_linear_part(const std::vector<SetExpr>& parts) {
  const Eigen::Index n = parts.front().dim();
  Matrix normals(n, 0);
  for (const auto& p : parts) {
    if (p.kind() != SetKind::AffineSubspace) return std::nullopt;
    const Matrix c = orthogonal_complement(p.affine_frame(), n);
    normals.conservativeResize(n, normals.cols() + c.cols());
    normals.rightCols(c.cols()) = c;
  }
  return orthogonal_complement(normals, n);
}

inline std::optional<PolyhedralSystem> joint_system(const std::vector<SetExpr>& parts) {
  PolyhedralSystem sys = empty_system(parts.front().dim());
  for (const auto& p : parts) {
    auto s = polyhedral_system(p);
    if (!s) return std::nullopt;
    if (s->a.rows() > 0) append_rows(sys.a, sys.b, s->a, s->b);
    if (s->e.rows() > 0) append_rows(sys.e, sys.f, s->e, s->f);
  }
  return sys;
}

/// For two polyhedra under the Euclidean norm every BAP has the same
/// difference v, so the BAP set is {(a, a - v) : a in A and a - v in B}. The
/// contact set is measured by LP with a small slack; a singleton contact set
/// rules out nondegenerate BAPs of intervals. Non-polyhedral parts are
/// dropped first and the contact pair must then lie in each of them.
inline bool polyhedral_contact_is_point(const std::vector<SetExpr>& a_parts, const std::vector<SetExpr>& b_parts,
                                        double tol, std::ostringstream& log) {
  std::vector<SetExpr> pa, pb, xa, xb;
  for (const auto& p : a_parts) (polyhedral_system(p) ? pa : xa).push_back(p);
  for (const auto& p : b_parts) (polyhedral_system(p) ? pb : xb).push_back(p);
  if (pa.empty() || pb.empty()) return false;
  auto sa = joint_system(pa);
  auto sb = joint_system(pb);
  const SetExpr A = pa.size() == 1 ? pa.front() : make_intersection(pa);
  const SetExpr B = pb.size() == 1 ? pb.front() : make_intersection(pb);
  SolverParams sp;
  sp.tol = tol;
  sp.max_iter = 100000;
  sp.record_trace = false;
  const BapResult r = alternating_projections(A, B, Vector::Zero(A.dim()), sp);
  if (!r.converged || r.distance <= 10.0 * tol) {
    log << "contact test: probe solve not usable (converged=" << r.converged << ", distance=" << r.distance << ")\n";
    return false;
  }
  for (const auto& p : xa) {
    if (!contains(p, r.a)) {
      log << "contact test: polyhedral contact point leaves a non-polyhedral part of A\n";
      return false;
    }
  }
  for (const auto& p : xb) {
    if (!contains(p, r.b)) {
      log << "contact test: polyhedral contact point leaves a non-polyhedral part of B\n";
      return false;
    }
  }
  const Vector v = r.a - r.b;
  const Eigen::Index n = A.dim();
  const double scale = 1.0 + r.a.cwiseAbs().maxCoeff() + v.norm();
  const double slack = 1e-8 * scale;
  // a in A, a - v in B, each inequality relaxed by slack.
  PolyhedralSystem c = *sa;
  c.b.array() += slack * c.a.rowwise().norm().array();
  if (sb->a.rows() > 0) {
    Vector rhs = sb->b + sb->a * v;
    rhs.array() += slack * sb->a.rowwise().norm().array();
    append_rows(c.a, c.b, sb->a, rhs);
  }
  if (sb->e.rows() > 0) append_rows(c.e, c.f, sb->e, sb->f + sb->e * v);
  Matrix rows(2 * n, n);
  rows << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  append_rows(c.a, c.b, rows, Vector::Constant(2 * n, 1e3 * scale));
  double width = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    auto hi = lp::maximize(c.a, c.b, c.e, c.f, Vector::Unit(n, k));
    auto lo = lp::maximize(c.a, c.b, c.e, c.f, -Vector::Unit(n, k));
    if (hi.status != lp::Status::Optimal || lo.status != lp::Status::Optimal) {
      log << "contact test: LP failed\n";
      return false;
    }
    width = std::max(width, hi.value + lo.value);
  }
  log << "contact test: difference vector norm " << v.norm() << ", contact set width " << width << "\n";
  return width <= 1e-5 * scale;
}

/// Two supplied runs that are verified BAP candidates with equal value but
/// different pairs.
inline std::optional<std::pair<BapResult, BapResult>> find_witness(const SetExpr& A, const SetExpr& B,
                                                                   const UniquenessOptions& opt) {
  std::vector<const BapResult*> ok;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : opt.witnesses) {
    if (r.diverging || !r.converged) continue;
    if (!contains(A, r.a, 1e-7) || !contains(B, r.b, 1e-7)) continue;
    ok.push_back(&r);
    best = std::min(best, r.distance);
  }
  const double sep = 10.0 * opt.tol;
  const double eq = 1e-6 * (1.0 + best);
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i]->distance > best + eq) continue;
    for (std::size_t j = i + 1; j < ok.size(); ++j) {
      if (ok[j]->distance > best + eq) continue;
      if (std::max((ok[i]->a - ok[j]->a).norm(), (ok[i]->b - ok[j]->b).norm()) > sep) {
        return std::make_pair(*ok[i], *ok[j]);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline UniquenessCertificate certify_uniqueness(const std::vector<SetExpr>& a_parts, const std::vector<SetExpr>& b_parts,
                                                const NormSpec& norm, const UniquenessOptions& opt = {}) {
  if (a_parts.empty() || b_parts.empty()) throw std::invalid_argument("certify_uniqueness needs nonempty part lists");
  UniquenessCertificate cert;
  std::ostringstream log;
  const bool single = a_parts.size() == 1 && b_parts.size() == 1;

  const bool sc_a = detail::all_strictly_convex(a_parts, log, "A");
  const bool sc_b = detail::all_strictly_convex(b_parts, log, "B");
  if (sc_a && sc_b) {
    cert.verdict = UniquenessVerdict::AtMostOne;
    cert.fired_rule = single ? "Cor4.3" : "Thm4.2";
    log << "all parts strictly convex\n";
    cert.trace = log.str();
    return cert;
  }

  if (is_strictly_convex_norm(norm)) {
    log << "norm " << norm.to_string() << " is strictly convex; checking every part pair\n";
    int worst = 3;
    int highest = 0;
    for (std::size_t i = 0; i < a_parts.size() && worst > 0; ++i) {
      for (std::size_t j = 0; j < b_parts.size(); ++j) {
        const int c = detail::pair_clause(a_parts[i], b_parts[j], log);
        log << "pair (" << i << "," << j << "): " << (c == 0 ? "no clause" : c == 1 ? "clause (i)" : c == 2 ? "clause (ii)" : "clause (iii)")
            << "\n";
        worst = std::min(worst, c);
        highest = std::max(highest, c);
        if (c == 0) break;
      }
    }
    if (worst > 0) {
      static const char* names[] = {"", "Thm4.5(i)", "Thm4.5(ii)", "Thm4.5(iii)"};
      cert.verdict = UniquenessVerdict::AtMostOne;
      cert.fired_rule = names[highest];
      if (single) {
        cert.corollary = "Cor4.6";
        log << "single sets on both sides: the corollary form applies\n";
      }
      cert.trace = log.str();
      return cert;
    }

    auto la = detail::affine_linear_part(a_parts);
    auto lb = detail::affine_linear_part(b_parts);
    if (la && lb) {
      const Eigen::Index k = subspace_intersection_dim(*la, *lb);
      log << "affine sides: difference spaces meet in dimension " << k << "\n";
      if (k == 0) {
        cert.verdict = UniquenessVerdict::AtMostOne;
        cert.fired_rule = "PaiDifferenceSet";
        cert.trace = log.str();
        return cert;
      }
    }

    if (norm.is_euclidean() && detail::polyhedral_contact_is_point(a_parts, b_parts, opt.tol, log)) {
      cert.verdict = UniquenessVerdict::AtMostOne;
      cert.fired_rule = "Thm4.1";
      log << "no nondegenerate BAP of intervals: the contact set is a single point\n";
      cert.trace = log.str();
      return cert;
    }
  } else {
    log << "norm " << norm.to_string() << " is not strictly convex\n";
  }

  const SetExpr A = a_parts.size() == 1 ? a_parts.front() : make_intersection(a_parts);
  const SetExpr B = b_parts.size() == 1 ? b_parts.front() : make_intersection(b_parts);
  if (auto w = detail::find_witness(A, B, opt)) {
    cert.verdict = UniquenessVerdict::NotUnique;
    cert.fired_rule = "none";
    log << "two verified pairs with equal distance " << w->first.distance << " differ\n";
    cert.witness = std::move(w);
  } else {
    log << "no rule applies\n";
  }
  cert.trace = log.str();
  return cert;
}

// ---------------------------------------------------------------------------
// Existence.

enum class ExistenceVerdict { Exists, SuspectedNotAttained, Unknown };

inline const char* to_string(ExistenceVerdict v) {
  switch (v) {
    case ExistenceVerdict::Exists: return "exists";
    case ExistenceVerdict::SuspectedNotAttained: return "suspected_not_attained";
    case ExistenceVerdict::Unknown: return "unknown";
  }
  return "?";
}

struct CatalogEntry {
  std::string id;
  std::string statement;
  bool machine_checkable = false;
  std::optional<bool> holds;  // evaluated hypotheses; nullopt when not evaluated
};

struct ExistenceCertificate {
  ExistenceVerdict verdict = ExistenceVerdict::Unknown;
  std::string fired_rule = "none";
  std::string trace;
  std::vector<CatalogEntry> catalog;
  std::optional<BapResult> probe;
  std::optional<Vector> shared_ray;
};

struct ExistenceOptions {
  SolverParams probe_params;
  std::optional<BapResult> probe;  // reuse an existing solver run instead of solving
  double ray_angle_tol = 0.05;
};

namespace detail {

inline std::vector<CatalogEntry> existence_catalog() {
  auto c = [](std::string id, std::string s) { return CatalogEntry{std::move(id), std::move(s), true, std::nullopt}; };
  auto x = [](std::string id, std::string s) { return CatalogEntry{std::move(id), std::move(s), false, std::nullopt}; };
  return {
      c("intersectionNonempty", "A and B intersect"),
      x("minNormAttained", "the infimum of the norm over A - B is attained"),
      x("weaklySeqCompactLocallyWeaklySeqCompact", "A weakly sequentially compact, B closed convex locally weakly sequentially compact"),
      x("compactLocallyCompact", "A compact, B closed convex locally compact"),
      x("weaklySeqCompactProximinal", "A weakly sequentially compact, B convex and proximinal with respect to A"),
      x("compactProximinal", "A compact, B proximinal with respect to A"),
      x("boundedlyCompactProximinal", "A boundedly compact, B bounded and proximinal with respect to A"),
      x("boundedlyCompactOneBounded", "A and B boundedly compact, one of them bounded"),
      x("weaklySeqCompact", "A and B weakly sequentially compact"),
      c("bothCompact", "A and B compact"),
      x("ballSectionsWeaklyCompact", "ball sections of A x B weakly sequentially compact, plus boundedness or coercivity"),
      x("reflexiveBoundedMinimizing", "reflexive space, weakly closed sets, a minimizing sequence with bounded subsequence"),
      x("reflexiveOneWeaklyCompact", "reflexive space, A weakly sequentially compact, B weakly sequentially closed"),
      x("reflexiveBoundedWeaklyClosed", "reflexive space, A bounded weakly closed, B closed convex"),
      x("reflexiveConvexOneBounded", "reflexive space, A and B closed convex, A bounded"),
      x("reflexiveWeaklyClosedCoercive", "reflexive space, weakly closed sets, unbounded union, coercive distance"),
      x("reflexiveConvexCoercive", "reflexive space, closed convex sets, unbounded union, coercive distance"),
      x("reflexiveDifferenceWeaklyClosed", "reflexive space, A - B weakly sequentially closed"),
      x("reflexiveDifferenceClosed", "reflexive space, convex sets, A - B closed"),
      x("reflexiveCompactPlusClosed", "reflexive space, sums of weakly compact parts and a weakly closed difference"),
      x("complementedAffine", "reflexive space, complemented affine subspaces with closed projected linear part"),
      x("closedAffineFiniteDimAffine", "reflexive space, closed affine A, finite-dimensional affine B"),
      x("finiteCodimAffine", "reflexive space, closed affine A of finite codimension, affine B"),
      c("recessionConesTrivial", "closed convex sets whose recession cones meet only at 0"),
      x("affineErrorBound", "reflexive space, affine subspaces with a linear error bound"),
      x("hilbertPolyhedral", "Hilbert space, polyhedral sets"),
      x("hilbertVoronoi", "Hilbert space, Voronoi cell of a point with respect to a weakly closed set"),
      c("hyperparaboloid", "Hilbert space, closed hyperplane and the hyperparaboloid of a point"),
      c("hypercylinders", "Hilbert space, both sets are hypercylinders"),
      c("finiteDimAffine", "finite-dimensional affine subspaces"),
      x("finiteDimCoercive", "finite dimension, closed sets, bounded union or coercive distance"),
      c("finiteDimClosedBounded", "finite dimension, closed sets, one of them bounded"),
      c("voronoiCell", "finite dimension, closed A, bounded sites, B the Voronoi cell of the sites with respect to A"),
      c("polyhedral", "finite-dimensional Euclidean space, polyhedral sets"),
  };
}

inline void mark(std::vector<CatalogEntry>& cat, const std::string& id, bool holds) {
  for (auto& e : cat)
    if (e.id == id) e.holds = holds;
}

inline bool is_hypercylinder(const SetExpr& s) {
  const auto* c = s.as<Cylinder>();
  return c && c->full_line() && c->cross_section->kind() == SetKind::NormBall;
}

inline bool is_voronoi_against(const SetExpr& v, const SetExpr& other) {
  const auto* c = v.as<VoronoiCell>();
  return c && *c->competitor == other;
}

/// Distance from x to s, tolerant of the unbounded sublevel sets.
inline double probe_distance(const SetExpr& s, const Vector& x) { return euclid_project(s, x).distance; }

}  // namespace detail

inline ExistenceCertificate certify_existence(const SetExpr& A, const SetExpr& B, const NormSpec& norm, Eigen::Index dim,
                                              const ExistenceOptions& opt = {}) {
  if (A.dim() != dim || B.dim() != dim) throw DimensionError("certify_existence: dimension mismatch");
  ExistenceCertificate cert;
  cert.catalog = detail::existence_catalog();
  auto& cat = cert.catalog;
  std::ostringstream log;
  auto fire = [&](const char* rule) {
    cert.verdict = ExistenceVerdict::Exists;
    cert.fired_rule = rule;
    detail::mark(cat, rule, true);
    log << "fired: " << rule << "\n";
  };

  BapResult probe;
  if (opt.probe) {
    probe = *opt.probe;
  } else {
    auto [x0, y0] = seeded_start(opt.probe_params.seed, 0, dim, opt.probe_params.start_radius);
    probe = solve_bap(A, B, norm, x0, y0, opt.probe_params);
  }
  cert.probe = probe;
  log << "probe: distance " << probe.distance << ", converged " << probe.converged << ", diverging " << probe.diverging
      << "\n";

  const bool meets = !probe.diverging && (probe.distance <= 10.0 * opt.probe_params.tol ||
                                          (contains(A, probe.a, kMembershipTol) && contains(B, probe.a, kMembershipTol)));
  detail::mark(cat, "intersectionNonempty", meets);
  if (meets) {
    fire("intersectionNonempty");
    cert.trace = log.str();
    return cert;
  }

  const RecessionCone ra = recession_cone_generators(A);
  const RecessionCone rb = recession_cone_generators(B);
  const auto bounded_a = is_bounded(A);
  const auto bounded_b = is_bounded(B);
  log << "recession cones: A " << to_string(ra.kind) << ", B " << to_string(rb.kind) << "\n";
  const bool both_bounded = bounded_a.value_or(false) && bounded_b.value_or(false);
  const bool one_bounded = bounded_a.value_or(false) || bounded_b.value_or(false);
  detail::mark(cat, "bothCompact", both_bounded);
  detail::mark(cat, "finiteDimClosedBounded", one_bounded);
  const bool polyhedral = norm.is_euclidean() && is_polyhedral(A) && is_polyhedral(B);
  detail::mark(cat, "polyhedral", polyhedral);
  const bool affine = A.kind() == SetKind::AffineSubspace && B.kind() == SetKind::AffineSubspace;
  detail::mark(cat, "finiteDimAffine", affine);
  const bool voronoi = detail::is_voronoi_against(A, B) || detail::is_voronoi_against(B, A);
  detail::mark(cat, "voronoiCell", voronoi);
  const bool hyper = norm.is_euclidean() && detail::is_hypercylinder(A) && detail::is_hypercylinder(B);
  detail::mark(cat, "hypercylinders", hyper);

  std::optional<Vector> ray;
  bool cones_known = ra.kind != RecessionCone::Kind::Unknown && rb.kind != RecessionCone::Kind::Unknown;
  if (cones_known) ray = shared_recession_ray(ra, rb);
  detail::mark(cat, "recessionConesTrivial", cones_known && !ray);

  if (both_bounded) fire("bothCompact");
  else if (one_bounded) fire("finiteDimClosedBounded");
  else if (polyhedral) fire("polyhedral");
  else if (affine) fire("finiteDimAffine");
  else if (voronoi) fire("voronoiCell");
  else if (hyper) fire("hypercylinders");
  else if (cones_known && !ray) fire("recessionConesTrivial");

  if (cert.verdict == ExistenceVerdict::Exists) {
    cert.trace = log.str();
    return cert;
  }

  if (ray) {
    log << "shared recession ray found from the cone systems\n";
    cert.shared_ray = ray;
  } else if (probe.diverging && probe.a.size() == dim) {
    // Drift direction of the minimizing sequence, probed for being a common
    // asymptotic direction of both sets.
    const Vector drift = (probe.a + probe.b) / 2.0;
    if (drift.norm() > 0.0) {
      const Vector d = drift.normalized();
      bool shared = true;
      for (double t : {1.0, 10.0, 100.0, 1000.0}) {
        const double da = detail::probe_distance(A, probe.a + t * d);
        const double db = detail::probe_distance(B, probe.b + t * d);
        shared = shared && da <= opt.ray_angle_tol * t && db <= opt.ray_angle_tol * t;
      }
      log << "probe ray along the drift direction: " << (shared ? "stays near both sets" : "leaves a set") << "\n";
      if (shared) cert.shared_ray = d;
    }
  }
  if (probe.diverging && cert.shared_ray) {
    cert.verdict = ExistenceVerdict::SuspectedNotAttained;
    log << "diverging minimizing sequence along a shared asymptotic direction; coercivity fails\n";
  } else {
    log << "no rule applies\n";
  }
  cert.trace = log.str();
  return cert;
}

}  // namespace bap

#endif  // BAP_CERTIFICATES_HPP
