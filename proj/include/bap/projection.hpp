#ifndef BAP_PROJECTION_HPP
#define BAP_PROJECTION_HPP

#include "bap/set_expr.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace bap {

struct ProjectionParams {
  double tol = 1e-10;    // Dykstra cycle displacement
  int max_iter = 10000;  // Dykstra cycles / root-finder budget
};

struct ProjectionResult {
  Vector point;
  double distance = 0.0;  // Euclidean
  int iterations = 0;     // 0 for closed forms
  bool converged = true;
};

ProjectionResult euclid_project(const SetExpr& s, const Vector& x, const ProjectionParams& params = {});
ProjectionResult dykstra_project(std::span<const SetExpr> parts, const Vector& x, const ProjectionParams& params = {});

inline double euclid_distance(const SetExpr& s, const Vector& x, const ProjectionParams& params = {}) {
  return euclid_project(s, x, params).distance;
}

// ---------------------------------------------------------------------------
// Polyhedral description: A x <= b, E x = f.

struct PolyhedralSystem {
  Matrix a;
  Vector b;
  Matrix e;
  Vector f;

  Eigen::Index dim() const { return a.rows() > 0 ? a.cols() : e.cols(); }
};

namespace detail {

inline PolyhedralSystem empty_system(Eigen::Index n) { return {Matrix(0, n), Vector(0), Matrix(0, n), Vector(0)}; }

inline void append_rows(Matrix& m, Vector& v, const Matrix& rows, const Vector& rhs) {
  const Eigen::Index r0 = m.rows();
  m.conservativeResize(r0 + rows.rows(), rows.cols());
  v.conservativeResize(r0 + rhs.size());
  m.bottomRows(rows.rows()) = rows;
  v.tail(rhs.size()) = rhs;
}

}  // namespace detail

/// Halfspace/equality description for polyhedral variants, nullopt otherwise.
inline std::optional<PolyhedralSystem> polyhedral_system(const SetExpr& s) {
  const Eigen::Index n = s.dim();
  PolyhedralSystem sys = detail::empty_system(n);
  switch (s.kind()) {
    case SetKind::Halfspace: {
      const auto& h = *s.as<Halfspace>();
      sys.a = h.normal.transpose();
      sys.b = Vector::Constant(1, h.offset);
      return sys;
    }
    case SetKind::Box: {
      const auto& bx = *s.as<Box>();
      sys.a.resize(2 * n, n);
      sys.a << Matrix::Identity(n, n), -Matrix::Identity(n, n);
      sys.b.resize(2 * n);
      sys.b << bx.hi, -bx.lo;
      return sys;
    }
    case SetKind::PolytopeH: {
      auto [a, b] = detail::stack_halfspaces(s.as<PolytopeH>()->halfspaces);
      sys.a = a;
      sys.b = b;
      return sys;
    }
    case SetKind::AffineSubspace: {
      const auto& af = *s.as<AffineSubspace>();
      Matrix comp = orthogonal_complement(s.affine_frame(), n);
      sys.e = comp.transpose();
      sys.f = sys.e * af.point;
      return sys;
    }
    case SetKind::SegmentSet: {
      const auto& seg = s.as<SegmentSet>()->seg;
      if (!seg.nondegenerate()) {
        sys.e = Matrix::Identity(n, n);
        sys.f = seg.a0;
        return sys;
      }
      const Vector d = seg.direction();
      Matrix comp = orthogonal_complement(d, n);
      sys.e = comp.transpose();
      sys.f = sys.e * seg.a0;
      sys.a.resize(2, n);
      sys.a.row(0) = d.transpose();
      sys.a.row(1) = -d.transpose();
      sys.b.resize(2);
      sys.b << d.dot(seg.a1), -d.dot(seg.a0);
      return sys;
    }
    case SetKind::NormBall: {
      const auto& nb = *s.as<NormBall>();
      if (nb.norm.is_infinity()) {
        sys.a.resize(2 * n, n);
        sys.a << Matrix::Identity(n, n), -Matrix::Identity(n, n);
        sys.b.resize(2 * n);
        sys.b << (nb.center.array() + nb.radius).matrix(), -(nb.center.array() - nb.radius).matrix();
        return sys;
      }
      if ((nb.norm.p() == 1.0 && n <= 12) || n == 1) {
        const Eigen::Index rows = Eigen::Index(1) << n;
        sys.a.resize(rows, n);
        sys.b.resize(rows);
        for (Eigen::Index m = 0; m < rows; ++m) {
          for (Eigen::Index j = 0; j < n; ++j) sys.a(m, j) = ((m >> j) & 1) ? -1.0 : 1.0;
          sys.b[m] = nb.radius + sys.a.row(m).dot(nb.center);
        }
        return sys;
      }
      return std::nullopt;
    }
    case SetKind::Intersection: {
      for (const auto& part : s.as<Intersection>()->parts) {
        auto sub = polyhedral_system(part);
        if (!sub) return std::nullopt;
        if (sub->a.rows() > 0) detail::append_rows(sys.a, sys.b, sub->a, sub->b);
        if (sub->e.rows() > 0) detail::append_rows(sys.e, sys.f, sub->e, sub->f);
      }
      return sys;
    }
    default:
      return std::nullopt;
  }
}

namespace detail {

/// Exact projection onto {A y <= b, E y = f} by an active-set refinement
/// started from the active constraints at `guess`. Returns nullopt when the
/// KKT conditions cannot be certified.
inline std::optional<Vector> polish_polyhedral(const PolyhedralSystem& sys, const Vector& x, const Vector& guess) {
  const Eigen::Index n = x.size();
  const double scale = 1.0 + x.cwiseAbs().maxCoeff() + guess.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
    const double rn = sys.a.row(i).norm();
    if (sys.b[i] - sys.a.row(i).dot(guess) <= 1e-7 * scale * rn) active.push_back(i);
  }
  for (int round = 0; round < 2 * static_cast<int>(sys.a.rows()) + 2; ++round) {
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    const Eigen::Index ne = sys.e.rows();
    Matrix m(na + ne, n);
    Vector r(na + ne);
    for (Eigen::Index k = 0; k < na; ++k) {
      m.row(k) = sys.a.row(active[k]);
      r[k] = sys.b[active[k]];
    }
    if (ne > 0) {
      m.bottomRows(ne) = sys.e;
      r.tail(ne) = sys.f;
    }
    Vector y = x;
    Vector lambda = Vector::Zero(na + ne);
    if (na + ne > 0) {
      // y = x - M^T lambda with M M^T lambda = M x - r (minimum-norm solution)
      Matrix g = m * m.transpose();
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g);
      cod.setThreshold(1e-12);
      lambda = cod.solve(m * x - r);
      y = x - m.transpose() * lambda;
      if ((m * y - r).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
    }
    // Primal feasibility.
    Eigen::Index worst = -1;
    double worst_viol = 1e-11 * scale;
    for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
      const double viol = sys.a.row(i).dot(y) - sys.b[i];
      if (viol > worst_viol * std::max(1.0, sys.a.row(i).norm())) {
        worst_viol = viol / std::max(1.0, sys.a.row(i).norm());
        worst = i;
      }
    }
    if (worst >= 0) {
      if (std::find(active.begin(), active.end(), worst) != active.end()) return std::nullopt;
      active.push_back(worst);
      continue;
    }
    // Dual feasibility on inequality multipliers.
    Eigen::Index most_negative = -1;
    double most = -1e-12 * scale;
    for (Eigen::Index k = 0; k < na; ++k) {
      if (lambda[k] < most) {
        most = lambda[k];
        most_negative = k;
      }
    }
    if (most_negative < 0) return y;
    active.erase(active.begin() + most_negative);
  }
  return std::nullopt;
}

/// Cyclic Dykstra with per-part correction terms.
template <class Project>
ProjectionResult dykstra_loop(std::size_t parts, Project&& project, const Vector& x, const ProjectionParams& params) {
  ProjectionResult out;
  Vector cur = x;
  std::vector<Vector> inc(parts, Vector::Zero(x.size()));
  out.converged = false;
  for (int cycle = 1; cycle <= params.max_iter; ++cycle) {
    const Vector start = cur;
    double inc_change = 0.0;
    for (std::size_t i = 0; i < parts; ++i) {
      const Vector shifted = cur + inc[i];
      Vector next = project(i, shifted);
      Vector new_inc = shifted - next;
      inc_change += (new_inc - inc[i]).squaredNorm();
      inc[i] = std::move(new_inc);
      cur = std::move(next);
    }
    out.iterations = cycle;
    const double disp = (cur - start).norm();
    if (disp < params.tol && std::sqrt(inc_change) < std::max(params.tol, 1e3 * params.tol * x.norm())) {
      out.converged = true;
      break;
    }
  }
  out.point = cur;
  out.distance = (x - cur).norm();
  return out;
}

inline Vector project_halfspace(const Vector& normal, double offset, const Vector& x) {
  const double viol = normal.dot(x) - offset;
  if (viol <= 0.0) return x;
  return x - (viol / normal.squaredNorm()) * normal;
}

inline Vector project_box(const Vector& lo, const Vector& hi, const Vector& x) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

/// Nearest point of the axis-aligned ellipsoid: y_i = c_i + s_i^2 d_i / (s_i^2 + mu)
/// with the multiplier mu >= 0 bracketed in [0, s_max * |d|], bisected, then
/// polished by Newton steps kept inside the bracket.
inline ProjectionResult project_ellipsoid(const Ellipsoid& el, const Vector& x, const ProjectionParams& params) {
  ProjectionResult out;
  const Vector d = x - el.center;
  const Vector s2 = el.semiaxes.array().square();
  const double level = (d.array() / el.semiaxes.array()).square().sum();
  if (level <= 1.0) {
    out.point = x;
    return out;
  }
  auto phi = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double q = el.semiaxes[i] * d[i] / (s2[i] + mu);
      acc += q * q;
    }
    return acc - 1.0;
  };
  auto dphi = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double den = s2[i] + mu;
      acc += -2.0 * s2[i] * d[i] * d[i] / (den * den * den);
    }
    return acc;
  };
  double lo = 0.0;
  double hi = el.semiaxes.maxCoeff() * d.norm();
  int it = 0;
  for (; it < 100 && hi - lo > 1e-8 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) > 0.0 ? lo : hi) = mid;
  }
  double mu = 0.5 * (lo + hi);
  for (int k = 0; k < 30; ++k, ++it) {
    const double f = phi(mu);
    if (f == 0.0) break;
    (f > 0.0 ? lo : hi) = mu;
    const double df = dphi(mu);
    double next = df != 0.0 ? mu - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - mu) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, mu)) {
      mu = next;
      break;
    }
    mu = next;
  }
  Vector y(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) y[i] = el.center[i] + s2[i] * d[i] / (s2[i] + mu);
  out.point = std::move(y);
  out.iterations = it;
  out.converged = it <= params.max_iter;
  return out;
}

/// Euclidean projection onto the l1 ball (sort-based threshold).
inline Vector project_l1_ball(const Vector& center, double radius, const Vector& x) {
  const Vector d = x - center;
  if (d.cwiseAbs().sum() <= radius) return x;
  std::vector<double> u(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) u[i] = std::abs(d[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Vector y(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    y[i] = center[i] + std::copysign(std::max(std::abs(d[i]) - theta, 0.0), d[i]);
  }
  return y;
}

/// Euclidean projection onto an l_p ball, 1 < p < inf, p != 2: the minimizer
/// has |y_i| = z_i with z_i + mu p z_i^(p-1) = |d_i|; mu solves sum z_i^p = r^p.
inline Vector project_lp_ball(const Vector& center, double radius, double p, const Vector& x) {
  const Vector d = x - center;
  const double scale = d.cwiseAbs().maxCoeff();
  if (scale == 0.0) return x;
  NormSpec ns = NormSpec::lp(p);
  if (norm_eval(ns, d) <= radius) return x;
  // Work with w = d / scale, rho = radius / scale.
  const Vector w = d.cwiseAbs() / scale;
  const double rho = radius / scale;
  auto coord = [p](double a, double mu) {
    if (a == 0.0) return 0.0;
    if (mu == 0.0) return a;
    auto h = [&](double z) { return z + mu * p * std::pow(z, p - 1.0) - a; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(h, 0.0, a, -a, mu * p * std::pow(a, p - 1.0), tol, iters);
    return 0.5 * (lo + hi);
  };
  auto phi = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) acc += std::pow(coord(w[i], mu), p);
    return acc - std::pow(rho, p);
  };
  if (phi(0.0) <= 0.0) return x;
  double hi = 1.0;
  while (phi(hi) > 0.0 && hi < 1e300) hi *= 4.0;
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 300;
  auto [mlo, mhi] = boost::math::tools::toms748_solve(phi, 0.0, hi, tol, iters);
  const double mu = 0.5 * (mlo + mhi);
  Vector y(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) y[i] = center[i] + std::copysign(scale * coord(w[i], mu), d[i]);
  return y;
}

/// prox of mu * f at x, i.e. argmin 1/2|y - x|^2 + mu f(y), for the smooth
/// sublevel catalogue.
inline Vector prox_function(const ConvexFunction& f, double mu, const Vector& x) {
  if (const auto* af = std::get_if<AffineFunction>(&f)) return x - mu * af->g;
  if (const auto* qf = std::get_if<QuadraticFunction>(&f)) {
    const Eigen::Index n = x.size();
    Matrix m = Matrix::Identity(n, n) + mu * qf->q;
    return m.ldlt().solve(x - mu * qf->g);
  }
  const auto& ef = std::get<ExpFunction>(f);
  Vector y = x - mu * ef.g;
  const double r = y[ef.coord];
  if (ef.c == 0.0 || mu == 0.0) return y;
  // t + mu c e^t = r: increasing and convex, Newton from the right is monotone.
  double t = r;
  for (int k = 0; k < 200; ++k) {
    const double e = mu * ef.c * std::exp(t);
    const double h = t + e - r;
    const double step = h / (1.0 + e);
    t -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) break;
  }
  y[ef.coord] = t;
  return y;
}

inline ProjectionResult project_sublevel(const SublevelSet& sl, const Vector& x, const ProjectionParams& params) {
  ProjectionResult out;
  if (eval_function(sl.f, x) <= sl.level) {
    out.point = x;
    return out;
  }
  if (const auto* af = std::get_if<AffineFunction>(&sl.f)) {
    out.point = project_halfspace(af->g, sl.level - af->d, x);
    return out;
  }
  auto phi = [&](double mu) { return eval_function(sl.f, prox_function(sl.f, mu, x)) - sl.level; };
  double hi = 1.0;
  int doublings = 0;
  while (phi(hi) > 0.0 && doublings < 200) {
    hi *= 2.0;
    ++doublings;
  }
  if (phi(hi) > 0.0) {
    out.point = prox_function(sl.f, hi, x);
    out.converged = false;
    return out;
  }
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = static_cast<std::uintmax_t>(std::max(params.max_iter, 100));
  auto [lo, up] = boost::math::tools::toms748_solve(phi, 0.0, hi, tol, iters);
  // The upper end of the bracket is feasible.
  out.point = prox_function(sl.f, up, x);
  out.iterations = static_cast<int>(iters) + doublings;
  (void)lo;
  return out;
}

inline ProjectionResult project_polyhedral_dykstra(const PolyhedralSystem& sys, const Vector& x,
                                                   const ProjectionParams& params) {
  const std::size_t ni = static_cast<std::size_t>(sys.a.rows());
  const Eigen::Index ne = sys.e.rows();
  // Equalities are projected on jointly as one affine part.
  Matrix eq_pinv;
  if (ne > 0) eq_pinv = sys.e.completeOrthogonalDecomposition().pseudoInverse();
  const std::size_t parts = ni + (ne > 0 ? 1 : 0);
  auto proj = [&](std::size_t i, const Vector& z) -> Vector {
    if (i < ni) return project_halfspace(sys.a.row(static_cast<Eigen::Index>(i)).transpose(), sys.b[static_cast<Eigen::Index>(i)], z);
    return z - eq_pinv * (sys.e * z - sys.f);
  };
  ProjectionResult res = dykstra_loop(parts, proj, x, params);
  if (auto exact = polish_polyhedral(sys, x, res.point)) {
    res.point = *exact;
    res.converged = true;
  }
  res.distance = (x - res.point).norm();
  return res;
}

inline ProjectionResult project_voronoi(const VoronoiCell& vc, const Vector& x, const ProjectionParams& params) {
  ProjectionResult out;
  const ProjectionParams inner{params.tol, params.max_iter};
  // Nearest site anchors the cell piece containing the projection.
  std::size_t best = 0;
  for (std::size_t i = 1; i < vc.sites.size(); ++i)
    if ((vc.sites[i] - x).norm() < (vc.sites[best] - x).norm()) best = i;
  const Vector& site = vc.sites[best];
  auto site_dist = [&](const Vector& z) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : vc.sites) m = std::min(m, (s - z).norm());
    return m;
  };
  auto violation = [&](const Vector& z) { return site_dist(z) - euclid_project(*vc.competitor, z, inner).distance; };

  const double tol = 1e-9 * (1.0 + x.norm());
  Vector y = x;
  std::vector<Halfspace> cuts;
  int it = 0;
  bool ok = false;
  for (; it < 400; ++it) {
    if (violation(y) <= tol) {
      ok = true;
      break;
    }
    // Bisector between the site and the nearest competitor point: the
    // dominant constraint at y.
    const Vector a = euclid_project(*vc.competitor, y, inner).point;
    const Vector n = 2.0 * (a - site);
    if (n.norm() == 0.0) break;
    cuts.push_back({n, a.squaredNorm() - site.squaredNorm()});
    auto [am, bm] = stack_halfspaces(cuts);
    PolyhedralSystem sys{am, bm, Matrix(0, x.size()), Vector(0)};
    y = project_polyhedral_dykstra(sys, x, inner).point;
  }
  if (!ok) {
    // Feasibility repair along the segment towards the site (the site is
    // always in the cell).
    double lo = 0.0, hi = 1.0;  // fraction of the way from site to y
    if (violation(y) > 0.0) {
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        (violation(site + mid * (y - site)) <= 0.0 ? lo : hi) = mid;
      }
      y = site + lo * (y - site);
    }
  }
  out.point = y;
  out.iterations = it;
  out.converged = ok;
  return out;
}

}  // namespace detail

inline ProjectionResult dykstra_project(std::span<const SetExpr> parts, const Vector& x, const ProjectionParams& params) {
  if (parts.empty()) throw std::invalid_argument("dykstra_project needs at least one part");
  for (const auto& p : parts) require_dim(x, p.dim(), "dykstra_project point");
  auto proj = [&](std::size_t i, const Vector& z) { return euclid_project(parts[i], z, params).point; };
  ProjectionResult res = detail::dykstra_loop(parts.size(), proj, x, params);
  return res;
}

inline ProjectionResult euclid_project(const SetExpr& s, const Vector& x, const ProjectionParams& params) {
  require_dim(x, s.dim(), "projection point");
  ProjectionResult out;
  switch (s.kind()) {
    case SetKind::Halfspace: {
      const auto& h = *s.as<Halfspace>();
      out.point = detail::project_halfspace(h.normal, h.offset, x);
      break;
    }
    case SetKind::Box: {
      const auto& b = *s.as<Box>();
      out.point = detail::project_box(b.lo, b.hi, x);
      break;
    }
    case SetKind::NormBall: {
      const auto& b = *s.as<NormBall>();
      const Vector d = x - b.center;
      if (b.norm.is_infinity()) {
        out.point = detail::project_box((b.center.array() - b.radius).matrix(), (b.center.array() + b.radius).matrix(), x);
      } else if (b.norm.p() == 2.0 || s.dim() == 1) {
        const double n = d.norm();
        out.point = n <= b.radius ? x : Vector(b.center + (b.radius / n) * d);
      } else if (b.norm.p() == 1.0) {
        out.point = detail::project_l1_ball(b.center, b.radius, x);
      } else {
        out.point = detail::project_lp_ball(b.center, b.radius, b.norm.p(), x);
      }
      break;
    }
    case SetKind::Ellipsoid:
      out = detail::project_ellipsoid(*s.as<Ellipsoid>(), x, params);
      break;
    case SetKind::PolytopeH:
      out = detail::project_polyhedral_dykstra(*polyhedral_system(s), x, params);
      break;
    case SetKind::AffineSubspace: {
      const auto& af = *s.as<AffineSubspace>();
      const Matrix& q = s.affine_frame();
      out.point = af.point + q * (q.transpose() * (x - af.point));
      break;
    }
    case SetKind::SegmentSet: {
      const auto& seg = s.as<SegmentSet>()->seg;
      const Vector d = seg.direction();
      const double dd = d.squaredNorm();
      const double t = dd == 0.0 ? 0.0 : std::clamp(d.dot(x - seg.a0) / dd, 0.0, 1.0);
      out.point = seg.a0 + t * d;
      break;
    }
    case SetKind::Intersection: {
      const auto& parts = s.as<Intersection>()->parts;
      if (parts.size() == 1) return euclid_project(parts.front(), x, params);
      ProjectionParams inner = params;
      inner.tol = std::min(params.tol, 1e-15);
      inner.max_iter = std::max(params.max_iter, 100000);
      out = dykstra_project(parts, x, inner);
      if (auto sys = polyhedral_system(s)) {
        if (auto exact = detail::polish_polyhedral(*sys, x, out.point)) {
          out.point = *exact;
          out.converged = true;
        }
      }
      break;
    }
    case SetKind::Cylinder: {
      const auto& cyl = *s.as<Cylinder>();
      const double t = cyl.axis_dir.dot(x - cyl.axis_point);
      const Vector z = x - t * cyl.axis_dir;
      const double tc = cyl.extent ? std::clamp(t, cyl.extent->first, cyl.extent->second) : t;
      ProjectionResult cross = euclid_project(*cyl.cross_section, z, params);
      out.point = cross.point + tc * cyl.axis_dir;
      out.iterations = cross.iterations;
      out.converged = cross.converged;
      break;
    }
    case SetKind::VoronoiCell:
      out = detail::project_voronoi(*s.as<VoronoiCell>(), x, params);
      break;
    case SetKind::SublevelSet:
      out = detail::project_sublevel(*s.as<SublevelSet>(), x, params);
      break;
  }
  out.distance = (x - out.point).norm();
  return out;
}

}  // namespace bap

#endif  // BAP_PROJECTION_HPP
