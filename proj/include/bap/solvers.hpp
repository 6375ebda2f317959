#ifndef BAP_SOLVERS_HPP
#define BAP_SOLVERS_HPP

#include "bap/set_queries.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bap {

struct StepSchedule {
  enum class Kind { Constant, Diminishing };
  Kind kind = Kind::Diminishing;
  double c = 0.0;  // 0: use the initial distance
};

enum class Method { Auto, Alternating, Descent, Simultaneous };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Alternating: return "alternating";
    case Method::Descent: return "descent";
    case Method::Simultaneous: return "simultaneous";
  }
  return "?";
}

struct SolverParams {
  double tol = 1e-10;
  int max_iter = 10000;
  StepSchedule step;
  double blowup_radius = 1e6;
  std::uint64_t seed = 0;
  Method method = Method::Auto;
  double start_radius = 5.0;     // multistart box [-R, R]^n
  int inner_iter = 2000;         // Halpern steps per half-step of the simultaneous solver
  int stall_window = 100;        // descent stagnation window
  bool record_trace = true;
};

struct BapResult {
  Vector a;
  Vector b;
  double distance = 0.0;  // in the problem norm
  int iterations = 0;
  double residual = 0.0;  // last-step displacement
  bool converged = false;
  bool diverging = false;
  std::string method;
  std::vector<double> trace;  // problem-norm distance per iteration
  double max_a_norm = 0.0;
  double max_b_norm = 0.0;
};

inline void validate(const SolverParams& p) {
  if (!(p.tol > 0.0)) throw std::invalid_argument("solver tol must be positive");
  if (p.max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
  if (!(p.blowup_radius > 0.0)) throw std::invalid_argument("blowup_radius must be positive");
}

namespace detail {

inline void check_pair(const SetExpr& a, const SetExpr& b, const Vector& x0) {
  if (a.dim() != b.dim()) throw DimensionError("sets differ in dimension");
  require_dim(x0, a.dim(), "start point");
}

inline ProjectionParams inner_params(const SolverParams& p) {
  return ProjectionParams{std::min(1e-12, p.tol * 1e-2), 10000};
}

inline void track_norms(BapResult& r) {
  r.max_a_norm = std::max(r.max_a_norm, r.a.norm());
  r.max_b_norm = std::max(r.max_b_norm, r.b.norm());
}

inline bool blown_up(const BapResult& r, double radius) { return r.a.norm() > radius || r.b.norm() > radius; }

/// Alternation between two projection operators with the shared stopping
/// contract (displacement, max_iter, blow-up).
template <class ProjA, class ProjB>
BapResult alternate(ProjA&& pa, ProjB&& pb, const Vector& x0, const SolverParams& params, const char* name) {
  validate(params);
  BapResult r;
  r.method = name;
  r.a = pa(x0);
  r.b = pb(r.a);
  track_norms(r);
  if (params.record_trace) r.trace.push_back((r.a - r.b).norm());
  for (int k = 1; k <= params.max_iter; ++k) {
    Vector a1 = pa(r.b);
    Vector b1 = pb(a1);
    r.residual = (a1 - r.a).norm() + (b1 - r.b).norm();
    r.a = std::move(a1);
    r.b = std::move(b1);
    r.iterations = k;
    track_norms(r);
    if (params.record_trace) r.trace.push_back((r.a - r.b).norm());
    if (blown_up(r, params.blowup_radius)) {
      r.diverging = true;
      break;
    }
    if (r.residual < params.tol) {
      r.converged = true;
      break;
    }
  }
  r.distance = (r.a - r.b).norm();
  return r;
}

}  // namespace detail

/// b_k = P_B(a_k), a_{k+1} = P_A(b_k), started from a_0 = P_A(x0).
inline BapResult alternating_projections(const SetExpr& A, const SetExpr& B, const Vector& x0,
                                         const SolverParams& params = {}) {
  detail::check_pair(A, B, x0);
  const ProjectionParams pp = detail::inner_params(params);
  return detail::alternate([&](const Vector& z) { return euclid_project(A, z, pp).point; },
                           [&](const Vector& z) { return euclid_project(B, z, pp).point; }, x0, params,
                           "alternating");
}

/// Projected subgradient on (a, b) in A x B for ||a - b|| in the given norm.
/// Returns the best pair seen.
inline BapResult general_norm_descent(const SetExpr& A, const SetExpr& B, const NormSpec& norm, const Vector& x0,
                                      const Vector& y0, const SolverParams& params = {}) {
  validate(params);
  detail::check_pair(A, B, x0);
  require_dim(y0, B.dim(), "start point");
  const ProjectionParams pp = detail::inner_params(params);
  BapResult r;
  r.method = "descent";
  Vector a = euclid_project(A, x0, pp).point;
  Vector b = euclid_project(B, y0, pp).point;
  double value = norm_eval(norm, a - b);
  r.a = a;
  r.b = b;
  r.distance = value;
  r.max_a_norm = a.norm();
  r.max_b_norm = b.norm();
  if (params.record_trace) r.trace.push_back(value);
  const double c = params.step.c > 0.0 ? params.step.c : std::max(value, 1e-3);
  double window_start_best = value;
  for (int k = 1; k <= params.max_iter; ++k) {
    const Vector g = norm_subgradient(norm, a - b);
    const double step = params.step.kind == StepSchedule::Kind::Constant ? c : c / std::sqrt(static_cast<double>(k));
    Vector a1 = euclid_project(A, a - step * g, pp).point;
    Vector b1 = euclid_project(B, b + step * g, pp).point;
    r.residual = (a1 - a).norm() + (b1 - b).norm();
    a = std::move(a1);
    b = std::move(b1);
    r.iterations = k;
    r.max_a_norm = std::max(r.max_a_norm, a.norm());
    r.max_b_norm = std::max(r.max_b_norm, b.norm());
    value = norm_eval(norm, a - b);
    if (params.record_trace) r.trace.push_back(value);
    if (value < r.distance) {
      r.distance = value;
      r.a = a;
      r.b = b;
    }
    if (a.norm() > params.blowup_radius || b.norm() > params.blowup_radius) {
      r.diverging = true;
      break;
    }
    if (k % params.stall_window == 0) {
      if (window_start_best - r.distance < params.tol) {
        r.converged = true;
        break;
      }
      window_start_best = r.distance;
    }
  }
  return r;
}

namespace detail {

/// Halpern iteration x_{j+1} = z/(j+2) + (j+1)/(j+2) T(x_j) with T the
/// average of the part projections, followed by cyclic projections to clean
/// up the residual infeasibility.
inline Vector halpern_project(std::span<const SetExpr> parts, const Vector& z, int iters, const ProjectionParams& pp) {
  if (parts.size() == 1) return euclid_project(parts.front(), z, pp).point;
  const double w = 1.0 / static_cast<double>(parts.size());
  Vector x = z;
  for (int j = 0; j < iters; ++j) {
    Vector t = Vector::Zero(z.size());
    for (const auto& p : parts) t += w * euclid_project(p, x, pp).point;
    const double alpha = 1.0 / static_cast<double>(j + 2);
    Vector next = alpha * z + (1.0 - alpha) * t;
    const double moved = (next - x).norm();
    x = std::move(next);
    if (moved == 0.0) break;
  }
  for (int sweep = 0; sweep < 1000; ++sweep) {
    double worst = 0.0;
    for (const auto& p : parts) {
      ProjectionResult pr = euclid_project(p, x, pp);
      worst = std::max(worst, pr.distance);
      x = pr.point;
    }
    if (worst <= 1e-13 * (1.0 + x.norm())) break;
  }
  return x;
}

}  // namespace detail

/// Alternation between the two intersections, each half-step evaluated by
/// anchored simultaneous projection onto the parts.
inline BapResult simultaneous_projection_solve(const std::vector<SetExpr>& a_parts, const std::vector<SetExpr>& b_parts,
                                               const Vector& anchor, const SolverParams& params = {}) {
  if (a_parts.empty() || b_parts.empty()) throw std::invalid_argument("simultaneous solver needs nonempty part lists");
  for (const auto& p : a_parts) detail::check_pair(p, b_parts.front(), anchor);
  for (const auto& p : b_parts) detail::check_pair(p, a_parts.front(), anchor);
  const ProjectionParams pp = detail::inner_params(params);
  return detail::alternate([&](const Vector& z) { return detail::halpern_project(a_parts, z, params.inner_iter, pp); },
                           [&](const Vector& z) { return detail::halpern_project(b_parts, z, params.inner_iter, pp); },
                           anchor, params, "simultaneous");
}

inline std::vector<SetExpr> parts_of(const SetExpr& s) {
  if (const auto* in = s.as<Intersection>()) return in->parts;
  return {s};
}

/// Runs the solver selected by params.method (Auto: alternating projections
/// for the Euclidean norm, descent otherwise).
inline BapResult solve_bap(const SetExpr& A, const SetExpr& B, const NormSpec& norm, const Vector& x0, const Vector& y0,
                           const SolverParams& params = {}) {
  Method m = params.method;
  if (m == Method::Auto) m = norm.is_euclidean() ? Method::Alternating : Method::Descent;
  if ((m == Method::Alternating || m == Method::Simultaneous) && !norm.is_euclidean()) {
    throw PreconditionError(std::string(to_string(m)) + " solver requires the Euclidean norm");
  }
  switch (m) {
    case Method::Alternating: return alternating_projections(A, B, x0, params);
    case Method::Simultaneous: return simultaneous_projection_solve(parts_of(A), parts_of(B), x0, params);
    default: return general_norm_descent(A, B, norm, x0, y0, params);
  }
}

// ---------------------------------------------------------------------------
// Multistart.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Start point number i (and its partner for two-point solvers).
inline std::pair<Vector, Vector> seeded_start(std::uint64_t seed, int i, Eigen::Index n, double radius) {
  std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(i)));
  std::uniform_real_distribution<double> u(-radius, radius);
  Vector x(n), y(n);
  for (Eigen::Index k = 0; k < n; ++k) x[k] = u(rng);
  for (Eigen::Index k = 0; k < n; ++k) y[k] = u(rng);
  return {x, y};
}

struct MultistartResult {
  std::vector<BapResult> runs;
  std::vector<int> cluster_of;  // per run; -1 for runs left out of clustering
  int cluster_count = 0;
  double best_distance = 0.0;
  bool differences_agree = true;       // meaningful when cluster_count >= 2
  double difference_spread = 0.0;      // max ||(a-b)_i - (a-b)_j|| across cluster representatives
  std::vector<std::pair<int, int>> representatives;  // (cluster, run index)
};

inline MultistartResult multistart_bap(const SetExpr& A, const SetExpr& B, const NormSpec& norm, int n_starts,
                                       const SolverParams& params = {}) {
  if (n_starts < 2) throw std::invalid_argument("multistart needs at least two starts");
  if (A.dim() != B.dim()) throw DimensionError("sets differ in dimension");
  MultistartResult out;
  for (int i = 0; i < n_starts; ++i) {
    auto [x0, y0] = seeded_start(params.seed, i, A.dim(), params.start_radius);
    out.runs.push_back(solve_bap(A, B, norm, x0, y0, params));
  }
  const double thr = 10.0 * params.tol;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : out.runs)
    if (!r.diverging) best = std::min(best, r.distance);
  out.best_distance = best;
  out.cluster_of.assign(out.runs.size(), -1);
  std::vector<int> rep_run;
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const auto& r = out.runs[i];
    if (r.diverging) continue;
    int found = -1;
    for (std::size_t c = 0; c < rep_run.size(); ++c) {
      const auto& q = out.runs[static_cast<std::size_t>(rep_run[c])];
      if (std::max((r.a - q.a).norm(), (r.b - q.b).norm()) <= thr) {
        found = static_cast<int>(c);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(rep_run.size());
      rep_run.push_back(static_cast<int>(i));
    }
    out.cluster_of[i] = found;
  }
  out.cluster_count = static_cast<int>(rep_run.size());
  for (std::size_t c = 0; c < rep_run.size(); ++c) out.representatives.emplace_back(static_cast<int>(c), rep_run[c]);
  for (std::size_t i = 0; i < rep_run.size(); ++i) {
    for (std::size_t j = i + 1; j < rep_run.size(); ++j) {
      const auto& p = out.runs[static_cast<std::size_t>(rep_run[i])];
      const auto& q = out.runs[static_cast<std::size_t>(rep_run[j])];
      out.difference_spread = std::max(out.difference_spread, ((p.a - p.b) - (q.a - q.b)).norm());
    }
  }
  out.differences_agree = out.difference_spread <= thr;
  return out;
}

}  // namespace bap

#endif  // BAP_SOLVERS_HPP
