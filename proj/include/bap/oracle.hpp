#ifndef BAP_ORACLE_HPP
#define BAP_ORACLE_HPP

#include "bap/set_queries.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bap {

inline constexpr int kOracleMaxDim = 3;

class GridBudgetError : public std::runtime_error {
 public:
  GridBudgetError(double points, double suggested)
      : std::runtime_error("grid budget exceeded: " + std::to_string(points) +
                           " points; try resolution >= " + std::to_string(suggested)),
        suggested_resolution(suggested) {}
  double suggested_resolution;
};

enum class Membership { Closed, Open, Boundary };

struct OracleOptions {
  Membership membership = Membership::Closed;
  double boundary_tol = -1.0;        // < 0: resolution * sqrt(dim)
  std::size_t max_pairs = 200000;    // cap on stored near-optimal pairs
  double grid_budget = 1e8;
  double cluster_factor = 5.0;       // cluster threshold in units of resolution
};

struct OracleReport {
  double dist_estimate = 0.0;
  double resolution = 0.0;
  std::vector<std::pair<Vector, Vector>> optimal_pairs;  // within dist_estimate + 2 resolution
  bool pairs_truncated = false;
  int cluster_count = 0;
  double max_cluster_diameter = 0.0;  // product-space Euclidean diameter bound of the widest cluster
  std::optional<std::pair<Segment, Segment>> segment_fit;
  std::size_t tie_count = 0;          // pairs attaining dist_estimate up to rounding
  double tie_diameter = 0.0;          // product-space bounding-box diagonal of the tie pairs
  Vector tie_a_lo, tie_a_hi;          // coordinate range of the tie a-points
  bool clipped = false;
  std::size_t points_a = 0;
  std::size_t points_b = 0;
};

namespace detail {

using Pt = std::array<double, kOracleMaxDim>;

struct PointNorm {
  NormSpec norm;
  int dim;

  double operator()(const Pt& g) const {
    if (norm.is_infinity()) {
      double m = 0.0;
      for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(g[i]));
      return m;
    }
    const double p = norm.p();
    double s = 0.0;
    if (p == 2.0) {
      for (int i = 0; i < dim; ++i) s += g[i] * g[i];
      return std::sqrt(s);
    }
    if (p == 1.0) {
      for (int i = 0; i < dim; ++i) s += std::abs(g[i]);
      return s;
    }
    for (int i = 0; i < dim; ++i) s += std::pow(std::abs(g[i]), p);
    return std::pow(s, 1.0 / p);
  }
  double dist(const Pt& a, const Pt& b) const {
    Pt g{};
    for (int i = 0; i < dim; ++i) g[i] = a[i] - b[i];
    return (*this)(g);
  }
};

/// Static kd-tree over a point list with box lower bounds in the given norm.
class KdTree {
 public:
  KdTree(const std::vector<Pt>& pts, PointNorm pn) : pts_(pts), pn_(pn), idx_(pts.size()) {
    std::iota(idx_.begin(), idx_.end(), std::size_t{0});
    if (!pts.empty()) build(0, pts.size());
  }

  /// Smallest distance below bound, with its index; returns bound if none.
  double nearest(const Pt& q, double bound, std::size_t& best) const {
    if (nodes_.empty()) return bound;
    nearest_rec(0, q, bound, best);
    return bound;
  }

  template <class F>
  void range(const Pt& q, double r, F&& f) const {
    if (!nodes_.empty()) range_rec(0, q, r, f);
  }

 private:
  struct Node {
    Pt lo{}, hi{};
    std::size_t begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(std::size_t b, std::size_t e) {
    Node n;
    n.begin = b;
    n.end = e;
    for (int d = 0; d < pn_.dim; ++d) {
      n.lo[d] = std::numeric_limits<double>::infinity();
      n.hi[d] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = b; i < e; ++i) {
      for (int d = 0; d < pn_.dim; ++d) {
        n.lo[d] = std::min(n.lo[d], pts_[idx_[i]][d]);
        n.hi[d] = std::max(n.hi[d], pts_[idx_[i]][d]);
      }
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    if (e - b > 16) {
      int axis = 0;
      for (int d = 1; d < pn_.dim; ++d)
        if (n.hi[d] - n.lo[d] > n.hi[axis] - n.lo[axis]) axis = d;
      const std::size_t mid = (b + e) / 2;
      std::nth_element(idx_.begin() + static_cast<long>(b), idx_.begin() + static_cast<long>(mid),
                       idx_.begin() + static_cast<long>(e), [&](std::size_t x, std::size_t y) {
                         return pts_[x][axis] < pts_[y][axis] || (pts_[x][axis] == pts_[y][axis] && x < y);
                       });
      const int l = build(b, mid);
      const int r = build(mid, e);
      nodes_[static_cast<std::size_t>(id)].left = l;
      nodes_[static_cast<std::size_t>(id)].right = r;
    }
    return id;
  }

  double box_bound(const Node& n, const Pt& q) const {
    Pt g{};
    for (int d = 0; d < pn_.dim; ++d) g[d] = std::max({n.lo[d] - q[d], 0.0, q[d] - n.hi[d]});
    return pn_(g);
  }

  void nearest_rec(int id, const Pt& q, double& bound, std::size_t& best) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (box_bound(n, q) >= bound) return;
    if (n.left < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const double d = pn_.dist(q, pts_[idx_[i]]);
        if (d < bound || (d == bound && idx_[i] < best)) {
          bound = d;
          best = idx_[i];
        }
      }
      return;
    }
    const double bl = box_bound(nodes_[static_cast<std::size_t>(n.left)], q);
    const double br = box_bound(nodes_[static_cast<std::size_t>(n.right)], q);
    if (bl <= br) {
      nearest_rec(n.left, q, bound, best);
      nearest_rec(n.right, q, bound, best);
    } else {
      nearest_rec(n.right, q, bound, best);
      nearest_rec(n.left, q, bound, best);
    }
  }

  template <class F>
  void range_rec(int id, const Pt& q, double r, F& f) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (box_bound(n, q) > r) return;
    if (n.left < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const double d = pn_.dist(q, pts_[idx_[i]]);
        if (d <= r) f(idx_[i], d);
      }
      return;
    }
    range_rec(n.left, q, r, f);
    range_rec(n.right, q, r, f);
  }

  const std::vector<Pt>& pts_;
  PointNorm pn_;
  std::vector<std::size_t> idx_;
  std::vector<Node> nodes_;
};

struct Grid {
  Vector lo;
  double res;
  std::array<long, kOracleMaxDim> count{1, 1, 1};
  int dim;
};

inline Grid make_grid(const Box& bbox, double res, double budget) {
  if (!(res > 0.0)) throw std::invalid_argument("oracle resolution must be positive");
  const int n = static_cast<int>(bbox.lo.size());
  if (n > kOracleMaxDim) throw PreconditionError("oracle supports dimension <= 3");
  Grid g{bbox.lo, res, {1, 1, 1}, n};
  double total = 1.0;
  for (int d = 0; d < n; ++d) {
    const double span = bbox.hi[d] - bbox.lo[d];
    g.count[static_cast<std::size_t>(d)] = static_cast<long>(std::floor(span / res + 1e-9)) + 1;
    total *= static_cast<double>(g.count[static_cast<std::size_t>(d)]);
  }
  if (total > budget) throw GridBudgetError(total, res * std::pow(total / budget, 1.0 / n) * 1.01);
  return g;
}

inline Pt grid_point(const Grid& g, const std::array<long, kOracleMaxDim>& ijk) {
  Pt p{};
  for (int d = 0; d < g.dim; ++d) p[static_cast<std::size_t>(d)] = g.lo[d] + static_cast<double>(ijk[static_cast<std::size_t>(d)]) * g.res;
  return p;
}

inline Vector to_vector(const Pt& p, int dim) {
  Vector v(dim);
  for (int d = 0; d < dim; ++d) v[d] = p[static_cast<std::size_t>(d)];
  return v;
}

/// Grid points of s; sets touches_box when a member lies on the bbox faces.
inline std::vector<Pt> grid_members(const SetExpr& s, const Grid& g, Membership m, double btol, bool& touches_box) {
  std::vector<Pt> out;
  std::array<long, kOracleMaxDim> ijk{0, 0, 0};
  Vector x(g.dim);
  while (true) {
    const Pt p = grid_point(g, ijk);
    for (int d = 0; d < g.dim; ++d) x[d] = p[static_cast<std::size_t>(d)];
    bool in = false;
    switch (m) {
      case Membership::Closed: in = contains(s, x, kMembershipTol); break;
      case Membership::Open: in = strictly_inside(s, x); break;
      case Membership::Boundary: in = contains(s, x, kMembershipTol) && constraint_slack(s, x) <= btol; break;
    }
    if (in) {
      out.push_back(p);
      for (int d = 0; d < g.dim; ++d) {
        const long c = ijk[static_cast<std::size_t>(d)];
        if (c == 0 || c == g.count[static_cast<std::size_t>(d)] - 1) touches_box = true;
      }
    }
    int d = 0;
    for (; d < g.dim; ++d) {
      if (++ijk[static_cast<std::size_t>(d)] < g.count[static_cast<std::size_t>(d)]) break;
      ijk[static_cast<std::size_t>(d)] = 0;
    }
    if (d == g.dim) break;
  }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

using CellKey = std::array<long, 2 * kOracleMaxDim>;

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
    return h;
  }
};

/// Connected components of pairs under product-space max-distance <= thr.
/// Returns the component id per pair and the number of components.
inline std::vector<std::size_t> cluster_pairs(const std::vector<std::pair<Vector, Vector>>& pairs, double thr,
                                              int& count) {
  const std::size_t np = pairs.size();
  UnionFind uf(np);
  if (np == 0) {
    count = 0;
    return {};
  }
  const int n = static_cast<int>(pairs.front().first.size());
  const int m = 2 * n;
  auto coord = [&](std::size_t i, int k) { return k < n ? pairs[i].first[k] : pairs[i].second[k - n]; };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells;
  std::vector<CellKey> keys;
  for (std::size_t i = 0; i < np; ++i) {
    CellKey key{};
    for (int k = 0; k < m; ++k) key[static_cast<std::size_t>(k)] = static_cast<long>(std::floor(coord(i, k) / thr));
    auto [it, fresh] = cells.try_emplace(key);
    if (fresh) keys.push_back(key);
    it->second.push_back(i);
  }
  auto close = [&](std::size_t i, std::size_t j) {
    for (int k = 0; k < m; ++k)
      if (std::abs(coord(i, k) - coord(j, k)) > thr) return false;
    return true;
  };
  // Members of one cell are within thr of each other.
  for (const auto& [key, members] : cells)
    for (std::size_t t = 1; t < members.size(); ++t) uf.unite(members[0], members[t]);
  long offsets = 1;
  for (int k = 0; k < m; ++k) offsets *= 3;
  for (const auto& key : keys) {
    const auto& mine = cells[key];
    for (long o = 0; o < offsets; ++o) {
      CellKey nb = key;
      long code = o;
      bool forward = false, zero = true;
      for (int k = 0; k < m; ++k) {
        const long step = code % 3 - 1;
        code /= 3;
        nb[static_cast<std::size_t>(k)] += step;
        if (zero && step != 0) {
          forward = step > 0;
          zero = false;
        }
      }
      if (zero || !forward) continue;
      auto it = cells.find(nb);
      if (it == cells.end()) continue;
      if (uf.find(mine[0]) == uf.find(it->second[0])) continue;
      bool joined = false;
      for (std::size_t i : mine) {
        for (std::size_t j : it->second) {
          if (close(i, j)) {
            uf.unite(i, j);
            joined = true;
            break;
          }
        }
        if (joined) break;
      }
    }
  }
  std::vector<std::size_t> comp(np);
  std::unordered_map<std::size_t, std::size_t> ids;
  for (std::size_t i = 0; i < np; ++i) {
    auto [it, fresh] = ids.try_emplace(uf.find(i), ids.size());
    comp[i] = it->second;
  }
  count = static_cast<int>(ids.size());
  return comp;
}

/// Least-squares line through the tie pairs in product space.
inline std::optional<std::pair<Segment, Segment>> fit_segment_pair(const std::vector<std::pair<Vector, Vector>>& ties,
                                                                   double res) {
  if (ties.size() < 2) return std::nullopt;
  const Eigen::Index n = ties.front().first.size();
  Matrix pts(static_cast<Eigen::Index>(ties.size()), 2 * n);
  for (std::size_t i = 0; i < ties.size(); ++i) {
    pts.row(static_cast<Eigen::Index>(i)) << ties[i].first.transpose(), ties[i].second.transpose();
  }
  const Vector mean = pts.colwise().mean();
  const Matrix centered = pts.rowwise() - mean.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(centered.transpose() * centered);
  const Vector dir = es.eigenvectors().col(2 * n - 1);
  const Vector t = centered * dir;
  const Matrix resid = centered - t * dir.transpose();
  const double residual = resid.rowwise().norm().maxCoeff();
  const double tmin = t.minCoeff(), tmax = t.maxCoeff();
  if (residual > 2.0 * res || tmax - tmin <= 2.0 * res) return std::nullopt;
  const Vector p0 = mean + tmin * dir;
  const Vector p1 = mean + tmax * dir;
  return std::make_pair(Segment(p0.head(n), p1.head(n)), Segment(p0.tail(n), p1.tail(n)));
}

}  // namespace detail

/// Brute-force distance between the grid points of bbox lying in A and in B.
inline OracleReport grid_min_distance(const SetExpr& A, const SetExpr& B, const NormSpec& norm, const Box& bbox,
                                      double resolution, const OracleOptions& opt = {}) {
  using namespace detail;
  if (A.dim() != B.dim() || A.dim() != bbox.lo.size() || bbox.hi.size() != bbox.lo.size()) {
    throw DimensionError("oracle: dimension mismatch");
  }
  const Grid g = make_grid(bbox, resolution, opt.grid_budget);
  const int n = g.dim;
  const double btol = opt.boundary_tol >= 0.0 ? opt.boundary_tol : resolution * std::sqrt(static_cast<double>(n));
  OracleReport rep;
  rep.resolution = resolution;
  bool touch_a = false, touch_b = false;
  const std::vector<Pt> pa = grid_members(A, g, opt.membership, btol, touch_a);
  const std::vector<Pt> pb = grid_members(B, g, opt.membership, btol, touch_b);
  rep.points_a = pa.size();
  rep.points_b = pb.size();
  if (pa.empty() || pb.empty()) {
    throw PreconditionError("oracle: no grid points inside " + std::string(pa.empty() ? "A" : "B") +
                            "; refine the resolution or enlarge the bounding box");
  }
  rep.clipped = touch_a || touch_b || !is_bounded(A).value_or(false) || !is_bounded(B).value_or(false);

  const PointNorm pn{norm, n};
  const KdTree tree(pb, pn);
  double best = std::numeric_limits<double>::infinity();
  for (const Pt& a : pa) {
    std::size_t idx = 0;
    best = std::min(best, tree.nearest(a, best, idx));
  }
  rep.dist_estimate = best;

  const double band = best + 2.0 * resolution;
  const double tie = best + 1e-9 * (1.0 + best);
  std::vector<std::pair<Vector, Vector>> ties;
  for (const Pt& a : pa) {
    tree.range(a, band, [&](std::size_t j, double d) {
      if (d <= tie) ties.emplace_back(to_vector(a, n), to_vector(pb[j], n));
      if (rep.optimal_pairs.size() < opt.max_pairs) {
        rep.optimal_pairs.emplace_back(to_vector(a, n), to_vector(pb[j], n));
      } else {
        rep.pairs_truncated = true;
      }
    });
  }
  rep.tie_count = ties.size();
  if (!ties.empty()) {
    Vector tlo(2 * n), thi(2 * n);
    tlo << ties.front().first, ties.front().second;
    thi = tlo;
    for (const auto& [a, b] : ties) {
      Vector z(2 * n);
      z << a, b;
      tlo = tlo.cwiseMin(z);
      thi = thi.cwiseMax(z);
    }
    rep.tie_diameter = (thi - tlo).norm();
    rep.tie_a_lo = tlo.head(n);
    rep.tie_a_hi = thi.head(n);
  }

  const double thr = opt.cluster_factor * resolution;
  const auto comp = cluster_pairs(rep.optimal_pairs, thr, rep.cluster_count);
  // Widest cluster, measured by its product-space bounding box diagonal.
  std::vector<Vector> lo(static_cast<std::size_t>(rep.cluster_count)), hi(static_cast<std::size_t>(rep.cluster_count));
  for (std::size_t i = 0; i < rep.optimal_pairs.size(); ++i) {
    Vector z(2 * n);
    z << rep.optimal_pairs[i].first, rep.optimal_pairs[i].second;
    auto& l = lo[comp[i]];
    auto& h = hi[comp[i]];
    if (l.size() == 0) {
      l = z;
      h = z;
    } else {
      l = l.cwiseMin(z);
      h = h.cwiseMax(z);
    }
  }
  for (std::size_t c = 0; c < lo.size(); ++c) rep.max_cluster_diameter = std::max(rep.max_cluster_diameter, (hi[c] - lo[c]).norm());

  rep.segment_fit = fit_segment_pair(ties, resolution);
  return rep;
}

struct BoundaryIdentityReport {
  std::optional<bool> holds;  // nullopt when the sets are not disjoint on the grid
  double full_distance = 0.0;
  double boundary_distance = 0.0;
  std::string note;
};

/// Compares the grid distance of the full sets with that of their
/// boundary-filtered grid points.
inline BoundaryIdentityReport verify_boundary_identity(const SetExpr& A, const SetExpr& B, const NormSpec& norm,
                                                       const Box& bbox, double resolution, OracleOptions opt = {}) {
  BoundaryIdentityReport rep;
  opt.max_pairs = 1;
  opt.membership = Membership::Closed;
  const OracleReport full = grid_min_distance(A, B, norm, bbox, resolution, opt);
  rep.full_distance = full.dist_estimate;
  if (full.dist_estimate <= 2.0 * resolution * std::sqrt(static_cast<double>(A.dim()))) {
    rep.note = "sets are not disjoint on the grid; the identity is not asserted";
    return rep;
  }
  opt.membership = Membership::Boundary;
  const OracleReport bd = grid_min_distance(A, B, norm, bbox, resolution, opt);
  rep.boundary_distance = bd.dist_estimate;
  rep.holds = std::abs(rep.full_distance - rep.boundary_distance) <= 3.0 * resolution;
  rep.note = *rep.holds ? "boundary distance matches" : "boundary distance differs";
  return rep;
}

}  // namespace bap

#endif  // BAP_ORACLE_HPP
