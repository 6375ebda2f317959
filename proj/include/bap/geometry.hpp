#ifndef BAP_GEOMETRY_HPP
#define BAP_GEOMETRY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kParallelTol = 1e-9;

inline void require_dim(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline Vector make_vector(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

/// An l_p norm, 1 <= p <= inf. The infinite case is a separate kind so that
/// max-semantics are exact.
class NormSpec {
 public:
  enum class Kind { Finite, Infinity };

  static NormSpec lp(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
      throw std::invalid_argument("norm exponent must be a finite real >= 1 (use infinity())");
    }
    return NormSpec(Kind::Finite, p);
  }
  static NormSpec euclidean() { return NormSpec(Kind::Finite, 2.0); }
  static NormSpec infinity() { return NormSpec(Kind::Infinity, std::numeric_limits<double>::infinity()); }

  Kind kind() const { return kind_; }
  bool is_infinity() const { return kind_ == Kind::Infinity; }
  bool is_euclidean() const { return kind_ == Kind::Finite && p_ == 2.0; }
  /// Exponent; +inf for the max norm.
  double p() const { return p_; }

  std::string to_string() const { return is_infinity() ? "inf" : std::to_string(p_); }

  friend bool operator==(const NormSpec& a, const NormSpec& b) {
    return a.kind_ == b.kind_ && (a.is_infinity() || a.p_ == b.p_);
  }

 private:
  NormSpec(Kind k, double p) : kind_(k), p_(p) {}
  Kind kind_;
  double p_;
};

/// ||v||_p. Finite exponents are evaluated on the max-scaled vector to avoid
/// overflow for large p.
inline double norm_eval(const NormSpec& norm, const Vector& v) {
  if (v.size() == 0) return 0.0;
  if (norm.is_infinity()) return v.cwiseAbs().maxCoeff();
  const double p = norm.p();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

inline bool is_strictly_convex_norm(const NormSpec& norm) {
  return !norm.is_infinity() && norm.p() > 1.0;
}

/// A subgradient of ||.||_p at v. At v = 0 the zero vector is returned. For
/// p = inf (and for p = 1 on zero coordinates) a deterministic selection is
/// made: the smallest maximizing index, respectively sign(0) = 0.
inline Vector norm_subgradient(const NormSpec& norm, const Vector& v) {
  Vector g = Vector::Zero(v.size());
  const double nv = norm_eval(norm, v);
  if (nv == 0.0) return g;
  if (norm.is_infinity()) {
    const double m = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) == m) {
        g[i] = v[i] > 0 ? 1.0 : -1.0;
        break;
      }
    }
    return g;
  }
  const double p = norm.p();
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < v.size(); ++i) g[i] = (v[i] > 0) - (v[i] < 0);
    return g;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v[i]) / nv;
    g[i] = std::copysign(std::pow(r, p - 1.0), v[i]);
    if (v[i] == 0.0) g[i] = 0.0;
  }
  return g;
}

/// Closed segment [a0, a1], parametrized as a0 + t (a1 - a0).
struct Segment {
  Vector a0;
  Vector a1;

  Segment() = default;
  Segment(Vector p0, Vector p1) : a0(std::move(p0)), a1(std::move(p1)) {
    if (a0.size() != a1.size()) throw DimensionError("segment endpoints differ in dimension");
    if (a0.size() == 0) throw DimensionError("segment endpoints must have dimension >= 1");
  }

  Eigen::Index dim() const { return a0.size(); }
  Vector direction() const { return a1 - a0; }
  bool nondegenerate() const { return !same_vector(a0, a1); }

  friend bool operator==(const Segment& s, const Segment& r) {
    return same_vector(s.a0, r.a0) && same_vector(s.a1, r.a1);
  }
};

inline Vector segment_point(const Segment& s, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("segment parameter must lie in [0,1]");
  return s.a0 + t * (s.a1 - s.a0);
}

// ---------------------------------------------------------------------------
// Small rank / subspace helpers shared by the parallelism predicate and the
// certificate machinery.

/// Numerical rank of the columns of m, relative to the largest column norm.
inline Eigen::Index numerical_rank(const Matrix& m, double tol = kParallelTol) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Matrix scaled = m;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double n = scaled.col(j).norm();
    if (n > 0) scaled.col(j) /= n;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(scaled);
  qr.setThreshold(tol);
  return qr.rank();
}

/// Orthonormal basis (as columns) of span of the columns of m.
inline Matrix orthonormal_basis(const Matrix& m, double tol = kParallelTol) {
  const Eigen::Index r = numerical_rank(m, tol);
  if (r == 0) return Matrix(m.rows(), 0);
  Matrix scaled = m;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double n = scaled.col(j).norm();
    if (n > 0) scaled.col(j) /= n;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(scaled);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), r);
  return q;
}

/// Orthonormal basis of the orthogonal complement of span(columns of m).
inline Matrix orthogonal_complement(const Matrix& m, Eigen::Index n, double tol = kParallelTol) {
  if (m.cols() == 0) return Matrix::Identity(n, n);
  const Eigen::Index r = numerical_rank(m, tol);
  Matrix scaled = m;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double c = scaled.col(j).norm();
    if (c > 0) scaled.col(j) /= c;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(scaled);
  Matrix q = qr.householderQ();
  return q.rightCols(n - r);
}

/// dim(span U ∩ span V) = rank U + rank V - rank [U V].
inline Eigen::Index subspace_intersection_dim(const Matrix& u, const Matrix& v, double tol = kParallelTol) {
  if (u.cols() == 0 || v.cols() == 0) return 0;
  Matrix uv(u.rows(), u.cols() + v.cols());
  uv << u, v;
  return numerical_rank(u, tol) + numerical_rank(v, tol) - numerical_rank(uv, tol);
}

/// True iff the segments lie on two distinct parallel lines: collinear
/// directions, disjoint supporting lines, and a common 2-plane.
inline bool are_parallel_segments(const Segment& s1, const Segment& s2, double tol = kParallelTol) {
  if (s1.dim() != s2.dim()) throw DimensionError("segments differ in dimension");
  if (!s1.nondegenerate() || !s2.nondegenerate()) {
    throw PreconditionError("parallelism is defined for nondegenerate segments only");
  }
  const Vector d1 = s1.direction().normalized();
  const Vector d2 = s2.direction().normalized();
  // sine of the angle between the two directions
  const double sine = (d2 - d2.dot(d1) * d1).norm();
  if (sine > tol) return false;

  const double scale = std::max({s1.direction().norm(), s2.direction().norm(), (s2.a0 - s1.a0).norm(), 1.0});
  const Vector w = s2.a0 - s1.a0;
  const double line_gap = (w - w.dot(d1) * d1).norm();
  if (line_gap <= tol * scale) return false;  // same supporting line

  Matrix m(s1.dim(), 3);
  m.col(0) = s1.direction();
  m.col(1) = s2.a0 - s1.a0;
  m.col(2) = s2.a1 - s1.a0;
  return numerical_rank(m, tol) <= 2;
}

}  // namespace bap

#endif  // BAP_GEOMETRY_HPP
