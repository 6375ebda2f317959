#ifndef BAP_LINPROG_HPP
#define BAP_LINPROG_HPP

#include "bap/geometry.hpp"

#include <limits>
#include <vector>

namespace bap::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double value = 0.0;
  Vector x;
};

namespace detail {

// Dense two-phase tableau simplex with Bland's rule:
//   maximize c^T x  subject to  A x <= b, x >= 0.
class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const Vector& c)
      : m_(a.rows()), n_(a.cols()), d_(m_ + 2, n_ + 2), basis_(m_), nonbasis_(n_ + 1) {
    for (Eigen::Index i = 0; i < m_; ++i)
      for (Eigen::Index j = 0; j < n_; ++j) d_(i, j) = a(i, j);
    for (Eigen::Index i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b[i];
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_(m_, j) = -c[j];
    }
    nonbasis_[n_] = -1;
    d_(m_, n_) = 0.0;
    d_(m_, n_ + 1) = 0.0;
    d_.row(m_ + 1).setZero();
    d_(m_ + 1, n_) = 1.0;
  }

  Solution solve() {
    Solution out;
    Eigen::Index r = 0;
    for (Eigen::Index i = 1; i < m_; ++i)
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    if (m_ > 0 && d_(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      if (!simplex(1) || d_(m_ + 1, n_ + 1) < -kEps) {
        out.status = Status::Infeasible;
        return out;
      }
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (basis_[i] == -1) {
          Eigen::Index s = -1;
          for (Eigen::Index j = 0; j <= n_; ++j)
            if (s == -1 || d_(i, j) < d_(i, s) || (d_(i, j) == d_(i, s) && nonbasis_[j] < nonbasis_[s])) s = j;
          pivot(i, s);
        }
      }
    }
    if (!simplex(2)) {
      out.status = Status::Unbounded;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.status = Status::Optimal;
    out.x = Vector::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < n_) out.x[basis_[i]] = d_(i, n_ + 1);
    out.value = d_(m_, n_ + 1);
    return out;
  }

 private:
  static constexpr double kEps = 1e-11;

  void pivot(Eigen::Index r, Eigen::Index s) {
    const double inv = 1.0 / d_(r, s);
    for (Eigen::Index i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = d_(i, s) * inv;
      if (f == 0.0) continue;
      for (Eigen::Index j = 0; j < n_ + 2; ++j)
        if (j != s) d_(i, j) -= d_(r, j) * f;
      d_(i, s) = -f;
    }
    for (Eigen::Index j = 0; j < n_ + 2; ++j)
      if (j != s) d_(r, j) *= inv;
    d_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  bool simplex(int phase) {
    const Eigen::Index x = phase == 1 ? m_ + 1 : m_;
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index s = -1;
      for (Eigen::Index j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (s == -1 || d_(x, j) < d_(x, s) || (d_(x, j) == d_(x, s) && nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (d_(x, s) > -kEps) return true;
      Eigen::Index r = -1;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (d_(i, s) < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_(i, n_ + 1) / d_(i, s);
        const double rhs = d_(r, n_ + 1) / d_(r, s);
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Matrix d_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> nonbasis_;
};

}  // namespace detail

/// maximize c^T x subject to A x <= b, x >= 0.
inline Solution maximize_nonneg(const Matrix& a, const Vector& b, const Vector& c) {
  return detail::Tableau(a, b, c).solve();
}

/// maximize c^T x subject to A x <= b and E x = f, with x free.
inline Solution maximize(const Matrix& a, const Vector& b, const Matrix& e, const Vector& f, const Vector& c) {
  const Eigen::Index n = c.size();
  const Eigen::Index mi = a.rows();
  const Eigen::Index me = e.rows();
  Matrix big(mi + 2 * me, 2 * n);
  Vector rhs(mi + 2 * me);
  if (mi > 0) {
    big.topRows(mi) << a, -a;
    rhs.head(mi) = b;
  }
  if (me > 0) {
    big.middleRows(mi, me) << e, -e;
    big.bottomRows(me) << -e, e;
    rhs.segment(mi, me) = f;
    rhs.tail(me) = -f;
  }
  Vector cc(2 * n);
  cc << c, -c;
  Solution s = maximize_nonneg(big, rhs, cc);
  if (s.status == Status::Optimal) {
    Vector x = s.x.head(n) - s.x.tail(n);
    s.x = std::move(x);
  }
  return s;
}

inline Solution maximize(const Matrix& a, const Vector& b, const Vector& c) {
  return maximize(a, b, Matrix(0, c.size()), Vector(0), c);
}

inline bool feasible(const Matrix& a, const Vector& b, const Matrix& e, const Vector& f) {
  const Eigen::Index n = a.rows() > 0 ? a.cols() : e.cols();
  return maximize(a, b, e, f, Vector::Zero(n)).status != Status::Infeasible;
}

}  // namespace bap::lp

#endif  // BAP_LINPROG_HPP
