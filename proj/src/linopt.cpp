#include "regmod/linopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "regmod/errors.hpp"
#include "regmod/tolerance.hpp"

namespace regmod::linopt {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Simplex tableau for: minimize c.x, A x = b, x >= 0.
class Tableau {
 public:
  Tableau(const MatrixXd& A, const VectorXd& b, const VectorXd& c) : m_(A.rows()), n_(A.cols()), c_(c) {
    // Columns: n structural, m artificial, rhs.
    t_ = MatrixXd::Zero(m_ + 1, n_ + m_ + 1);
    basis_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m_) = sign * b(i);
      basis_[i] = n_ + i;
    }
  }

  Status solve(VectorXd& x, double& value) {
    // Phase 1: minimize the sum of artificials.
    t_.row(m_).setZero();
    for (Eigen::Index i = 0; i < m_; ++i) t_.row(m_) -= t_.row(i);
    for (Eigen::Index i = 0; i < m_; ++i) t_(m_, n_ + i) = 0.0;
    if (iterate(n_ + m_) == Status::unbounded) throw SolverError("simplex phase 1 unbounded");
    const double scale = 1.0 + t_.col(n_ + m_).head(m_).cwiseAbs().maxCoeff();
    if (-t_(m_, n_ + m_) > 1e-9 * scale) return Status::infeasible;

    // Drive artificials out of the basis; drop redundant rows.
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      Eigen::Index j = 0;
      for (; j < n_; ++j)
        if (std::fabs(t_(i, j)) > 1e-9) break;
      if (j < n_) pivot(i, j);
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[i] < n_) keep.push_back(i);
    MatrixXd t2(keep.size() + 1, n_ + 1);
    std::vector<Eigen::Index> b2;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      t2.row(k).head(n_) = t_.row(keep[k]).head(n_);
      t2(k, n_) = t_(keep[k], n_ + m_);
      b2.push_back(basis_[keep[k]]);
    }
    t_ = std::move(t2);
    basis_ = std::move(b2);
    m_ = static_cast<Eigen::Index>(keep.size());

    // Phase 2 objective row: reduced costs.
    t_.row(m_).setZero();
    t_.row(m_).head(n_) = c_.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) t_.row(m_) -= c_(basis_[i]) * t_.row(i);
    if (iterate(n_) == Status::unbounded) return Status::unbounded;

    x = VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) x(basis_[i]) = t_(i, cols_);
    value = c_.dot(x);
    return Status::optimal;
  }

 private:
  Status iterate(Eigen::Index ncols) {
    cols_ = t_.cols() - 1;
    for (int guard = 0; guard < 50000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j)
        if (t_(m_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      if (enter < 0) return Status::optimal;
      Eigen::Index leave = -1;
      double best = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (t_(i, enter) <= kPivotTol) continue;
        const double ratio = t_(i, cols_) / t_(i, enter);
        if (ratio < best - 1e-12 || (std::fabs(ratio - best) <= 1e-12 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return Status::unbounded;
      pivot(leave, enter);
    }
    throw SolverError("simplex iteration cap reached");
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i)
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    basis_[r] = c;
  }

  Eigen::Index m_, n_;
  Eigen::Index cols_ = 0;
  VectorXd c_;
  MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

// Constraint blocks may be left default-constructed; otherwise their width must match.
Eigen::Index checked_rows(const MatrixXd& m, const VectorXd& rhs, Eigen::Index n) {
  if (m.rows() == 0) return 0;
  if (m.cols() != n || rhs.size() != m.rows()) throw InputError("constraint block has the wrong shape");
  return m.rows();
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const Eigen::Index n = lp.c.size();
  const Eigen::Index meq = checked_rows(lp.A_eq, lp.b_eq, n);
  const Eigen::Index min = checked_rows(lp.A_in, lp.b_in, n);
  std::vector<Eigen::Index> pos(n), neg(n, -1);
  Eigen::Index cols = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    pos[j] = cols++;
    const bool nn = !lp.nonneg.empty() && lp.nonneg[j];
    if (!nn) neg[j] = cols++;
  }
  const Eigen::Index slack0 = cols;
  cols += min;
  MatrixXd A = MatrixXd::Zero(meq + min, cols);
  VectorXd b(meq + min);
  VectorXd c = VectorXd::Zero(cols);
  auto put = [&](Eigen::Index row, const Eigen::RowVectorXd& a) {
    for (Eigen::Index j = 0; j < n; ++j) {
      A(row, pos[j]) = a(j);
      if (neg[j] >= 0) A(row, neg[j]) = -a(j);
    }
  };
  for (Eigen::Index i = 0; i < meq; ++i) {
    put(i, lp.A_eq.row(i));
    b(i) = lp.b_eq(i);
  }
  for (Eigen::Index i = 0; i < min; ++i) {
    put(meq + i, lp.A_in.row(i));
    A(meq + i, slack0 + i) = 1.0;
    b(meq + i) = lp.b_in(i);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    c(pos[j]) = lp.c(j);
    if (neg[j] >= 0) c(neg[j]) = -lp.c(j);
  }
  LpResult res;
  if (meq + min == 0) {
    // Only sign constraints: bounded iff no improving direction.
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool nn = !lp.nonneg.empty() && lp.nonneg[j];
      if (lp.c(j) < 0.0 || (!nn && lp.c(j) != 0.0)) {
        res.status = Status::unbounded;
        return res;
      }
    }
    res.status = Status::optimal;
    res.x = VectorXd::Zero(n);
    return res;
  }
  Tableau tab(A, b, c);
  VectorXd z;
  double value = 0.0;
  res.status = tab.solve(z, value);
  if (res.status != Status::optimal) return res;
  res.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) res.x(j) = z(pos[j]) - (neg[j] >= 0 ? z(neg[j]) : 0.0);
  res.value = lp.c.dot(res.x);
  return res;
}

QpResult solve_qp(const QuadraticProgram& qp) {
  const Eigen::Index n = qp.g.size();
  const Eigen::Index meq = checked_rows(qp.A_eq, qp.b_eq, n);
  const Eigen::Index min = checked_rows(qp.A_in, qp.b_in, n);
  QpResult res;

  LinearProgram feas;
  feas.c = VectorXd::Zero(n);
  feas.A_eq = qp.A_eq;
  feas.b_eq = qp.b_eq;
  feas.A_in = qp.A_in;
  feas.b_in = qp.b_in;
  const LpResult start = solve_lp(feas);
  if (start.status != Status::optimal) {
    res.status = Status::infeasible;
    return res;
  }
  VectorXd x = start.x;

  const double hnorm = qp.H.size() ? qp.H.cwiseAbs().maxCoeff() : 0.0;
  const MatrixXd H = qp.H + (1e-12 * std::max(1.0, hnorm)) * MatrixXd::Identity(n, n);
  const double feas_tol = 1e-10;

  // Working set: equalities first, then independent active inequalities.
  std::vector<Eigen::Index> work;  // inequality row indices
  auto working_matrix = [&](const std::vector<Eigen::Index>& w) {
    MatrixXd Aw(meq + static_cast<Eigen::Index>(w.size()), n);
    if (meq) Aw.topRows(meq) = qp.A_eq;
    for (std::size_t k = 0; k < w.size(); ++k) Aw.row(meq + k) = qp.A_in.row(w[k]);
    return Aw;
  };
  auto rank_of = [&](const MatrixXd& M) {
    if (M.rows() == 0) return Eigen::Index(0);
    Eigen::FullPivLU<MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    return lu.rank();
  };
  Eigen::Index base_rank = rank_of(working_matrix(work));
  for (Eigen::Index i = 0; i < min; ++i) {
    if (std::fabs(qp.A_in.row(i).dot(x) - qp.b_in(i)) > feas_tol * (1.0 + std::fabs(qp.b_in(i)))) continue;
    work.push_back(i);
    const Eigen::Index r = rank_of(working_matrix(work));
    if (r > base_rank) base_rank = r;
    else work.pop_back();
  }

  for (int iter = 0; iter < 5000; ++iter) {
    const MatrixXd Aw = working_matrix(work);
    const Eigen::Index k = Aw.rows();
    MatrixXd K = MatrixXd::Zero(n + k, n + k);
    K.topLeftCorner(n, n) = H;
    if (k) {
      K.topRightCorner(n, k) = Aw.transpose();
      K.bottomLeftCorner(k, n) = Aw;
    }
    VectorXd rhs = VectorXd::Zero(n + k);
    rhs.head(n) = -(qp.H * x + qp.g);
    const VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
    const VectorXd p = sol.head(n);
    const VectorXd mu = sol.tail(k);  // H p + Aw' mu = -(Hx+g)

    if (p.norm() <= 1e-12 * (1.0 + x.norm())) {
      Eigen::Index worst = -1;
      double most_neg = -1e-10;
      for (std::size_t w = 0; w < work.size(); ++w)
        if (mu(meq + w) < most_neg) {
          most_neg = mu(meq + w);
          worst = static_cast<Eigen::Index>(w);
        }
      if (worst < 0) {
        res.status = Status::optimal;
        res.x = x;
        res.value = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
        return res;
      }
      work.erase(work.begin() + worst);
      continue;
    }
    double alpha = 1.0;
    Eigen::Index block = -1;
    for (Eigen::Index i = 0; i < min; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double ap = qp.A_in.row(i).dot(p);
      if (ap <= 1e-14) continue;
      const double step = std::max(0.0, (qp.b_in(i) - qp.A_in.row(i).dot(x)) / ap);
      if (step < alpha) {
        alpha = step;
        block = i;
      }
    }
    x += alpha * p;
    if (block >= 0) work.push_back(block);
  }
  throw SolverError("active-set QP iteration cap reached");
}

VectorXd nnls(const MatrixXd& A, const VectorXd& b) {
  const Eigen::Index n = A.cols();
  VectorXd x = VectorXd::Zero(n);
  if (n == 0) return x;
  std::vector<bool> passive(n, false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm()) * double(n);
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index j = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!passive[i] && w(i) > best) {
        best = w(i);
        j = i;
      }
    if (j < 0) break;
    passive[j] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      MatrixXd Ap(A.rows(), idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
      const VectorXd sp = Ap.completeOrthogonalDecomposition().solve(b);
      VectorXd s = VectorXd::Zero(n);
      for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(k);
      bool positive = true;
      for (Eigen::Index i : idx) positive = positive && s(i) > 0.0;
      if (positive) {
        x = s;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index i : idx)
        if (s(i) <= 0.0) alpha = std::min(alpha, x(i) / (x(i) - s(i)));
      x += alpha * (s - x);
      for (Eigen::Index i : idx)
        if (x(i) <= 1e-15) {
          x(i) = 0.0;
          passive[i] = false;
        }
    }
  }
  return x;
}

RatioExtremes cone_ratio_extremes(const MatrixXd& gens, const MatrixXd& M, const MatrixXd& D) {
  RatioExtremes out;
  const Eigen::Index k = gens.cols();
  if (k > 20) throw BudgetExceeded("cone_ratio_extremes: too many generators");
  const MatrixXd MG = M * gens;
  const MatrixXd DG = D * gens;
  MatrixXd stacked(MG.rows() + DG.rows(), k);
  stacked << MG, DG;
  double th_min = kInf, th_max = -kInf;

  for (unsigned long mask = 1; mask < (1ul << k); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < k; ++j)
      if (mask & (1ul << j)) cols.push_back(j);
    const Eigen::Index t = static_cast<Eigen::Index>(cols.size());
    MatrixXd S(stacked.rows(), t), Ms(MG.rows(), t);
    for (Eigen::Index c = 0; c < t; ++c) {
      S.col(c) = stacked.col(cols[c]);
      Ms.col(c) = MG.col(cols[c]);
    }
    Eigen::FullPivLU<MatrixXd> lu(S);
    lu.setThreshold(1e-10);
    if (lu.rank() < t) continue;
    const MatrixXd A = Ms.transpose() * Ms;
    const MatrixXd C = S.transpose() * S;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, C);
    const VectorXd th = es.eigenvalues();
    const MatrixXd V = es.eigenvectors();
    for (Eigen::Index a = 0; a < t;) {
      Eigen::Index b = a + 1;
      while (b < t && th(b) - th(a) <= 1e-9) ++b;
      const MatrixXd E = V.middleCols(a, b - a);
      VectorXd lambda;
      if (b - a == 1) {
        VectorXd v = E.col(0);
        if (v.sum() < 0) v = -v;
        if (v.minCoeff() >= -1e-12 * v.cwiseAbs().maxCoeff()) lambda = v.cwiseMax(0.0);
      } else {
        // Nonnegative, nonzero combination inside the eigenspace.
        LinearProgram lp;
        lp.c = VectorXd::Zero(b - a);
        lp.A_in = -E;
        lp.b_in = VectorXd::Zero(t);
        lp.A_eq = E.colwise().sum();
        lp.b_eq = VectorXd::Ones(1);
        const LpResult r = solve_lp(lp);
        if (r.status == Status::optimal) lambda = (E * r.x).cwiseMax(0.0);
      }
      if (lambda.size()) {
        VectorXd full = VectorXd::Zero(k);
        for (Eigen::Index c = 0; c < t; ++c) full(cols[c]) = lambda(c);
        const VectorXd v = gens * full;
        const double theta = std::clamp(th(a), 0.0, 1.0);
        out.empty = false;
        if (theta < th_min) {
          th_min = theta;
          out.argmin = v;
        }
        if (theta > th_max) {
          th_max = theta;
          out.argmax = v;
        }
      }
      a = b;
    }
  }
  if (out.empty) return out;
  auto to_ratio = [](double theta) {
    if (theta >= 1.0 - 1e-13) return kInf;
    return std::sqrt(theta / (1.0 - theta));
  };
  out.inf_ratio = to_ratio(th_min);
  out.sup_ratio = to_ratio(th_max);
  return out;
}

}  // namespace regmod::linopt
