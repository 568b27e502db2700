#include "ddag/dantzig_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ddag::lp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NonBasic : unsigned char { basic, lower, upper };

// Dense tableau for the split program. Variable ids: [0, n) are x+,
// [n, 2n) are x-, [2n, 2n + m) are the ranged slacks. Only B^-1 [A | I] is
// stored; the x- columns are the negated x+ columns.
class DualSimplex {
 public:
  DualSimplex(const MatrixXd& a, const VectorXd& b, double lambda, const Options& opt)
      : a_(a), b_(b), lambda_(lambda), opt_(opt), m_(a.rows()), n_(a.cols()) {
    const Index total = 2 * n_ + m_;
    state_.assign(static_cast<std::size_t>(total), NonBasic::lower);
    basis_.resize(static_cast<std::size_t>(m_));
    for (Index r = 0; r < m_; ++r) {
      basis_[r] = 2 * n_ + r;
      state_[basis_[r]] = NonBasic::basic;
    }
    cost_ = VectorXd::Zero(total);
    cost_.head(2 * n_).setOnes();
    refactor();
  }

  Result run() {
    Result out;
    int since_refactor = 0;
    for (int it = 0; it < opt_.max_iter; ++it) {
      out.iterations = it;
      Index row = most_infeasible_row();
      if (row < 0) {
        if (since_refactor == 0) return finish(Status::optimal, out);
        refactor();
        since_refactor = 0;
        continue;
      }
      Index entering = ratio_test(row);
      if (entering < 0) {
        if (since_refactor != 0) {
          refactor();
          since_refactor = 0;
          continue;
        }
        return finish(Status::infeasible, out);
      }
      pivot(row, entering);
      if (++since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
    out.iterations = opt_.max_iter;
    refactor();
    return finish(Status::iteration_limit, out);
  }

 private:
  double upper(Index j) const { return j < 2 * n_ ? kInf : 2.0 * lambda_; }
  bool fixed(Index j) const { return j >= 2 * n_ && lambda_ == 0.0; }

  double alpha(Index r, Index j) const {
    if (j < n_) return t_(r, j);
    if (j < 2 * n_) return -t_(r, j - n_);
    return t_(r, j - n_);
  }

  VectorXd column_of_tableau(Index j) const {
    if (j < n_) return t_.col(j);
    if (j < 2 * n_) return -t_.col(j - n_);
    return t_.col(j - n_);
  }

  VectorXd original_column(Index j) const {
    if (j < n_) return a_.col(j);
    if (j < 2 * n_) return -a_.col(j - n_);
    VectorXd e = VectorXd::Zero(m_);
    e(j - 2 * n_) = 1.0;
    return e;
  }

  void refactor() {
    MatrixXd basis_matrix(m_, m_);
    for (Index r = 0; r < m_; ++r) basis_matrix.col(r) = original_column(basis_[r]);
    Eigen::PartialPivLU<MatrixXd> lu(basis_matrix);
    MatrixXd inverse = lu.solve(MatrixXd::Identity(m_, m_));
    t_.resize(m_, n_ + m_);
    t_.leftCols(n_).noalias() = inverse * a_;
    t_.rightCols(m_) = inverse;

    VectorXd rhs = b_.array() + lambda_;
    for (Index r = 0; r < m_; ++r)
      if (state_[2 * n_ + r] == NonBasic::upper) rhs(r) -= 2.0 * lambda_;
    x_basic_.noalias() = inverse * rhs;

    VectorXd cb(m_);
    for (Index r = 0; r < m_; ++r) cb(r) = cost_(basis_[r]);
    y_.noalias() = inverse.transpose() * cb;
    VectorXd aty = a_.transpose() * y_;
    reduced_.resize(2 * n_ + m_);
    reduced_.head(n_) = 1.0 - aty.array();
    reduced_.segment(n_, n_) = 1.0 + aty.array();
    reduced_.tail(m_) = -y_;
    for (Index r = 0; r < m_; ++r) reduced_(basis_[r]) = 0.0;
  }

  Index most_infeasible_row() const {
    Index best = -1;
    double worst = opt_.feasibility_tol;
    for (Index r = 0; r < m_; ++r) {
      double v = x_basic_(r);
      double viol = std::max(-v, v - upper(basis_[r]));
      if (viol > worst) {
        worst = viol;
        best = r;
      }
    }
    return best;
  }

  // Two-pass Harris ratio test; returns -1 when no column can restore the row.
  Index ratio_test(Index r) const {
    const bool to_lower = x_basic_(r) < 0.0;
    const auto row = t_.row(r);
    const double pivot_tol = 1e-11 * std::max(1.0, row.cwiseAbs().maxCoeff());

    auto eligible = [&](Index j, double a) {
      if (state_[j] == NonBasic::basic || fixed(j)) return false;
      bool at_lower = state_[j] == NonBasic::lower;
      if (to_lower) return at_lower ? a < -pivot_tol : a > pivot_tol;
      return at_lower ? a > pivot_tol : a < -pivot_tol;
    };
    auto slack_dual = [&](Index j) {
      double d = reduced_(j);
      return state_[j] == NonBasic::lower ? std::max(d, 0.0) : std::max(-d, 0.0);
    };

    const Index total = 2 * n_ + m_;
    double bound = kInf;
    for (Index j = 0; j < total; ++j) {
      double a = alpha(r, j);
      if (!eligible(j, a)) continue;
      bound = std::min(bound, (slack_dual(j) + opt_.optimality_tol) / std::abs(a));
    }
    if (!std::isfinite(bound)) return -1;

    Index best = -1;
    double best_abs = 0.0;
    for (Index j = 0; j < total; ++j) {
      double a = alpha(r, j);
      if (!eligible(j, a)) continue;
      if (slack_dual(j) / std::abs(a) <= bound && std::abs(a) > best_abs) {
        best_abs = std::abs(a);
        best = j;
      }
    }
    return best;
  }

  void pivot(Index r, Index q) {
    const Index leaving = basis_[r];
    const double a_rq = alpha(r, q);
    const bool to_lower = x_basic_(r) < 0.0;
    const double target = to_lower ? 0.0 : upper(leaving);

    // Duals.
    const double theta = reduced_(q) / a_rq;
    const Index total = 2 * n_ + m_;
    for (Index j = 0; j < total; ++j) {
      if (state_[j] == NonBasic::basic) continue;
      reduced_(j) -= theta * alpha(r, j);
    }
    reduced_(q) = 0.0;
    reduced_(leaving) = -theta;

    // Primal values.
    VectorXd col = column_of_tableau(q);
    const double entering_old = state_[q] == NonBasic::upper ? upper(q) : 0.0;
    const double step = (x_basic_(r) - target) / a_rq;
    x_basic_ -= step * col;
    x_basic_(r) = entering_old + step;

    // Tableau.
    Eigen::RowVectorXd pivot_row = t_.row(r) / a_rq;
    t_.noalias() -= col * pivot_row;
    t_.row(r) = pivot_row;

    state_[leaving] = to_lower ? NonBasic::lower : NonBasic::upper;
    state_[q] = NonBasic::basic;
    basis_[r] = q;
  }

  Result finish(Status status, Result out) const {
    VectorXd x = VectorXd::Zero(n_);
    for (Index r = 0; r < m_; ++r) {
      Index j = basis_[r];
      if (j < n_) x(j) += x_basic_(r);
      else if (j < 2 * n_) x(j - n_) -= x_basic_(r);
    }
    out.status = status;
    out.objective = x.cwiseAbs().sum();
    out.residual = n_ > 0 ? (a_ * x - b_).cwiseAbs().maxCoeff() : b_.cwiseAbs().maxCoeff();
    out.y = y_;
    out.dual_objective = b_.dot(y_) - lambda_ * y_.cwiseAbs().sum();
    out.x = std::move(x);
    return out;
  }

  const MatrixXd& a_;
  const VectorXd& b_;
  double lambda_;
  Options opt_;
  Index m_;
  Index n_;

  MatrixXd t_;
  VectorXd x_basic_;
  VectorXd reduced_;
  VectorXd y_;
  VectorXd cost_;
  std::vector<Index> basis_;
  std::vector<NonBasic> state_;
};

}  // namespace

Result solve_l1_box(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda,
                    const Options& options) {
  if (a.rows() != b.size() || lambda < 0.0 || !std::isfinite(lambda)) {
    Result bad;
    bad.status = Status::infeasible;
    return bad;
  }
  if (a.rows() == 0) {
    Result empty;
    empty.status = Status::optimal;
    empty.x = Eigen::VectorXd::Zero(a.cols());
    empty.y = Eigen::VectorXd::Zero(0);
    return empty;
  }
  DualSimplex solver(a, b, lambda, options);
  return solver.run();
}

}  // namespace ddag::lp
