#include "ddag/delta_precision.hpp"

#include "ddag/dantzig_lp.hpp"
#include "ddag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddag {

int DeltaPrecision::index_of(Label label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw LookupError("unknown vertex label " + std::to_string(label));
  return static_cast<int>(it - labels.begin());
}

long DeltaPrecision::l0() const {
  return static_cast<long>((matrix.array() != 0.0).count());
}

double EstimatorConfig::effective_lambda(int p, long n1, long n2) const {
  if (!lambda_auto) return lambda_n;
  long n = std::min(n1, n2);
  if (n <= 0) return 0.0;  // population input: nothing to absorb
  return lambda_scale * std::sqrt(std::log(2.0 * p / delta) / static_cast<double>(n));
}

void EstimatorConfig::validate() const {
  if (!(lambda_n >= 0.0)) throw ConfigError("lambda_n must be nonnegative");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(solver_tol > 0.0)) throw ConfigError("solver_tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be positive");
  if (lambda_auto && !(lambda_scale > 0.0 && delta > 0.0 && delta < 1.0))
    throw ConfigError("lambda_auto needs lambda_scale > 0 and delta in (0, 1)");
}

DeltaPrecision solve_population(const CovariancePair& cov) {
  cov.validate();
  Eigen::LLT<Matrix> llt1(cov.sigma1);
  Eigen::LLT<Matrix> llt2(cov.sigma2);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success)
    throw InvalidCovarianceError("population covariances must be positive definite");

  // Sigma1^-1 (Sigma2 - Sigma1) Sigma2^-1
  Matrix left = llt1.solve(cov.sigma2 - cov.sigma1);
  Matrix delta = llt2.solve(left.transpose()).transpose();
  Matrix sym = 0.5 * (delta + delta.transpose());
  return DeltaPrecision{std::move(sym), cov.labels, 0.0};
}

DantzigEstimate estimate_dantzig_detailed(const CovariancePair& cov, const EstimatorConfig& cfg) {
  cfg.validate();
  cov.validate();
  const int p = cov.size();
  const Eigen::Index m = static_cast<Eigen::Index>(p) * p;

  // Column-major vec: vec(S1 X S2) = (S2 (x) S1) vec(X).
  Matrix kron(m, m);
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l)
      kron.block(k * p, l * p, p, p) = cov.sigma2(k, l) * cov.sigma1;
  Matrix target = cov.sigma2 - cov.sigma1;
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(target.data(), m);

  DantzigEstimate out;
  out.lambda = cfg.effective_lambda(p, cov.n1, cov.n2);

  lp::Options opt;
  opt.feasibility_tol = 0.1 * cfg.solver_tol;
  opt.max_iter = cfg.max_iter;
  lp::Result res = lp::solve_l1_box(kron, rhs, out.lambda, opt);
  switch (res.status) {
    case lp::Status::infeasible:
      throw InfeasibleError("difference-of-precision program is infeasible at lambda_n = " +
                            std::to_string(out.lambda) + "; try a larger lambda_n");
    case lp::Status::iteration_limit:
      throw ConvergenceError("simplex iteration cap reached", res.residual, res.iterations);
    case lp::Status::optimal:
      break;
  }
  if (res.residual > out.lambda + cfg.solver_tol) {
    throw ConvergenceError("solution violates the residual bound beyond solver_tol",
                           res.residual, res.iterations);
  }

  out.raw = Eigen::Map<const Matrix>(res.x.data(), p, p);
  out.residual = res.residual;
  out.l1 = res.objective;
  out.iterations = res.iterations;
  Matrix sym = 0.5 * (out.raw + out.raw.transpose());
  out.delta = threshold(DeltaPrecision{std::move(sym), cov.labels, 0.0}, cfg.epsilon);
  return out;
}

DeltaPrecision estimate_dantzig(const CovariancePair& cov, const EstimatorConfig& cfg) {
  return estimate_dantzig_detailed(cov, cfg).delta;
}

DeltaPrecision estimate_submatrix(const CovariancePair& cov, const Labels& subset,
                                  EstimatorKind kind, const EstimatorConfig& cfg) {
  if (subset.empty()) throw DomainError("subset must be nonempty");
  CovariancePair restricted = cov.restrict_to(subset);
  if (kind == EstimatorKind::population) return solve_population(restricted);
  return estimate_dantzig(restricted, cfg);
}

DeltaPrecision threshold(DeltaPrecision dp, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("threshold epsilon must be positive");
  dp.matrix = dp.matrix.unaryExpr([epsilon](double v) { return std::abs(v) <= epsilon ? 0.0 : v; });
  dp.threshold_applied = epsilon;
  return dp;
}

IncoherenceReport incoherence_diagnostics(const CovariancePair& cov, const DeltaPrecision& dp) {
  cov.validate();
  const int p = cov.size();
  IncoherenceReport r;

  // Off-diagonal entries of S2 (x) S1: S1_ij S2_kl with i != j or k != l.
  auto max_abs = [](const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; };
  auto max_abs_offdiag = [p](const Matrix& m) {
    double best = 0.0;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (i != j) best = std::max(best, std::abs(m(i, j)));
    return best;
  };
  r.k_offdiag_max = std::max(max_abs_offdiag(cov.sigma1) * max_abs(cov.sigma2),
                             max_abs(cov.sigma1) * max_abs_offdiag(cov.sigma2));

  r.k_diag_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p; ++i)
    r.k_diag_min = std::min(r.k_diag_min, cov.sigma1(i, i) * cov.sigma2(i, i));

  Eigen::SelfAdjointEigenSolver<Matrix> e1(cov.sigma1, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> e2(cov.sigma2, Eigen::EigenvaluesOnly);
  r.lambda_min1 = e1.eigenvalues().minCoeff();
  r.lambda_min2 = e2.eigenvalues().minCoeff();
  r.l0 = dp.l0();
  r.bound = r.l0 > 0 ? r.lambda_min1 * r.lambda_min2 / (2.0 * static_cast<double>(r.l0))
                     : std::numeric_limits<double>::infinity();
  r.holds = r.k_offdiag_max <= r.bound;
  return r;
}

}  // namespace ddag
