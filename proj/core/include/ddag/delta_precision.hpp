#pragma once

#include "ddag/sem.hpp"

#include <string>

namespace ddag {

// Symmetric matrix of precision differences Omega1 - Omega2 over `labels`.
struct DeltaPrecision {
  Matrix matrix;
  Labels labels;
  double threshold_applied = 0.0;

  int size() const { return static_cast<int>(matrix.rows()); }
  int index_of(Label label) const;
  double at(Label i, Label j) const { return matrix(index_of(i), index_of(j)); }
  // Number of nonzero entries.
  long l0() const;
};

enum class EstimatorKind { population, dantzig };

struct EstimatorConfig {
  double lambda_n = 0.0;
  double epsilon = 0.125;
  // lambda_n = lambda_scale * sqrt(log(2 p / delta) / min(n1, n2))
  bool lambda_auto = false;
  double lambda_scale = 2.0;
  double delta = 0.05;
  double solver_tol = 1e-7;
  int max_iter = 50000;

  // Radius actually used for a problem of dimension p.
  double effective_lambda(int p, long n1, long n2) const;
  void validate() const;
};

// Exact solution of Sigma1 X Sigma2 = Sigma2 - Sigma1, i.e. Omega1 - Omega2.
// Throws InvalidCovarianceError unless both matrices are positive definite.
DeltaPrecision solve_population(const CovariancePair& cov);

struct DantzigEstimate {
  DeltaPrecision delta;   // symmetrized and thresholded
  Matrix raw;             // reshaped LP solution before symmetrization
  double lambda = 0.0;
  double residual = 0.0;  // |(S2 (x) S1) vec(raw) - vec(S2 - S1)|_inf
  double l1 = 0.0;
  int iterations = 0;
};

// min |beta|_1  s.t.  |(S2 (x) S1) beta - vec(S2 - S1)|_inf <= lambda,
// reshaped, symmetrized as (M + M^T)/2 and thresholded at cfg.epsilon.
// Throws InfeasibleError or ConvergenceError.
DantzigEstimate estimate_dantzig_detailed(const CovariancePair& cov, const EstimatorConfig& cfg);
DeltaPrecision estimate_dantzig(const CovariancePair& cov, const EstimatorConfig& cfg);

// Restricts both covariances to `subset` and runs the chosen estimator. The
// population estimator is returned unthresholded.
DeltaPrecision estimate_submatrix(const CovariancePair& cov, const Labels& subset,
                                  EstimatorKind kind, const EstimatorConfig& cfg);

// Entries with |v| <= epsilon become exactly zero.
DeltaPrecision threshold(DeltaPrecision dp, double epsilon);

struct IncoherenceReport {
  double k_offdiag_max = 0.0;  // max |S1_ij S2_kl| over (i,j) != (k,l)
  double k_diag_min = 0.0;     // min S1_ii S2_ii
  double lambda_min1 = 0.0;
  double lambda_min2 = 0.0;
  long l0 = 0;
  double bound = 0.0;          // lambda_min1 lambda_min2 / (2 l0)
  bool holds = false;
};

IncoherenceReport incoherence_diagnostics(const CovariancePair& cov, const DeltaPrecision& dp);

}  // namespace ddag
