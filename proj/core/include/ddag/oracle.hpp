#pragma once

#include "ddag/sem.hpp"

#include <string>

// Brute-force and closed-form reference computations. These deliberately
// avoid the code paths of the estimators so they can be used to check them.
namespace ddag {

struct MarginalSem {
  Sem sem;
  Labels removed;
};

// SEM over the retained vertices obtained by integrating out `removed`,
// computed vertex by vertex from the ancestor-precision formulas. Ancestor
// sets come from the lexicographically smallest topological order.
// Throws DomainError when nothing would be retained.
MarginalSem marginalize_sem(const Sem& sem, const Labels& removed);

// Omega_SS - Omega_SC Omega_CC^-1 Omega_CS for S = keep (by index).
Matrix schur_complement(const Matrix& omega, const std::vector<int>& keep);

// (Omega1 - Omega2)_{ij} from the entrywise edge/common-child expansion.
double delta_omega_entry(const Sem& first, const Sem& second, Label i, Label j);

// True when every edge leaving i is unchanged (B1_{*,i} == B2_{*,i}). In
// that case the diagonal of the precision difference at i must vanish; a
// violation throws InvariantError.
bool is_terminal_invariant(const Sem& first, const Sem& second, Label i);

// Partial correlation of (i, j) given the rest of `subset`, from the
// inverse of the covariance restricted to `subset` (which must contain both).
double partial_correlation(const Matrix& sigma, const std::vector<int>& subset, int i, int j);

struct AssumptionReport {
  bool passed = true;
  // First violated condition, empty on success.
  std::string violation;
  Labels invariant;            // U
  long sets_checked = 0;       // ordering-prefix sets examined for (ii)
  bool truncated = false;      // enumeration hit max_sets
  double min_rho_gap = 0.0;    // smallest |rho1 - rho2| seen (inf if none)
  double min_diag_gap = 0.0;   // smallest |Omega1_jj - Omega2_jj| seen
};

struct AssumptionOptions {
  double zero_tol = 1e-9;
  // Prefix sets are limited to at most |V| vertices, V the non-invariant set.
  bool cap_prefix_size = true;
  long max_sets = 200000;
};

// (i) invariant vertices keep their rows/columns of B and the
//     common-children products; (ii) for every changed edge (i, j) and every
//     prefix S of a shared topological order with i, j in S, the partial
//     correlations of (i, j) given S \ {i, j}, and the conditional precisions
//     of j given S \ {j}, differ by at least 2 epsilon across the models.
AssumptionReport check_assumptions(const Sem& first, const Sem& second, double epsilon,
                                   const AssumptionOptions& options = {});

// (d/2) log(p / 2d) - (2/p) log 2, natural log. Requires p >= 2d >= 2.
double minimax_sample_bound(int p, int d);

}  // namespace ddag
