#pragma once

#include "ddag/edge_set.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>

namespace ddag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

// Linear structural equation model X = B X + e with independent noise,
// Var(e_i) = noise_vars[i]. Row i of B holds the coefficients on the parents
// of X_i, so B(i, j) != 0 is the edge i <- j.
class Sem {
 public:
  // Labels default to 0..p-1. Throws InvariantError when B is not square,
  // has a nonzero diagonal, has a directed cycle, or a variance is not
  // strictly positive and finite.
  Sem(Matrix b, Vector noise_vars, Labels labels = {});

  int size() const { return static_cast<int>(b_.rows()); }
  const Matrix& b() const { return b_; }
  const Vector& noise_vars() const { return noise_vars_; }
  const Labels& labels() const { return labels_; }

  int index_of(Label label) const;

  // Lexicographically smallest topological order (parents first), as
  // matrix indices.
  const std::vector<int>& topological_order() const { return order_; }

  DagEdgeSet support() const;

 private:
  Matrix b_;
  Vector noise_vars_;
  Labels labels_;
  std::vector<int> order_;
};

// supp(B1 - B2) over the shared labels. Entries with |difference| <= tol
// count as equal.
DagEdgeSet difference_support(const Sem& first, const Sem& second, double tol = 0.0);

// (I - B)^-1 D (I - B)^-T
Matrix covariance(const Sem& sem);
// (I - B)^T D^-1 (I - B)
Matrix precision(const Sem& sem);

// n i.i.d. rows of X = (I - B)^-1 e with Gaussian e.
Matrix sample(const Sem& sem, int n, Rng& rng);
Matrix sample(const Sem& sem, int n, std::uint64_t seed);

// (1/n) X^T X. Uncentered: the model is zero-mean by construction.
Matrix empirical_covariance(const Matrix& data);

// Pair of covariance matrices over a common label ordering. n1 = n2 = 0
// marks exact (population) covariances.
struct CovariancePair {
  Matrix sigma1;
  Matrix sigma2;
  long n1 = 0;
  long n2 = 0;
  Labels labels;

  static CovariancePair population(const Sem& first, const Sem& second);
  static CovariancePair empirical(const Matrix& data1, const Matrix& data2, Labels labels = {});

  int size() const { return static_cast<int>(sigma1.rows()); }
  bool is_population() const { return n1 == 0 && n2 == 0; }
  int index_of(Label label) const;

  // Rows/columns for `subset`, in the given order. Throws LookupError for
  // unknown labels.
  CovariancePair restrict_to(const Labels& subset) const;

  // Throws InvariantError on shape, label or symmetry problems.
  void validate() const;
};

struct SemPairGenConfig {
  int p = 10;
  // Average number of adjacent edges per vertex; defaults to sqrt(p).
  std::optional<double> expected_neighbors;
  // Per edge slot probability of a deletion or addition; defaults to 0.5/p.
  std::optional<double> edge_change_prob;
  // Edge weights are drawn from [-high, -low] U [low, high].
  double weight_low = 0.25;
  double weight_high = 1.0;
  double noise_low = 0.8;
  double noise_high = 1.2;
  double min_delta_omega = 0.25;
  std::uint64_t seed = 0;
  int max_retries = 1000;

  double neighbors() const;
  double change_prob() const;
  void validate() const;
};

struct SemPair {
  Sem first;
  Sem second;
  DagEdgeSet difference;
  int attempts = 1;
};

// Random SEM pair sharing noise variances and a topological order, rejection
// sampled until the population difference of precisions is separated and the
// finite-sample faithfulness check passes at min_delta_omega / 2.
SemPair generate_sem_pair(const SemPairGenConfig& cfg);

}  // namespace ddag
