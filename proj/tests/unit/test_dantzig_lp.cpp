#include "ddag/dantzig_lp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace ddag::lp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Minimum of |x|_1 over {|Ax - b|_inf <= lambda} by enumerating every vertex
// of the arrangement made of the 2m constraint faces and the n coordinate
// planes. Returns +inf when nothing is feasible.
double brute_force_l1(const MatrixXd& a, const VectorXd& b, double lambda) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  std::vector<std::pair<VectorXd, double>> planes;
  for (int i = 0; i < m; ++i) {
    planes.emplace_back(a.row(i).transpose(), b(i) + lambda);
    planes.emplace_back(a.row(i).transpose(), b(i) - lambda);
  }
  for (int k = 0; k < n; ++k) planes.emplace_back(VectorXd::Unit(n, k), 0.0);
  const int total = static_cast<int>(planes.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) pick[k] = k;
  while (true) {
    MatrixXd sys(n, n);
    VectorXd rhs(n);
    for (int k = 0; k < n; ++k) {
      sys.row(k) = planes[pick[k]].first.transpose();
      rhs(k) = planes[pick[k]].second;
    }
    Eigen::FullPivLU<MatrixXd> lu(sys);
    if (lu.rank() == n) {
      VectorXd x = lu.solve(rhs);
      if (((a * x - b).cwiseAbs().array() <= lambda + 1e-9).all()) best = std::min(best, x.lpNorm<1>());
    }
    int t = n - 1;
    while (t >= 0 && pick[t] == total - n + t) --t;
    if (t < 0) break;
    ++pick[t];
    for (int u = t + 1; u < n; ++u) pick[u] = pick[u - 1] + 1;
  }
  return best;
}

MatrixXd random_matrix(int m, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a;
}

TEST(SolveL1Box, MatchesVertexEnumeration) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.0, 1.5);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 3;
    const int n = 1 + trial % 3;
    MatrixXd a = random_matrix(m, n, rng);
    VectorXd b = random_matrix(m, 1, rng);
    const double lambda = lam(rng);
    const double want = brute_force_l1(a, b, lambda);
    Result r = solve_l1_box(a, b, lambda);
    if (std::isinf(want)) {
      EXPECT_EQ(r.status, Status::infeasible) << "trial " << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(r.status, Status::optimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, want, 1e-7) << "trial " << trial;
    EXPECT_LE(r.residual, lambda + 1e-8);
  }
  EXPECT_GT(feasible, 100);
}

TEST(SolveL1Box, DualCertificateClosesTheGap) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 16;
    MatrixXd a = random_matrix(n, n, rng);
    VectorXd b = random_matrix(n, 1, rng);
    const double lambda = 0.1 * (trial % 5);
    Result r = solve_l1_box(a, b, lambda);
    ASSERT_EQ(r.status, Status::optimal);
    const double dual = b.dot(r.y) - lambda * r.y.lpNorm<1>();
    EXPECT_LE((a.transpose() * r.y).cwiseAbs().maxCoeff(), 1.0 + 1e-8);
    EXPECT_NEAR(dual, r.objective, 1e-7 * std::max(1.0, r.objective));
    EXPECT_NEAR(r.dual_objective, dual, 1e-9 * std::max(1.0, std::abs(dual)));
    EXPECT_LE(r.residual, lambda + 1e-8);
  }
}

TEST(SolveL1Box, ZeroRadiusSolvesTheSystem) {
  std::mt19937_64 rng(2);
  MatrixXd a = random_matrix(6, 6, rng);
  VectorXd b = random_matrix(6, 1, rng);
  Result r = solve_l1_box(a, b, 0.0);
  ASSERT_EQ(r.status, Status::optimal);
  EXPECT_LT((r.x - a.partialPivLu().solve(b)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveL1Box, InconsistentSystemIsInfeasible) {
  MatrixXd a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;
  VectorXd b(2);
  b << 1.0, 2.0;
  EXPECT_EQ(solve_l1_box(a, b, 0.0).status, Status::infeasible);
  EXPECT_EQ(solve_l1_box(a, b, 0.4).status, Status::infeasible);
  Result ok = solve_l1_box(a, b, 0.5);
  ASSERT_EQ(ok.status, Status::optimal);
  EXPECT_NEAR(ok.objective, 1.5, 1e-12);
}

TEST(SolveL1Box, LargeRadiusGivesZero) {
  std::mt19937_64 rng(3);
  MatrixXd a = random_matrix(5, 5, rng);
  VectorXd b = random_matrix(5, 1, rng);
  Result r = solve_l1_box(a, b, b.cwiseAbs().maxCoeff());
  ASSERT_EQ(r.status, Status::optimal);
  EXPECT_EQ(r.x, VectorXd::Zero(5));
}

TEST(SolveL1Box, ObjectiveNonIncreasingInRadius) {
  std::mt19937_64 rng(4);
  MatrixXd a = random_matrix(9, 9, rng);
  VectorXd b = random_matrix(9, 1, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda = 0.0; lambda <= 2.0; lambda += 0.1) {
    Result r = solve_l1_box(a, b, lambda);
    ASSERT_EQ(r.status, Status::optimal);
    EXPECT_LE(r.objective, prev + 1e-10);
    prev = r.objective;
  }
}

TEST(SolveL1Box, IterationCapIsReported) {
  std::mt19937_64 rng(6);
  MatrixXd a = random_matrix(12, 12, rng);
  VectorXd b = random_matrix(12, 1, rng);
  Options opt;
  opt.max_iter = 1;
  EXPECT_EQ(solve_l1_box(a, b, 0.0, opt).status, Status::iteration_limit);
}

}  // namespace
}  // namespace ddag::lp
