#pragma once

#include "ddag/sem.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ddag::testing {

inline Sem chain2(double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = b;
  return Sem(m, Vector::Ones(2));
}

// Random DAG over p vertices under a shuffled order, weights +-U[0.3, 1],
// variances U[0.5, 1.5]. Independent of the library's pair generator.
inline Sem random_sem(int p, std::uint64_t seed, double edge_prob = 0.4) {
  std::mt19937_64 rng(seed);
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix b = Matrix::Zero(p, p);
  for (int a = 0; a < p; ++a)
    for (int c = a + 1; c < p; ++c)
      if (unit(rng) < edge_prob) {
        const double w = 0.3 + 0.7 * unit(rng);
        b(order[c], order[a]) = unit(rng) < 0.5 ? -w : w;
      }
  Vector d(p);
  for (int i = 0; i < p; ++i) d(i) = 0.5 + unit(rng);
  return Sem(b, d);
}

// Same order and variances as `base`, with a few edge weights redrawn,
// deleted or added.
inline Sem perturb(const Sem& base, std::uint64_t seed, int changes = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& order = base.topological_order();
  const int p = base.size();
  Matrix b = base.b();
  for (int k = 0; k < changes; ++k) {
    int a = static_cast<int>(unit(rng) * p) % p;
    int c = static_cast<int>(unit(rng) * p) % p;
    if (a == c) continue;
    if (a > c) std::swap(a, c);
    const int child = order[c], parent = order[a];
    if (b(child, parent) != 0.0 && unit(rng) < 0.5) b(child, parent) = 0.0;
    else b(child, parent) = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.3 + 0.7 * unit(rng));
  }
  return Sem(b, base.noise_vars(), base.labels());
}

inline Matrix inverse_restricted(const Matrix& m, const std::vector<int>& idx) {
  Matrix r(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t c = 0; c < idx.size(); ++c) r(a, c) = m(idx[a], idx[c]);
  return r.inverse();
}

}  // namespace ddag::testing
