#include "ddag/oracle.hpp"

#include "ddag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <string>

namespace ddag {

namespace {

Matrix submatrix(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m(rows[a], cols[b]);
  return out;
}

Matrix spd_inverse(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw InvalidCovarianceError("matrix is not positive definite");
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

std::string edge_name(Label i, Label j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

Matrix schur_complement(const Matrix& omega, const std::vector<int>& keep) {
  std::vector<int> drop;
  for (int i = 0; i < omega.rows(); ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) drop.push_back(i);
  Matrix ss = submatrix(omega, keep, keep);
  if (drop.empty()) return ss;
  Matrix sc = submatrix(omega, keep, drop);
  Matrix cc = submatrix(omega, drop, drop);
  return ss - sc * cc.ldlt().solve(sc.transpose());
}

MarginalSem marginalize_sem(const Sem& sem, const Labels& removed) {
  const int p = sem.size();
  std::vector<char> is_removed(static_cast<std::size_t>(p), 0);
  for (Label l : removed) is_removed[sem.index_of(l)] = 1;
  std::vector<int> retained;
  for (int i = 0; i < p; ++i)
    if (!is_removed[i]) retained.push_back(i);
  if (retained.empty()) throw DomainError("marginalization must retain at least one vertex");

  const Matrix sigma = covariance(sem);
  const std::vector<int>& order = sem.topological_order();
  std::vector<int> position(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) position[order[k]] = k;

  const auto r = static_cast<Eigen::Index>(retained.size());
  Matrix b_new = Matrix::Zero(r, r);
  Vector noise_new(r);

  for (Eigen::Index a = 0; a < r; ++a) {
    const int j = retained[a];
    const double s2 = sem.noise_vars()(j);
    // Anc_j: vertices weakly preceding j; U_j: the removed ones among them.
    std::vector<int> anc(order.begin(), order.begin() + position[j] + 1);
    std::vector<int> u_local;  // positions inside anc
    for (std::size_t k = 0; k < anc.size(); ++k)
      if (is_removed[anc[k]]) u_local.push_back(static_cast<int>(k));

    if (u_local.empty()) {
      noise_new(a) = s2;
      for (Eigen::Index c = 0; c < r; ++c) b_new(a, c) = sem.b()(j, retained[c]);
      continue;
    }

    const Matrix omega_anc = spd_inverse(submatrix(sigma, anc, anc));
    const Matrix omega_uu = submatrix(omega_anc, u_local, u_local);
    Eigen::RowVectorXd b_ju(u_local.size());
    for (std::size_t k = 0; k < u_local.size(); ++k) b_ju(k) = sem.b()(j, anc[u_local[k]]);

    const Eigen::LDLT<Matrix> uu(omega_uu);
    const Eigen::RowVectorXd weights = uu.solve(b_ju.transpose()).transpose();
    const double quad = weights.dot(b_ju);
    const double s2_new = s2 * s2 / (s2 - quad);
    noise_new(a) = s2_new;

    for (Eigen::Index c = 0; c < r; ++c) {
      const int k = retained[c];
      if (k == j || position[k] > position[j]) continue;
      const int k_local = position[k];  // anc is the order prefix
      Eigen::VectorXd omega_uk(u_local.size());
      for (std::size_t t = 0; t < u_local.size(); ++t) omega_uk(t) = omega_anc(u_local[t], k_local);
      b_new(a, c) = (s2_new / s2) * (sem.b()(j, k) - weights.dot(omega_uk));
    }
  }

  Labels kept_labels;
  for (int i : retained) kept_labels.push_back(sem.labels()[i]);
  return MarginalSem{Sem(std::move(b_new), std::move(noise_new), std::move(kept_labels)), removed};
}

double delta_omega_entry(const Sem& first, const Sem& second, Label i, Label j) {
  const int a = first.index_of(i);
  const int b = first.index_of(j);
  const int p = first.size();
  auto entry = [&](const Sem& s) {
    const Matrix& w = s.b();
    const Vector& var = s.noise_vars();
    double v = 0.0;
    if (a == b) {
      v = 1.0 / var(a);
      for (int l = 0; l < p; ++l) v += w(l, a) * w(l, a) / var(l);
    } else {
      v = -w(a, b) / var(a) - w(b, a) / var(b);
      for (int l = 0; l < p; ++l)
        if (w(l, a) != 0.0 && w(l, b) != 0.0) v += w(l, a) * w(l, b) / var(l);
    }
    return v;
  };
  return entry(first) - entry(second);
}

bool is_terminal_invariant(const Sem& first, const Sem& second, Label i) {
  const int a = first.index_of(i);
  if (first.b().col(a) != second.b().col(a)) return false;
  const Matrix delta = precision(first) - precision(second);
  const double scale = std::max(1.0, delta.cwiseAbs().maxCoeff());
  if (std::abs(delta(a, a)) > 1e-10 * scale)
    throw InvariantError("column-invariant vertex " + std::to_string(i) +
                         " has a nonzero precision-difference diagonal");
  return true;
}

double partial_correlation(const Matrix& sigma, const std::vector<int>& subset, int i, int j) {
  const Matrix omega = spd_inverse(submatrix(sigma, subset, subset));
  auto pos = [&](int v) {
    auto it = std::find(subset.begin(), subset.end(), v);
    if (it == subset.end()) throw LookupError("partial correlation subset misses a vertex");
    return static_cast<Eigen::Index>(it - subset.begin());
  };
  const auto a = pos(i);
  const auto b = pos(j);
  return -omega(a, b) / std::sqrt(omega(a, a) * omega(b, b));
}

AssumptionReport check_assumptions(const Sem& first, const Sem& second, double epsilon,
                                   const AssumptionOptions& options) {
  AssumptionReport report;
  report.min_rho_gap = std::numeric_limits<double>::infinity();
  report.min_diag_gap = std::numeric_limits<double>::infinity();
  auto fail = [&](std::string why) {
    report.passed = false;
    report.violation = std::move(why);
    return report;
  };

  if (first.labels() != second.labels()) return fail("models are over different labels");
  if (first.noise_vars() != second.noise_vars()) return fail("noise variances differ");
  const int p = first.size();
  const Labels& labels = first.labels();

  // Union DAG; a shared topological order exists iff it is acyclic.
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (first.b()(i, j) != 0.0 || second.b()(i, j) != 0.0) parents[i].push_back(j);
  std::vector<int> order;
  {
    std::vector<int> indegree(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) indegree[i] = static_cast<int>(parents[i].size());
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int i = 0; i < p; ++i)
      if (indegree[i] == 0) ready.push(i);
    while (!ready.empty()) {
      int v = ready.top();
      ready.pop();
      order.push_back(v);
      for (int c = 0; c < p; ++c)
        if (std::find(parents[c].begin(), parents[c].end(), v) != parents[c].end() &&
            --indegree[c] == 0)
          ready.push(c);
    }
  }
  if (static_cast<int>(order.size()) != p) return fail("models do not share a topological order");

  const Matrix delta = precision(first) - precision(second);
  std::vector<char> invariant(static_cast<std::size_t>(p), 0);
  int non_invariant = 0;
  for (int i = 0; i < p; ++i) {
    invariant[i] = delta.row(i).cwiseAbs().maxCoeff() <= options.zero_tol;
    if (invariant[i]) report.invariant.push_back(labels[i]);
    else ++non_invariant;
  }

  // (i)
  for (int i = 0; i < p; ++i) {
    if (!invariant[i]) continue;
    if (first.b().row(i) != second.b().row(i) || first.b().col(i) != second.b().col(i))
      return fail("invariant vertex " + std::to_string(labels[i]) + " has a changed edge");
  }
  // Equality over every subset C of common children reduces to equality of
  // each single-child term.
  for (int i = 0; i < p; ++i) {
    if (!invariant[i]) continue;
    for (int j = i + 1; j < p; ++j) {
      if (!invariant[j]) continue;
      for (int l = 0; l < p; ++l) {
        if (first.b()(l, i) == 0.0 || first.b()(l, j) == 0.0) continue;
        double t1 = first.b()(l, i) * first.b()(l, j) / first.noise_vars()(l);
        double t2 = second.b()(l, i) * second.b()(l, j) / second.noise_vars()(l);
        if (std::abs(t1 - t2) > options.zero_tol)
          return fail("common-child term of invariant vertices " + std::to_string(labels[i]) +
                      "," + std::to_string(labels[j]) + " changes");
      }
    }
  }

  // (ii)
  const Matrix sigma1 = covariance(first);
  const Matrix sigma2 = covariance(second);
  const int cap = options.cap_prefix_size ? non_invariant : p;
  const double gap = 2.0 * epsilon;

  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (first.b()(i, j) == second.b()(i, j)) continue;
      // Ancestral closure of {i, j}: the smallest prefix set containing both.
      std::vector<char> in(static_cast<std::size_t>(p), 0);
      std::vector<int> stack{i, j};
      int forced = 0;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (in[v]) continue;
        in[v] = 1;
        ++forced;
        for (int u : parents[v]) stack.push_back(u);
      }
      if (forced > cap) continue;
      const std::vector<char> forced_mask = in;

      std::string violation;
      std::function<void(std::size_t, int)> visit = [&](std::size_t pos, int size) {
        if (!violation.empty() || report.truncated) return;
        if (pos == order.size()) {
          if (++report.sets_checked > options.max_sets) {
            report.truncated = true;
            return;
          }
          std::vector<int> subset;
          for (int v : order)
            if (in[v]) subset.push_back(v);
          std::sort(subset.begin(), subset.end());
          Matrix o1 = spd_inverse(submatrix(sigma1, subset, subset));
          Matrix o2 = spd_inverse(submatrix(sigma2, subset, subset));
          auto at = [&](int v) {
            return static_cast<Eigen::Index>(std::lower_bound(subset.begin(), subset.end(), v) -
                                             subset.begin());
          };
          const auto a = at(i);
          const auto b = at(j);
          double rho1 = -o1(a, b) / std::sqrt(o1(a, a) * o1(b, b));
          double rho2 = -o2(a, b) / std::sqrt(o2(a, a) * o2(b, b));
          double rho_gap = std::abs(rho1 - rho2);
          double diag_gap = std::abs(o1(b, b) - o2(b, b));
          report.min_rho_gap = std::min(report.min_rho_gap, rho_gap);
          report.min_diag_gap = std::min(report.min_diag_gap, diag_gap);
          if (rho_gap < gap || diag_gap < gap) {
            violation = "edge " + edge_name(labels[i], labels[j]) + " separation " +
                        std::to_string(std::min(rho_gap, diag_gap)) + " < 2*epsilon on a " +
                        std::to_string(subset.size()) + "-vertex prefix set";
          }
          return;
        }
        const int v = order[pos];
        if (forced_mask[v]) {
          visit(pos + 1, size);
          return;
        }
        visit(pos + 1, size);
        if (size >= cap) return;
        for (int u : parents[v])
          if (!in[u]) return;
        in[v] = 1;
        visit(pos + 1, size + 1);
        in[v] = 0;
      };
      visit(0, forced);
      if (!violation.empty()) return fail(violation);
    }
  }
  return report;
}

double minimax_sample_bound(int p, int d) {
  if (d < 1 || p < 2 * d) throw DomainError("minimax bound needs p >= 2d >= 2");
  const double pd = static_cast<double>(p);
  const double dd = static_cast<double>(d);
  return (dd / 2.0) * std::log(pd / (2.0 * dd)) - (2.0 / pd) * std::log(2.0);
}

}  // namespace ddag
