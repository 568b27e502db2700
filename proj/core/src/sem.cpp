#include "ddag/sem.hpp"

#include "ddag/errors.hpp"
#include "ddag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <string>

namespace ddag {

namespace {

Labels default_labels(int p) {
  Labels out(static_cast<std::size_t>(p));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

int find_label(const Labels& labels, Label label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw LookupError("unknown vertex label " + std::to_string(label));
  return static_cast<int>(it - labels.begin());
}

// Kahn's algorithm with a min-heap; empty result when B has a cycle.
std::vector<int> lexicographic_topological_order(const Matrix& b) {
  const int p = static_cast<int>(b.rows());
  std::vector<int> indegree(static_cast<std::size_t>(p), 0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (b(i, j) != 0.0) ++indegree[i];

  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < p; ++i)
    if (indegree[i] == 0) ready.push(i);

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(p));
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c = 0; c < p; ++c) {
      if (b(c, v) != 0.0 && --indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(order.size()) != p) order.clear();
  return order;
}

void symmetrize(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
}

}  // namespace

Sem::Sem(Matrix b, Vector noise_vars, Labels labels)
    : b_(std::move(b)), noise_vars_(std::move(noise_vars)), labels_(std::move(labels)) {
  const int p = static_cast<int>(b_.rows());
  if (b_.cols() != p) throw InvariantError("B must be square");
  if (noise_vars_.size() != p) throw InvariantError("noise_vars length must equal p");
  if (labels_.empty()) labels_ = default_labels(p);
  if (static_cast<int>(labels_.size()) != p) throw InvariantError("labels length must equal p");
  {
    Labels sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvariantError("duplicate vertex labels");
  }
  for (int i = 0; i < p; ++i) {
    if (b_(i, i) != 0.0) throw InvariantError("B has a nonzero diagonal entry");
    double s = noise_vars_(i);
    if (!(s > 0.0) || !std::isfinite(s)) throw InvariantError("noise variances must be positive and finite");
  }
  if (!b_.allFinite()) throw InvariantError("B has non-finite entries");
  order_ = lexicographic_topological_order(b_);
  if (p > 0 && order_.empty()) throw InvariantError("supp(B) contains a directed cycle");
}

int Sem::index_of(Label label) const { return find_label(labels_, label); }

DagEdgeSet Sem::support() const {
  DagEdgeSet out(std::set<Label>(labels_.begin(), labels_.end()));
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (b_(i, j) != 0.0) out.insert({labels_[i], labels_[j]});
  return out;
}

DagEdgeSet difference_support(const Sem& first, const Sem& second, double tol) {
  if (first.labels() != second.labels()) throw VertexMismatchError("SEMs have different labels");
  const Labels& labels = first.labels();
  DagEdgeSet out(std::set<Label>(labels.begin(), labels.end()));
  for (int i = 0; i < first.size(); ++i)
    for (int j = 0; j < first.size(); ++j)
      if (std::abs(first.b()(i, j) - second.b()(i, j)) > tol) out.insert({labels[i], labels[j]});
  return out;
}

Matrix covariance(const Sem& sem) {
  const int p = sem.size();
  Matrix m = Matrix::Identity(p, p) - sem.b();
  Eigen::PartialPivLU<Matrix> lu(m);
  Matrix inv = lu.solve(Matrix::Identity(p, p));
  if (!inv.allFinite()) throw InvariantError("I - B could not be inverted");
  Matrix sigma = inv * sem.noise_vars().asDiagonal() * inv.transpose();
  symmetrize(sigma);
  return sigma;
}

Matrix precision(const Sem& sem) {
  const int p = sem.size();
  Matrix m = Matrix::Identity(p, p) - sem.b();
  Matrix omega = m.transpose() * sem.noise_vars().cwiseInverse().asDiagonal() * m;
  symmetrize(omega);
  return omega;
}

Matrix sample(const Sem& sem, int n, Rng& rng) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  const int p = sem.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, p);
  Vector sd = sem.noise_vars().cwiseSqrt();
  for (int r = 0; r < n; ++r)
    for (int i = 0; i < p; ++i) x(r, i) = sd(i) * normal(rng);
  // Parents precede children in the order, so each column sees finished parents.
  for (int v : sem.topological_order()) {
    for (int j = 0; j < p; ++j) {
      double w = sem.b()(v, j);
      if (w != 0.0) x.col(v) += w * x.col(j);
    }
  }
  return x;
}

Matrix sample(const Sem& sem, int n, std::uint64_t seed) {
  Rng rng(seed);
  return sample(sem, n, rng);
}

Matrix empirical_covariance(const Matrix& data) {
  if (data.rows() < 1) throw DomainError("empirical covariance needs at least one row");
  Matrix s = (data.transpose() * data) / static_cast<double>(data.rows());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) s(j, i) = s(i, j);
  return s;
}

CovariancePair CovariancePair::population(const Sem& first, const Sem& second) {
  if (first.labels() != second.labels()) throw VertexMismatchError("SEMs have different labels");
  CovariancePair out{covariance(first), covariance(second), 0, 0, first.labels()};
  return out;
}

CovariancePair CovariancePair::empirical(const Matrix& data1, const Matrix& data2, Labels labels) {
  if (data1.cols() != data2.cols()) throw VertexMismatchError("data sets have different widths");
  if (labels.empty()) labels = default_labels(static_cast<int>(data1.cols()));
  CovariancePair out{empirical_covariance(data1), empirical_covariance(data2), data1.rows(),
                     data2.rows(), std::move(labels)};
  out.validate();
  return out;
}

int CovariancePair::index_of(Label label) const { return find_label(labels, label); }

CovariancePair CovariancePair::restrict_to(const Labels& subset) const {
  std::vector<int> idx;
  idx.reserve(subset.size());
  for (Label l : subset) idx.push_back(index_of(l));
  const auto k = static_cast<Eigen::Index>(idx.size());
  CovariancePair out{Matrix(k, k), Matrix(k, k), n1, n2, subset};
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      out.sigma1(a, b) = sigma1(idx[a], idx[b]);
      out.sigma2(a, b) = sigma2(idx[a], idx[b]);
    }
  return out;
}

void CovariancePair::validate() const {
  const auto p = sigma1.rows();
  if (sigma1.cols() != p || sigma2.rows() != p || sigma2.cols() != p)
    throw InvariantError("covariance matrices must be square and of equal size");
  if (static_cast<Eigen::Index>(labels.size()) != p)
    throw InvariantError("label count does not match covariance dimension");
  for (const Matrix* m : {&sigma1, &sigma2}) {
    if (!m->allFinite()) throw InvariantError("covariance has non-finite entries");
    double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw InvariantError("covariance matrix is not symmetric");
  }
}

double SemPairGenConfig::neighbors() const {
  return expected_neighbors.value_or(std::sqrt(static_cast<double>(p)));
}

double SemPairGenConfig::change_prob() const {
  return edge_change_prob.value_or(0.5 / static_cast<double>(p));
}

void SemPairGenConfig::validate() const {
  if (p < 2) throw ConfigError("generator needs p >= 2");
  double q = change_prob();
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("edge_change_prob must lie in (0, 1)");
  if (!(neighbors() >= 0.0)) throw ConfigError("expected_neighbors must be nonnegative");
  if (!(weight_low > 0.0 && weight_high >= weight_low))
    throw ConfigError("weight range must satisfy 0 < low <= high");
  if (!(noise_low > 0.0 && noise_high >= noise_low))
    throw ConfigError("noise range must satisfy 0 < low <= high");
  if (!(min_delta_omega >= 0.0)) throw ConfigError("min_delta_omega must be nonnegative");
  if (max_retries < 1) throw ConfigError("max_retries must be positive");
}

SemPair generate_sem_pair(const SemPairGenConfig& cfg) {
  cfg.validate();
  const int p = cfg.p;
  const double edge_prob = std::min(1.0, cfg.neighbors() / static_cast<double>(p - 1));
  const double change = cfg.change_prob();
  constexpr double kZeroTol = 1e-9;

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> magnitude(cfg.weight_low, cfg.weight_high);
  std::uniform_real_distribution<double> noise(cfg.noise_low, cfg.noise_high);
  std::bernoulli_distribution coin(0.5);
  auto weight = [&] { return coin(rng) ? magnitude(rng) : -magnitude(rng); };

  for (int attempt = 1; attempt <= cfg.max_retries; ++attempt) {
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    Vector noise_vars(p);
    for (int i = 0; i < p; ++i) noise_vars(i) = noise(rng);

    // perm[a] precedes perm[b] for a < b; slot (perm[b] <- perm[a]).
    Matrix b1 = Matrix::Zero(p, p);
    for (int a = 0; a < p; ++a)
      for (int c = a + 1; c < p; ++c)
        if (unit(rng) < edge_prob) b1(perm[c], perm[a]) = weight();

    Matrix b2 = b1;
    for (int a = 0; a < p; ++a)
      for (int c = a + 1; c < p; ++c) {
        double& slot = b2(perm[c], perm[a]);
        if (unit(rng) < change) slot = (slot != 0.0) ? 0.0 : weight();
      }

    Sem first(b1, noise_vars);
    Sem second(b2, noise_vars);

    Matrix delta = precision(first) - precision(second);
    bool separated = true;
    for (Eigen::Index i = 0; i < delta.size() && separated; ++i) {
      double v = std::abs(delta.data()[i]);
      if (v > kZeroTol && v < cfg.min_delta_omega) separated = false;
    }
    if (!separated) continue;
    if (!check_assumptions(first, second, cfg.min_delta_omega / 2.0).passed) continue;

    DagEdgeSet diff = difference_support(first, second);
    return SemPair{std::move(first), std::move(second), std::move(diff), attempt};
  }
  throw GenerationExhaustedError("no SEM pair satisfied the separation constraints after " +
                                     std::to_string(cfg.max_retries) + " attempts",
                                 cfg.max_retries);
}

}  // namespace ddag
