#include "ddag/diff_dag.hpp"

#include "ddag/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace ddag {

namespace {

std::string join(const Labels& labels) {
  std::string out;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(labels[k]);
  }
  return out;
}

DeltaPrecision restrict_delta(const DeltaPrecision& dp, const Labels& subset) {
  DeltaPrecision out{Matrix(subset.size(), subset.size()), subset, dp.threshold_applied};
  std::vector<int> idx;
  for (Label l : subset) idx.push_back(dp.index_of(l));
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out.matrix(a, b) = dp.matrix(idx[a], idx[b]);
  return out;
}

// Calls fn on k-subsets of items (k = 0..items.size()), smallest first, at
// most `budget` times; stops as soon as fn returns true.
template <typename Fn>
bool for_each_subset_by_size(const Labels& items, std::uint64_t budget, Fn&& fn) {
  const int n = static_cast<int>(items.size());
  for (int k = 0; k <= n; ++k) {
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) pick[t] = t;
    while (true) {
      Labels subset;
      for (int t : pick) subset.push_back(items[t]);
      if (budget-- == 0) return false;
      if (fn(subset)) return true;
      int t = k - 1;
      while (t >= 0 && pick[t] == n - k + t) --t;
      if (t < 0) break;
      ++pick[t];
      for (int u = t + 1; u < k; ++u) pick[u] = pick[u - 1] + 1;
    }
  }
  return false;
}

}  // namespace

int LayeredOrder::layer_of(Label v) const {
  for (std::size_t a = 0; a < layers.size(); ++a)
    if (std::find(layers[a].begin(), layers[a].end(), v) != layers[a].end())
      return static_cast<int>(a);
  throw LookupError("vertex " + std::to_string(v) + " is not in the layered order");
}

Labels LayeredOrder::vertices() const {
  Labels out;
  for (const Labels& layer : layers) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

void PipelineConfig::validate() const {
  est.validate();
  if (max_prune_candidates < 0) throw ConfigError("max_prune_candidates must be nonnegative");
  if (!(population_zero_tol > 0.0)) throw ConfigError("population_zero_tol must be positive");
}

DeltaPrecision estimate_thresholded(const CovariancePair& cov, const Labels& subset,
                                    const PipelineConfig& cfg) {
  DeltaPrecision dp = estimate_submatrix(cov, subset, cfg.estimator, cfg.est);
  if (cfg.estimator == EstimatorKind::population) return threshold(std::move(dp), cfg.population_zero_tol);
  return dp;
}

Labels invariant_vertices(const DeltaPrecision& dp) {
  Labels out;
  for (int i = 0; i < dp.size(); ++i)
    if ((dp.matrix.row(i).array() == 0.0).all()) out.push_back(dp.labels[i]);
  return out;
}

LayeredOrder compute_order(const CovariancePair& cov, const PipelineConfig& cfg,
                           const DeltaPrecision* initial, std::vector<TraceEntry>* trace) {
  LayeredOrder order;
  Labels remaining = cov.labels;
  DeltaPrecision current =
      initial ? restrict_delta(*initial, remaining) : estimate_thresholded(cov, remaining, cfg);

  while (remaining.size() > 1) {
    Labels peeled;
    Labels rest;
    for (Label v : remaining) {
      if (current.at(v, v) == 0.0) peeled.push_back(v);
      else rest.push_back(v);
    }
    if (trace) trace->push_back({"order", remaining, current.matrix, "peel {" + join(peeled) + "}"});
    if (peeled.empty()) {
      throw StallError("no vertex with a zero diagonal among {" + join(remaining) +
                           "}; the faithfulness assumption or epsilon is off",
                       current.matrix, remaining);
    }
    order.layers.push_back(std::move(peeled));
    remaining = std::move(rest);
    if (remaining.size() > 1) current = estimate_thresholded(cov, remaining, cfg);
  }
  if (remaining.size() == 1) order.layers.push_back(remaining);
  return order;
}

DagEdgeSet orient_edges(const DeltaPrecision& dp, const LayeredOrder& order) {
  DagEdgeSet out(std::set<Label>(dp.labels.begin(), dp.labels.end()));
  for (const Labels& layer : order.layers) {
    for (Label i : layer) {
      for (Label j : dp.labels) {
        if (j == i || dp.at(i, j) == 0.0) continue;
        if (std::find(layer.begin(), layer.end(), j) != layer.end()) continue;
        if (out.contains(j, i)) continue;
        out.insert({i, j});
      }
    }
  }
  return out;
}

PruneResult prune(const DagEdgeSet& delta, const CovariancePair& cov, const LayeredOrder& order,
                  const PipelineConfig& cfg, std::vector<TraceEntry>* trace) {
  PruneResult result{delta, {}};
  std::map<Labels, DeltaPrecision> cache;
  auto estimate_without = [&](const Labels& removed) -> const DeltaPrecision& {
    Labels keep;
    for (Label v : cov.labels)
      if (std::find(removed.begin(), removed.end(), v) == removed.end()) keep.push_back(v);
    auto it = cache.find(keep);
    if (it == cache.end()) it = cache.emplace(keep, estimate_thresholded(cov, keep, cfg)).first;
    return it->second;
  };

  for (const Edge& e : delta.sorted_edges()) {
    const int parent_layer = order.layer_of(e.parent);
    const int child_layer = order.layer_of(e.child);
    // Descendants of the parent: everything eliminated before it. Vertices
    // below the child's layer come first, since common children live there.
    Labels candidates;
    for (int a = 0; a < parent_layer; ++a)
      for (Label v : order.layers[a])
        if (v != e.child && a < child_layer) candidates.push_back(v);
    for (int a = 0; a < parent_layer; ++a)
      for (Label v : order.layers[a])
        if (v != e.child && a >= child_layer) candidates.push_back(v);

    // Past the cap, the smallest subsets are searched within the budget an
    // exhaustive search over `max_prune_candidates` vertices would get.
    const std::uint64_t budget = std::uint64_t{1} << std::min(cfg.max_prune_candidates, 62);
    if (static_cast<int>(candidates.size()) > cfg.max_prune_candidates)
      result.warnings.push_back("partial prune of edge (" + std::to_string(e.child) + "," +
                                std::to_string(e.parent) + "): " +
                                std::to_string(candidates.size()) +
                                " descendant candidates, searching at most " + std::to_string(budget) +
                                " subsets");

    Labels zeroing;
    bool removed = for_each_subset_by_size(candidates, budget, [&](const Labels& subset) {
      const DeltaPrecision& dp = estimate_without(subset);
      if (dp.at(e.child, e.parent) != 0.0) return false;
      zeroing = subset;
      return true;
    });
    if (removed) {
      result.delta.erase(e);
      if (trace) {
        const DeltaPrecision& dp = estimate_without(zeroing);
        trace->push_back({"prune", dp.labels, dp.matrix,
                          "drop (" + std::to_string(e.child) + "," + std::to_string(e.parent) +
                              ") after removing {" + join(zeroing) + "}"});
      }
    }
  }
  return result;
}

PipelineResult run_pipeline(const CovariancePair& cov, const PipelineConfig& cfg) {
  cfg.validate();
  cov.validate();
  PipelineResult result;
  std::vector<TraceEntry>* trace = cfg.record_trace ? &result.trace : nullptr;
  const std::set<Label> all(cov.labels.begin(), cov.labels.end());
  result.delta = DagEdgeSet(all);

  DeltaPrecision full = estimate_thresholded(cov, cov.labels, cfg);
  if (trace) trace->push_back({"estimate", full.labels, full.matrix, "full difference"});
  result.invariant_vertices = invariant_vertices(full);

  Labels active;
  for (Label v : cov.labels)
    if (std::find(result.invariant_vertices.begin(), result.invariant_vertices.end(), v) ==
        result.invariant_vertices.end())
      active.push_back(v);
  if (active.empty()) return result;

  const CovariancePair cov_active = cov.restrict_to(active);
  const DeltaPrecision delta_active = restrict_delta(full, active);
  result.order = compute_order(cov_active, cfg, &delta_active, trace);
  DagEdgeSet oriented = orient_edges(delta_active, result.order);
  if (trace) trace->push_back({"orient", active, delta_active.matrix,
                               std::to_string(oriented.size()) + " oriented edges"});
  PruneResult pruned = prune(oriented, cov_active, result.order, cfg, trace);
  result.warnings = std::move(pruned.warnings);
  for (const Edge& e : pruned.delta.edges()) result.delta.insert(e);
  return result;
}

}  // namespace ddag
