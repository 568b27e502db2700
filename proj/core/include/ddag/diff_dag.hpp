#pragma once

#include "ddag/delta_precision.hpp"
#include "ddag/edge_set.hpp"

#include <map>
#include <string>
#include <vector>

namespace ddag {

// Vertex sets in elimination order: layers.front() holds the terminal
// vertices removed first, layers.back() the last ones left.
struct LayeredOrder {
  std::vector<Labels> layers;

  // Position of the layer holding `v`; LookupError if absent.
  int layer_of(Label v) const;
  Labels vertices() const;
};

struct PipelineConfig {
  EstimatorKind estimator = EstimatorKind::dantzig;
  EstimatorConfig est;
  bool record_trace = false;
  // Largest descendant set whose subsets are searched exhaustively in prune;
  // larger sets get the same budget of 2^max_prune_candidates subsets,
  // smallest first.
  int max_prune_candidates = 12;
  // Zero test used on exact (population) estimates.
  double population_zero_tol = 1e-8;

  void validate() const;
};

struct TraceEntry {
  std::string stage;
  Labels labels;
  Matrix delta;
  std::string note;
};

struct PipelineResult {
  DagEdgeSet delta;
  Labels invariant_vertices;
  LayeredOrder order;
  std::vector<TraceEntry> trace;
  std::vector<std::string> warnings;
};

// Difference of precisions over `subset` with the configured estimator,
// thresholded so that "== 0" is the support test.
DeltaPrecision estimate_thresholded(const CovariancePair& cov, const Labels& subset,
                                    const PipelineConfig& cfg);

// Labels whose row of `dp` is entirely zero.
Labels invariant_vertices(const DeltaPrecision& dp);

// Repeatedly peels off the vertices with a zero diagonal and re-estimates
// over the rest. `initial`, when given, is used for the first round instead
// of a fresh estimate over all of cov's labels. Throws StallError when a
// round finds nothing to peel while two or more vertices remain.
LayeredOrder compute_order(const CovariancePair& cov, const PipelineConfig& cfg,
                           const DeltaPrecision* initial = nullptr,
                           std::vector<TraceEntry>* trace = nullptr);

// Orients every nonzero off-diagonal entry of `dp` from the later-eliminated
// vertex (parent) to the earlier one (child).
DagEdgeSet orient_edges(const DeltaPrecision& dp, const LayeredOrder& order);

struct PruneResult {
  DagEdgeSet delta;
  std::vector<std::string> warnings;
};

// Drops (i, j) when removing some subset of j's descendants (other than i)
// zeroes the (i, j) entry of the re-estimated difference.
PruneResult prune(const DagEdgeSet& delta, const CovariancePair& cov, const LayeredOrder& order,
                  const PipelineConfig& cfg, std::vector<TraceEntry>* trace = nullptr);

PipelineResult run_pipeline(const CovariancePair& cov, const PipelineConfig& cfg);

}  // namespace ddag
