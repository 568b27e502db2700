#pragma once

#include "ddag/diff_dag.hpp"
#include "ddag/sem.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ddag {

struct SweepConfig {
  std::vector<int> p_values{5, 10, 15};
  std::vector<int> c_values{5, 10, 15, 20};
  int repetitions = 30;
  // Overrides the C schedule with a fixed per-model sample count.
  std::optional<int> fixed_n;
  SemPairGenConfig gen;
  PipelineConfig pipeline;
  std::uint64_t seed_base = 0;
  // Worker threads; 0 picks the hardware concurrency.
  int threads = 1;
  // Fill runtime_ms. Off by default so that output files are reproducible.
  bool record_timing = false;

  SweepConfig();
  void validate() const;
};

struct ExperimentRecord {
  int p = 0;
  int c_or_n = 0;       // C value, or the fixed sample count
  long n = 0;           // samples per model; 0 for exact covariances
  int repetition = 0;
  std::uint64_t seed = 0;
  int d_prime = 0;
  DagEdgeSet true_edges;
  DagEdgeSet estimated_edges;
  std::size_t hamming = 0;
  double norm_hamming = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  bool failed = false;
  std::string error;
  long runtime_ms = 0;
};

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::size_t hamming = 0;
};

// floor(c d'^2 ln p), never below p + 1.
long sample_budget(int p, int c, int d_prime);

// Throws VertexMismatchError when the vertex sets differ.
Score score(const DagEdgeSet& truth, const DagEdgeSet& estimated);

// hamming / max(1, |truth| + |estimated|)
double normalized_hamming(const DagEdgeSet& truth, const DagEdgeSet& estimated);

// Per-trial seeds. The pair seed depends only on (seed_base, p, rep), so the
// same SEM pair is reused across the C schedule.
std::uint64_t pair_seed(std::uint64_t seed_base, int p, int rep);
std::uint64_t sample_seed(std::uint64_t pair_seed, int c_or_n);

// One trial; errors from generation or the pipeline are folded into the
// record as a failed, empty estimate.
ExperimentRecord run_trial(const SweepConfig& cfg, int p, int c_or_n, int rep);

// Every (p, c, rep) trial, sorted by (p, c_or_n, rep).
std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg);

struct Stat {
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation, 0 for a single value
  double median = 0.0;
};

Stat describe(const std::vector<double>& values);

struct SummaryCell {
  int p = 0;
  int c_or_n = 0;
  int trials = 0;
  int failures = 0;
  Stat hamming;
  Stat norm_hamming;
  Stat precision;
  Stat recall;
  Stat f_score;
};

// One cell per (p, c_or_n), in sorted order. Throws DomainError on empty input.
std::vector<SummaryCell> aggregate(const std::vector<ExperimentRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_summary_json(std::ostream& out, const std::vector<SummaryCell>& cells);
// x = C (or n), one column per p, cells hold mean normalized Hamming.
void write_plot_tsv(std::ostream& out, const std::vector<SummaryCell>& cells);
// Precision, recall and F-score as "mean (sd)" per p, next to the published
// comparison numbers.
void write_table(std::ostream& out, const std::vector<SummaryCell>& cells);

}  // namespace ddag
