#include "ddag/experiments.hpp"

#include "ddag/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <ostream>
#include <thread>

namespace ddag {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::set<Label> iota_labels(int p) {
  std::set<Label> out;
  for (int i = 0; i < p; ++i) out.insert(i);
  return out;
}

// Published precision/recall/F "mean (sd)" of the comparison method at n = 1000.
struct PublishedRow {
  int p;
  const char* precision;
  const char* recall;
  const char* f_score;
};
constexpr PublishedRow kPublishedDci[] = {
    {5, "0.65 (0.13)", "0.70 (0.13)", "0.65 (0.12)"},
    {10, "0.35 (0.07)", "0.52 (0.11)", "0.41 (0.08)"},
    {15, "0.78 (0.06)", "0.95 (0.04)", "0.84 (0.05)"},
};

}  // namespace

SweepConfig::SweepConfig() {
  pipeline.estimator = EstimatorKind::dantzig;
  pipeline.est.lambda_auto = true;
  pipeline.est.epsilon = 0.125;
}

void SweepConfig::validate() const {
  if (p_values.empty()) throw ConfigError("p_values must be nonempty");
  for (int p : p_values)
    if (p < 2) throw ConfigError("every p must be at least 2");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (!fixed_n) {
    if (c_values.empty()) throw ConfigError("c_values must be nonempty without fixed_n");
    for (int c : c_values)
      if (c < 1) throw ConfigError("every C must be positive");
  } else if (*fixed_n < 2) {
    throw ConfigError("fixed_n must be at least 2");
  }
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  gen.validate();
  pipeline.validate();
}

long sample_budget(int p, int c, int d_prime) {
  if (p < 1 || c < 1 || d_prime < 0) throw DomainError("sample_budget needs p, c >= 1 and d' >= 0");
  const double raw = std::floor(static_cast<double>(c) * d_prime * d_prime * std::log(p));
  return std::max(static_cast<long>(p) + 1, static_cast<long>(raw));
}

Score score(const DagEdgeSet& truth, const DagEdgeSet& estimated) {
  Score s;
  s.hamming = hamming_distance(truth, estimated);
  std::size_t common = 0;
  for (const Edge& e : estimated.edges()) common += truth.contains(e) ? 1 : 0;
  if (estimated.empty()) s.precision = truth.empty() ? 1.0 : 0.0;
  else s.precision = static_cast<double>(common) / static_cast<double>(estimated.size());
  s.recall = truth.empty() ? 1.0 : static_cast<double>(common) / static_cast<double>(truth.size());
  const double denom = s.precision + s.recall;
  s.f_score = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

double normalized_hamming(const DagEdgeSet& truth, const DagEdgeSet& estimated) {
  const double denom = std::max<double>(1.0, static_cast<double>(truth.size() + estimated.size()));
  return static_cast<double>(hamming_distance(truth, estimated)) / denom;
}

std::uint64_t pair_seed(std::uint64_t seed_base, int p, int rep) {
  std::uint64_t h = splitmix64(seed_base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(p));
  return splitmix64(h ^ (static_cast<std::uint64_t>(rep) << 20));
}

std::uint64_t sample_seed(std::uint64_t pair, int c_or_n) {
  return splitmix64(pair ^ (0x5eedULL + static_cast<std::uint64_t>(c_or_n)));
}

ExperimentRecord run_trial(const SweepConfig& cfg, int p, int c_or_n, int rep) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  ExperimentRecord r;
  r.p = p;
  r.c_or_n = c_or_n;
  r.repetition = rep;
  r.seed = pair_seed(cfg.seed_base, p, rep);
  r.true_edges = DagEdgeSet(iota_labels(p));
  r.estimated_edges = r.true_edges;

  try {
    SemPairGenConfig gen = cfg.gen;
    gen.p = p;
    gen.seed = r.seed;
    const SemPair pair = generate_sem_pair(gen);
    r.true_edges = pair.difference;
    r.estimated_edges = DagEdgeSet(pair.difference.vertices());
    r.d_prime = static_cast<int>(pair.difference.max_degree());

    CovariancePair cov;
    if (cfg.pipeline.estimator == EstimatorKind::population) {
      cov = CovariancePair::population(pair.first, pair.second);
    } else {
      r.n = cfg.fixed_n ? *cfg.fixed_n : sample_budget(p, c_or_n, r.d_prime);
      Rng rng(sample_seed(r.seed, c_or_n));
      const Matrix x1 = sample(pair.first, static_cast<int>(r.n), rng);
      const Matrix x2 = sample(pair.second, static_cast<int>(r.n), rng);
      cov = CovariancePair::empirical(x1, x2, pair.first.labels());
    }
    r.estimated_edges = run_pipeline(cov, cfg.pipeline).delta;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
  }

  const Score s = score(r.true_edges, r.estimated_edges);
  r.hamming = s.hamming;
  r.precision = s.precision;
  r.recall = s.recall;
  r.f_score = s.f_score;
  r.norm_hamming = normalized_hamming(r.true_edges, r.estimated_edges);
  if (cfg.record_timing)
    r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start).count();
  return r;
}

std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Task {
    int p, c, rep;
  };
  std::vector<Task> tasks;
  std::vector<int> columns = cfg.fixed_n ? std::vector<int>{*cfg.fixed_n} : cfg.c_values;
  std::vector<int> ps = cfg.p_values;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  for (int p : ps)
    for (int c : columns)
      for (int rep = 0; rep < cfg.repetitions; ++rep) tasks.push_back({p, c, rep});

  std::vector<ExperimentRecord> records(tasks.size());
  unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        records[k] = run_trial(cfg, tasks[k].p, tasks[k].c, tasks[k].rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

Stat describe(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

std::vector<SummaryCell> aggregate(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw DomainError("aggregate needs at least one record");
  std::map<std::pair<int, int>, std::vector<const ExperimentRecord*>> groups;
  for (const ExperimentRecord& r : records) groups[{r.p, r.c_or_n}].push_back(&r);

  std::vector<SummaryCell> cells;
  for (const auto& [key, group] : groups) {
    SummaryCell cell;
    cell.p = key.first;
    cell.c_or_n = key.second;
    cell.trials = static_cast<int>(group.size());
    std::vector<double> h, nh, pr, rc, f;
    for (const ExperimentRecord* r : group) {
      cell.failures += r->failed ? 1 : 0;
      h.push_back(static_cast<double>(r->hamming));
      nh.push_back(r->norm_hamming);
      pr.push_back(r->precision);
      rc.push_back(r->recall);
      f.push_back(r->f_score);
    }
    cell.hamming = describe(h);
    cell.norm_hamming = describe(nh);
    cell.precision = describe(pr);
    cell.recall = describe(rc);
    cell.f_score = describe(f);
    cells.push_back(cell);
  }
  return cells;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "p,c,n,rep,seed,d_prime,hamming,norm_hamming,precision,recall,f_score,failed,runtime_ms\n";
  for (const ExperimentRecord& r : records) {
    out << r.p << ',' << r.c_or_n << ',' << r.n << ',' << r.repetition << ',' << r.seed << ','
        << r.d_prime << ',' << r.hamming << ',' << fmt(r.norm_hamming) << ',' << fmt(r.precision)
        << ',' << fmt(r.recall) << ',' << fmt(r.f_score) << ',' << (r.failed ? 1 : 0) << ','
        << r.runtime_ms << '\n';
  }
}

void write_summary_json(std::ostream& out, const std::vector<SummaryCell>& cells) {
  auto stat = [](const Stat& s) {
    return nlohmann::ordered_json{{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}};
  };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SummaryCell& c : cells) {
    arr.push_back({{"p", c.p},
                   {"c_or_n", c.c_or_n},
                   {"trials", c.trials},
                   {"failures", c.failures},
                   {"hamming", stat(c.hamming)},
                   {"norm_hamming", stat(c.norm_hamming)},
                   {"precision", stat(c.precision)},
                   {"recall", stat(c.recall)},
                   {"f_score", stat(c.f_score)}});
  }
  out << nlohmann::ordered_json{{"cells", arr}}.dump(2) << '\n';
}

void write_plot_tsv(std::ostream& out, const std::vector<SummaryCell>& cells) {
  std::set<int> ps, xs;
  std::map<std::pair<int, int>, double> y;
  for (const SummaryCell& c : cells) {
    ps.insert(c.p);
    xs.insert(c.c_or_n);
    y[{c.c_or_n, c.p}] = c.norm_hamming.mean;
  }
  out << "x";
  for (int p : ps) out << "\tp=" << p;
  out << '\n';
  for (int x : xs) {
    out << x;
    for (int p : ps) {
      auto it = y.find({x, p});
      out << '\t' << (it == y.end() ? std::string("nan") : fmt(it->second));
    }
    out << '\n';
  }
}

void write_table(std::ostream& out, const std::vector<SummaryCell>& cells) {
  auto ms = [](const Stat& s) { return fmt(s.mean, "%.2f") + " (" + fmt(s.sd, "%.2f") + ")"; };
  out << "p\tn_or_C\tprecision\trecall\tf_score\tfailures\n";
  for (const SummaryCell& c : cells) {
    out << c.p << '\t' << c.c_or_n << '\t' << ms(c.precision) << '\t' << ms(c.recall) << '\t'
        << ms(c.f_score) << '\t' << c.failures << "/" << c.trials << '\n';
  }
  out << "\n# DCI at n=1000: published reference values, not reproduced here\n";
  out << "p\tprecision\trecall\tf_score\n";
  for (const PublishedRow& row : kPublishedDci)
    out << row.p << '\t' << row.precision << '\t' << row.recall << '\t' << row.f_score << '\n';
}

}  // namespace ddag
