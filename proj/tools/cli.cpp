#include "cli.hpp"

#include "ddag/delta_precision.hpp"
#include "ddag/diff_dag.hpp"
#include "ddag/errors.hpp"
#include "ddag/experiments.hpp"
#include "ddag/io.hpp"
#include "ddag/oracle.hpp"
#include "ddag/sem.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace ddag::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

// Options shared by the estimation subcommands. Unset optionals keep the
// library defaults.
struct EstimatorFlags {
  std::optional<double> epsilon;
  std::optional<double> lambda;
  bool lambda_auto = false;
  std::optional<double> lambda_scale;
  bool population = false;
};

struct Inputs {
  std::string sem1, sem2, data1, data2;
  std::optional<int> n;
  std::uint64_t seed = 0;
};

void add_estimator_flags(CLI::App* cmd, EstimatorFlags& f) {
  cmd->add_option("--epsilon", f.epsilon, "Hard threshold applied to the estimate")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "Constraint radius of the l1 program")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--lambda-auto", f.lambda_auto, "Set the radius from the sample sizes");
  cmd->add_option("--lambda-scale", f.lambda_scale, "Constant of the automatic radius")->check(CLI::PositiveNumber);
  cmd->add_flag("--population", f.population, "Use exact covariances of --sem1/--sem2");
}

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--sem1", in.sem1, "First SEM (JSON)");
  cmd->add_option("--sem2", in.sem2, "Second SEM (JSON)");
  cmd->add_option("--data1", in.data1, "Samples from the first model (CSV, no header)");
  cmd->add_option("--data2", in.data2, "Samples from the second model (CSV, no header)");
  cmd->add_option("--n", in.n, "Draw this many samples per SEM")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", in.seed, "Seed for sampling");
}

PipelineConfig pipeline_from(const EstimatorFlags& f, PipelineConfig cfg = {}) {
  if (f.population) cfg.estimator = EstimatorKind::population;
  if (f.epsilon) cfg.est.epsilon = *f.epsilon;
  if (f.lambda) cfg.est.lambda_n = *f.lambda;
  if (f.lambda_auto) cfg.est.lambda_auto = true;
  if (f.lambda_scale) cfg.est.lambda_scale = *f.lambda_scale;
  return cfg;
}

struct LoadedInput {
  CovariancePair cov;
  std::optional<Sem> first, second;
};

LoadedInput load_covariances(const Inputs& in, bool population) {
  const bool have_sems = !in.sem1.empty() || !in.sem2.empty();
  const bool have_data = !in.data1.empty() || !in.data2.empty();
  if (have_sems == have_data)
    throw ConfigError("give either --sem1/--sem2 or --data1/--data2");
  LoadedInput out;
  if (have_data) {
    if (in.data1.empty() || in.data2.empty()) throw ConfigError("--data1 and --data2 go together");
    if (population) throw ConfigError("--population needs --sem1/--sem2");
    out.cov = CovariancePair::empirical(io::read_matrix_csv_file(in.data1), io::read_matrix_csv_file(in.data2));
    return out;
  }
  if (in.sem1.empty() || in.sem2.empty()) throw ConfigError("--sem1 and --sem2 go together");
  out.first = io::sem_from_json(io::read_json_file(in.sem1));
  out.second = io::sem_from_json(io::read_json_file(in.sem2));
  if (population) {
    out.cov = CovariancePair::population(*out.first, *out.second);
  } else {
    if (!in.n) throw ConfigError("sampling from SEMs needs --n (or pass --population)");
    Rng rng(in.seed);
    const Matrix x1 = sample(*out.first, *in.n, rng);
    const Matrix x2 = sample(*out.second, *in.n, rng);
    out.cov = CovariancePair::empirical(x1, x2, out.first->labels());
  }
  return out;
}

// Sets a dotted key ("pipeline.epsilon") in a JSON object. The value is
// parsed as JSON when possible and kept as a string otherwise.
void apply_override(Json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  Json* node = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (!node->contains(parts[k])) (*node)[parts[k]] = Json::object();
    node = &(*node)[parts[k]];
  }
  (*node)[parts.back()] = value;
}

Json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  Json j = path.empty() ? Json::object() : io::read_json_file(path);
  for (const std::string& o : overrides) apply_override(j, o);
  return j;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir + ": " + ec.message());
}

std::string in_dir(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Difference-DAG estimation between two linear SEMs", "ddag"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string output_dir;
  std::string config_path;
  std::vector<std::string> overrides;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--output-dir", output_dir, "Directory for written artifacts");
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--set", overrides, "Configuration override key=value (dotted keys for nesting)");
  };

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Draw a random SEM pair");
  common(gen_cmd);
  std::optional<int> gen_p;
  std::optional<std::uint64_t> gen_seed;
  std::optional<int> gen_n;
  gen_cmd->add_option("--p", gen_p, "Number of vertices")->check(CLI::Range(2, 10000));
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--n", gen_n, "Also write this many samples per model")->check(CLI::PositiveNumber);

  // estimate-delta
  auto* est_cmd = app.add_subcommand("estimate-delta", "Estimate the difference of precision matrices");
  common(est_cmd);
  EstimatorFlags est_flags;
  Inputs est_in;
  add_estimator_flags(est_cmd, est_flags);
  add_inputs(est_cmd, est_in);

  // run-pipeline
  auto* pipe_cmd = app.add_subcommand("run-pipeline", "Recover the difference DAG");
  common(pipe_cmd);
  EstimatorFlags pipe_flags;
  Inputs pipe_in;
  bool strict = false;
  bool trace = false;
  add_estimator_flags(pipe_cmd, pipe_flags);
  add_inputs(pipe_cmd, pipe_in);
  pipe_cmd->add_flag("--strict", strict, "Fail when the SEM pair violates the recovery assumptions");
  pipe_cmd->add_flag("--trace", trace, "Include every intermediate estimate in the output");

  // check-assumptions
  auto* chk_cmd = app.add_subcommand("check-assumptions", "Check the recovery assumptions on an SEM pair");
  common(chk_cmd);
  std::string chk_sem1, chk_sem2;
  double chk_eps = 0.125;
  bool chk_strict = false;
  bool chk_uncapped = false;
  chk_cmd->add_option("--sem1", chk_sem1, "First SEM (JSON)")->required();
  chk_cmd->add_option("--sem2", chk_sem2, "Second SEM (JSON)")->required();
  chk_cmd->add_option("--epsilon", chk_eps, "Separation threshold")->check(CLI::PositiveNumber);
  chk_cmd->add_flag("--strict", chk_strict, "Exit 1 when a condition fails");
  chk_cmd->add_flag("--all-prefixes", chk_uncapped, "Do not cap the size of the checked vertex sets");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the synthetic benchmark sweep");
  common(sweep_cmd);
  EstimatorFlags sweep_flags;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<int> sweep_reps, sweep_threads, sweep_fixed_n;
  std::vector<int> sweep_ps, sweep_cs;
  bool timing = false;
  add_estimator_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--seed", sweep_seed, "Base seed of all trials");
  sweep_cmd->add_option("--repetitions", sweep_reps, "Trials per cell")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--fixed-n", sweep_fixed_n, "Samples per model instead of the C schedule")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--p-values", sweep_ps, "Graph sizes")->delimiter(',');
  sweep_cmd->add_option("--c-values", sweep_cs, "Sample-size constants")->delimiter(',');
  sweep_cmd->add_flag("--timing", timing, "Record wall time per trial (output is then not reproducible)");

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "Minimax sample-size lower bound");
  int bound_p = 0, bound_d = 0;
  bound_cmd->add_option("--p", bound_p, "Number of vertices")->required();
  bound_cmd->add_option("--d", bound_d, "Sparsity")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kUsageError;
  }

  try {
    if (*bound_cmd) {
      out << std::setprecision(std::numeric_limits<double>::max_digits10)
          << minimax_sample_bound(bound_p, bound_d) << "\n";
      return kOk;
    }

    ensure_dir(output_dir);

    if (*gen_cmd) {
      SemPairGenConfig cfg = io::gen_config_from_json(load_config(config_path, overrides));
      if (gen_p) cfg.p = *gen_p;
      if (gen_seed) cfg.seed = *gen_seed;
      cfg.validate();
      const SemPair pair = generate_sem_pair(cfg);
      Json summary{{"config", io::to_json(cfg)},
                   {"attempts", pair.attempts},
                   {"difference", io::to_json(pair.difference)}};
      if (!output_dir.empty()) {
        io::write_text_file(in_dir(output_dir, "sem1.json"), dump(io::to_json(pair.first)));
        io::write_text_file(in_dir(output_dir, "sem2.json"), dump(io::to_json(pair.second)));
        io::write_text_file(in_dir(output_dir, "difference.json"), dump(summary));
        if (gen_n) {
          Rng rng(sample_seed(cfg.seed, *gen_n));
          std::ostringstream d1, d2;
          io::write_matrix_csv(d1, sample(pair.first, *gen_n, rng));
          io::write_matrix_csv(d2, sample(pair.second, *gen_n, rng));
          io::write_text_file(in_dir(output_dir, "data1.csv"), d1.str());
          io::write_text_file(in_dir(output_dir, "data2.csv"), d2.str());
        }
      } else if (gen_n) {
        throw ConfigError("--n needs --output-dir");
      }
      out << dump(summary);
      return kOk;
    }

    if (*est_cmd) {
      PipelineConfig cfg = pipeline_from(
          est_flags, io::pipeline_config_from_json(load_config(config_path, overrides)));
      cfg.validate();
      const LoadedInput input = load_covariances(est_in, cfg.estimator == EstimatorKind::population);
      DeltaPrecision dp = cfg.estimator == EstimatorKind::population
                              ? solve_population(input.cov)
                              : estimate_dantzig(input.cov, cfg.est);
      const Json delta = io::to_json(dp);
      const Json diag = io::to_json(incoherence_diagnostics(input.cov, dp));
      if (!output_dir.empty()) {
        io::write_text_file(in_dir(output_dir, "delta.json"), dump(delta));
        io::write_text_file(in_dir(output_dir, "diagnostics.json"), dump(diag));
      }
      if (!diag["holds"].get<bool>())
        err << "note: the incoherence condition does not hold for this pair\n";
      out << dump(delta);
      return kOk;
    }

    if (*pipe_cmd) {
      PipelineConfig cfg = pipeline_from(
          pipe_flags, io::pipeline_config_from_json(load_config(config_path, overrides)));
      cfg.record_trace = cfg.record_trace || trace;
      cfg.validate();
      const LoadedInput input = load_covariances(pipe_in, cfg.estimator == EstimatorKind::population);
      if (input.first) {
        const AssumptionReport rep = check_assumptions(*input.first, *input.second, cfg.est.epsilon);
        if (!rep.passed) {
          err << (strict ? "error: " : "warning: ") << "assumptions fail: " << rep.violation << "\n";
          if (strict) return kDomainError;
        }
      } else if (strict) {
        err << "warning: --strict has no effect without --sem1/--sem2\n";
      }
      const PipelineResult result = run_pipeline(input.cov, cfg);
      for (const std::string& w : result.warnings) err << "warning: " << w << "\n";
      const Json j = io::to_json(result, cfg.record_trace);
      if (!output_dir.empty()) io::write_text_file(in_dir(output_dir, "pipeline.json"), dump(j));
      out << dump(j);
      return kOk;
    }

    if (*chk_cmd) {
      const Sem first = io::sem_from_json(io::read_json_file(chk_sem1));
      const Sem second = io::sem_from_json(io::read_json_file(chk_sem2));
      AssumptionOptions opts;
      opts.cap_prefix_size = !chk_uncapped;
      const AssumptionReport rep = check_assumptions(first, second, chk_eps, opts);
      const Json j = io::to_json(rep);
      if (!output_dir.empty()) io::write_text_file(in_dir(output_dir, "assumptions.json"), dump(j));
      out << dump(j);
      if (!rep.passed) {
        err << (chk_strict ? "error: " : "warning: ") << rep.violation << "\n";
        if (chk_strict) return kDomainError;
      }
      return kOk;
    }

    if (*sweep_cmd) {
      SweepConfig cfg = io::sweep_config_from_json(load_config(config_path, overrides));
      cfg.pipeline = pipeline_from(sweep_flags, cfg.pipeline);
      if (sweep_seed) cfg.seed_base = *sweep_seed;
      if (sweep_reps) cfg.repetitions = *sweep_reps;
      if (sweep_threads) cfg.threads = *sweep_threads;
      if (sweep_fixed_n) cfg.fixed_n = *sweep_fixed_n;
      if (!sweep_ps.empty()) cfg.p_values = sweep_ps;
      if (!sweep_cs.empty()) cfg.c_values = sweep_cs;
      if (timing) cfg.record_timing = true;
      cfg.validate();
      if (output_dir.empty()) throw ConfigError("sweep needs --output-dir");

      const std::vector<ExperimentRecord> records = run_sweep(cfg);
      const std::vector<SummaryCell> cells = aggregate(records);
      std::ostringstream csv, summary, tsv, table;
      write_records_csv(csv, records);
      write_summary_json(summary, cells);
      write_plot_tsv(tsv, cells);
      write_table(table, cells);
      io::write_text_file(in_dir(output_dir, "config.json"), dump(io::to_json(cfg)));
      io::write_text_file(in_dir(output_dir, "records.csv"), csv.str());
      io::write_text_file(in_dir(output_dir, "summary.json"), summary.str());
      io::write_text_file(in_dir(output_dir, "plot.tsv"), tsv.str());
      io::write_text_file(in_dir(output_dir, "table.txt"), table.str());
      out << table.str();
      return kOk;
    }
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace ddag::cli
