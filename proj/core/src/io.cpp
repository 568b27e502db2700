#include "ddag/io.hpp"

#include "ddag/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace ddag::io {

namespace {

Json matrix_rows(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) throw ConfigError(std::string(what) + " rows must be arrays");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(n, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(std::string(what) + " rows have different lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

template <typename T>
T get_as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("field '" + key + "' has the wrong type");
  }
}

// Applies one handler per key; keys without a handler are an error.
void apply_fields(const Json& j, const char* what,
                  const std::map<std::string, std::function<void(const Json&)>>& handlers) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto h = handlers.find(it.key());
    if (h == handlers.end()) throw ConfigError("unknown " + std::string(what) + " field '" + it.key() + "'");
    h->second(it.value());
  }
}

const char* estimator_name(EstimatorKind k) {
  return k == EstimatorKind::population ? "population" : "dantzig";
}

// JSON has no infinity; unbounded quantities are written as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const Sem& sem) {
  Json noise = Json::array();
  for (Eigen::Index i = 0; i < sem.noise_vars().size(); ++i) noise.push_back(sem.noise_vars()(i));
  return Json{{"p", sem.size()},
              {"labels", sem.labels()},
              {"b", matrix_rows(sem.b())},
              {"noise_vars", noise}};
}

Sem sem_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("SEM must be a JSON object");
  for (const char* key : {"b", "noise_vars"})
    if (!j.contains(key)) throw ConfigError(std::string("SEM is missing '") + key + "'");
  Matrix b = matrix_from_rows(j.at("b"), "b");
  const Json& nv = j.at("noise_vars");
  if (!nv.is_array()) throw ConfigError("noise_vars must be an array");
  Vector noise(static_cast<Eigen::Index>(nv.size()));
  for (std::size_t i = 0; i < nv.size(); ++i) noise(static_cast<Eigen::Index>(i)) = get_as<double>(nv[i], "noise_vars");
  Labels labels;
  if (j.contains("labels")) labels = get_as<Labels>(j.at("labels"), "labels");
  if (j.contains("p") && get_as<long>(j.at("p"), "p") != b.rows())
    throw ConfigError("SEM 'p' does not match the size of b");
  try {
    return Sem(std::move(b), std::move(noise), std::move(labels));
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("invalid SEM: ") + e.what());
  }
}

Json to_json(const DeltaPrecision& dp) {
  return Json{{"labels", dp.labels}, {"matrix", matrix_rows(dp.matrix)}, {"threshold", dp.threshold_applied}};
}

DeltaPrecision delta_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("matrix"))
    throw ConfigError("difference matrix needs 'labels' and 'matrix'");
  DeltaPrecision dp;
  dp.labels = get_as<Labels>(j.at("labels"), "labels");
  dp.matrix = matrix_from_rows(j.at("matrix"), "matrix");
  if (j.contains("threshold")) dp.threshold_applied = get_as<double>(j.at("threshold"), "threshold");
  if (dp.matrix.rows() != dp.matrix.cols() ||
      dp.matrix.rows() != static_cast<Eigen::Index>(dp.labels.size()))
    throw ConfigError("matrix must be square with one row per label");
  return dp;
}

Json to_json(const DagEdgeSet& edges) {
  Json out = Json::array();
  for (const Edge& e : edges.sorted_edges()) out.push_back(Json::array({e.child, e.parent}));
  return out;
}

Json to_json(const PipelineResult& result, bool include_trace) {
  Json layers = Json::array();
  for (const Labels& layer : result.order.layers) layers.push_back(layer);
  Json out{{"invariant", result.invariant_vertices},
           {"layers", layers},
           {"edges", to_json(result.delta)}};
  if (!result.warnings.empty()) out["warnings"] = result.warnings;
  if (include_trace) {
    Json trace = Json::array();
    for (const TraceEntry& t : result.trace)
      trace.push_back({{"stage", t.stage}, {"labels", t.labels}, {"delta", matrix_rows(t.delta)}, {"note", t.note}});
    out["trace"] = trace;
  }
  return out;
}

Json to_json(const SemPairGenConfig& cfg) {
  return Json{{"p", cfg.p},
              {"expected_neighbors", cfg.neighbors()},
              {"edge_change_prob", cfg.change_prob()},
              {"weight_low", cfg.weight_low},
              {"weight_high", cfg.weight_high},
              {"noise_low", cfg.noise_low},
              {"noise_high", cfg.noise_high},
              {"min_delta_omega", cfg.min_delta_omega},
              {"seed", cfg.seed},
              {"max_retries", cfg.max_retries}};
}

SemPairGenConfig gen_config_from_json(const Json& j, SemPairGenConfig c) {
  apply_fields(j, "generator", {
      {"p", [&](const Json& v) { c.p = get_as<int>(v, "p"); }},
      {"expected_neighbors", [&](const Json& v) {
         if (v.is_null()) c.expected_neighbors.reset();
         else c.expected_neighbors = get_as<double>(v, "expected_neighbors");
       }},
      {"edge_change_prob", [&](const Json& v) {
         if (v.is_null()) c.edge_change_prob.reset();
         else c.edge_change_prob = get_as<double>(v, "edge_change_prob");
       }},
      {"weight_low", [&](const Json& v) { c.weight_low = get_as<double>(v, "weight_low"); }},
      {"weight_high", [&](const Json& v) { c.weight_high = get_as<double>(v, "weight_high"); }},
      {"noise_low", [&](const Json& v) { c.noise_low = get_as<double>(v, "noise_low"); }},
      {"noise_high", [&](const Json& v) { c.noise_high = get_as<double>(v, "noise_high"); }},
      {"min_delta_omega", [&](const Json& v) { c.min_delta_omega = get_as<double>(v, "min_delta_omega"); }},
      {"seed", [&](const Json& v) { c.seed = get_as<std::uint64_t>(v, "seed"); }},
      {"max_retries", [&](const Json& v) { c.max_retries = get_as<int>(v, "max_retries"); }},
  });
  return c;
}

Json to_json(const PipelineConfig& cfg) {
  return Json{{"estimator", estimator_name(cfg.estimator)},
              {"lambda_n", cfg.est.lambda_n},
              {"lambda_auto", cfg.est.lambda_auto},
              {"lambda_scale", cfg.est.lambda_scale},
              {"delta", cfg.est.delta},
              {"epsilon", cfg.est.epsilon},
              {"solver_tol", cfg.est.solver_tol},
              {"max_iter", cfg.est.max_iter},
              {"max_prune_candidates", cfg.max_prune_candidates},
              {"population_zero_tol", cfg.population_zero_tol},
              {"record_trace", cfg.record_trace}};
}

PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig c) {
  apply_fields(j, "pipeline", {
      {"estimator", [&](const Json& v) {
         const auto name = get_as<std::string>(v, "estimator");
         if (name == "population") c.estimator = EstimatorKind::population;
         else if (name == "dantzig") c.estimator = EstimatorKind::dantzig;
         else throw ConfigError("estimator must be 'population' or 'dantzig'");
       }},
      {"lambda_n", [&](const Json& v) { c.est.lambda_n = get_as<double>(v, "lambda_n"); }},
      {"lambda_auto", [&](const Json& v) { c.est.lambda_auto = get_as<bool>(v, "lambda_auto"); }},
      {"lambda_scale", [&](const Json& v) { c.est.lambda_scale = get_as<double>(v, "lambda_scale"); }},
      {"delta", [&](const Json& v) { c.est.delta = get_as<double>(v, "delta"); }},
      {"epsilon", [&](const Json& v) { c.est.epsilon = get_as<double>(v, "epsilon"); }},
      {"solver_tol", [&](const Json& v) { c.est.solver_tol = get_as<double>(v, "solver_tol"); }},
      {"max_iter", [&](const Json& v) { c.est.max_iter = get_as<int>(v, "max_iter"); }},
      {"max_prune_candidates", [&](const Json& v) { c.max_prune_candidates = get_as<int>(v, "max_prune_candidates"); }},
      {"population_zero_tol", [&](const Json& v) { c.population_zero_tol = get_as<double>(v, "population_zero_tol"); }},
      {"record_trace", [&](const Json& v) { c.record_trace = get_as<bool>(v, "record_trace"); }},
  });
  return c;
}

Json to_json(const SweepConfig& cfg) {
  Json out{{"p_values", cfg.p_values},
           {"c_values", cfg.c_values},
           {"repetitions", cfg.repetitions},
           {"fixed_n", cfg.fixed_n ? Json(*cfg.fixed_n) : Json(nullptr)},
           {"seed_base", cfg.seed_base},
           {"threads", cfg.threads},
           {"record_timing", cfg.record_timing},
           {"gen", to_json(cfg.gen)},
           {"pipeline", to_json(cfg.pipeline)}};
  return out;
}

SweepConfig sweep_config_from_json(const Json& j, SweepConfig c) {
  apply_fields(j, "sweep", {
      {"p_values", [&](const Json& v) { c.p_values = get_as<std::vector<int>>(v, "p_values"); }},
      {"c_values", [&](const Json& v) { c.c_values = get_as<std::vector<int>>(v, "c_values"); }},
      {"repetitions", [&](const Json& v) { c.repetitions = get_as<int>(v, "repetitions"); }},
      {"fixed_n", [&](const Json& v) {
         if (v.is_null()) c.fixed_n.reset();
         else c.fixed_n = get_as<int>(v, "fixed_n");
       }},
      {"seed_base", [&](const Json& v) { c.seed_base = get_as<std::uint64_t>(v, "seed_base"); }},
      {"threads", [&](const Json& v) { c.threads = get_as<int>(v, "threads"); }},
      {"record_timing", [&](const Json& v) { c.record_timing = get_as<bool>(v, "record_timing"); }},
      {"gen", [&](const Json& v) { c.gen = gen_config_from_json(v, c.gen); }},
      {"pipeline", [&](const Json& v) { c.pipeline = pipeline_config_from_json(v, c.pipeline); }},
  });
  return c;
}

Json to_json(const IncoherenceReport& r) {
  return Json{{"k_offdiag_max", r.k_offdiag_max},
              {"k_diag_min", r.k_diag_min},
              {"lambda_min1", r.lambda_min1},
              {"lambda_min2", r.lambda_min2},
              {"l0", r.l0},
              {"bound", number_or_null(r.bound)},
              {"holds", r.holds}};
}

Json to_json(const AssumptionReport& r) {
  return Json{{"passed", r.passed},
              {"violation", r.violation},
              {"invariant", r.invariant},
              {"sets_checked", r.sets_checked},
              {"truncated", r.truncated},
              {"min_rho_gap", number_or_null(r.min_rho_gap)},
              {"min_diag_gap", number_or_null(r.min_diag_gap)}};
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(lineno) + ": '" + cell + "' is not a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                        " columns, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return m;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  out.precision(old);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_matrix_csv(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

}  // namespace ddag::io
