#pragma once

#include "ddag/delta_precision.hpp"
#include "ddag/diff_dag.hpp"
#include "ddag/experiments.hpp"
#include "ddag/oracle.hpp"
#include "ddag/sem.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

// JSON and CSV encodings of the library types. Decoders throw ConfigError on
// malformed or out-of-schema input.
namespace ddag::io {

using Json = nlohmann::ordered_json;

Json to_json(const Sem& sem);
Sem sem_from_json(const Json& j);

Json to_json(const DeltaPrecision& dp);
DeltaPrecision delta_from_json(const Json& j);

Json to_json(const DagEdgeSet& edges);  // [[child, parent], ...], sorted
Json to_json(const PipelineResult& result, bool include_trace);

Json to_json(const SemPairGenConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
SemPairGenConfig gen_config_from_json(const Json& j, SemPairGenConfig base = {});

Json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig base = {});

Json to_json(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const Json& j, SweepConfig base = {});

Json to_json(const IncoherenceReport& report);
Json to_json(const AssumptionReport& report);

// Plain numeric CSV, one row per line, no header.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

Json read_json_file(const std::string& path);
Matrix read_matrix_csv_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ddag::io
