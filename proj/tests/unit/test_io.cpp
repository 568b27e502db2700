#include "ddag/errors.hpp"
#include "ddag/io.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace ddag::io {
namespace {

TEST(SemJson, RoundTrip) {
  Sem a = testing::random_sem(5, 3);
  Json j = to_json(a);
  EXPECT_EQ(j["p"], 5);
  EXPECT_EQ(j["b"].size(), 5u);
  Sem b = sem_from_json(Json::parse(j.dump()));
  EXPECT_EQ(a.b(), b.b());
  EXPECT_EQ(a.noise_vars(), b.noise_vars());
  EXPECT_EQ(a.labels(), b.labels());
}

TEST(SemJson, RejectsMalformedInput) {
  EXPECT_THROW(sem_from_json(Json::parse(R"({"b": [[0]]})")), ConfigError);
  EXPECT_THROW(sem_from_json(Json::parse(R"({"b": [[0, 1], [0]], "noise_vars": [1, 1]})")), ConfigError);
  EXPECT_THROW(sem_from_json(Json::parse(R"({"b": [[0, 1], [1, 0]], "noise_vars": [1, 1]})")), ConfigError);
  EXPECT_THROW(sem_from_json(Json::parse(R"({"p": 3, "b": [[0]], "noise_vars": [1]})")), ConfigError);
  EXPECT_THROW(sem_from_json(Json::parse(R"({"b": [["x"]], "noise_vars": [1]})")), ConfigError);
}

TEST(DeltaJson, RoundTrip) {
  DeltaPrecision dp{Matrix::Identity(2, 2), {3, 7}, 0.125};
  DeltaPrecision back = delta_from_json(to_json(dp));
  EXPECT_EQ(back.matrix, dp.matrix);
  EXPECT_EQ(back.labels, dp.labels);
  EXPECT_EQ(back.threshold_applied, 0.125);
  EXPECT_THROW(delta_from_json(Json::parse(R"({"labels": [1], "matrix": [[1, 2]]})")), ConfigError);
}

TEST(PipelineJson, SortedEdgesAndOptionalTrace) {
  PipelineResult r;
  r.delta = DagEdgeSet({1, 2, 3}, {{3, 1}, {1, 2}});
  r.invariant_vertices = {};
  r.order.layers = {{1, 3}, {2}};
  r.trace.push_back({"estimate", {1, 2, 3}, Matrix::Zero(3, 3), ""});
  Json j = to_json(r, false);
  EXPECT_EQ(j["edges"], Json::parse("[[1,2],[3,1]]"));
  EXPECT_EQ(j["layers"], Json::parse("[[1,3],[2]]"));
  EXPECT_FALSE(j.contains("trace"));
  EXPECT_TRUE(to_json(r, true).contains("trace"));
}

TEST(ConfigJson, PartialOverridesAndUnknownKeys) {
  SemPairGenConfig g = gen_config_from_json(Json::parse(R"({"p": 7, "seed": 3})"));
  EXPECT_EQ(g.p, 7);
  EXPECT_EQ(g.seed, 3u);
  EXPECT_EQ(g.min_delta_omega, 0.25);
  EXPECT_THROW(gen_config_from_json(Json::parse(R"({"q": 1})")), ConfigError);
  EXPECT_THROW(gen_config_from_json(Json::parse(R"({"p": "ten"})")), ConfigError);

  SweepConfig s = sweep_config_from_json(
      Json::parse(R"({"p_values": [5], "fixed_n": 1000, "pipeline": {"estimator": "population"}})"));
  EXPECT_EQ(s.p_values, std::vector<int>{5});
  EXPECT_EQ(s.fixed_n, 1000);
  EXPECT_EQ(s.pipeline.estimator, EstimatorKind::population);
  EXPECT_TRUE(s.pipeline.est.lambda_auto);
  EXPECT_THROW(pipeline_config_from_json(Json::parse(R"({"estimator": "lasso"})")), ConfigError);

  SweepConfig again = sweep_config_from_json(to_json(s));
  EXPECT_EQ(to_json(again), to_json(s));
}

TEST(MatrixCsv, RoundTripIsExact) {
  Matrix m(2, 3);
  m << 0.1, -2.5e-7, 3.0, 1.0 / 3.0, 4.0, -0.0;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  EXPECT_EQ(read_matrix_csv(ss), m);
}

TEST(MatrixCsv, RejectsRaggedAndNonNumeric) {
  std::stringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_matrix_csv(ragged), ConfigError);
  std::stringstream text("1,abc\n");
  EXPECT_THROW(read_matrix_csv(text), ConfigError);
  std::stringstream crlf("1,2\r\n3,4\r\n\n");
  EXPECT_EQ(read_matrix_csv(crlf).rows(), 2);
}

TEST(Reports, InfiniteValuesBecomeNull) {
  AssumptionReport r;
  r.min_rho_gap = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(to_json(r)["min_rho_gap"].is_null());
  IncoherenceReport i;
  i.bound = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(to_json(i)["bound"].is_null());
}

TEST(Files, MissingFileIsAConfigError) {
  EXPECT_THROW(read_json_file("/nonexistent/x.json"), ConfigError);
  EXPECT_THROW(read_matrix_csv_file("/nonexistent/x.csv"), ConfigError);
}

}  // namespace
}  // namespace ddag::io
