#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evopref/errors.hpp"
#include "evopref/experiments.hpp"
#include "support/generators.hpp"

using namespace evopref;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("columns") {
  const std::vector<std::string> expected{
      "experiment", "kappa1",     "kappa2",           "p",           "eps_P",
      "eps_R",      "seed",       "replicate",        "final_kind",  "mean_alpha",
      "distinct_actions", "welfare_raw", "welfare_norm", "converged", "oscillating"};
  CHECK(record_columns() == expected);
}

TEST_CASE("empty export is header only") {
  const std::string csv = to_csv({});
  CHECK(csv ==
        "experiment,kappa1,kappa2,p,eps_P,eps_R,seed,replicate,final_kind,mean_alpha,"
        "distinct_actions,welfare_raw,welfare_norm,converged,oscillating\n");
  CHECK(parse_csv(csv).empty());
  CHECK(nlohmann::json::parse(to_json({})).is_array());
}

TEST_CASE("nine significant digits") {
  SweepRecord r;
  r.experiment = "fig1";
  r.kappa1 = 1.0 / 3;
  r.welfare_raw = 0.123456789123;
  r.mean_alpha = 2.0 / 3;
  const std::string csv = to_csv(std::vector<SweepRecord>{r});
  CHECK(csv.find(",0.333333333,") != std::string::npos);
  CHECK(csv.find(",0.123456789,") != std::string::npos);
  CHECK(csv.find("0.3333333333") == std::string::npos);
  const auto j = nlohmann::json::parse(to_json(std::vector<SweepRecord>{r}));
  CHECK(j[0]["kappa1"].get<double>() == 0.333333333);
  CHECK(j[0]["mean_alpha"].get<double>() == 0.666666667);
}

TEST_CASE("round trips") {
  gen::Gen G(4);
  std::vector<SweepRecord> recs;
  for (int i = 0; i < 50; ++i) recs.push_back(gen::rounded(G.record()));
  auto from_csv = parse_csv(to_csv(recs));
  auto from_json = parse_json(to_json(recs));
  REQUIRE(from_csv.size() == recs.size());
  REQUIRE(from_json.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(gen::same(from_csv[i], recs[i]));
    CHECK(gen::same(from_json[i], recs[i]));
  }
  // second pass is a fixed point even for values with more digits
  std::vector<SweepRecord> raw;
  for (int i = 0; i < 20; ++i) raw.push_back(G.record());
  const std::string once = to_csv(parse_csv(to_csv(raw)));
  CHECK(once == to_csv(raw));
}

TEST_CASE("csv and json agree") {
  SweepSpec s = SweepSpec::for_experiment(ExperimentId::Fig4);
  s.replicates = 1;
  s.p_grid = {0.7};
  s.eps_p_grid = {0.0, 0.0015};
  auto recs = run_sweep(s);
  auto a = parse_csv(to_csv(recs));
  auto b = parse_json(to_json(recs));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(gen::same(a[i], b[i]));
}

TEST_CASE("json field names") {
  gen::Gen G(5);
  const auto j = nlohmann::ordered_json::parse(to_json(std::vector<SweepRecord>{G.record()}));
  std::vector<std::string> keys;
  for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
  CHECK(keys == record_columns());
}

TEST_CASE("malformed csv") {
  CHECK_THROWS_AS((void)parse_csv("a,b\n"), InvalidArgument);
  std::string bad = to_csv({}) + "fig1,0.1\n";
  CHECK_THROWS_AS((void)parse_csv(bad), InvalidArgument);
  CHECK_THROWS((void)parse_json("{"));
}

TEST_CASE("export to files") {
  gen::Gen G(6);
  std::vector<SweepRecord> recs{G.record(), G.record()};
  const auto csv = tmp("evopref_export.csv");
  const auto json = tmp("evopref_export.json");
  export_records(recs, RecordFormat::Csv, csv);
  export_records(recs, RecordFormat::Json, json);
  CHECK(slurp(csv) == to_csv(recs));
  CHECK(parse_json(slurp(json)).size() == 2);
  try {
    export_records(recs, RecordFormat::Csv, "/nonexistent-dir/x.csv");
    FAIL("expected an IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
  }
}
