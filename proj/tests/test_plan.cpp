#include "rntopo/plan.hpp"

#include <gtest/gtest.h>
#include <gmpxx.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rntopo;
namespace fs = std::filesystem;

namespace {

Json task(const char* text) { return Json::parse(text); }

Json plan_of(std::initializer_list<Json> tasks) { return Json{{"tasks", Json(tasks)}}; }

// Path of the SchemaError raised by parse_plan, or "" when it parses.
std::string error_path(const Json& doc) {
  try {
    parse_plan(doc);
  } catch (const SchemaError& e) {
    return e.path;
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rntopo_plan_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

// Every "<x>_rational,<x>_float" column pair: the float is within one ulp of the rational.
void expect_floats_match_rationals(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  const auto header = split(line);
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), header.size()) << line;
    for (std::size_t c = 0; c + 1 < header.size(); ++c) {
      const std::string& h = header[c];
      if (h.size() < 9 || h.compare(h.size() - 9, 9, "_rational") != 0) continue;
      if (cells[c] == "inf") {
        EXPECT_EQ(cells[c + 1], "inf");
        continue;
      }
      const mpq_class exact(cells[c]);
      const double f = std::stod(cells[c + 1]);
      const double lo = std::nextafter(f, -INFINITY), hi = std::nextafter(f, INFINITY);
      EXPECT_TRUE(mpq_class(lo) <= exact && exact <= mpq_class(hi)) << h << ": " << cells[c] << " vs " << cells[c + 1];
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

const char* four_systems_plan = R"({"tasks": [
  {"kind": "classify", "name": "shift", "system": {"type": "shift", "k": 2}, "point": {"prefix": "", "period": "10"}},
  {"kind": "classify", "name": "least_deletion", "system": {"type": "least_deletion", "p": "2/3"},
   "point": {"prefix": "", "period": "10"}},
  {"kind": "classify", "name": "odometer", "system": {"type": "odometer", "p": "1/3"},
   "point": {"prefix": "0110", "period": "10"}},
  {"kind": "classify", "name": "free_boundary", "system": {"type": "free_boundary", "d": 2},
   "point": {"prefix": "", "period": "ab"}}
]})";

}  // namespace

TEST(PlanSchema, MinimalPlanParses) {
  const auto plan = parse_plan_text(R"({"tasks": [{"kind": "explore", "system": {"type": "shift", "k": 2},
                                        "point": {"prefix": "0", "period": "10"}, "depth": 3}]})");
  ASSERT_EQ(plan.tasks.size(), 1u);
  EXPECT_EQ(plan.tasks[0].kind, TaskKind::explore);
  EXPECT_EQ(plan.tasks[0].name(0), "explore-0");
  EXPECT_TRUE(parse_plan_text(R"({"tasks": []})").tasks.empty());
}

TEST(PlanSchema, ErrorsNameTheOffendingPath) {
  const Json ok_explore = task(R"({"kind": "explore", "system": {"type": "shift", "k": 2},
                                   "point": {"prefix": "", "period": "10"}, "depth": 2})");
  EXPECT_EQ(error_path(plan_of({ok_explore})), "");

  Json rotation = ok_explore;
  rotation["system"] = task(R"({"type": "rotation", "alpha": "1/2"})");
  EXPECT_EQ(error_path(plan_of({ok_explore, rotation})), "/tasks/1/system/type");

  Json extra = ok_explore;
  extra["colour"] = "blue";
  EXPECT_EQ(error_path(plan_of({extra})), "/tasks/0/colour");

  Json bad_p = task(R"({"kind": "classify", "system": {"type": "odometer", "p": "2/0"},
                        "point": {"prefix": "", "period": "10"}})");
  EXPECT_EQ(error_path(plan_of({bad_p})), "/tasks/0/system/p");
  bad_p["system"]["p"] = "3/2";
  EXPECT_EQ(error_path(plan_of({bad_p})), "/tasks/0/system/p");

  const Json no_seed = task(R"({"kind": "mtp", "system": {"type": "shift", "k": 2}, "samples": 10})");
  EXPECT_EQ(error_path(plan_of({no_seed})), "/tasks/0/seed");

  const Json bad_kind = task(R"({"kind": "simulate"})");
  EXPECT_EQ(error_path(plan_of({bad_kind})), "/tasks/0/kind");

  Json bad_point = ok_explore;
  bad_point["point"]["period"] = "0";
  EXPECT_EQ(error_path(plan_of({bad_point})), "/tasks/0/point");

  EXPECT_EQ(error_path(Json{{"tasks", Json::array()}, {"title", "x"}}), "/title");
  EXPECT_THROW(parse_plan_text("{\"tasks\": ["), SchemaError);
}

TEST(PlanSchema, RoundTripIsIdentity) {
  const auto plan = parse_plan_text(four_systems_plan);
  const Json doc = serialize_plan(plan);
  EXPECT_EQ(parse_plan(doc), plan);
  EXPECT_EQ(serialize_plan(parse_plan(doc)), doc);
}

TEST(PlanRun, FourSystemsClassifyRows) {
  const auto report = run_plan(parse_plan_text(four_systems_plan));
  ASSERT_TRUE(report.ok());
  const std::map<std::string, std::string> expected = {
      {"shift", "forward nonvanishing / back vanishing / core full"},
      {"least_deletion", "forward nonvanishing / back orbits finite / core empty"},
      {"odometer", "two-sided oscillation / core full"},
      {"free_boundary", "forward nonvanishing / back decay / core full"}};
  const Json j = report.to_json(false);
  ASSERT_EQ(j.at("tasks").size(), 4u);
  for (const auto& t : j.at("tasks")) EXPECT_EQ(t.at("row").at("summary"), expected.at(t.at("name")));
}

TEST(PlanRun, DeterministicOutput) {
  const auto plan = parse_plan_text(R"({"tasks": [
    {"kind": "mtp", "system": {"type": "least_deletion", "p": "2/3"}, "kernel": "inverse-mass",
     "mode": "estimate", "horizon": 8, "samples": 2000, "seed": 4},
    {"kind": "walk", "d": 2, "walks": 300, "length": 2, "seed": 5},
    {"kind": "expand", "system": {"type": "odometer", "p": "1/3"}, "n_max": 5, "samples": 20, "seed": 6}
  ]})");
  const auto a = run_plan(plan, {1}), b = run_plan(plan, {3});
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a.to_json(false).dump(), b.to_json(false).dump());
  for (std::size_t i = 0; i < a.tasks.size(); ++i) {
    EXPECT_EQ(a.tasks[i].output.dump(), b.tasks[i].output.dump());
    EXPECT_EQ(a.tasks[i].csv, b.tasks[i].csv);
  }
}

TEST(PlanRun, FailingTaskDoesNotStopTheRest) {
  const fs::path dir = scratch_dir("fail");
  Json doc = Json::parse(R"({"tasks": [
    {"kind": "explore", "system": {"type": "shift", "k": 2}, "point": {"prefix": "", "period": "10"}, "depth": 2},
    {"kind": "explore", "system": {"type": "shift", "k": 2}, "point": {"prefix": "", "period": "10"}, "depth": 2}
  ]})");
  doc["tasks"][0]["out"] = (dir / "missing" / "ball").string();
  doc["tasks"][1]["out"] = (dir / "ball").string();
  const auto report = run_plan(parse_plan(doc));
  ASSERT_EQ(report.tasks.size(), 2u);
  EXPECT_FALSE(report.ok());
  EXPECT_FALSE(report.tasks[0].ok);
  EXPECT_NE(report.tasks[0].error.find("filesystem error"), std::string::npos);
  EXPECT_TRUE(report.tasks[1].ok);
  EXPECT_TRUE(fs::exists(dir / "ball.json"));
  EXPECT_TRUE(fs::exists(dir / "ball.csv"));
  const Json j = report.to_json();
  EXPECT_EQ(j.at("tasks")[0].at("status"), "error");
  EXPECT_TRUE(j.at("tasks")[0].contains("wall_seconds"));
  fs::remove_all(dir);
}

TEST(PlanRun, CsvFloatsTrackRationals) {
  const fs::path dir = scratch_dir("csv");
  const fs::path tree_file = dir / "t.tree";
  std::ofstream(tree_file) << "tree 5\nedge 0 1 0\nedge 1 2 1\nedge 1 3 2\nedge 3 4 0\nweight 2 1/3\nweight 4 5/7\n";
  Json doc = Json::parse(R"({"tasks": [
    {"kind": "explore", "system": {"type": "least_deletion", "p": "1/3"}, "point": {"prefix": "0010", "period": "10"},
     "depth": 4},
    {"kind": "core", "system": {"type": "least_deletion", "p": "2/3"}, "point": {"prefix": "", "period": "10"},
     "depth": 2, "threshold": "1000"},
    {"kind": "mtp", "system": {"type": "odometer", "p": "1/3"}, "mode": "preimage_unit", "samples": 500, "seed": 2},
    {"kind": "expand", "system": {"type": "odometer", "p": "2/7"}, "n_max": 6},
    {"kind": "tree", "op": "prune", "vertices": [0], "bound": "1/2"}
  ]})");
  doc["tasks"][4]["file"] = tree_file.string();
  const auto report = run_plan(parse_plan(doc));
  for (const auto& t : report.tasks) {
    ASSERT_TRUE(t.ok) << t.name << ": " << t.error;
    ASSERT_FALSE(t.csv.empty()) << t.name;
    SCOPED_TRACE(t.name);
    expect_floats_match_rationals(t.csv);
  }
  fs::remove_all(dir);
}

TEST(PlanRun, CsvPairForDoubles) {
  EXPECT_EQ(csv_pair(0.5), "1/2,0.5");
  EXPECT_EQ(csv_pair(Weight(1, 3)).substr(0, 4), "1/3,");
  EXPECT_EQ(csv_pair(Weight::infinity()), "inf,inf");
}
