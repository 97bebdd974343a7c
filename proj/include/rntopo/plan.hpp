#pragma once

#include "rntopo/serialize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rntopo {

enum class TaskKind { explore, classify, core, mtp, tree, walk, expand };

std::string to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(const std::string& name);

/// One task: its kind plus the validated parameter object (every member except "kind").
struct PlanTask {
  TaskKind kind = TaskKind::explore;
  Json params = Json::object();

  std::string name(std::size_t index) const;
  friend bool operator==(const PlanTask&, const PlanTask&) = default;
};

struct ExperimentPlan {
  std::vector<PlanTask> tasks;
  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

/// Validates {"tasks": [...]}; unknown members anywhere are rejected with their path.
ExperimentPlan parse_plan(const Json& document);
/// Parses JSON text first; syntax errors become SchemaError at path "".
ExperimentPlan parse_plan_text(const std::string& text);
ExperimentPlan load_plan(const std::string& path);
Json serialize_plan(const ExperimentPlan& plan);
/// Validates one task object (with "kind") at `path`.
PlanTask parse_task(const Json& task, const std::string& path);

struct TaskResult {
  std::string name;
  TaskKind kind = TaskKind::explore;
  bool ok = false;
  std::string error;
  std::vector<std::string> outputs;  // files written
  std::optional<std::uint64_t> seed;
  double wall_seconds = 0;
  Json output;                        // the task's JSON document
  std::string csv;                    // the task's CSV table (may be empty)
};

struct RunReport {
  std::string version;
  std::vector<TaskResult> tasks;
  double wall_seconds = 0;

  bool ok() const;
  /// Timing fields are omitted when include_timing is false, making the document a
  /// deterministic function of the plan.
  Json to_json(bool include_timing = true) const;
};

struct RunOptions {
  unsigned threads = 0;  // mass-transport workers; 0 = default_thread_count()
};

/// Executes tasks in order; a failing task is recorded and the next one still runs.
RunReport run_plan(const ExperimentPlan& plan, const RunOptions& options = {});

/// "rational,float" for an exact value; the float is within one ulp of the rational.
std::string csv_pair(const Weight& w);
/// Same for a double, whose exact binary value is rendered as the rational.
std::string csv_pair(double v);

}  // namespace rntopo
