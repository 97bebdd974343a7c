#include "rntopo/mass_transport.hpp"
#include "rntopo/plan.hpp"
#include "rntopo/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using rntopo::Json;

// A descriptor argument is either inline JSON or the path of a file holding it.
Json descriptor(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[' || arg[first] == '"'))
    return Json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw rntopo::SchemaError("", "cannot read descriptor file '" + arg + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return Json::parse(ss.str());
}

// A point may also be given as bare "prefix(period)" text.
Json point_descriptor(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && arg[first] == '{') return Json::parse(arg);
  if (const auto open = arg.find('('); open != std::string::npos && arg.back() == ')')
    return Json{{"prefix", arg.substr(0, open)}, {"period", arg.substr(open + 1, arg.size() - open - 2)}};
  return descriptor(arg);
}

struct Common {
  std::string system, point, out, kernel = "forward-indicator", mode = "estimate", file, op;
  std::optional<std::size_t> depth, budget, samples, horizon, back_depth, probe_depth, walks, length,
      stability_window, n_max, steps, source, d;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> threshold, bound, edge, other_edge, edges, vertices, family, m;
};

void put(Json& task, const char* key, const auto& opt) {
  if (opt) task[key] = *opt;
}

void put_json(Json& task, const char* key, const std::optional<std::string>& opt) {
  if (opt) task[key] = Json::parse(*opt);
}

int report_and_exit(const rntopo::RunReport& report, bool single, const std::string& out) {
  if (single && out.empty() && !report.tasks.empty() && report.tasks[0].ok) {
    std::cout << report.tasks[0].output.dump(2) << "\n";
  } else {
    std::cout << report.to_json().dump(2) << "\n";
  }
  for (const auto& t : report.tasks)
    if (!t.ok) std::cerr << "task " << t.name << " failed: " << t.error << "\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topography of measure-class-preserving treeings: exact cocycles, end classification, "
               "mass transport checks and finite tree combinatorics"};
  app.set_version_flag("--version", rntopo::version);
  app.require_subcommand(1);

  unsigned threads = rntopo::default_thread_count();
  app.add_option("--threads", threads, "mass-transport worker threads (default: RNTOPO_THREADS or hardware)");

  Common c;
  std::string plan_path, report_path;
  bool no_timing = false;

  auto* run = app.add_subcommand("run", "execute an experiment plan");
  run->add_option("plan", plan_path, "plan JSON file")->required();
  run->add_option("--report", report_path, "also write the run report to this file");
  run->add_flag("--no-timing", no_timing, "omit wall times from the report");

  auto add_system = [&](CLI::App* s, bool point_required) {
    s->add_option("--system", c.system, "system descriptor: JSON text or file")->required();
    auto* p = s->add_option("--point", c.point, "point: \"prefix(period)\", JSON text or file");
    if (point_required) p->required();
    s->add_option("--budget", c.budget, "vertex budget");
    s->add_option("--out", c.out, "output path stem; writes <out>.json and <out>.csv");
  };

  auto* explore = app.add_subcommand("explore", "ball, back spheres, back-orbit mass and forward trace");
  add_system(explore, true);
  explore->add_option("--depth", c.depth, "ball radius")->required();
  explore->add_option("--back-depth", c.back_depth, "back levels to enumerate (default: depth)");

  auto* classify = app.add_subcommand("classify", "forward/back end status and core summary row");
  add_system(classify, true);
  classify->add_option("--depth", c.depth, "forward trace length");
  classify->add_option("--back-depth", c.back_depth, "back levels");
  classify->add_option("--threshold", c.threshold, "core mass threshold W (rational)");

  auto* core = app.add_subcommand("core", "truncated Radon-Nikodym vertex core around a point");
  add_system(core, true);
  core->add_option("--depth", c.depth, "ball radius")->required();
  core->add_option("--threshold", c.threshold, "mass threshold W (rational)")->required();
  core->add_option("--probe-depth", c.probe_depth, "back levels per half-space probe");

  auto* mtp = app.add_subcommand("mtp", "Monte Carlo mass-transport estimates");
  add_system(mtp, false);
  mtp->add_option("--kernel", c.kernel, "zero, forward-indicator, inverse-mass, forward-band; suffix +opposite");
  mtp->add_option("--mode", c.mode, "estimate, preimage_unit, inverse_mass_sum or balance");
  mtp->add_option("--samples", c.samples, "number of samples")->required();
  mtp->add_option("--horizon", c.horizon, "kernel horizon R");
  mtp->add_option("--seed", c.seed, "random seed")->required();

  auto* tree = app.add_subcommand("tree", "exact combinatorics on a finite tree file");
  tree->add_option("file", c.file, "tree file")->required();
  tree->add_option("--op", c.op,
                   "half_space, edge_leq, is_coherent, coherent_transversal, helly, convex_hull, "
                   "lex_least_path or prune")
      ->required();
  tree->add_option("--edge", c.edge, "directed edge as JSON [u,v]");
  tree->add_option("--other-edge", c.other_edge, "second edge for edge_leq");
  tree->add_option("--edges", c.edges, "JSON list of edges");
  tree->add_option("--vertices", c.vertices, "JSON list of vertices");
  tree->add_option("--family", c.family, "JSON list of vertex lists");
  tree->add_option("--source", c.source, "source vertex for lex_least_path");
  tree->add_option("--bound", c.bound, "mass bound for prune (rational)");
  tree->add_option("--out", c.out, "output path stem");

  auto* walk = app.add_subcommand(
      "walk",
      "free-group boundary samples from stabilized random walks.  Without --stability-window, K is calibrated "
      "by pilot walks: starting at 8, K doubles until no pilot walk loses a letter of the target prefix "
      "during 8K further steps; the chosen K and the pilot count are reported");
  walk->add_option("--d", c.d, "number of generators")->required();
  walk->add_option("--m", c.m, "JSON object of letter weights (default uniform)");
  walk->add_option("--walks", c.walks, "number of walks")->required();
  walk->add_option("--length", c.length, "prefix length to sample")->required();
  walk->add_option("--seed", c.seed, "random seed")->required();
  walk->add_option("--stability-window", c.stability_window, "fixed K, skipping calibration");
  walk->add_option("--budget", c.budget, "step budget per walk");
  walk->add_option("--out", c.out, "output path stem");

  auto* expand = app.add_subcommand("expand", "tilde expansion of a binary system");
  add_system(expand, false);
  expand->add_option("--depth", c.n_max, "largest level n")->required();
  expand->add_option("--samples", c.samples, "sampled points for the retraction check");
  expand->add_option("--seed", c.seed, "random seed (required with --samples)");
  expand->add_option("--steps", c.steps, "forward trace length from --point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  rntopo::RunOptions options;
  options.threads = threads;
  rntopo::ExperimentPlan plan;
  bool single = true;
  try {
    if (run->parsed()) {
      single = false;
      plan = rntopo::load_plan(plan_path);
    } else {
      CLI::App* sub = app.get_subcommands().front();
      Json task{{"kind", sub->get_name()}};
      if (!c.system.empty()) task["system"] = descriptor(c.system);
      if (!c.point.empty()) task["point"] = point_descriptor(c.point);
      if (!c.out.empty()) task["out"] = c.out;
      put(task, "budget", c.budget);
      put(task, "seed", c.seed);
      put(task, "samples", c.samples);
      put(task, "threshold", c.threshold);
      if (sub == explore) {
        put(task, "depth", c.depth);
        put(task, "back_depth", c.back_depth);
      } else if (sub == classify) {
        put(task, "trace_length", c.depth);
        put(task, "back_depth", c.back_depth);
      } else if (sub == core) {
        put(task, "depth", c.depth);
        put(task, "probe_depth", c.probe_depth);
      } else if (sub == mtp) {
        task["kernel"] = c.kernel;
        task["mode"] = c.mode;
        put(task, "horizon", c.horizon);
      } else if (sub == tree) {
        task["file"] = c.file;
        task["op"] = c.op;
        put_json(task, "edge", c.edge);
        put_json(task, "other_edge", c.other_edge);
        put_json(task, "edges", c.edges);
        put_json(task, "vertices", c.vertices);
        put_json(task, "family", c.family);
        put(task, "source", c.source);
        put(task, "bound", c.bound);
      } else if (sub == walk) {
        put(task, "d", c.d);
        put_json(task, "m", c.m);
        put(task, "walks", c.walks);
        put(task, "length", c.length);
        put(task, "stability_window", c.stability_window);
      } else if (sub == expand) {
        put(task, "n_max", c.n_max);
        put(task, "steps", c.steps);
      }
      plan.tasks.push_back(rntopo::parse_task(task, ""));
    }
  } catch (const rntopo::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON argument: " << e.what() << "\n";
    return 2;
  }

  const rntopo::RunReport report = rntopo::run_plan(plan, options);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << report.to_json(!no_timing).dump(2) << "\n";
    if (!out) {
      std::cerr << "error: cannot write report to '" << report_path << "'\n";
      return 1;
    }
  }
  if (!single) {
    std::cout << report.to_json(!no_timing).dump(2) << "\n";
    for (const auto& t : report.tasks)
      if (!t.ok) std::cerr << "task " << t.name << " failed: " << t.error << "\n";
    return report.ok() ? 0 : 1;
  }
  return report_and_exit(report, single, c.out);
}
