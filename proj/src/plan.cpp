#include "rntopo/plan.hpp"

#include "rntopo/boundary_walk.hpp"
#include "rntopo/mass_transport.hpp"
#include "rntopo/topography.hpp"
#include "rntopo/tree_io.hpp"
#include "rntopo/version.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace rntopo {

namespace {

const std::vector<std::pair<TaskKind, const char*>> kind_names = {
    {TaskKind::explore, "explore"}, {TaskKind::classify, "classify"}, {TaskKind::core, "core"},
    {TaskKind::mtp, "mtp"},         {TaskKind::tree, "tree"},         {TaskKind::walk, "walk"},
    {TaskKind::expand, "expand"}};

enum class FieldType { string, uint, rational, system, point, kernel, mtp_mode, tree_op, edge, edges, vertices,
                       family, letter_weights };

const std::map<std::string, FieldType> field_types = {
    {"name", FieldType::string},         {"out", FieldType::string},
    {"system", FieldType::system},       {"point", FieldType::point},
    {"depth", FieldType::uint},          {"budget", FieldType::uint},
    {"back_depth", FieldType::uint},     {"trace_length", FieldType::uint},
    {"core_radius", FieldType::uint},    {"probe_depth", FieldType::uint},
    {"samples", FieldType::uint},        {"seed", FieldType::uint},
    {"horizon", FieldType::uint},        {"threads", FieldType::uint},
    {"chunk_size", FieldType::uint},     {"walks", FieldType::uint},
    {"length", FieldType::uint},         {"stability_window", FieldType::uint},
    {"pilot_walks", FieldType::uint},    {"n_max", FieldType::uint},
    {"steps", FieldType::uint},          {"d", FieldType::uint},
    {"source", FieldType::uint},         {"threshold", FieldType::rational},
    {"bound", FieldType::rational},      {"kernel", FieldType::kernel},
    {"mode", FieldType::mtp_mode},       {"file", FieldType::string},
    {"op", FieldType::tree_op},          {"edge", FieldType::edge},
    {"other_edge", FieldType::edge},     {"edges", FieldType::edges},
    {"vertices", FieldType::vertices},   {"family", FieldType::family},
    {"m", FieldType::letter_weights}};

struct Schema {
  std::vector<const char*> allowed;
  std::vector<const char*> required;
};

const std::map<TaskKind, Schema>& schemas() {
  static const std::map<TaskKind, Schema> s = {
      {TaskKind::explore, {{"name", "out", "system", "point", "depth", "back_depth", "budget"},
                           {"system", "point", "depth"}}},
      {TaskKind::classify, {{"name", "out", "system", "point", "trace_length", "back_depth", "core_radius",
                             "probe_depth", "threshold", "budget"},
                            {"system", "point"}}},
      {TaskKind::core, {{"name", "out", "system", "point", "depth", "threshold", "probe_depth", "budget"},
                        {"system", "point", "depth", "threshold"}}},
      {TaskKind::mtp, {{"name", "out", "system", "kernel", "mode", "samples", "horizon", "seed", "threads",
                        "chunk_size", "budget"},
                       {"system", "samples", "seed"}}},
      {TaskKind::tree, {{"name", "out", "file", "op", "edge", "other_edge", "edges", "vertices", "family",
                         "source", "bound"},
                        {"file", "op"}}},
      {TaskKind::walk, {{"name", "out", "d", "m", "walks", "length", "seed", "stability_window", "pilot_walks",
                         "steps", "budget"},
                        {"d", "walks", "length", "seed"}}},
      {TaskKind::expand, {{"name", "out", "system", "n_max", "point", "samples", "seed", "steps"},
                          {"system", "n_max"}}},
  };
  return s;
}

const std::set<std::string> mtp_modes = {"estimate", "preimage_unit", "inverse_mass_sum", "balance"};
const std::set<std::string> tree_ops = {"half_space", "edge_leq",      "is_coherent", "coherent_transversal",
                                        "helly",      "convex_hull",   "lex_least_path", "prune"};

void check_int_array(const Json& v, const std::string& path, std::size_t exact_size = 0) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of vertex ids");
  if (exact_size && v.size() != exact_size)
    throw SchemaError(path, "expected exactly " + std::to_string(exact_size) + " entries");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!v[i].is_number_integer() || v[i].get<long long>() < 0)
      throw SchemaError(path + "/" + std::to_string(i), "expected a nonnegative integer");
}

void validate_field(const std::string& key, const Json& v, const Json& task, const std::string& path) {
  switch (field_types.at(key)) {
    case FieldType::string:
      if (!v.is_string()) throw SchemaError(path, "expected a string");
      break;
    case FieldType::uint:
      if (!v.is_number_integer() || v.get<long long>() < 0) throw SchemaError(path, "expected a nonnegative integer");
      break;
    case FieldType::rational:
      weight_from_json(v, path);
      break;
    case FieldType::system:
      if (to_string(*task_kind_from_string(task.at("kind").get<std::string>())) == "expand") {
        const GeneratorSystem base = system_from_json(v, path);
        try {
          TildeSystem(base, 1);
        } catch (const std::invalid_argument& e) {
          throw SchemaError(path + "/type", e.what());
        }
      } else {
        system_from_json(v, path);
      }
      break;
    case FieldType::point:
      point_from_json(v, system_from_json(require(task, "system", ""), ""), path);
      break;
    case FieldType::kernel:
      if (!v.is_string()) throw SchemaError(path, "expected a kernel name");
      try {
        TransportKernel::parse(v.get<std::string>(), 1);
      } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
      }
      break;
    case FieldType::mtp_mode:
      if (!v.is_string() || !mtp_modes.count(v.get<std::string>())) throw SchemaError(path, "unknown mtp mode");
      break;
    case FieldType::tree_op:
      if (!v.is_string() || !tree_ops.count(v.get<std::string>())) throw SchemaError(path, "unknown tree operation");
      break;
    case FieldType::edge:
      check_int_array(v, path, 2);
      break;
    case FieldType::edges:
      if (!v.is_array()) throw SchemaError(path, "expected an array of edges");
      for (std::size_t i = 0; i < v.size(); ++i) check_int_array(v[i], path + "/" + std::to_string(i), 2);
      break;
    case FieldType::vertices:
      check_int_array(v, path);
      break;
    case FieldType::family:
      if (!v.is_array()) throw SchemaError(path, "expected an array of vertex sets");
      for (std::size_t i = 0; i < v.size(); ++i) check_int_array(v[i], path + "/" + std::to_string(i));
      break;
    case FieldType::letter_weights: {
      Json sys{{"type", "free_boundary"}, {"d", task.contains("d") ? task.at("d") : Json(2)}, {"m", v}};
      try {
        system_from_json(sys, path.substr(0, path.size() - 2));
      } catch (const SchemaError& e) {
        throw SchemaError(path, e.what());
      }
      break;
    }
  }
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---- JSON renderings of results ----

Json weights_json(const std::vector<Weight>& ws) {
  Json a = Json::array();
  for (const auto& w : ws) a.push_back(w.to_string());
  return a;
}

Json certificate_json(const std::optional<MassCertificate>& c) {
  if (!c) return nullptr;
  return Json{{"kind", c->kind == MassCertificate::Kind::infinite ? "certified-infinite" : "certified-total"},
              {"total", c->total.to_string()},
              {"reason", c->reason}};
}

Json mass_report_json(const MassReport& m) {
  return Json{{"lower_bounds", weights_json(m.lower_bounds)},
              {"certificate", certificate_json(m.certificate)},
              {"upper_bound", m.upper_bound ? Json(m.upper_bound->to_string()) : Json(nullptr)},
              {"exhausted", m.exhausted},
              {"truncated", m.truncated}};
}

Json trace_json(const ForwardTrace& t) {
  return Json{{"rho", weights_json(t.rho)},
              {"partial_sums", weights_json(t.partial_sums)},
              {"running_min", weights_json(t.running_min)},
              {"running_max", weights_json(t.running_max)}};
}

std::string depth_csv(const std::vector<Weight>& series, const std::string& header) {
  std::string out = header + "\n";
  for (std::size_t d = 0; d < series.size(); ++d) out += std::to_string(d) + "," + csv_pair(series[d]) + "\n";
  return out;
}

Json witness_json(const std::optional<OscillationWitness>& w) {
  if (!w) return nullptr;
  Json j{{"bits_used", w->bits_used}};
  j["high_step"] = w->high_step ? Json(w->high_step->get_str()) : Json(nullptr);
  j["high"] = w->high ? Json(w->high->to_string()) : Json(nullptr);
  j["low_step"] = w->low_step ? Json(w->low_step->get_str()) : Json(nullptr);
  j["low"] = w->low ? Json(w->low->to_string()) : Json(nullptr);
  return j;
}

std::size_t opt_uint(const Json& p, const char* key, std::size_t fallback) {
  return p.contains(key) ? p.at(key).get<std::size_t>() : fallback;
}

Weight opt_weight(const Json& p, const char* key, const Weight& fallback) {
  return p.contains(key) ? weight_from_json(p.at(key), key) : fallback;
}

// ---- task bodies: each fills the output document and CSV ----

void run_explore(const Json& p, TaskResult& r) {
  const GeneratorSystem sys = system_from_json(p.at("system"), "/system");
  const SymbolicPoint x = point_from_json(p.at("point"), sys, "/point");
  const std::size_t depth = p.at("depth").get<std::size_t>();
  const std::size_t back_depth = opt_uint(p, "back_depth", depth);
  const std::size_t budget = opt_uint(p, "budget", default_vertex_budget);
  const auto ball = explore_ball(sys, x, depth, budget);
  Json verts = Json::array();
  if (ball.size() <= 4096) {
    for (const auto& v : ball.vertices)
      verts.push_back(Json{{"point", v.point.to_string()},
                           {"depth", v.depth},
                           {"parent", v.parent == no_parent ? Json(nullptr) : Json(v.parent)},
                           {"direction", v.direction == StepDirection::forward    ? "forward"
                                         : v.direction == StepDirection::backward ? "backward"
                                                                                  : "base"},
                           {"weight", v.weight.to_string()}});
  }
  std::vector<Weight> spheres;
  for (std::size_t n = 0; n <= back_depth; ++n) spheres.push_back(back_sphere_mass(sys, x, n, budget));
  r.output = Json{{"task", "explore"},
                  {"system", system_to_json(sys)},
                  {"point", point_to_json(x)},
                  {"radius", depth},
                  {"ball_size", ball.size()},
                  {"sphere_sizes", ball.sphere_sizes()},
                  {"vertices", verts},
                  {"back_sphere_mass", weights_json(spheres)},
                  {"back_orbit_mass", mass_report_json(back_orbit_mass(sys, x, back_depth, budget))},
                  {"sigma_backward", mass_report_json(sigma_backward(sys, x, back_depth, budget))},
                  {"forward_trace", trace_json(forward_trace(sys, x, depth))}};
  r.csv = depth_csv(spheres, "depth,back_sphere_mass_rational,back_sphere_mass_float");
}

void run_classify(const Json& p, TaskResult& r) {
  const GeneratorSystem sys = system_from_json(p.at("system"), "/system");
  const SymbolicPoint x = point_from_json(p.at("point"), sys, "/point");
  ClassifyOptions o;
  o.trace_length = opt_uint(p, "trace_length", o.trace_length);
  o.back_depth = opt_uint(p, "back_depth", o.back_depth);
  o.core_radius = opt_uint(p, "core_radius", o.core_radius);
  o.core_probe_depth = opt_uint(p, "probe_depth", o.core_probe_depth);
  o.threshold = opt_weight(p, "threshold", o.threshold);
  o.vertex_budget = opt_uint(p, "budget", o.vertex_budget);
  const ClassifyReport c = classify(sys, x, o);
  Json tail = Json::array();
  for (const auto& t : c.back_tail) tail.push_back(t ? Json(t->to_string()) : Json("empty"));
  r.output = Json{{"task", "classify"},
                  {"system", system_to_json(sys)},
                  {"point", point_to_json(x)},
                  {"row", Json{{"system", c.system},
                               {"forward", c.forward_status},
                               {"back", c.back_status},
                               {"core", c.core_status},
                               {"summary", c.summary}}},
                  {"forward_trace", trace_json(c.trace)},
                  {"forward_side_weights", weights_json(c.forward_side_weights)},
                  {"back_tail_sup", tail},
                  {"forward_oscillation", witness_json(c.forward_oscillation)},
                  {"back_oscillation", witness_json(c.back_oscillation)},
                  {"core_vertices", c.core_vertices},
                  {"core_in", c.core_in}};
  r.csv = depth_csv(c.trace.rho, "n,forward_rho_rational,forward_rho_float");
}

void run_core(const Json& p, TaskResult& r) {
  const GeneratorSystem sys = system_from_json(p.at("system"), "/system");
  const SymbolicPoint x = point_from_json(p.at("point"), sys, "/point");
  const std::size_t radius = p.at("depth").get<std::size_t>();
  const Weight threshold = weight_from_json(p.at("threshold"), "/threshold");
  const auto core = rn_core_truncated(sys, x, radius, threshold, opt_uint(p, "probe_depth", 0),
                                      opt_uint(p, "budget", default_vertex_budget));
  const auto failures = verify_core_report(sys, core);
  Json entries = Json::array();
  std::vector<std::size_t> total(radius + 1, 0), in(radius + 1, 0);
  for (const auto& e : core.entries) {
    ++total[e.depth];
    if (e.in_core) ++in[e.depth];
    Json j{{"point", e.point.to_string()}, {"depth", e.depth}, {"in_core", e.in_core}};
    if (e.exclusion)
      j["exclusion"] = Json{{"origin", e.exclusion->half_space.origin.to_string()},
                            {"terminus", e.exclusion->half_space.terminus.to_string()},
                            {"terminus_is_image", e.exclusion->half_space.terminus_is_image},
                            {"certified", e.exclusion->certified},
                            {"total", e.exclusion->total.to_string()},
                            {"reason", e.exclusion->reason}};
    entries.push_back(std::move(j));
  }
  std::vector<Weight> fraction;
  for (std::size_t d = 0; d <= radius; ++d)
    fraction.push_back(total[d] ? Weight(static_cast<long>(in[d]), static_cast<long>(total[d])) : Weight());
  r.output = Json{{"task", "core"},
                  {"system", system_to_json(sys)},
                  {"point", point_to_json(x)},
                  {"radius", radius},
                  {"threshold", threshold.to_string()},
                  {"probe_depth", core.probe_depth},
                  {"in_core", core.in_core_count()},
                  {"vertices", core.entries.size()},
                  {"verification_failures", failures},
                  {"entries", entries}};
  r.csv = depth_csv(fraction, "depth,in_core_fraction_rational,in_core_fraction_float");
}

Json estimate_json(const MTPEstimate& e) {
  return Json{{"system", e.system},         {"kernel", e.kernel},
              {"sent_mean", e.sent_mean},   {"sent_se", e.sent_se},
              {"received_mean", e.received_mean}, {"received_se", e.received_se},
              {"samples", e.samples},       {"excluded", e.excluded},
              {"seed", e.seed},             {"horizon", e.horizon},
              {"chunk_size", e.chunk_size}, {"discrepancy_in_se", fmt_double(e.discrepancy_in_se())},
              {"notes", e.notes}};
}

void run_mtp(const Json& p, TaskResult& r, const RunOptions& options) {
  const GeneratorSystem sys = system_from_json(p.at("system"), "/system");
  const std::string mode = p.contains("mode") ? p.at("mode").get<std::string>() : "estimate";
  const std::size_t samples = p.at("samples").get<std::size_t>();
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  const std::size_t horizon = opt_uint(p, "horizon", 1);
  EstimatorOptions eo;
  eo.threads = static_cast<unsigned>(opt_uint(p, "threads", options.threads));
  eo.chunk_size = opt_uint(p, "chunk_size", eo.chunk_size);
  eo.vertex_budget = opt_uint(p, "budget", eo.vertex_budget);
  r.seed = seed;
  if (mode == "balance") {
    const BalanceSummary b = backward_balance_check(sys, samples, seed, eo);
    r.output = Json{{"task", "mtp"},
                    {"mode", mode},
                    {"system", system_to_json(sys)},
                    {"mean", b.mean},
                    {"standard_error", b.standard_error},
                    {"fraction_below_one", b.fraction_below_one},
                    {"fraction_equal_one", b.fraction_equal_one},
                    {"fraction_above_one", b.fraction_above_one},
                    {"samples", b.samples},
                    {"seed", b.seed},
                    {"consistent", b.consistent}};
    r.csv = "system,mean_rational,mean_float,se_rational,se_float,samples\n" + b.system + "," + csv_pair(b.mean) +
            "," + csv_pair(b.standard_error) + "," + std::to_string(b.samples) + "\n";
    return;
  }
  MTPEstimate e;
  if (mode == "preimage_unit") {
    e = verify_preimage_unit(sys, samples, seed, eo);
  } else if (mode == "inverse_mass_sum") {
    e = verify_inverse_mass_sum(sys, samples, horizon, seed, eo);
  } else {
    const std::string kname = p.contains("kernel") ? p.at("kernel").get<std::string>() : "forward-indicator";
    e = estimate_mtp(sys, TransportKernel::parse(kname, horizon), samples, seed, eo);
  }
  r.output = estimate_json(e);
  r.output["task"] = "mtp";
  r.output["mode"] = mode;
  r.csv = "system,kernel,samples,excluded,sent_mean_rational,sent_mean_float,sent_se_rational,sent_se_float,"
          "received_mean_rational,received_mean_float,received_se_rational,received_se_float\n" +
          e.system + "," + e.kernel + "," + std::to_string(e.samples) + "," + std::to_string(e.excluded) + "," +
          csv_pair(e.sent_mean) + "," + csv_pair(e.sent_se) + "," + csv_pair(e.received_mean) + "," +
          csv_pair(e.received_se) + "\n";
}

tree::DirectedEdge edge_of(const Json& j) { return {j[0].get<int>(), j[1].get<int>()}; }

tree::VertexSet vertex_set_of(const Json& j) {
  tree::VertexSet s;
  for (const auto& v : j) s.push_back(v.get<int>());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Json edge_json(const tree::DirectedEdge& e) { return Json::array({e.origin, e.terminus}); }

void run_tree(const Json& p, TaskResult& r) {
  const tree::TreeDocument doc = tree::load_tree_document(p.at("file").get<std::string>());
  const std::string op = p.at("op").get<std::string>();
  auto need = [&](const char* key) -> const Json& {
    if (!p.contains(key)) throw SchemaError(std::string("/") + key, "required by tree operation " + op);
    return p.at(key);
  };
  Json result;
  if (op == "half_space") {
    result = tree::half_space(doc.tree, edge_of(need("edge")));
  } else if (op == "edge_leq") {
    result = tree::edge_leq(doc.tree, edge_of(need("edge")), edge_of(need("other_edge")));
  } else if (op == "is_coherent" || op == "coherent_transversal") {
    std::vector<tree::DirectedEdge> edges;
    for (const auto& e : need("edges")) edges.push_back(edge_of(e));
    if (op == "is_coherent") {
      result = tree::is_coherent(doc.tree, edges);
    } else {
      const auto t = tree::coherent_transversal(doc.tree, edges);
      Json maximal = Json::array();
      for (const auto& e : t.maximal) maximal.push_back(edge_json(e));
      result = Json{{"maximal", maximal}, {"classes", t.classes}, {"representatives", t.representatives}};
    }
  } else if (op == "helly") {
    tree::SubtreeFamily family;
    for (const auto& s : need("family")) family.push_back(vertex_set_of(s));
    result = tree::helly_common_vertex(doc.tree, family);
  } else if (op == "convex_hull") {
    result = tree::convex_hull(doc.tree, vertex_set_of(need("vertices")));
  } else if (op == "lex_least_path") {
    result = tree::lex_least_path(doc.tree, doc.coloring, need("source").get<int>(), vertex_set_of(need("vertices")));
  } else if (op == "prune") {
    const Weight bound = weight_from_json(need("bound"), "/bound");
    tree::VertexWeights weights = doc.weights;
    for (int v = 0; v < doc.tree.vertex_count(); ++v) weights.try_emplace(v, Weight::one());
    Json rows = Json::array();
    r.csv = "origin,terminus,mass_rational,mass_float,exceeds_bound\n";
    for (const auto& pe : tree::prune_rho_finite(doc.tree, weights, vertex_set_of(need("vertices")), bound)) {
      rows.push_back(Json{{"edge", edge_json(pe.edge)}, {"mass", pe.mass.to_string()}, {"exceeds_bound", pe.exceeds_bound}});
      r.csv += std::to_string(pe.edge.origin) + "," + std::to_string(pe.edge.terminus) + "," + csv_pair(pe.mass) +
               "," + (pe.exceeds_bound ? "true" : "false") + "\n";
    }
    result = rows;
  }
  r.output = Json{{"task", "tree"}, {"op", op}, {"vertices", doc.tree.vertex_count()}, {"result", result}};
}

void run_walk(const Json& p, TaskResult& r) {
  const int d = static_cast<int>(p.at("d").get<std::size_t>());
  Json sys_desc{{"type", "free_boundary"}, {"d", d}};
  if (p.contains("m")) sys_desc["m"] = p.at("m");
  const GeneratorSystem sys = system_from_json(sys_desc, "");
  const auto& m = std::get<FreeBoundaryParams>(sys.params()).m;
  const std::size_t walks = p.at("walks").get<std::size_t>();
  const std::size_t length = p.at("length").get<std::size_t>();
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  const std::size_t budget = opt_uint(p, "budget", 1u << 22);
  r.seed = seed;
  Json calibration = nullptr;
  std::size_t k = opt_uint(p, "stability_window", 0);
  if (k == 0) {
    // pilot walks use a seed stream disjoint from the measured walks
    const auto cal = calibrate_stability_window(d, m, mix_seed(seed, 0xca11b8a7e), length,
                                                opt_uint(p, "pilot_walks", 200), 8, budget);
    k = cal.stability_window;
    calibration = Json{{"stability_window", cal.stability_window}, {"pilot_walks", cal.pilot_walks},
                       {"rounds", cal.rounds}};
  }
  const Alphabet a = sys.alphabet();
  std::map<Word, std::size_t> counts;
  std::size_t total_steps = 0;
  for (std::size_t i = 0; i < walks; ++i) {
    const WalkSample s = random_walk_boundary_sample(d, m, mix_seed(seed, i), k, length, budget);
    total_steps += s.steps;
    for (std::size_t len = 1; len <= length; ++len) ++counts[Word(s.prefix.begin(), s.prefix.begin() + len)];
  }
  Json cylinders = Json::array();
  r.csv = "cylinder,frequency_rational,frequency_float,expected_rational,expected_float,z\n";
  for (const auto& [w, c] : counts) {
    const Weight freq(static_cast<long>(c), static_cast<long>(walks));
    const Weight expected = cylinder_mass(sys.measure(), w);
    const double pe = expected.to_double();
    const double se = std::sqrt(pe * (1 - pe) / static_cast<double>(walks));
    const double z = se > 0 ? (freq.to_double() - pe) / se : 0;
    cylinders.push_back(Json{{"cylinder", a.render(w)}, {"count", c}, {"frequency", freq.to_string()},
                             {"expected", expected.to_string()}, {"z", fmt_double(z)}});
    r.csv += a.render(w) + "," + csv_pair(freq) + "," + csv_pair(expected) + "," + fmt_double(z) + "\n";
  }
  const std::size_t steps = opt_uint(p, "steps", 1000);
  const auto speed_a = estimate_walk_speed(d, m, mix_seed(seed, 0x5eed0001), std::max<std::size_t>(walks / 2, 2), steps);
  const auto speed_b = estimate_walk_speed(d, m, mix_seed(seed, 0x5eed0002), std::max<std::size_t>(walks / 2, 2), steps);
  auto speed_json = [](const SpeedEstimate& s) {
    return Json{{"mean", s.mean}, {"standard_error", s.standard_error}, {"walks", s.walks}, {"steps", s.steps}};
  };
  r.output = Json{{"task", "walk"},
                  {"system", system_to_json(sys)},
                  {"walks", walks},
                  {"length", length},
                  {"seed", seed},
                  {"stability_window", k},
                  {"calibration", calibration},
                  {"mean_steps", static_cast<double>(total_steps) / static_cast<double>(std::max<std::size_t>(walks, 1))},
                  {"step_cocycle", sys.step_cocycle(SymbolicPoint(a, {}, {0, 2})).to_string()},
                  {"cylinders", cylinders},
                  {"speed", Json::array({speed_json(speed_a), speed_json(speed_b)})}};
}

void run_expand(const Json& p, TaskResult& r) {
  const GeneratorSystem base = system_from_json(p.at("system"), "/system");
  const int n_max = static_cast<int>(p.at("n_max").get<std::size_t>());
  const TildeSystem tilde(base, n_max);
  std::vector<Weight> measures;
  Weight added;
  for (int n = 0; n <= n_max; ++n) {
    measures.push_back(tilde.level_measure(n));
    added += measures.back();
  }
  r.output = Json{{"task", "expand"},
                  {"system", system_to_json(base)},
                  {"n_max", n_max},
                  {"level_measure", weights_json(measures)},
                  {"added_measure", added.to_string()}};
  r.csv = depth_csv(measures, "n,level_measure_rational,level_measure_float");
  if (p.contains("point")) {
    const SymbolicPoint x = point_from_json(p.at("point"), base, "/point");
    TildePoint cur = TildePoint::base(x);
    Json trace = Json::array();
    const std::size_t steps = opt_uint(p, "steps", 16);
    for (std::size_t j = 0; j <= steps; ++j) {
      trace.push_back(Json{{"point", cur.to_string()}, {"rho", tilde.cocycle(TildePoint::base(x), cur).to_string()}});
      if (cur.truncated || j == steps) break;
      cur = tilde.forward(cur);
    }
    r.output["trace"] = trace;
  }
  if (p.contains("samples")) {
    if (!p.contains("seed")) throw SchemaError("/seed", "sampling requires a seed");
    const std::uint64_t seed = p.at("seed").get<std::uint64_t>();
    r.seed = seed;
    const std::size_t samples = p.at("samples").get<std::size_t>();
    // rho~^x(f~(r_{g,X_n}(x))) * 2^n; the expected bound is 1
    std::vector<Weight> worst(static_cast<std::size_t>(n_max) + 1);
    for (std::size_t i = 0; i < samples; ++i) {
      LazyPoint sample(base.measure(), mix_seed(seed, i));
      const std::size_t window = std::max(sample.find(0, n_max + 1), sample.find(1, n_max + 1)) + 2;
      const SymbolicPoint x = cylinder_representative(base, sample, window);
      for (int n = 0; n <= n_max; ++n) {
        const auto z = tilde.retract_to_level_set(x, static_cast<std::size_t>(n));
        const TildePoint image = tilde.forward(TildePoint::base(z.point));
        if (image.truncated) continue;
        const Weight scaled = tilde.cocycle(TildePoint::base(x), image) * Weight::power(Weight(2), n);
        worst[static_cast<std::size_t>(n)] = max(worst[static_cast<std::size_t>(n)], scaled);
      }
    }
    bool holds = true;
    for (const auto& w : worst) holds = holds && w <= Weight::one();
    r.output["retraction_check"] = Json{{"samples", samples},
                                        {"seed", seed},
                                        {"max_scaled_weight", weights_json(worst)},
                                        {"inequality_holds", holds}};
  }
}

void write_file(const std::string& path, const std::string& content, TaskResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("filesystem error: cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("filesystem error: failed writing '" + path + "'");
  r.outputs.push_back(path);
}

}  // namespace

std::string to_string(TaskKind kind) {
  for (const auto& [k, n] : kind_names)
    if (k == kind) return n;
  return "?";
}

std::optional<TaskKind> task_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kind_names)
    if (name == n) return k;
  return std::nullopt;
}

std::string PlanTask::name(std::size_t index) const {
  if (params.contains("name")) return params.at("name").get<std::string>();
  return to_string(kind) + "-" + std::to_string(index);
}

PlanTask parse_task(const Json& task, const std::string& path) {
  if (!task.is_object()) throw SchemaError(path, "task must be an object");
  const std::string kind_name = string_field(task, "kind", path);
  const auto kind = task_kind_from_string(kind_name);
  if (!kind) throw SchemaError(path + "/kind", "unknown task kind '" + kind_name + "'");
  const Schema& schema = schemas().at(*kind);
  for (const auto& [key, value] : task.items()) {
    if (key == "kind") continue;
    if (std::find_if(schema.allowed.begin(), schema.allowed.end(), [&](const char* a) { return key == a; }) ==
        schema.allowed.end())
      throw SchemaError(path + "/" + key, "unknown field for task kind '" + kind_name + "'");
  }
  for (const char* req : schema.required) require(task, req, path);
  // systems first: points are validated against them
  if (task.contains("system")) validate_field("system", task.at("system"), task, path + "/system");
  for (const auto& [key, value] : task.items()) {
    if (key == "kind" || key == "system") continue;
    try {
      validate_field(key, value, task, path + "/" + key);
    } catch (const SchemaError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path + "/" + key, e.what());
    }
  }
  if (*kind == TaskKind::expand && task.contains("samples") && !task.contains("seed"))
    throw SchemaError(path + "/seed", "stochastic task requires a seed");
  PlanTask t;
  t.kind = *kind;
  for (const auto& [key, value] : task.items())
    if (key != "kind") t.params[key] = value;
  return t;
}

ExperimentPlan parse_plan(const Json& document) {
  check_fields(document, {"tasks"}, "");
  const Json& tasks = require(document, "tasks", "");
  if (!tasks.is_array()) throw SchemaError("/tasks", "expected an array");
  ExperimentPlan plan;
  for (std::size_t i = 0; i < tasks.size(); ++i) plan.tasks.push_back(parse_task(tasks[i], "/tasks/" + std::to_string(i)));
  return plan;
}

ExperimentPlan parse_plan_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_plan(doc);
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot read plan file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plan_text(ss.str());
}

Json serialize_plan(const ExperimentPlan& plan) {
  Json tasks = Json::array();
  for (const auto& t : plan.tasks) {
    Json j{{"kind", to_string(t.kind)}};
    for (const auto& [key, value] : t.params.items()) j[key] = value;
    tasks.push_back(std::move(j));
  }
  return Json{{"tasks", tasks}};
}

bool RunReport::ok() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskResult& t) { return t.ok; });
}

Json RunReport::to_json(bool include_timing) const {
  Json tasks_json = Json::array();
  for (const auto& t : tasks) {
    Json j{{"name", t.name},
           {"kind", rntopo::to_string(t.kind)},
           {"status", t.ok ? "ok" : "error"},
           {"error", t.ok ? Json(nullptr) : Json(t.error)},
           {"outputs", t.outputs},
           {"seed", t.seed ? Json(*t.seed) : Json(nullptr)}};
    if (t.output.is_object() && t.output.contains("row")) j["row"] = t.output.at("row");
    if (include_timing) j["wall_seconds"] = t.wall_seconds;
    tasks_json.push_back(std::move(j));
  }
  Json j{{"version", version}, {"ok", ok()}, {"tasks", tasks_json}};
  if (include_timing) j["wall_seconds"] = wall_seconds;
  return j;
}

RunReport run_plan(const ExperimentPlan& plan, const RunOptions& options) {
  using clock = std::chrono::steady_clock;
  RunReport report;
  report.version = version;
  const auto start = clock::now();
  for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
    const PlanTask& task = plan.tasks[i];
    TaskResult r;
    r.name = task.name(i);
    r.kind = task.kind;
    if (task.params.contains("seed")) r.seed = task.params.at("seed").get<std::uint64_t>();
    const auto t0 = clock::now();
    try {
      switch (task.kind) {
        case TaskKind::explore: run_explore(task.params, r); break;
        case TaskKind::classify: run_classify(task.params, r); break;
        case TaskKind::core: run_core(task.params, r); break;
        case TaskKind::mtp: run_mtp(task.params, r, options); break;
        case TaskKind::tree: run_tree(task.params, r); break;
        case TaskKind::walk: run_walk(task.params, r); break;
        case TaskKind::expand: run_expand(task.params, r); break;
      }
      if (task.params.contains("out")) {
        const std::string out = task.params.at("out").get<std::string>();
        write_file(out + ".json", r.output.dump(2) + "\n", r);
        if (!r.csv.empty()) write_file(out + ".csv", r.csv, r);
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    r.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    report.tasks.push_back(std::move(r));
  }
  report.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return report;
}

std::string csv_pair(const Weight& w) {
  if (w.is_infinite()) return "inf,inf";
  std::ostringstream os;
  os << std::setprecision(17) << w.to_double();
  return w.to_string() + "," + os.str();
}

std::string csv_pair(double v) {
  if (!std::isfinite(v)) return fmt_double(v) + "," + fmt_double(v);
  const mpq_class exact(v);
  std::string rational = exact.get_str();
  if (rational.find('/') == std::string::npos) rational += "/1";
  return rational + "," + fmt_double(v);
}

}  // namespace rntopo
