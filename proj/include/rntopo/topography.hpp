#pragma once

#include "rntopo/system.hpp"

#include <algorithm>
#include <concepts>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rntopo {

inline constexpr std::size_t default_vertex_budget = 2'000'000;
inline constexpr std::size_t no_parent = static_cast<std::size_t>(-1);

template <class S>
concept TreeSystem = requires(const S& s, const typename S::point_type& p) {
  { s.forward(p) } -> std::convertible_to<typename S::point_type>;
  { s.preimages(p) } -> std::convertible_to<std::vector<typename S::point_type>>;
  { s.step_cocycle(p) } -> std::convertible_to<Weight>;
};

template <class S>
concept CertifyingSystem = TreeSystem<S> && requires(const S& s, const typename S::point_type& p) {
  { s.back_orbit_certificate(p) } -> std::convertible_to<std::optional<MassCertificate>>;
  { s.forward_side_certificate(p) } -> std::convertible_to<std::optional<MassCertificate>>;
  { s.back_level_decay() } -> std::convertible_to<std::optional<LevelDecay>>;
};

namespace detail {

// Points standing for a cut-off part of the tree are not expanded.
template <class P>
bool is_marker(const P& p) {
  if constexpr (requires { p.truncated; }) {
    return p.truncated;
  } else {
    return false;
  }
}

}  // namespace detail

enum class StepDirection { none, forward, backward };

/// Exploration snapshot.  Vertices are non-backtracking tree paths from the base:
/// on a tree these are exactly the vertices, and where eventually periodic points close
/// up a cycle of the graph the ball unrolls it, as the tree of paths does.
template <class P>
struct Ball {
  struct Vertex {
    P point;
    std::size_t parent = no_parent;
    StepDirection direction = StepDirection::none;  // how the vertex was reached from its parent
    std::size_t depth = 0;
    Weight weight;            // rho^base(point)
    bool back_orbit = false;  // reached from the base by backward steps only
  };

  P base;
  std::size_t radius = 0;
  std::vector<Vertex> vertices;
  std::vector<std::vector<std::size_t>> spheres;  // spheres[d] = indices at distance d
  bool truncated_branches = false;                // some branch hit a truncation marker

  std::size_t size() const { return vertices.size(); }
  std::vector<std::size_t> sphere_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& s : spheres) out.push_back(s.size());
    return out;
  }
};

struct PartialBallError : BudgetError {
  PartialBallError(const std::string& what, std::size_t examined, std::size_t depth_reached,
                   std::size_t frontier_size)
      : BudgetError(what, examined), depth_reached(depth_reached), frontier_size(frontier_size) {}
  std::size_t depth_reached;
  std::size_t frontier_size;
};

namespace detail {

// Neighbors of v other than the one it was reached from.  `came` is how v was reached
// and `from` the point it was reached from.
template <TreeSystem S, class F>
void expand_vertex(const S& system, const typename S::point_type& v, StepDirection came,
                   const typename S::point_type* from, bool allow_forward, F&& emit) {
  if (is_marker(v)) return;
  if (came != StepDirection::backward && allow_forward) emit(system.forward(v), StepDirection::forward);
  bool skipped = came != StepDirection::forward;  // only a forward arrival has its source among the preimages
  for (auto& u : system.preimages(v)) {
    if (!skipped && from && u == *from) {
      skipped = true;
      continue;
    }
    emit(std::move(u), StepDirection::backward);
  }
}

template <TreeSystem S>
Weight child_weight(const S& system, const typename S::point_type& parent, const Weight& parent_weight,
                    const typename S::point_type& child, StepDirection dir) {
  if (detail::is_marker(child)) return Weight();
  return dir == StepDirection::forward ? parent_weight * system.step_cocycle(parent)
                                       : parent_weight / system.step_cocycle(child);
}

}  // namespace detail

template <TreeSystem S>
Ball<typename S::point_type> explore_ball(const S& system, const typename S::point_type& x, std::size_t r,
                                          std::size_t vertex_budget = default_vertex_budget) {
  using P = typename S::point_type;
  Ball<P> ball;
  ball.base = x;
  ball.radius = r;
  ball.vertices.push_back({x, no_parent, StepDirection::none, 0, Weight::one(), true});
  ball.spheres.push_back({0});
  for (std::size_t d = 1; d <= r; ++d) {
    std::vector<std::size_t> layer;
    for (std::size_t idx : ball.spheres[d - 1]) {
      const auto v = ball.vertices[idx];  // copy: the vector grows below
      // copy the parent too: pointers into ball.vertices dangle once it grows
      std::optional<P> parent;
      if (v.parent != no_parent) parent = ball.vertices[v.parent].point;
      detail::expand_vertex(system, v.point, v.direction, parent ? &*parent : nullptr, true, [&](P u, StepDirection dir) {
        if (ball.vertices.size() >= vertex_budget)
          throw PartialBallError("ball exceeds the vertex budget of " + std::to_string(vertex_budget),
                                 ball.vertices.size(), d - 1, ball.spheres[d - 1].size());
        if (detail::is_marker(u)) {
          ball.truncated_branches = true;
          return;
        }
        Weight w = detail::child_weight(system, v.point, v.weight, u, dir);
        const bool back = v.back_orbit && dir == StepDirection::backward;
        layer.push_back(ball.vertices.size());
        ball.vertices.push_back({std::move(u), idx, dir, d, std::move(w), back});
      });
    }
    ball.spheres.push_back(std::move(layer));
  }
  return ball;
}

/// Depth-indexed nondecreasing lower bounds with an optional analytic statement.
struct MassReport {
  std::vector<Weight> lower_bounds;
  std::optional<MassCertificate> certificate;
  std::optional<Weight> upper_bound;  // certified, when available
  bool exhausted = false;  // the set is finite and was fully enumerated
  bool truncated = false;  // the vertex budget stopped exploration early

  const Weight& value() const { return lower_bounds.back(); }
};

namespace detail {

template <class P>
struct BackItem {
  P point;
  Weight weight;    // rho^x(point)
  Weight path_sum;  // rho^x of the path [x, point]
};

// Calls visit(level, items) for levels 0..depth of the backward tree.  Returns false
// when the budget stopped it; sets `exhausted` when a level came out empty.
template <TreeSystem S, class V>
bool walk_back_levels(const S& system, const typename S::point_type& x, std::size_t depth, std::size_t budget,
                      bool& exhausted, V&& visit) {
  using P = typename S::point_type;
  std::vector<BackItem<P>> level{{x, Weight::one(), Weight::one()}};
  std::size_t examined = 1;
  exhausted = false;
  for (std::size_t n = 0;; ++n) {
    visit(n, level);
    if (n == depth) return true;
    std::vector<BackItem<P>> next;
    for (const auto& item : level) {
      if (is_marker(item.point)) continue;
      for (auto& u : system.preimages(item.point)) {
        if (++examined > budget) return false;
        if (is_marker(u)) continue;
        Weight w = item.weight / system.step_cocycle(u);
        Weight s = item.path_sum + w;
        next.push_back({std::move(u), std::move(w), std::move(s)});
      }
    }
    if (next.empty()) {
      exhausted = true;
      return true;
    }
    level = std::move(next);
  }
}

inline void pad_to(std::vector<Weight>& v, std::size_t size) {
  while (v.size() < size) v.push_back(v.back());
}

}  // namespace detail

/// rho^x(f^{-n}(x)), exact.  Throws BudgetError past the vertex budget.
template <TreeSystem S>
Weight back_sphere_mass(const S& system, const typename S::point_type& x, std::size_t n,
                        std::size_t vertex_budget = default_vertex_budget) {
  Weight mass;
  bool exhausted = false;
  const bool done = detail::walk_back_levels(system, x, n, vertex_budget, exhausted, [&](std::size_t lvl, auto& items) {
    if (lvl != n) return;
    for (const auto& it : items) mass += it.weight;
  });
  if (!done) throw BudgetError("back sphere exceeds the vertex budget", vertex_budget);
  return mass;  // stays 0 when the back orbit ends before level n
}

/// Partial sums of P(x) = rho^x(f^{-N}(x)) by depth.
template <TreeSystem S>
MassReport back_orbit_mass(const S& system, const typename S::point_type& x, std::size_t depth,
                           std::size_t vertex_budget = default_vertex_budget) {
  MassReport report;
  Weight total;
  const bool done = detail::walk_back_levels(system, x, depth, vertex_budget, report.exhausted,
                                             [&](std::size_t, auto& items) {
                                               for (const auto& it : items) total += it.weight;
                                               report.lower_bounds.push_back(total);
                                             });
  report.truncated = !done;
  if (report.exhausted) detail::pad_to(report.lower_bounds, depth + 1);
  if constexpr (CertifyingSystem<S>) report.certificate = system.back_orbit_certificate(x);
  if (report.certificate && report.certificate->is_finite()) report.upper_bound = report.certificate->total;
  return report;
}

/// Running maximum of rho^x([x, v]) over back-orbit vertices v by depth (Sigma_f(x)).
template <TreeSystem S>
MassReport sigma_backward(const S& system, const typename S::point_type& x, std::size_t depth,
                          std::size_t vertex_budget = default_vertex_budget) {
  MassReport report;
  Weight best;
  const bool done = detail::walk_back_levels(system, x, depth, vertex_budget, report.exhausted,
                                             [&](std::size_t, auto& items) {
                                               for (const auto& it : items) best = max(best, it.path_sum);
                                               report.lower_bounds.push_back(best);
                                             });
  report.truncated = !done;
  if (report.exhausted) {
    detail::pad_to(report.lower_bounds, depth + 1);
    report.upper_bound = best;
  } else if constexpr (CertifyingSystem<S>) {
    // level-j weights are at most r^j, so every path sum is below 1 / (1 - r)
    if (auto decay = system.back_level_decay())
      report.upper_bound = (Weight::one() / Weight(mpq_class(1) - decay->rate.rational()));
  }
  return report;
}

struct ForwardTrace {
  std::vector<Weight> rho;  // rho^x(f^j x), j = 0..n
  std::vector<Weight> partial_sums;
  std::vector<Weight> running_min;
  std::vector<Weight> running_max;
};

template <TreeSystem S>
ForwardTrace forward_trace(const S& system, typename S::point_type x, std::size_t n) {
  ForwardTrace t;
  Weight w = Weight::one();
  for (std::size_t j = 0;; ++j) {
    t.rho.push_back(w);
    t.partial_sums.push_back(j ? t.partial_sums.back() + w : w);
    t.running_min.push_back(j ? min(t.running_min.back(), w) : w);
    t.running_max.push_back(j ? max(t.running_max.back(), w) : w);
    if (j == n) break;
    w *= system.step_cocycle(x);
    x = system.forward(x);
  }
  return t;
}

struct TailSup {
  std::optional<Weight> value;            // nullopt: no back-orbit vertex at levels n..depth
  std::optional<Weight> certified_upper;  // bound on the true sup from a level-decay certificate
  bool exact = false;                     // value is the true sup over all levels >= n
};

/// max of rho^x(y) over y in f^{-j}(x), n <= j <= depth.
template <TreeSystem S>
TailSup back_tail_sup(const S& system, const typename S::point_type& x, std::size_t n, std::size_t depth,
                      std::size_t vertex_budget = default_vertex_budget) {
  if (depth < n) throw std::invalid_argument("back_tail_sup needs depth >= n");
  TailSup out;
  bool exhausted = false;
  const bool done = detail::walk_back_levels(system, x, depth, vertex_budget, exhausted,
                                             [&](std::size_t lvl, auto& items) {
                                               if (lvl < n) return;
                                               for (const auto& it : items)
                                                 out.value = out.value ? max(*out.value, it.weight) : it.weight;
                                             });
  if (!done) throw BudgetError("back tail exceeds the vertex budget", vertex_budget);
  if constexpr (CertifyingSystem<S>) {
    if (auto decay = system.back_level_decay()) {
      out.certified_upper = Weight::power(decay->rate, static_cast<long>(n));
      out.exact = out.value && *out.value == *out.certified_upper;
    }
  }
  if (exhausted) out.exact = true;
  return out;
}

/// A directed edge of T_f given by its endpoints; `terminus_is_image` says whether the
/// terminus is f(origin) (otherwise it is a preimage of the origin).
template <class P>
struct HalfSpaceRef {
  P origin;
  P terminus;
  bool terminus_is_image = true;
};

template <CertifyingSystem S>
std::optional<MassCertificate> half_space_certificate(const S& system, const HalfSpaceRef<typename S::point_type>& h) {
  return h.terminus_is_image ? system.back_orbit_certificate(h.origin) : system.forward_side_certificate(h.origin);
}

/// Lower bounds on rho^origin(V^origin(e)): lower_bounds[d] is the mass of the
/// half-space vertices at distance < d from the origin.
template <TreeSystem S>
MassReport half_space_mass(const S& system, const HalfSpaceRef<typename S::point_type>& e, std::size_t depth,
                           std::size_t vertex_budget = default_vertex_budget) {
  using P = typename S::point_type;
  struct Item {
    P point;
    Weight weight;
    StepDirection came;
    std::optional<P> from;
  };
  if (e.terminus_is_image) {
    if (!(system.forward(e.origin) == e.terminus)) throw std::invalid_argument("terminus is not f(origin)");
  } else {
    const auto pre = system.preimages(e.origin);
    if (std::find(pre.begin(), pre.end(), e.terminus) == pre.end())
      throw std::invalid_argument("terminus is not a preimage of origin");
  }
  MassReport report;
  report.lower_bounds.push_back(Weight());
  // the origin behaves as if it had been reached across the removed edge
  std::vector<Item> layer{{e.origin, Weight::one(),
                           e.terminus_is_image ? StepDirection::backward : StepDirection::forward, e.terminus}};
  std::size_t examined = 1;
  Weight total;
  for (std::size_t d = 0; d < depth; ++d) {
    for (const auto& it : layer) total += it.weight;
    report.lower_bounds.push_back(total);
    if (d + 1 == depth) break;
    std::vector<Item> next;
    for (const auto& it : layer) {
      const P* from = it.from ? &*it.from : nullptr;
      detail::expand_vertex(system, it.point, it.came, from, true, [&](P u, StepDirection dir) {
        if (detail::is_marker(u)) return;
        ++examined;
        Weight w = detail::child_weight(system, it.point, it.weight, u, dir);
        next.push_back({std::move(u), std::move(w), dir, it.point});
      });
      if (examined > vertex_budget) break;
    }
    if (examined > vertex_budget) {
      report.truncated = true;
      break;
    }
    if (next.empty()) {
      report.exhausted = true;
      break;
    }
    layer = std::move(next);
  }
  if (report.exhausted) detail::pad_to(report.lower_bounds, depth + 1);
  if constexpr (CertifyingSystem<S>) report.certificate = half_space_certificate(system, e);
  if (report.certificate && report.certificate->is_finite()) report.upper_bound = report.certificate->total;
  return report;
}

enum class ProbeSelector { greatest_weight, least_point, explicit_indices };

template <class P>
struct EndProbe {
  StepDirection direction = StepDirection::forward;
  std::vector<P> points;               // points[0] = x
  std::vector<Weight> rho;             // rho^x(points[j])
  std::vector<Weight> partial_sums;    // rho^x of the path up to j
  std::vector<Weight> tail_sup;        // max of rho over points[j..]
  bool ended = false;                  // a backward probe ran out of preimages
};

/// Follows f forward, or picks one preimage per step backward.  The default backward
/// selector takes the preimage of greatest step weight, least point on ties.
template <TreeSystem S>
EndProbe<typename S::point_type> probe_end(const S& system, const typename S::point_type& x, StepDirection direction,
                                           std::size_t depth,
                                           ProbeSelector selector = ProbeSelector::greatest_weight,
                                           const std::vector<std::size_t>& indices = {}) {
  using P = typename S::point_type;
  EndProbe<P> probe;
  probe.direction = direction;
  probe.points.push_back(x);
  probe.rho.push_back(Weight::one());
  for (std::size_t j = 0; j < depth; ++j) {
    const P& cur = probe.points.back();
    if (direction == StepDirection::forward) {
      probe.rho.push_back(probe.rho.back() * system.step_cocycle(cur));
      probe.points.push_back(system.forward(cur));
      continue;
    }
    auto pre = system.preimages(cur);
    std::erase_if(pre, [](const P& u) { return detail::is_marker(u); });
    if (pre.empty()) {
      probe.ended = true;
      break;
    }
    std::size_t pick = 0;
    if (selector == ProbeSelector::explicit_indices) {
      if (j >= indices.size() || indices[j] >= pre.size())
        throw std::invalid_argument("probe index list does not cover step " + std::to_string(j));
      pick = indices[j];
    } else if (selector == ProbeSelector::greatest_weight) {
      // preimages are sorted, so the first maximum is the least point among ties
      Weight best = system.step_cocycle(pre[0]);
      for (std::size_t i = 1; i < pre.size(); ++i) {
        Weight s = system.step_cocycle(pre[i]);
        if (s < best) {
          best = std::move(s);
          pick = i;
        }
      }
    }
    probe.rho.push_back(probe.rho.back() / system.step_cocycle(pre[pick]));
    probe.points.push_back(std::move(pre[pick]));
  }
  Weight acc;
  for (const auto& w : probe.rho) probe.partial_sums.push_back(acc += w);
  probe.tail_sup.assign(probe.rho.size(), Weight());
  for (std::size_t j = probe.rho.size(); j-- > 0;)
    probe.tail_sup[j] = j + 1 < probe.rho.size() ? max(probe.rho[j], probe.tail_sup[j + 1]) : probe.rho[j];
  return probe;
}

template <class P>
struct CoreEntry {
  P point;
  std::size_t depth = 0;
  bool in_core = true;
  struct Exclusion {
    HalfSpaceRef<P> half_space;
    bool certified = false;  // false: truncated mass stayed below the threshold
    Weight total;            // certified total, or the truncated lower bound
    std::string reason;
  };
  std::optional<Exclusion> exclusion;
};

template <class P>
struct CoreReport {
  P base;
  std::size_t radius = 0;
  Weight threshold;
  std::size_t probe_depth = 0;
  std::vector<CoreEntry<P>> entries;  // in ball order

  std::size_t in_core_count() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](auto& e) { return e.in_core; }));
  }
  bool all_in_core() const { return in_core_count() == entries.size(); }
  bool all_excluded() const { return in_core_count() == 0; }
};

/// Truncated Radon-Nikodym vertex core of the radius-r ball around x.
///
/// Candidate half-spaces are both sides of every ball edge and, for every vertex, the
/// side of its own forward edge.  A candidate is finite when a certificate says so or
/// when exhaustive enumeration finishes; without either, a truncated lower bound below
/// the threshold excludes it threshold-relatively.
template <TreeSystem S>
CoreReport<typename S::point_type> rn_core_truncated(const S& system, const typename S::point_type& x, std::size_t r,
                                                     const Weight& threshold, std::size_t probe_depth = 0,
                                                     std::size_t vertex_budget = default_vertex_budget) {
  using P = typename S::point_type;
  if (probe_depth == 0) probe_depth = std::max<std::size_t>(r, 4);
  const Ball<P> ball = explore_ball(system, x, r, vertex_budget);
  const std::size_t n = ball.size();

  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 1; i < n; ++i) children[ball.vertices[i].parent].push_back(i);
  std::vector<std::size_t> tin(n), tout(n);
  {
    std::size_t clock = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    tin[0] = clock++;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < children[v].size()) {
        const std::size_t c = children[v][next++];
        tin[c] = clock++;
        stack.push_back({c, 0});
      } else {
        tout[v] = clock;
        stack.pop_back();
      }
    }
  }
  auto in_subtree = [&](std::size_t v, std::size_t root) { return tin[root] <= tin[v] && tin[v] < tout[root]; };

  // side: 0 = subtree of `anchor`, 1 = complement of that subtree, 2 = whole ball
  struct Candidate {
    HalfSpaceRef<P> edge;
    int side;
    std::size_t anchor;
    std::optional<typename CoreEntry<P>::Exclusion> finite;
  };
  std::vector<Candidate> candidates;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& vert = ball.vertices[v];
    if (detail::is_marker(vert.point)) continue;
    // v's own forward edge when f(v) is not already a ball neighbor reached from v
    if (vert.direction != StepDirection::backward) {
      std::size_t forward_child = no_parent;
      for (std::size_t c : children[v])
        if (ball.vertices[c].direction == StepDirection::forward) forward_child = c;
      if (forward_child == no_parent) candidates.push_back({{vert.point, system.forward(vert.point), true}, 2, 0, {}});
    }
    if (v == 0) continue;
    const auto& par = ball.vertices[vert.parent];
    const bool child_is_preimage = vert.direction == StepDirection::backward;
    candidates.push_back({{vert.point, par.point, child_is_preimage}, 0, v, {}});
    candidates.push_back({{par.point, vert.point, !child_is_preimage}, 1, v, {}});
  }

  for (auto& c : candidates) {
    std::optional<MassCertificate> cert;
    if constexpr (CertifyingSystem<S>) cert = half_space_certificate(system, c.edge);
    if (cert) {
      if (cert->is_finite()) c.finite = {c.edge, true, cert->total, cert->reason};
      continue;
    }
    const MassReport m = half_space_mass(system, c.edge, probe_depth, vertex_budget);
    if (m.exhausted) {
      c.finite = {c.edge, true, m.value(), "half-space enumerated exhaustively"};
    } else if (m.value() < threshold) {
      c.finite = {c.edge, false, m.value(),
                  "truncated mass below threshold after " + std::to_string(probe_depth) + " layers"};
    }
  }

  CoreReport<P> report{x, r, threshold, probe_depth, {}};
  for (std::size_t v = 0; v < n; ++v) {
    CoreEntry<P> entry{ball.vertices[v].point, ball.vertices[v].depth, true, std::nullopt};
    for (const auto& c : candidates) {
      if (!c.finite) continue;
      const bool contains = c.side == 2 || (c.side == 0 ? in_subtree(v, c.anchor) : !in_subtree(v, c.anchor));
      if (!contains) continue;
      if (!entry.exclusion || (c.finite->certified && !entry.exclusion->certified)) entry.exclusion = c.finite;
      if (entry.exclusion->certified) break;
    }
    entry.in_core = !entry.exclusion;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

/// Independent re-check of a core report's exclusions.  Returns one message per
/// failure; empty means every certificate re-verified.
///
/// A certified back-orbit half-space must contain the vertex (some forward iterate of
/// the vertex is its origin) and its total must match exhaustive enumeration.
template <TreeSystem S>
std::vector<std::string> verify_core_report(const S& system, const CoreReport<typename S::point_type>& report,
                                            std::size_t vertex_budget = default_vertex_budget) {
  std::vector<std::string> failures;
  const std::size_t search = 4 * (report.radius + report.probe_depth) + 8;
  for (const auto& e : report.entries) {
    if (e.in_core) continue;
    const auto& ex = *e.exclusion;
    const std::string who = "vertex at depth " + std::to_string(e.depth);
    if (!ex.certified) continue;  // threshold-relative exclusions make no finiteness claim
    if (!ex.total.is_finite()) failures.push_back(who + ": certified total is not finite");
    if (ex.half_space.terminus_is_image) {
      auto cur = e.point;
      bool found = false;
      for (std::size_t j = 0; j <= search && !found; ++j) {
        if (cur == ex.half_space.origin) found = true;
        else cur = system.forward(cur);
      }
      if (!found) failures.push_back(who + ": not in the back orbit of the certificate origin");
      const MassReport m = back_orbit_mass(system, ex.half_space.origin, search, vertex_budget);
      if (!m.exhausted) failures.push_back(who + ": back orbit could not be enumerated");
      else if (m.value() != ex.total) failures.push_back(who + ": enumerated total " + m.value().to_string() +
                                                          " != certified " + ex.total.to_string());
    } else {
      failures.push_back(who + ": finite certificate on a forward side cannot be re-verified");
    }
  }
  return failures;
}

// ---- classification of the example systems ----

struct OscillationWitness {
  std::optional<mpz_class> high_step, low_step;  // signed iterate counts j
  std::optional<Weight> high, low;               // rho^x(f^j x) at those j
  std::size_t bits_used = 0;                     // largest t examined (|j| < 2^(t+1))
  bool found() const { return high && low; }
};

/// Searches odometer iterates f^j(x) (j > 0 forward, j < 0 backward) for rho^x values
/// above `high` and below `low`.  Candidates are the iterates that clear or fill the
/// lowest t coordinates, t = 1..max_bits.
OscillationWitness odometer_oscillation(const GeneratorSystem& system, const SymbolicPoint& x, int direction,
                                        const Weight& high, const Weight& low, std::size_t max_bits);

/// Pilot run: the least t such that every one of `pilots` sampled points has both
/// witnesses within t bits, doubled for margin.  Pilot seeds are mix_seed(seed, i).
std::size_t calibrate_oscillation_bits(const GeneratorSystem& system, std::uint64_t seed, std::size_t pilots,
                                       const Weight& high, const Weight& low, std::size_t window = 512);

struct ClassifyOptions {
  std::size_t trace_length = 32;
  std::size_t back_depth = 8;
  std::size_t core_radius = 3;
  std::size_t probe_depth = 64;        // backward probes from forward iterates
  std::size_t core_probe_depth = 6;    // exploration of uncertified half-spaces
  Weight threshold = Weight(1000);
  std::size_t oscillation_bits = 128;
  std::size_t vertex_budget = default_vertex_budget;
};

struct ClassifyReport {
  std::string system;
  std::string point;
  std::string forward_status;  // "nonvanishing", "vanishing", "oscillating"
  std::string back_status;     // "vanishing", "decay", "finite", "oscillating", "nonvanishing"
  std::string core_status;     // "full", "empty", "partial"
  std::string summary;
  ForwardTrace trace;
  std::vector<Weight> forward_side_weights;  // rho^x(f^j x) * greatest back-probe weight from f^j x
  std::vector<std::optional<Weight>> back_tail;
  std::optional<OscillationWitness> forward_oscillation, back_oscillation;
  std::size_t core_vertices = 0, core_in = 0;
};

ClassifyReport classify(const GeneratorSystem& system, const SymbolicPoint& x, const ClassifyOptions& options = {});

}  // namespace rntopo
