#pragma once

// Brute-force reference implementations and random generators shared by the unit
// tests and the acceptance runner.  Nothing here calls the library code it checks.

#include "rntopo/system.hpp"
#include "rntopo/tree.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

namespace oracle {

using rntopo::Weight;
using rntopo::tree::DirectedEdge;
using rntopo::tree::EdgeColoring;
using rntopo::tree::FiniteTree;
using rntopo::tree::Vertex;
using rntopo::tree::VertexSet;

struct RandomTree {
  int n = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<std::vector<Vertex>> adj;

  FiniteTree tree() const { return FiniteTree(n, edges); }
};

// Random forest on n vertices: each vertex after the first attaches to an earlier one,
// except with probability `split` it starts a new component.  Labels are shuffled.
inline RandomTree random_forest(std::mt19937_64& rng, int n, double split = 0.05) {
  RandomTree t;
  t.n = n;
  t.adj.assign(n, {});
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = i;
  std::shuffle(label.begin(), label.end(), rng);
  std::uniform_real_distribution<double> coin(0, 1);
  for (int i = 1; i < n; ++i) {
    if (coin(rng) < split) continue;
    std::uniform_int_distribution<int> pick(0, i - 1);
    const int u = label[pick(rng)], v = label[i];
    t.edges.emplace_back(u, v);
    t.adj[u].push_back(v);
    t.adj[v].push_back(u);
  }
  return t;
}

inline VertexSet reachable(const RandomTree& t, Vertex from, std::pair<Vertex, Vertex> cut = {-1, -1}) {
  std::vector<char> seen(t.n, 0);
  std::vector<Vertex> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (Vertex v : t.adj[u]) {
      if ((u == cut.first && v == cut.second) || (u == cut.second && v == cut.first)) continue;
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  VertexSet out;
  for (int v = 0; v < t.n; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

inline VertexSet half_space(const RandomTree& t, DirectedEdge e) {
  return reachable(t, e.origin, {e.origin, e.terminus});
}

inline bool subset(const VertexSet& a, const VertexSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline bool intersects(const VertexSet& a, const VertexSet& b) {
  VertexSet c;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
  return !c.empty();
}

inline std::vector<DirectedEdge> all_directed_edges(const RandomTree& t) {
  std::vector<DirectedEdge> out;
  for (auto [u, v] : t.edges) {
    out.push_back({u, v});
    out.push_back({v, u});
  }
  return out;
}

// Unique path between u and v (empty if disconnected), by BFS parents.
inline std::vector<Vertex> path(const RandomTree& t, Vertex u, Vertex v) {
  std::vector<int> parent(t.n, -2);
  std::queue<Vertex> q;
  q.push(u);
  parent[u] = -1;
  while (!q.empty()) {
    const Vertex a = q.front();
    q.pop();
    for (Vertex b : t.adj[a])
      if (parent[b] == -2) {
        parent[b] = a;
        q.push(b);
      }
  }
  if (parent[v] == -2) return {};
  std::vector<Vertex> p;
  for (Vertex c = v; c != -1; c = parent[c]) p.push_back(c);
  std::reverse(p.begin(), p.end());
  return p;
}

inline VertexSet convex_hull(const RandomTree& t, const VertexSet& s) {
  std::set<Vertex> out;
  for (Vertex a : s)
    for (Vertex b : s)
      for (Vertex v : path(t, a, b)) out.insert(v);
  return {out.begin(), out.end()};
}

inline bool is_coherent(const RandomTree& t, const std::vector<DirectedEdge>& h) {
  for (const auto& a : h)
    for (const auto& b : h) {
      const VertexSet ta = half_space(t, a.reversed()), tb = half_space(t, b.reversed());
      const bool same_component = !path(t, a.origin, b.origin).empty();
      if (same_component && !intersects(ta, tb)) return false;
    }
  return true;
}

// Classes of "contained in a common origin half-space of H", by union-find on the union.
inline std::vector<VertexSet> transversal_classes(const RandomTree& t, const std::vector<DirectedEdge>& h) {
  std::vector<int> parent(t.n);
  for (int i = 0; i < t.n; ++i) parent[i] = i;
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::set<Vertex> covered;
  for (const auto& e : h) {
    const VertexSet hs = half_space(t, e);
    for (Vertex v : hs) {
      covered.insert(v);
      parent[find(v)] = find(hs.front());
    }
  }
  std::map<int, VertexSet> by_root;
  for (Vertex v : covered) by_root[find(v)].push_back(v);
  std::vector<VertexSet> out;
  for (auto& [r, c] : by_root) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

inline EdgeColoring random_proper_coloring(std::mt19937_64& rng, const RandomTree& t, int palette = 6) {
  EdgeColoring c;
  std::vector<std::set<std::uint64_t>> used(t.n);
  std::vector<std::pair<Vertex, Vertex>> order = t.edges;
  std::shuffle(order.begin(), order.end(), rng);
  for (auto [u, v] : order) {
    std::vector<std::uint64_t> free;
    const int limit = std::max<int>(palette, static_cast<int>(t.adj[u].size() + t.adj[v].size()));
    for (int k = 0; k < limit; ++k)
      if (!used[u].count(k) && !used[v].count(k)) free.push_back(k);
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    const std::uint64_t col = free[pick(rng)];
    c[{std::min(u, v), std::max(u, v)}] = col;
    used[u].insert(col);
    used[v].insert(col);
  }
  return c;
}

inline std::vector<std::uint64_t> colors_along(const EdgeColoring& c, const std::vector<Vertex>& p) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(c.at({std::min(p[i - 1], p[i]), std::max(p[i - 1], p[i])}));
  return out;
}

// Shortest path to the target set, least color word among shortest; empty if unreachable.
inline std::vector<Vertex> lex_least_path(const RandomTree& t, const EdgeColoring& c, Vertex x, const VertexSet& targets) {
  std::vector<Vertex> best;
  for (Vertex a : targets) {
    auto p = path(t, x, a);
    if (p.empty()) continue;
    if (best.empty() || p.size() < best.size() ||
        (p.size() == best.size() && colors_along(c, p) < colors_along(c, best)))
      best = std::move(p);
  }
  return best;
}

// A random connected vertex set: a random walk's trace inside one component.
inline VertexSet random_subtree(std::mt19937_64& rng, const RandomTree& t, Vertex start, int steps) {
  std::set<Vertex> s{start};
  Vertex cur = start;
  for (int i = 0; i < steps; ++i) {
    if (t.adj[cur].empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, t.adj[cur].size() - 1);
    cur = t.adj[cur][pick(rng)];
    s.insert(cur);
  }
  return {s.begin(), s.end()};
}

// ---- symbolic dynamics ----

// Odometer on an explicit finite window, least significant bit first; returns false on overflow.
inline bool add_one(std::vector<int>& bits) {
  for (auto& b : bits) {
    if (b == 0) {
      b = 1;
      return true;
    }
    b = 0;
  }
  return false;
}

// rho for Bernoulli(p) between two sequences differing only on [0, n): product of
// p/(1-p) factors for each coordinate that turns 0 -> 1.
inline Weight bernoulli_ratio(const Weight& p, const std::vector<int>& from, const std::vector<int>& to) {
  const Weight lambda = p / Weight(mpq_class(1) - p.rational());
  Weight r = Weight::one();
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i] == 0 && to[i] == 1) r *= lambda;
    if (from[i] == 1 && to[i] == 0) r /= lambda;
  }
  return r;
}

}  // namespace oracle
