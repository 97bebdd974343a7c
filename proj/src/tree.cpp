#include "rntopo/tree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

namespace rntopo::tree {

namespace {

std::string edge_str(DirectedEdge e) {
  return "(" + std::to_string(e.origin) + "->" + std::to_string(e.terminus) + ")";
}

std::pair<Vertex, Vertex> key(Vertex u, Vertex v) { return {std::min(u, v), std::max(u, v)}; }

void require_edge(const FiniteTree& tree, DirectedEdge e) {
  if (!tree.contains(e.origin) || !tree.contains(e.terminus) || !tree.has_edge(e.origin, e.terminus))
    throw InvalidEdgeError(e);
}

// Component search from `start` that never crosses the undirected edge {a, b}.
std::vector<char> reach_avoiding(const FiniteTree& tree, Vertex start, Vertex a, Vertex b) {
  std::vector<char> seen(tree.vertex_count(), 0);
  std::vector<Vertex> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : tree.neighbors(v)) {
      if ((v == a && w == b) || (v == b && w == a)) continue;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

VertexSet to_set(const std::vector<char>& mask) {
  VertexSet out;
  for (Vertex v = 0; v < static_cast<Vertex>(mask.size()); ++v)
    if (mask[v]) out.push_back(v);
  return out;
}

std::vector<char> to_mask(const FiniteTree& tree, const VertexSet& set) {
  std::vector<char> mask(tree.vertex_count(), 0);
  for (Vertex v : set) {
    if (!tree.contains(v)) throw std::invalid_argument("unknown vertex " + std::to_string(v));
    mask[v] = 1;
  }
  return mask;
}

bool is_connected_subset(const FiniteTree& tree, const std::vector<char>& mask, Vertex start) {
  std::vector<char> seen(tree.vertex_count(), 0);
  std::vector<Vertex> stack{start};
  seen[start] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : tree.neighbors(v)) {
      if (mask[w] && !seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

// Each component rooted at its least vertex.
struct Rooted {
  std::vector<Vertex> parent;  // -1 at roots
  std::vector<Vertex> order;   // parents before children
};

Rooted root_all(const FiniteTree& tree) {
  Rooted r;
  const int n = tree.vertex_count();
  r.parent.assign(n, -1);
  std::vector<char> seen(n, 0);
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    std::queue<Vertex> q;
    q.push(s);
    while (!q.empty()) {
      const Vertex v = q.front();
      q.pop();
      r.order.push_back(v);
      for (Vertex w : tree.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          r.parent[w] = v;
          q.push(w);
        }
      }
    }
  }
  return r;
}

}  // namespace

InvalidEdgeError::InvalidEdgeError(DirectedEdge e)
    : TreeError("invalid edge " + edge_str(e)), edge(e) {}

CoherenceViolation::CoherenceViolation(DirectedEdge a, DirectedEdge b)
    : TreeError("edges " + edge_str(a) + " and " + edge_str(b) + " have disjoint terminus sides"),
      first(a),
      second(b) {}

IntersectionViolation::IntersectionViolation(std::size_t a, std::size_t b)
    : TreeError("family members " + std::to_string(a) + " and " + std::to_string(b) + " are disjoint"),
      first(a),
      second(b) {}

EmptyFamilyError::EmptyFamilyError() : TreeError("empty subtree family") {}

NotSubtreeError::NotSubtreeError(std::size_t index)
    : TreeError("family member " + std::to_string(index) + " is empty or not connected"), member(index) {}

ConvexityError::ConvexityError(Vertex missing)
    : TreeError("set is not convex: hull also contains vertex " + std::to_string(missing)),
      witness(missing) {}

NoPathError::NoPathError() : TreeError("target set is unreachable") {}

ColoringError::ColoringError(DirectedEdge a, DirectedEdge b)
    : TreeError("improper coloring at edges " + edge_str(a) + " and " + edge_str(b)), first(a), second(b) {}

FiniteTree::FiniteTree(int vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  if (vertex_count < 0) throw InvalidTreeError("negative vertex count");
  adjacency_.resize(vertex_count);
  // union-find for cycle detection
  std::vector<int> uf(vertex_count);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int v) {
    while (uf[v] != v) v = uf[v] = uf[uf[v]];
    return v;
  };
  for (auto [u, v] : edges) {
    if (u == v) throw InvalidTreeError("self-loop at vertex " + std::to_string(u));
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw InvalidTreeError("edge endpoint out of range: " + std::to_string(u) + " " + std::to_string(v));
    const int ru = find(u), rv = find(v);
    if (ru == rv)
      throw InvalidTreeError("edge " + std::to_string(u) + " " + std::to_string(v) + " closes a cycle");
    uf[ru] = rv;
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
    edges_.push_back(key(u, v));
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  std::sort(edges_.begin(), edges_.end());

  component_id_.assign(vertex_count, -1);
  int next = 0;
  for (Vertex s = 0; s < vertex_count; ++s) {
    if (component_id_[s] >= 0) continue;
    std::vector<Vertex> stack{s};
    component_id_[s] = next;
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : adjacency_[v])
        if (component_id_[w] < 0) {
          component_id_[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
}

const std::vector<Vertex>& FiniteTree::neighbors(Vertex v) const {
  if (!contains(v)) throw std::invalid_argument("unknown vertex " + std::to_string(v));
  return adjacency_[v];
}

bool FiniteTree::has_edge(Vertex u, Vertex v) const {
  if (!contains(u) || !contains(v)) return false;
  return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
}

std::vector<DirectedEdge> FiniteTree::directed_edges() const {
  std::vector<DirectedEdge> out;
  out.reserve(edges_.size() * 2);
  for (auto [u, v] : edges_) {
    out.push_back({u, v});
    out.push_back({v, u});
  }
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet FiniteTree::component(Vertex v) const {
  if (!contains(v)) throw std::invalid_argument("unknown vertex " + std::to_string(v));
  VertexSet out;
  for (Vertex w = 0; w < vertex_count(); ++w)
    if (component_id_[w] == component_id_[v]) out.push_back(w);
  return out;
}

VertexSet half_space(const FiniteTree& tree, DirectedEdge e) {
  require_edge(tree, e);
  return to_set(reach_avoiding(tree, e.origin, e.origin, e.terminus));
}

bool edge_leq(const FiniteTree& tree, DirectedEdge e0, DirectedEdge e1) {
  require_edge(tree, e0);
  require_edge(tree, e1);
  const auto a = reach_avoiding(tree, e0.origin, e0.origin, e0.terminus);
  const auto b = reach_avoiding(tree, e1.origin, e1.origin, e1.terminus);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

std::optional<std::pair<DirectedEdge, DirectedEdge>> incoherent_pair(
    const FiniteTree& tree, const std::vector<DirectedEdge>& edges) {
  std::vector<std::vector<char>> terminus_sides;
  terminus_sides.reserve(edges.size());
  for (const auto& e : edges) {
    require_edge(tree, e);
    terminus_sides.push_back(reach_avoiding(tree, e.terminus, e.origin, e.terminus));
  }
  const auto& comp = tree.component_ids();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      if (comp[edges[i].origin] != comp[edges[j].origin]) continue;
      bool meet = false;
      for (std::size_t v = 0; v < terminus_sides[i].size() && !meet; ++v)
        meet = terminus_sides[i][v] && terminus_sides[j][v];
      if (!meet) return std::make_pair(edges[i], edges[j]);
    }
  }
  return std::nullopt;
}

bool is_coherent(const FiniteTree& tree, const std::vector<DirectedEdge>& edges) {
  return !incoherent_pair(tree, edges).has_value();
}

CoherentTransversal coherent_transversal(const FiniteTree& tree, std::vector<DirectedEdge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (auto bad = incoherent_pair(tree, edges)) throw CoherenceViolation(bad->first, bad->second);

  std::vector<std::vector<char>> sides;
  for (const auto& e : edges) sides.push_back(reach_avoiding(tree, e.origin, e.origin, e.terminus));
  auto subset = [&](std::size_t i, std::size_t j) {
    for (std::size_t v = 0; v < sides[i].size(); ++v)
      if (sides[i][v] && !sides[j][v]) return false;
    return true;
  };

  CoherentTransversal out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < edges.size() && maximal; ++j)
      if (j != i && subset(i, j)) maximal = false;  // distinct edges never share a half-space
    if (maximal) {
      out.maximal.push_back(edges[i]);
      out.classes.push_back(to_set(sides[i]));
      out.representatives.push_back(edges[i].origin);
    }
  }
  std::sort(out.representatives.begin(), out.representatives.end());
  return out;
}

Vertex helly_common_vertex(const FiniteTree& tree, const SubtreeFamily& family) {
  if (family.empty()) throw EmptyFamilyError();
  const int n = tree.vertex_count();
  std::vector<std::vector<char>> masks;
  masks.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].empty()) throw NotSubtreeError(i);
    auto mask = to_mask(tree, family[i]);
    if (!is_connected_subset(tree, mask, family[i].front())) throw NotSubtreeError(i);
    masks.push_back(std::move(mask));
  }
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t j = i + 1; j < masks.size(); ++j) {
      bool meet = false;
      for (int v = 0; v < n && !meet; ++v) meet = masks[i][v] && masks[j][v];
      if (!meet) throw IntersectionViolation(i, j);
    }

  // H = directed edges whose origin side misses some member.  H is closed downward
  // under the half-space order, so an edge of H with no immediate successor in H is
  // maximal, and its terminus lies in every member.
  const Rooted rooted = root_all(tree);
  std::vector<std::vector<int>> below(masks.size(), std::vector<int>(n, 0));
  std::vector<int> total(masks.size(), 0);
  for (std::size_t m = 0; m < masks.size(); ++m) {
    for (auto it = rooted.order.rbegin(); it != rooted.order.rend(); ++it) {
      const Vertex v = *it;
      below[m][v] += masks[m][v];
      if (rooted.parent[v] >= 0) below[m][rooted.parent[v]] += below[m][v];
    }
    total[m] = static_cast<int>(family[m].size());
  }
  auto in_h = [&](Vertex o, Vertex t) {
    for (std::size_t m = 0; m < masks.size(); ++m) {
      // all members share the component of family[0]
      if (rooted.parent[o] == t) {
        if (below[m][o] == 0) return true;  // origin side is the subtree of o
      } else if (below[m][t] == total[m]) {
        return true;  // origin side is everything outside the subtree of t
      }
    }
    return false;
  };

  const Vertex anchor = family.front().front();
  std::optional<Vertex> common;
  for (Vertex o : tree.component(anchor)) {
    for (Vertex t : tree.neighbors(o)) {
      if (!in_h(o, t)) continue;
      bool has_successor = false;
      for (Vertex w : tree.neighbors(t))
        if (w != o && in_h(t, w)) {
          has_successor = true;
          break;
        }
      if (!has_successor) {
        common = t;
        break;
      }
    }
    if (common) break;
  }
  if (!common) common = anchor;  // H empty: every member is the whole component

  // The common part is itself a subtree; return its least vertex.
  auto in_all = [&](Vertex v) {
    for (const auto& m : masks)
      if (!m[v]) return false;
    return true;
  };
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{*common};
  seen[*common] = 1;
  Vertex best = *common;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    best = std::min(best, v);
    for (Vertex w : tree.neighbors(v))
      if (!seen[w] && in_all(w)) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return best;
}

VertexSet convex_hull(const FiniteTree& tree, const VertexSet& set) {
  const int n = tree.vertex_count();
  const auto in_set = to_mask(tree, set);
  // Within each component touched by the set, strip leaves outside the set.
  std::vector<char> alive(n, 0);
  const auto& comp = tree.component_ids();
  std::vector<char> touched_comp(n, 0);
  for (Vertex v : set) touched_comp[comp[v]] = 1;
  std::vector<int> degree(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (!touched_comp[comp[v]]) continue;
    alive[v] = 1;
    degree[v] = static_cast<int>(tree.neighbors(v).size());
  }
  std::vector<Vertex> leaves;
  for (Vertex v = 0; v < n; ++v)
    if (alive[v] && !in_set[v] && degree[v] <= 1) leaves.push_back(v);
  while (!leaves.empty()) {
    const Vertex v = leaves.back();
    leaves.pop_back();
    if (!alive[v]) continue;
    alive[v] = 0;
    for (Vertex w : tree.neighbors(v)) {
      if (!alive[w]) continue;
      if (--degree[w] <= 1 && !in_set[w]) leaves.push_back(w);
    }
  }
  return to_set(alive);
}

void check_proper_coloring(const FiniteTree& tree, const EdgeColoring& coloring) {
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    std::map<std::uint64_t, Vertex> seen;
    for (Vertex w : tree.neighbors(v)) {
      auto it = coloring.find(key(v, w));
      if (it == coloring.end()) throw ColoringError({v, w}, {v, w});
      auto [pos, fresh] = seen.emplace(it->second, w);
      if (!fresh) throw ColoringError({v, pos->second}, {v, w});
    }
  }
}

std::vector<Vertex> lex_least_path(const FiniteTree& tree, const EdgeColoring& coloring, Vertex x,
                                   const VertexSet& targets) {
  check_proper_coloring(tree, coloring);
  const auto is_target = to_mask(tree, targets);
  if (!tree.contains(x)) throw std::invalid_argument("unknown vertex " + std::to_string(x));
  const int n = tree.vertex_count();
  std::vector<int> dist(n, -1);
  std::vector<Vertex> parent(n, -1);
  std::queue<Vertex> q;
  dist[x] = 0;
  q.push(x);
  int best_dist = -1;
  std::vector<Vertex> candidates;
  while (!q.empty()) {
    const Vertex v = q.front();
    q.pop();
    if (best_dist >= 0 && dist[v] > best_dist) break;
    if (is_target[v]) {
      best_dist = dist[v];
      candidates.push_back(v);
      continue;
    }
    for (Vertex w : tree.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        parent[w] = v;
        q.push(w);
      }
  }
  if (candidates.empty()) throw NoPathError();

  auto path_to = [&](Vertex end) {
    std::vector<Vertex> path;
    for (Vertex v = end; v != -1; v = parent[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
  };
  auto colors_of = [&](const std::vector<Vertex>& path) {
    std::vector<std::uint64_t> word;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) word.push_back(coloring.at(key(path[i], path[i + 1])));
    return word;
  };
  std::vector<Vertex> best = path_to(candidates.front());
  auto best_word = colors_of(best);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    auto path = path_to(candidates[i]);
    auto word = colors_of(path);
    if (word < best_word) {
      best = std::move(path);
      best_word = std::move(word);
    }
  }
  return best;
}

std::vector<PrunedEdge> prune_rho_finite(const FiniteTree& tree, const VertexWeights& weights,
                                         const VertexSet& convex, const Weight& bound) {
  const auto hull = convex_hull(tree, convex);
  if (hull != convex) {
    for (Vertex v : hull)
      if (!std::binary_search(convex.begin(), convex.end(), v)) throw ConvexityError(v);
  }
  const auto in_y = to_mask(tree, convex);
  const auto& comp = tree.component_ids();
  std::vector<char> saturated(tree.vertex_count(), 0);
  for (Vertex v : convex) saturated[comp[v]] = 1;

  std::vector<PrunedEdge> out;
  for (const auto& e : tree.directed_edges()) {
    if (!saturated[comp[e.origin]]) continue;
    const auto side = reach_avoiding(tree, e.origin, e.origin, e.terminus);
    bool avoids = true;
    Weight mass;
    for (Vertex v = 0; v < tree.vertex_count(); ++v) {
      if (!side[v]) continue;
      if (in_y[v]) {
        avoids = false;
        break;
      }
      auto it = weights.find(v);
      if (it == weights.end() || it->second.is_zero() || it->second.is_infinite())
        throw std::invalid_argument("vertex " + std::to_string(v) + " needs a positive finite weight");
      mass += it->second;
    }
    if (!avoids) continue;
    out.push_back({e, mass, mass > bound});
  }
  return out;
}

}  // namespace rntopo::tree
