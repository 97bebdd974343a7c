#pragma once

// Exact combinatorics on explicit finite acyclic graphs: half-spaces, the
// half-space order on directed edges, coherent edge sets, the Helly property,
// convex hulls, lexicographically least paths and pruning of light
// half-spaces.  Every precondition is checked; violations throw an error type
// that carries a witness.

#include "rntopo/weight.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rntopo::tree {

/// Vertices are the integers 0..n-1; ties are always broken toward the least.
using Vertex = int;
/// Sorted, duplicate-free.
using VertexSet = std::vector<Vertex>;

struct DirectedEdge {
  Vertex origin = 0;
  Vertex terminus = 0;

  DirectedEdge reversed() const { return {terminus, origin}; }
  friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

struct TreeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidTreeError : TreeError {
  using TreeError::TreeError;
};

struct InvalidEdgeError : TreeError {
  explicit InvalidEdgeError(DirectedEdge e);
  DirectedEdge edge;
};

struct CoherenceViolation : TreeError {
  CoherenceViolation(DirectedEdge a, DirectedEdge b);
  DirectedEdge first, second;
};

struct IntersectionViolation : TreeError {
  IntersectionViolation(std::size_t a, std::size_t b);
  std::size_t first, second;  // indices into the family
};

struct EmptyFamilyError : TreeError {
  EmptyFamilyError();
};

struct NotSubtreeError : TreeError {
  explicit NotSubtreeError(std::size_t index);
  std::size_t member;
};

struct ConvexityError : TreeError {
  explicit ConvexityError(Vertex missing);
  Vertex witness;  // a hull vertex not in the set
};

struct NoPathError : TreeError {
  NoPathError();
};

struct ColoringError : TreeError {
  ColoringError(DirectedEdge a, DirectedEdge b);
  DirectedEdge first, second;  // two edges at a common vertex sharing a color (or a missing color)
};

class FiniteTree {
 public:
  /// Throws InvalidTreeError on loops, unknown endpoints, duplicate edges or cycles.
  FiniteTree(int vertex_count, const std::vector<std::pair<Vertex, Vertex>>& edges);

  int vertex_count() const { return static_cast<int>(adjacency_.size()); }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }
  /// Sorted neighbour list.
  const std::vector<Vertex>& neighbors(Vertex v) const;
  bool has_edge(Vertex u, Vertex v) const;
  bool contains(Vertex v) const { return v >= 0 && v < vertex_count(); }
  /// Both orientations of every edge, sorted.
  std::vector<DirectedEdge> directed_edges() const;
  /// Vertices of the component containing v, sorted.
  VertexSet component(Vertex v) const;
  /// Component index per vertex.
  const std::vector<int>& component_ids() const { return component_id_; }

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::pair<Vertex, Vertex>> edges_;  // normalized u < v, sorted
  std::vector<int> component_id_;
};

/// Proper edge coloring keyed by the normalized (min, max) edge.
using EdgeColoring = std::map<std::pair<Vertex, Vertex>, std::uint64_t>;
/// One subset of vertices per family member.
using SubtreeFamily = std::vector<VertexSet>;
/// Strictly positive rational weight per vertex.
using VertexWeights = std::map<Vertex, Weight>;

VertexSet half_space(const FiniteTree& tree, DirectedEdge e);
bool edge_leq(const FiniteTree& tree, DirectedEdge e0, DirectedEdge e1);
bool is_coherent(const FiniteTree& tree, const std::vector<DirectedEdge>& edges);
/// First pair (in input order) witnessing incoherence, if any.
std::optional<std::pair<DirectedEdge, DirectedEdge>> incoherent_pair(
    const FiniteTree& tree, const std::vector<DirectedEdge>& edges);

struct CoherentTransversal {
  std::vector<DirectedEdge> maximal;  // sorted
  std::vector<VertexSet> classes;     // classes[i] = half_space(maximal[i])
  VertexSet representatives;          // origins of the maximal edges, sorted
};

/// Throws CoherenceViolation for an incoherent set.
CoherentTransversal coherent_transversal(const FiniteTree& tree, std::vector<DirectedEdge> edges);

/// Least vertex common to every member of a pairwise-intersecting family of subtrees.
Vertex helly_common_vertex(const FiniteTree& tree, const SubtreeFamily& family);

/// Union of all geodesics between points of the set, computed per component.
VertexSet convex_hull(const FiniteTree& tree, const VertexSet& set);

/// Checks that the coloring assigns a color to every edge and is proper.
void check_proper_coloring(const FiniteTree& tree, const EdgeColoring& coloring);

/// Shortest path from x into `targets` whose color word is lexicographically least.
std::vector<Vertex> lex_least_path(const FiniteTree& tree, const EdgeColoring& coloring, Vertex x,
                                   const VertexSet& targets);

struct PrunedEdge {
  DirectedEdge edge;
  Weight mass;           // total weight of half_space(edge)
  bool exceeds_bound = false;
};

/// Directed edges in the components meeting a convex set `convex` whose origin half-space
/// avoids it, with the exact mass of that half-space.  Throws ConvexityError.
std::vector<PrunedEdge> prune_rho_finite(const FiniteTree& tree, const VertexWeights& weights,
                                         const VertexSet& convex, const Weight& bound);

}  // namespace rntopo::tree
