#include "rntopo/tree_io.hpp"

#include <fstream>
#include <sstream>

namespace rntopo::tree {

TreeDocument parse_tree_document(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<std::pair<Vertex, Vertex>> edges;
  EdgeColoring coloring;
  VertexWeights weights;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("tree document line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "tree") {
      if (n >= 0) fail("duplicate header");
      if (!(ls >> n) || n < 0) fail("expected vertex count");
    } else if (word == "edge") {
      if (n < 0) fail("edge before header");
      Vertex u = 0, v = 0;
      if (!(ls >> u >> v)) fail("expected two endpoints");
      edges.emplace_back(u, v);
      std::uint64_t color = 0;
      if (ls >> color) coloring[{std::min(u, v), std::max(u, v)}] = color;
    } else if (word == "weight") {
      if (n < 0) fail("weight before header");
      Vertex v = 0;
      std::string value;
      if (!(ls >> v >> value)) fail("expected vertex and rational");
      if (v < 0 || v >= n) fail("weight for unknown vertex");
      Weight w = Weight::parse(value);
      if (w.is_zero() || w.is_infinite()) fail("weights must be positive and finite");
      weights[v] = w;
    } else {
      fail("unknown directive '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  if (n < 0) throw std::invalid_argument("tree document: missing 'tree <n>' header");
  try {
    return TreeDocument{FiniteTree(n, edges), std::move(coloring), std::move(weights)};
  } catch (const InvalidTreeError& e) {
    throw std::invalid_argument(std::string("tree document: ") + e.what());
  }
}

TreeDocument load_tree_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file " + path);
  return parse_tree_document(in);
}

void write_tree_document(std::ostream& out, const TreeDocument& doc) {
  out << "tree " << doc.tree.vertex_count() << '\n';
  for (auto [u, v] : doc.tree.edges()) {
    out << "edge " << u << ' ' << v;
    if (auto it = doc.coloring.find({u, v}); it != doc.coloring.end()) out << ' ' << it->second;
    out << '\n';
  }
  for (const auto& [v, w] : doc.weights) out << "weight " << v << ' ' << w.to_string() << '\n';
}

}  // namespace rntopo::tree
