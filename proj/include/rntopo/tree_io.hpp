#pragma once

// Line-oriented text format for finite trees:
//
//   tree <n>
//   edge <u> <v> [color]
//   weight <v> <num/den>
//
// Blank lines and lines starting with '#' are ignored.

#include "rntopo/tree.hpp"

#include <iosfwd>
#include <string>

namespace rntopo::tree {

struct TreeDocument {
  FiniteTree tree{0, {}};
  EdgeColoring coloring;   // only the edges that carried a color
  VertexWeights weights;
};

/// Throws std::invalid_argument naming the offending line.
TreeDocument parse_tree_document(std::istream& in);
TreeDocument load_tree_document(const std::string& path);
void write_tree_document(std::ostream& out, const TreeDocument& doc);

}  // namespace rntopo::tree
