#pragma once

#include "compogen/generator.hpp"
#include "compogen/io.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace compogen {

struct CompositionNode;
using NodePtr = std::shared_ptr<const CompositionNode>;

/// A constant block of one tile. Used for abstract tiles such as road or
/// garden that expand to uniform regions rather than to another generator.
struct FillTile {
  std::string name;
  Rgb color;
  std::string voxel_name;
  friend bool operator==(const FillTile&, const FillTile&) = default;
};

struct CompositionNode {
  std::string name;
  std::optional<GeneratorSpec> generator;  // exactly one of generator / fill
  std::optional<FillTile> fill;
  std::string source;  // generator file path as written in a tree document, if any

  // Per-axis expansion of one abstract tile, in units of the child's abstract
  // tiles. Empty means all ones.
  std::vector<int> subtile;
  // Height of the 3D column a 2D parent cell expands to when children are 3D.
  int child_height = 1;
  // Fills the space above 2D children inside a lifted column.
  std::string lift_fill = "air";
  bool coalesce = true;
  std::map<TileId, NodePtr> mapping;

  bool is_leaf() const { return mapping.empty(); }
};

NodePtr make_leaf(std::string name, GeneratorSpec spec);
NodePtr make_fill(std::string name, FillTile tile);
NodePtr make_fill(const std::string& name);
NodePtr make_node(std::string name, GeneratorSpec spec, std::vector<int> subtile,
                  std::map<TileId, NodePtr> mapping, bool coalesce = true, int child_height = 1);

struct Placement {
  int call = 0;          // id of the compose call that made this placement, DFS order
  int depth = 0;         // 0 for placements of the root
  Coord region_origin;   // absolute region of the parent call
  Coord region_extent;
  Coord origin;          // absolute origin of the child block
  Coord extent;          // size of the child block
  TileId abstract_tile = 0;
  std::string child;
};

struct ComposeOptions {
  bool force_no_coalesce = false;
  std::function<void(const Placement&)> on_placement;
};

// Output dimensionality of the subtree; 0 for a fill node, which adapts.
int output_ndim(const CompositionNode& node);

// Factor between a node's abstract map and its final output, per axis. For a 2D
// node with 3D children the z entry is the column height.
Coord effective_scale(const CompositionNode& node);

Shape total_size(const CompositionNode& node, const Shape& abstract_size);

Tileset output_tileset(const CompositionNode& node);

Level compose(const CompositionNode& node, const Shape& size, std::uint64_t seed,
              const ComposeOptions& options = {});

NodePtr rebind(const NodePtr& node, TileId tile, NodePtr child);
NodePtr rebind(const NodePtr& node, const std::string& tile, NodePtr child);

// Depth counted in nodes along the longest root-to-leaf path.
int tree_depth(const CompositionNode& node);

Json save_tree(const NodePtr& root);
// Relative generator paths resolve against base_dir.
NodePtr load_tree(const Json& doc, const std::filesystem::path& base_dir = {});
NodePtr load_tree_file(const std::filesystem::path& path);

}  // namespace compogen
