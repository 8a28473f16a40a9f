#include "compogen/composer.hpp"

#include "compogen/errors.hpp"

#include <set>

namespace compogen {

namespace {

const GeneratorSpec& spec_of(const CompositionNode& node) {
  if (!node.generator) throw StructureError("node '" + node.name + "' has no generator");
  return *node.generator;
}

Coord subtile_of(const CompositionNode& node) {
  Coord s{1, 1, 1};
  for (std::size_t a = 0; a < node.subtile.size() && a < 3; ++a) s[a] = node.subtile[a];
  return s;
}

bool is_lifted(const CompositionNode& node) {
  if (node.is_leaf() || spec_of(node).ndim != 2) return false;
  for (const auto& [_, child] : node.mapping)
    if (output_ndim(*child) == 3) return true;
  return false;
}

void check_node(const CompositionNode& node) {
  if (node.generator.has_value() == node.fill.has_value())
    throw StructureError("node '" + node.name + "' needs exactly one of generator or fill");
  if (node.fill && !node.mapping.empty()) throw StructureError("fill node '" + node.name + "' cannot have children");
  if (node.child_height < 1) throw StructureError("node '" + node.name + "': child_height must be positive");
  if (!node.generator) return;
  const int ndim = node.generator->ndim;
  if (!node.subtile.empty() && static_cast<int>(node.subtile.size()) != ndim)
    throw StructureError("node '" + node.name + "': subtile_size needs one entry per axis");
  for (int s : node.subtile)
    if (s < 1) throw StructureError("node '" + node.name + "': subtile_size entries must be positive");
  for (const auto& [tile, child] : node.mapping) {
    if (!child) throw StructureError("node '" + node.name + "' maps a tile to nothing");
    if (!node.generator->tileset.contains(tile)) throw TileError("mapping tile outside the generator tileset");
  }
}

struct Composer {
  const ComposeOptions& options;
  int next_call = 0;

  Level run(const CompositionNode& node, const Shape& size, std::uint64_t seed, const Coord& at, int depth) {
    check_node(node);
    const int call = next_call++;
    if (node.fill) {
      return {Grid(size, 0), Tileset({node.fill->name}, {node.fill->color}, {node.fill->voxel_name})};
    }
    const GeneratorSpec& spec = *node.generator;
    if (node.is_leaf()) {
      if (size.ndim() != spec.ndim)
        throw DimensionError("node '" + node.name + "' generates " + std::to_string(spec.ndim) +
                             "D levels but was asked for " + size.str());
      return {generate(spec, size, seed), spec.tileset};
    }

    const bool lifted = is_lifted(node);
    const int out_ndim = lifted ? 3 : spec.ndim;
    if (size.ndim() != out_ndim)
      throw DimensionError("node '" + node.name + "' composes " + std::to_string(out_ndim) +
                           "D levels but was asked for " + size.str());
    const Coord scale = effective_scale(node);
    Coord abstract{1, 1, 1};
    for (int a = 0; a < out_ndim; ++a) {
      if (size[a] % scale[static_cast<std::size_t>(a)] != 0)
        throw SizeError("size " + size.str() + " is not divisible by the subtile scale of node '" + node.name + "'");
      abstract[static_cast<std::size_t>(a)] = size[a] / scale[static_cast<std::size_t>(a)];
    }
    const Shape abstract_shape = spec.ndim == 2 ? Shape(abstract[0], abstract[1])
                                                : Shape(abstract[0], abstract[1], abstract[2]);
    const Grid map = generate(spec, abstract_shape, derive_seed(seed, 0));

    const Tileset tiles = output_tileset(node);
    TileId background = 0;
    if (lifted) background = tiles.require(node.lift_fill);
    Grid out(size, background);

    const bool merge = node.coalesce && !options.force_no_coalesce;
    const auto rects = merge ? coalesce(map) : unit_rects(map);
    for (std::size_t p = 0; p < rects.size(); ++p) {
      const auto& r = rects[p];
      auto it = node.mapping.find(r.tile);
      if (it == node.mapping.end())
        throw MappingError("node '" + node.name + "' emitted tile '" + spec.tileset.name(r.tile) +
                           "' which has no mapping");
      const CompositionNode& child = *it->second;
      Coord origin{0, 0, 0}, extent{1, 1, 1};
      for (std::size_t a = 0; a < 3; ++a) {
        origin[a] = r.origin[a] * scale[a];
        extent[a] = r.extent[a] * scale[a];
      }
      // Under a lift, fills and 2D children become the ground layer of their column.
      const int natural = output_ndim(child);
      const int child_ndim = natural == 0 ? (lifted ? 2 : out_ndim) : natural;
      if (child_ndim > out_ndim || (!lifted && child_ndim != out_ndim))
        throw StructureError("child '" + child.name + "' does not match the dimensionality of '" + node.name + "'");
      const Shape child_size = child_ndim == 2 ? Shape(extent[0], extent[1]) : Shape(extent[0], extent[1], extent[2]);

      if (options.on_placement) {
        Coord abs_origin{at[0] + origin[0], at[1] + origin[1], at[2] + origin[2]};
        options.on_placement({call, depth, at, size.extents(), abs_origin, child_size.extents(), r.tile, child.name});
      }
      const Coord child_at{at[0] + origin[0], at[1] + origin[1], at[2] + origin[2]};
      const Level sub = run(child, child_size, derive_seed(seed, 1 + static_cast<std::uint64_t>(p)), child_at, depth + 1);

      std::vector<TileId> remap(sub.tileset.size());
      for (std::size_t t = 0; t < remap.size(); ++t) remap[t] = tiles.require(sub.tileset.name(static_cast<TileId>(t)));
      const Shape& cs = sub.grid.shape();
      for (int z = 0; z < cs[2]; ++z)
        for (int y = 0; y < cs[1]; ++y)
          for (int x = 0; x < cs[0]; ++x)
            out.at({origin[0] + x, origin[1] + y, origin[2] + z}) =
                remap[static_cast<std::size_t>(sub.grid.at({x, y, z}))];
    }
    return {std::move(out), tiles};
  }
};

void collect_names(const CompositionNode& node, std::vector<std::string>& names, std::vector<Rgb>& colors,
                   std::vector<std::string>& voxels, std::set<std::string>& seen) {
  auto add = [&](const std::string& n, const Rgb& c, const std::string& v) {
    if (seen.insert(n).second) {
      names.push_back(n);
      colors.push_back(c);
      voxels.push_back(v);
    }
  };
  if (node.fill) {
    add(node.fill->name, node.fill->color, node.fill->voxel_name);
    return;
  }
  const auto& spec = spec_of(node);
  if (node.is_leaf()) {
    for (std::size_t t = 0; t < spec.tileset.size(); ++t) {
      const auto id = static_cast<TileId>(t);
      add(spec.tileset.name(id), spec.tileset.color(id), spec.tileset.voxel_name(id));
    }
    return;
  }
  for (const auto& [_, child] : node.mapping) collect_names(*child, names, colors, voxels, seen);
  if (is_lifted(node)) add(node.lift_fill, default_color(node.lift_fill), node.lift_fill);
}

void require_name(const std::string& name) {
  if (name.empty()) throw StructureError("tree nodes need a name");
}

}  // namespace

NodePtr make_leaf(std::string name, GeneratorSpec spec) {
  spec.validate();
  auto n = std::make_shared<CompositionNode>();
  n->name = std::move(name);
  n->generator = std::move(spec);
  return n;
}

NodePtr make_fill(std::string name, FillTile tile) {
  auto n = std::make_shared<CompositionNode>();
  n->name = std::move(name);
  n->fill = std::move(tile);
  return n;
}

NodePtr make_fill(const std::string& name) { return make_fill(name, FillTile{name, default_color(name), name}); }

NodePtr make_node(std::string name, GeneratorSpec spec, std::vector<int> subtile, std::map<TileId, NodePtr> mapping,
                  bool coalesce_tiles, int child_height) {
  spec.validate();
  auto n = std::make_shared<CompositionNode>();
  n->name = std::move(name);
  n->generator = std::move(spec);
  n->subtile = std::move(subtile);
  n->mapping = std::move(mapping);
  n->coalesce = coalesce_tiles;
  n->child_height = child_height;
  check_node(*n);
  effective_scale(*n);
  return n;
}

int output_ndim(const CompositionNode& node) {
  if (node.fill) return 0;
  const int own = spec_of(node).ndim;
  int best = own;
  for (const auto& [_, child] : node.mapping) best = std::max(best, output_ndim(*child));
  return best;
}

Coord effective_scale(const CompositionNode& node) {
  check_node(node);
  if (node.is_leaf()) return {1, 1, 1};
  const bool lifted = is_lifted(node);
  std::optional<Coord> common;
  for (const auto& [_, child] : node.mapping) {
    if (child->is_leaf()) continue;
    Coord s = effective_scale(*child);
    if (lifted) {
      if (output_ndim(*child) == 3 && node.child_height % s[2] != 0)
        throw StructureError("child_height of '" + node.name + "' is not divisible by the scale of '" + child->name + "'");
      s[2] = 1;
    }
    if (common && *common != s)
      throw StructureError("children of '" + node.name + "' expand at different scales; unsupported");
    common = s;
  }
  const Coord c = common.value_or(Coord{1, 1, 1});
  const Coord sub = subtile_of(node);
  Coord out{sub[0] * c[0], sub[1] * c[1], sub[2] * c[2]};
  if (lifted) out[2] = node.child_height;
  return out;
}

Shape total_size(const CompositionNode& node, const Shape& abstract_size) {
  if (node.fill || node.is_leaf()) return abstract_size;
  const Coord s = effective_scale(node);
  if (is_lifted(node)) {
    if (abstract_size.ndim() != 2) throw DimensionError("abstract size of a 2D node must be 2D");
    return Shape(abstract_size[0] * s[0], abstract_size[1] * s[1], s[2]);
  }
  if (abstract_size.ndim() != spec_of(node).ndim) throw DimensionError("abstract size does not match the generator");
  if (abstract_size.ndim() == 2) return Shape(abstract_size[0] * s[0], abstract_size[1] * s[1]);
  return Shape(abstract_size[0] * s[0], abstract_size[1] * s[1], abstract_size[2] * s[2]);
}

Tileset output_tileset(const CompositionNode& node) {
  std::vector<std::string> names, voxels;
  std::vector<Rgb> colors;
  std::set<std::string> seen;
  collect_names(node, names, colors, voxels, seen);
  return Tileset(std::move(names), std::move(colors), std::move(voxels));
}

Level compose(const CompositionNode& node, const Shape& size, std::uint64_t seed, const ComposeOptions& options) {
  Composer c{options};
  return c.run(node, size, seed, {0, 0, 0}, 0);
}

NodePtr rebind(const NodePtr& node, TileId tile, NodePtr child) {
  if (!node) throw StructureError("cannot rebind a null node");
  if (node->is_leaf()) throw StructureError("node '" + node->name + "' is a leaf and has no mapping to rebind");
  if (!node->generator->tileset.contains(tile)) throw TileError("rebind tile outside the generator tileset");
  if (!child) throw StructureError("rebind needs a child node");
  auto copy = std::make_shared<CompositionNode>(*node);
  copy->mapping[tile] = std::move(child);
  effective_scale(*copy);  // rejects heterogeneous scales up front
  return copy;
}

NodePtr rebind(const NodePtr& node, const std::string& tile, NodePtr child) {
  if (!node || !node->generator) throw StructureError("cannot rebind a fill or null node");
  return rebind(node, node->generator->tileset.require(tile), std::move(child));
}

int tree_depth(const CompositionNode& node) {
  int deepest = 0;
  for (const auto& [_, child] : node.mapping) deepest = std::max(deepest, tree_depth(*child));
  return 1 + deepest;
}

// ---- tree documents ----

namespace {

struct Saver {
  Json nodes = Json::object();
  std::map<const CompositionNode*, std::string> names;

  std::string visit(const NodePtr& n) {
    if (auto it = names.find(n.get()); it != names.end()) return it->second;
    require_name(n->name);
    std::string name = n->name;
    for (int k = 2; nodes.contains(name); ++k) name = n->name + "_" + std::to_string(k);
    names[n.get()] = name;
    nodes[name] = Json::object();  // reserve the slot so preorder is kept

    Json j;
    if (n->fill) {
      j["fill"] = {{"name", n->fill->name},
                   {"color", {n->fill->color.r, n->fill->color.g, n->fill->color.b}},
                   {"voxel", n->fill->voxel_name}};
    } else {
      if (!n->source.empty()) {
        j["generator"] = n->source;
      } else {
        j["generator"] = generator_to_json(*n->generator);
      }
      if (!n->is_leaf()) {
        j["subtile_size"] = n->subtile.empty() ? std::vector<int>(static_cast<std::size_t>(n->generator->ndim), 1)
                                               : n->subtile;
        if (is_lifted(*n)) {
          j["child_height"] = n->child_height;
          j["lift_fill"] = n->lift_fill;
        }
        Json mapping = Json::object();
        for (const auto& [tile, child] : n->mapping) mapping[n->generator->tileset.name(tile)] = visit(child);
        j["mapping"] = mapping;
        j["coalesce"] = n->coalesce;
      }
    }
    nodes[name] = j;
    return name;
  }
};

struct Loader {
  const Json& nodes;
  std::filesystem::path base;
  std::map<std::string, NodePtr> done;
  std::set<std::string> active;

  GeneratorSpec load_generator(const Json& ref, const std::string& node) {
    if (ref.is_object()) return generator_from_json(ref);
    if (!ref.is_string()) throw FormatError("node '" + node + "': generator must be a path or an object");
    std::filesystem::path p = ref.get<std::string>();
    if (p.is_relative()) p = base / p;
    try {
      return generator_from_json(read_json_file(p));
    } catch (const FileError& e) {
      throw FormatError("node '" + node + "' references a missing generator: " + e.what());
    }
  }

  NodePtr get(const std::string& name) {
    if (auto it = done.find(name); it != done.end()) return it->second;
    if (!nodes.contains(name)) throw FormatError("tree references unknown node '" + name + "'");
    if (!active.insert(name).second) throw FormatError("tree has a cycle through node '" + name + "'");
    const Json& j = nodes[name];
    reject_unknown_keys(j, {"generator", "fill", "subtile_size", "child_height", "lift_fill", "mapping", "coalesce"},
                        "node '" + name + "'");
    auto n = std::make_shared<CompositionNode>();
    n->name = name;
    try {
      if (j.contains("fill")) {
        const Json& f = j["fill"];
        reject_unknown_keys(f, {"name", "color", "voxel"}, "fill of node '" + name + "'");
        const auto tile = f.at("name").get<std::string>();
        FillTile ft{tile, default_color(tile), f.value("voxel", tile)};
        if (f.contains("color")) {
          const auto c = f["color"].get<std::array<int, 3>>();
          ft.color = {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]), static_cast<std::uint8_t>(c[2])};
        }
        n->fill = ft;
        if (j.size() != 1) throw FormatError("fill node '" + name + "' takes no other keys");
      } else {
        if (!j.contains("generator")) throw FormatError("node '" + name + "' needs a generator or a fill");
        const Json& ref = j["generator"];
        n->generator = load_generator(ref, name);
        if (ref.is_string()) n->source = ref.get<std::string>();
        n->subtile = j.value("subtile_size", std::vector<int>{});
        n->child_height = j.value("child_height", 1);
        n->lift_fill = j.value("lift_fill", std::string("air"));
        n->coalesce = j.value("coalesce", true);
        if (j.contains("mapping")) {
          for (const auto& [tile, child] : j["mapping"].items()) {
            auto id = n->generator->tileset.find(tile);
            if (!id) throw FormatError("node '" + name + "' maps unknown tile '" + tile + "'");
            n->mapping[*id] = get(child.get<std::string>());
          }
        }
      }
      check_node(*n);
      if (!n->is_leaf()) effective_scale(*n);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("node '" + name + "': " + e.what());
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError("node '" + name + "': " + e.what());
    }
    active.erase(name);
    done[name] = n;
    return n;
  }
};

}  // namespace

Json save_tree(const NodePtr& root) {
  if (!root) throw StructureError("cannot save an empty tree");
  Saver s;
  const std::string name = s.visit(root);
  return {{"root", name}, {"nodes", s.nodes}};
}

NodePtr load_tree(const Json& doc, const std::filesystem::path& base_dir) {
  reject_unknown_keys(doc, {"root", "nodes"}, "tree document");
  if (!doc.contains("root") || !doc["root"].is_string()) throw FormatError("tree document needs a root node name");
  if (!doc.contains("nodes") || !doc["nodes"].is_object()) throw FormatError("tree document needs a nodes object");
  Loader l{doc["nodes"], base_dir, {}, {}};
  return l.get(doc["root"].get<std::string>());
}

NodePtr load_tree_file(const std::filesystem::path& path) {
  return load_tree(read_json_file(path), path.parent_path());
}

}  // namespace compogen
