#include "compogen/io.hpp"

#include "compogen/errors.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace compogen {

namespace {

const char* role_name(neat::NodeRole r) {
  switch (r) {
    case neat::NodeRole::Input: return "input";
    case neat::NodeRole::Bias: return "bias";
    case neat::NodeRole::Output: return "output";
    case neat::NodeRole::Hidden: return "hidden";
  }
  return "hidden";
}

neat::NodeRole role_from_name(const std::string& s) {
  if (s == "input") return neat::NodeRole::Input;
  if (s == "bias") return neat::NodeRole::Bias;
  if (s == "output") return neat::NodeRole::Output;
  if (s == "hidden") return neat::NodeRole::Hidden;
  throw FormatError("unknown node role '" + s + "'");
}

template <typename T>
T get_as(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw FormatError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + ": bad value for '" + key + "': " + e.what());
  }
}

Rgb rgb_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("colors are [r, g, b] triples");
  std::array<int, 3> c{};
  for (std::size_t i = 0; i < 3; ++i) {
    c[i] = j[i].get<int>();
    if (c[i] < 0 || c[i] > 255) throw FormatError("color components lie in 0..255");
  }
  return {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
          static_cast<std::uint8_t>(c[2])};
}

Json rgb_to_json(const Rgb& c) { return Json::array({c.r, c.g, c.b}); }

}  // namespace

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw FormatError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw FormatError(where + ": unknown key '" + key + "'");
  }
}

Json tileset_to_json(const Tileset& t) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto id = static_cast<TileId>(i);
    arr.push_back({{"name", t.name(id)}, {"color", rgb_to_json(t.color(id))}, {"voxel", t.voxel_name(id)}});
  }
  return arr;
}

Tileset tileset_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("tileset must be a non-empty array");
  std::vector<std::string> names, voxels;
  std::vector<Rgb> colors;
  for (const auto& e : j) {
    if (e.is_string()) {
      names.push_back(e.get<std::string>());
      colors.push_back(default_color(names.back()));
      voxels.push_back(names.back());
      continue;
    }
    reject_unknown_keys(e, {"name", "color", "voxel"}, "tileset entry");
    names.push_back(get_as<std::string>(e, "name", "tileset entry"));
    colors.push_back(e.contains("color") ? rgb_from_json(e["color"]) : default_color(names.back()));
    voxels.push_back(e.contains("voxel") ? e["voxel"].get<std::string>() : names.back());
  }
  try {
    return Tileset(std::move(names), std::move(colors), std::move(voxels));
  } catch (const TilesetError& e) {
    throw FormatError(e.what());
  }
}

Json genome_to_json(const neat::Genome& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes) nodes.push_back({{"id", n.id}, {"role", role_name(n.role)}});
  Json conns = Json::array();
  for (const auto& c : g.connections)
    conns.push_back({{"innov", c.innovation}, {"from", c.from}, {"to", c.to}, {"weight", c.weight},
                     {"enabled", c.enabled}});
  return {{"nodes", nodes}, {"connections", conns}};
}

neat::Genome genome_from_json(const Json& j) {
  reject_unknown_keys(j, {"nodes", "connections"}, "genome");
  neat::Genome g;
  for (const auto& n : j.at("nodes"))
    g.nodes.push_back({get_as<int>(n, "id", "genome node"),
                       role_from_name(get_as<std::string>(n, "role", "genome node"))});
  for (const auto& c : j.at("connections"))
    g.connections.push_back({get_as<int>(c, "innov", "genome connection"),
                             get_as<int>(c, "from", "genome connection"),
                             get_as<int>(c, "to", "genome connection"),
                             get_as<double>(c, "weight", "genome connection"),
                             get_as<bool>(c, "enabled", "genome connection")});
  std::sort(g.nodes.begin(), g.nodes.end(), [](auto& a, auto& b) { return a.id < b.id; });
  std::sort(g.connections.begin(), g.connections.end(),
            [](auto& a, auto& b) { return a.innovation < b.innovation; });
  for (const auto& c : g.connections)
    if (!g.has_node(c.from) || !g.has_node(c.to))
      throw FormatError("genome connection references a missing node");
  if (!neat::is_acyclic(g)) throw FormatError("genome contains a cycle");
  return g;
}

Json gen_params_to_json(const GenParams& p, const Tileset& tileset) {
  return {{"context_size", p.context_size},
          {"one_hot", p.one_hot},
          {"num_random_vars", p.num_random_vars},
          {"perturb_size", p.perturb_size},
          {"iterations", p.iterations},
          {"input_center_tile", p.input_center_tile},
          {"start", p.start == StartPolicy::Random ? "random" : "default"},
          {"default_tile", tileset.name(p.default_tile)}};
}

GenParams gen_params_from_json(const Json& j, const Tileset& tileset) {
  reject_unknown_keys(j,
                      {"context_size", "one_hot", "num_random_vars", "perturb_size", "iterations",
                       "input_center_tile", "start", "default_tile"},
                      "generator params");
  GenParams p;
  p.context_size = j.value("context_size", p.context_size);
  p.one_hot = j.value("one_hot", p.one_hot);
  p.num_random_vars = j.value("num_random_vars", p.num_random_vars);
  p.perturb_size = j.value("perturb_size", p.perturb_size);
  p.iterations = j.value("iterations", p.iterations);
  p.input_center_tile = j.value("input_center_tile", p.input_center_tile);
  const auto start = j.value("start", std::string("random"));
  if (start == "random") {
    p.start = StartPolicy::Random;
  } else if (start == "default") {
    p.start = StartPolicy::DefaultTile;
  } else {
    throw FormatError("start must be 'random' or 'default', got '" + start + "'");
  }
  if (j.contains("default_tile")) {
    auto t = tileset.find(j["default_tile"].get<std::string>());
    if (!t) throw FormatError("default_tile is not in the tileset");
    p.default_tile = *t;
  }
  return p;
}

Json generator_to_json(const GeneratorSpec& spec) {
  return {{"ndim", spec.ndim},
          {"tileset", tileset_to_json(spec.tileset)},
          {"params", gen_params_to_json(spec.params, spec.tileset)},
          {"genome", genome_to_json(spec.genome)}};
}

GeneratorSpec generator_from_json(const Json& j) {
  reject_unknown_keys(j, {"ndim", "tileset", "params", "genome"}, "generator");
  const Tileset tileset = tileset_from_json(j.at("tileset"));
  GeneratorSpec spec{genome_from_json(j.at("genome")), gen_params_from_json(j.at("params"), tileset),
                     tileset, get_as<int>(j, "ndim", "generator")};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("invalid generator: ") + e.what());
  }
  return spec;
}

Json level_to_json(const Level& level) {
  Json colors = Json::array();
  Json voxels = Json::array();
  for (std::size_t i = 0; i < level.tileset.size(); ++i) {
    colors.push_back(rgb_to_json(level.tileset.color(static_cast<TileId>(i))));
    voxels.push_back(level.tileset.voxel_name(static_cast<TileId>(i)));
  }
  return {{"dims", level.grid.shape().to_vector()},
          {"tileset", level.tileset.names()},
          {"tiles", std::vector<TileId>(level.grid.cells().begin(), level.grid.cells().end())},
          {"colors", colors},
          {"voxel_names", voxels}};
}

Level level_from_json(const Json& j) {
  reject_unknown_keys(j, {"dims", "tileset", "tiles", "colors", "voxel_names"}, "level");
  const auto names = get_as<std::vector<std::string>>(j, "tileset", "level");
  std::vector<Rgb> colors;
  std::vector<std::string> voxels;
  if (j.contains("colors")) {
    for (const auto& c : j["colors"]) colors.push_back(rgb_from_json(c));
  } else {
    for (const auto& n : names) colors.push_back(default_color(n));
  }
  voxels = j.contains("voxel_names") ? j["voxel_names"].get<std::vector<std::string>>() : names;
  try {
    Tileset tileset(names, colors, voxels);
    const auto dims = get_as<std::vector<int>>(j, "dims", "level");
    Grid grid(Shape::of(dims), get_as<std::vector<TileId>>(j, "tiles", "level"));
    validate_tiles(grid, tileset);
    return {std::move(grid), std::move(tileset)};
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("invalid level: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write '" + path.string() + "'");
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Grid remap_tiles(const Level& level, const Tileset& target) {
  std::vector<TileId> map(level.tileset.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& name = level.tileset.name(static_cast<TileId>(i));
    auto t = target.find(name);
    if (!t) throw TilesetError("tile '" + name + "' is missing from the target tileset");
    map[i] = *t;
  }
  Grid out = level.grid;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = map[static_cast<std::size_t>(out[i])];
  return out;
}

}  // namespace compogen
