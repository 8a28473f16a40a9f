#pragma once

#include "compogen/generator.hpp"
#include "compogen/grid.hpp"
#include "compogen/neat.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace compogen {

using Json = nlohmann::ordered_json;

/// A grid together with the tileset its indices refer to.
struct Level {
  Grid grid;
  Tileset tileset;
  friend bool operator==(const Level&, const Level&) = default;
};

Json tileset_to_json(const Tileset& t);
// Accepts entries as plain names or {"name", "color", "voxel"} objects.
Tileset tileset_from_json(const Json& j);

Json genome_to_json(const neat::Genome& g);
neat::Genome genome_from_json(const Json& j);

Json gen_params_to_json(const GenParams& p, const Tileset& tileset);
GenParams gen_params_from_json(const Json& j, const Tileset& tileset);

Json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const Json& j);

/// {"dims", "tileset", "tiles"} plus optional "colors" and "voxel_names".
Json level_to_json(const Level& level);
Level level_from_json(const Json& j);

// Reads a JSON document; FileError when missing, FormatError when malformed.
Json read_json_file(const std::filesystem::path& path);
// Writes `j` pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Throws FormatError if `j` has a key outside `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& where);

// Remaps `level` onto `target` by tile name; TilesetError when a name is missing.
Grid remap_tiles(const Level& level, const Tileset& target);

}  // namespace compogen
