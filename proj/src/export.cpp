#include "compogen/export.hpp"

#include "compogen/errors.hpp"

#include <fmt/format.h>

#include <iterator>

namespace compogen {

std::string export_ppm(const Level& level) {
  const Grid& g = level.grid;
  if (g.ndim() != 2) throw FormatError("ppm export needs a 2D level, got " + g.shape().str());
  validate_tiles(g, level.tileset);
  std::string out = fmt::format("P3\n{} {}\n255\n", g.shape()[0], g.shape()[1]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Rgb& c = level.tileset.color(g[i]);
    fmt::format_to(std::back_inserter(out), "{} {} {}\n", c.r, c.g, c.b);
  }
  return out;
}

std::string export_voxels(const Level& level) {
  const Grid& g = level.grid;
  validate_tiles(g, level.tileset);
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Coord c = g.coord(i);
    fmt::format_to(std::back_inserter(out), "{} {} {} {}\n", c[0], c[1], c[2], level.tileset.voxel_name(g[i]));
  }
  return out;
}

}  // namespace compogen
