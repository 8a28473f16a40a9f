#include "compogen/layout.hpp"

#include "compogen/errors.hpp"
#include "compogen/rng.hpp"

#include <cmath>
#include <numeric>

namespace compogen {

Grid random_layout(const RandomLayoutSpec& spec) {
  if (spec.weights.empty()) throw SizeError("random layout needs at least one tile weight");
  double total = 0.0;
  for (double w : spec.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("layout weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw ConfigError("layout weights must not all be zero");
  Rng rng(spec.seed);
  Grid g(spec.size, 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    TileId pick = 0;
    for (std::size_t t = 0; t < spec.weights.size(); ++t) {
      if (spec.weights[t] <= 0.0) continue;
      pick = static_cast<TileId>(t);
      acc += spec.weights[t];
      if (u < acc) break;
    }
    g[i] = pick;
  }
  return g;
}

Grid random_layout(const Shape& size, std::size_t n_tiles, std::uint64_t seed) {
  return random_layout(RandomLayoutSpec{size, std::vector<double>(n_tiles, 1.0), seed});
}

Grid expand_layout(const Grid& layout, const Tileset& layout_tiles, const Grid& house,
                   const Tileset& target_tiles, const std::string& house_name) {
  const Shape& b = house.shape();
  if (b.ndim() != layout.ndim()) throw DimensionError("house template and layout differ in dimensionality");
  validate_tiles(layout, layout_tiles);
  validate_tiles(house, target_tiles);
  const Shape& l = layout.shape();
  const Shape out_shape = l.ndim() == 2 ? Shape(l[0] * b[0], l[1] * b[1])
                                        : Shape(l[0] * b[0], l[1] * b[1], l[2] * b[2]);
  Grid out(out_shape, 0);
  std::vector<TileId> fill(layout_tiles.size(), -1);
  for (std::size_t t = 0; t < fill.size(); ++t) {
    const auto& name = layout_tiles.name(static_cast<TileId>(t));
    if (name == house_name) continue;
    auto id = target_tiles.find(name);
    if (!id) throw TilesetError("layout tile '" + name + "' has no counterpart in the target tileset");
    fill[t] = *id;
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Coord c = layout.coord(i);
    const TileId block = fill[static_cast<std::size_t>(layout[i])];
    for (std::size_t j = 0; j < house.size(); ++j) {
      const Coord d = house.coord(j);
      out.at({c[0] * b[0] + d[0], c[1] * b[1] + d[1], c[2] * b[2] + d[2]}) = block < 0 ? house[j] : block;
    }
  }
  return out;
}

}  // namespace compogen
