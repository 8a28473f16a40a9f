#pragma once

#include "compogen/grid.hpp"

#include <cstdint>
#include <span>

namespace compogen {

// Abstract town layouts and their expansion into full-resolution targets.

struct RandomLayoutSpec {
  Shape size{5, 5};
  std::vector<double> weights;  // per tile index; non-negative, not all zero
  std::uint64_t seed = 0;
};

// Every cell is drawn independently with probability proportional to its weight.
Grid random_layout(const RandomLayoutSpec& spec);

// Uniform over the first n tiles.
Grid random_layout(const Shape& size, std::size_t n_tiles, std::uint64_t seed);

// Replaces each layout cell by a block. Cells whose tile is named `house_name`
// receive `house` (already in target ids); every other cell becomes a uniform
// block of the target tile with the same name.
Grid expand_layout(const Grid& layout, const Tileset& layout_tiles, const Grid& house,
                   const Tileset& target_tiles, const std::string& house_name = "house");

}  // namespace compogen
