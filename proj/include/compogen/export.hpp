#pragma once

#include "compogen/io.hpp"

#include <string>

namespace compogen {

// Plain-text P3 image, one pixel per tile. 2D levels only (FormatError otherwise).
std::string export_ppm(const Level& level);

// One line per cell, `x y z voxel_name`, x fastest then y then z. 2D levels use z = 0.
std::string export_voxels(const Level& level);

}  // namespace compogen
