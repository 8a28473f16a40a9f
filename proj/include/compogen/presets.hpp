#pragma once

#include "compogen/io.hpp"

#include <string>
#include <vector>

namespace compogen {

// Training configs compiled in from the presets/ directory.
const std::vector<std::string>& preset_names();
Json preset_json(const std::string& name);

}  // namespace compogen
