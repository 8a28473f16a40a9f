#pragma once

#include "compogen/grid.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace testutil {

// Builds a 2D grid from rows like "HHG/HHG"; each character is looked up in `alphabet`.
inline compogen::Grid rows(std::string_view text, std::string_view alphabet) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '/') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  const int h = static_cast<int>(lines.size());
  const int w = static_cast<int>(lines[0].size());
  std::vector<compogen::TileId> cells;
  for (const auto& l : lines)
    for (char c : l) cells.push_back(static_cast<compogen::TileId>(alphabet.find(c)));
  return compogen::Grid(compogen::Shape(w, h), cells);
}

}  // namespace testutil
