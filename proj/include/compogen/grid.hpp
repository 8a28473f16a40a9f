#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace compogen {

using TileId = std::int32_t;
using Coord = std::array<int, 3>;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Color used for a tile name when none is given explicitly.
Rgb default_color(std::string_view name);

/// Ordered set of named tiles. Grids store indices into a Tileset; names,
/// colors and voxel names live only here.
class Tileset {
 public:
  Tileset(std::vector<std::string> names, std::vector<Rgb> colors,
          std::vector<std::string> voxel_names);

  // Colors from default_color(), voxel names equal to the tile names.
  static Tileset from_names(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(TileId t) const { return names_.at(static_cast<std::size_t>(t)); }
  const Rgb& color(TileId t) const { return colors_.at(static_cast<std::size_t>(t)); }
  const std::string& voxel_name(TileId t) const {
    return voxel_names_.at(static_cast<std::size_t>(t));
  }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<TileId> find(std::string_view name) const;
  // Throws TileError naming the missing tile.
  TileId require(std::string_view name) const;
  bool contains(TileId t) const { return t >= 0 && static_cast<std::size_t>(t) < size(); }

  friend bool operator==(const Tileset&, const Tileset&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Rgb> colors_;
  std::vector<std::string> voxel_names_;
};

/// Extents of a 2D (W, H) or 3D (W, H, D) level. Unused trailing axes are 1.
class Shape {
 public:
  Shape(int w, int h);
  Shape(int w, int h, int d);
  static Shape of(std::span<const int> extents);
  // "WxH" or "WxHxD".
  static Shape parse(std::string_view text);

  int ndim() const { return ndim_; }
  int operator[](int axis) const { return ext_[static_cast<std::size_t>(axis)]; }
  const Coord& extents() const { return ext_; }
  std::size_t cells() const {
    return static_cast<std::size_t>(ext_[0]) * static_cast<std::size_t>(ext_[1]) *
           static_cast<std::size_t>(ext_[2]);
  }
  std::vector<int> to_vector() const;
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  Coord ext_{1, 1, 1};
  int ndim_ = 2;
};

/// Dense row-major tilemap: x fastest, then y, then z.
class Grid {
 public:
  Grid(Shape shape, TileId fill);
  Grid(Shape shape, std::vector<TileId> cells);

  const Shape& shape() const { return shape_; }
  int ndim() const { return shape_.ndim(); }
  std::size_t size() const { return cells_.size(); }

  std::size_t index(const Coord& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(shape_[0]) *
               (static_cast<std::size_t>(c[1]) +
                static_cast<std::size_t>(shape_[1]) * static_cast<std::size_t>(c[2]));
  }
  Coord coord(std::size_t i) const;
  bool in_bounds(const Coord& c) const {
    return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < shape_[0] && c[1] < shape_[1] &&
           c[2] < shape_[2];
  }

  TileId at(const Coord& c) const { return cells_[index(c)]; }
  TileId& at(const Coord& c) { return cells_[index(c)]; }
  TileId operator[](std::size_t i) const { return cells_[i]; }
  TileId& operator[](std::size_t i) { return cells_[i]; }
  std::span<const TileId> cells() const { return cells_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Shape shape_;
  std::vector<TileId> cells_;
};

// Throws TileError if any cell is outside the tileset.
void validate_tiles(const Grid& g, const Tileset& tileset);

Grid new_grid(const Shape& shape, TileId fill, const Tileset& tileset);

struct TileDistribution {
  std::vector<double> probs;
};

TileDistribution tile_distribution(const Grid& g, std::size_t n_tiles);

/// Membership mask over tile ids.
class TileClass {
 public:
  TileClass() = default;
  TileClass(std::initializer_list<TileId> tiles);
  explicit TileClass(std::span<const TileId> tiles);
  bool contains(TileId t) const {
    return t >= 0 && static_cast<std::size_t>(t) < mask_.size() && mask_[static_cast<std::size_t>(t)];
  }
  bool empty() const;

 private:
  void add(TileId t);
  std::vector<bool> mask_;
};

struct Regions {
  Shape shape;
  std::vector<int> labels;  // 0 = not in class, regions numbered from 1
  int count = 0;
};

/// Connected components of the cells in `tile_class` under axis-aligned
/// adjacency (4-neighbourhood in 2D, 6 in 3D). Labels follow the row-major
/// order of each region's first cell.
Regions label_regions(const Grid& g, const TileClass& tile_class);

int count_axis_neighbors(const Grid& g, const Coord& pos, const TileClass& tile_class);

struct CoalescedRect {
  Coord origin{0, 0, 0};
  Coord extent{1, 1, 1};
  TileId tile = 0;
  friend bool operator==(const CoalescedRect&, const CoalescedRect&) = default;
};

/// Greedy rectangle merge. Cells are visited in row-major order; from each
/// unconsumed cell the rectangle grows along x, then y, then z, while the
/// added slab is homogeneous and unconsumed.
std::vector<CoalescedRect> coalesce(const Grid& g);

// One rect per cell; what coalesce degenerates to when merging is disabled.
std::vector<CoalescedRect> unit_rects(const Grid& g);

double hamming(const Grid& a, const Grid& b);
double overlap(const Grid& a, const Grid& b);

/// Collapses each non-overlapping k-window to its tile when uniform, else to
/// `fallback`.
Grid downsample_windows(const Grid& g, int k, TileId fallback);

}  // namespace compogen
