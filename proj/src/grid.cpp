#include "compogen/grid.hpp"

#include "compogen/errors.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace compogen {

namespace {

struct NamedColor {
  std::string_view name;
  Rgb color;
};

constexpr NamedColor kPalette[] = {
    {"house", {178, 34, 34}},  {"road", {128, 128, 128}}, {"garden", {34, 139, 34}},
    {"wall", {139, 90, 43}},   {"air", {255, 255, 255}},  {"empty", {255, 255, 255}},
    {"roof", {90, 30, 30}},    {"door", {200, 160, 60}},  {"grass", {124, 200, 70}},
    {"tree", {0, 90, 0}},      {"flower", {230, 80, 200}}, {"water", {40, 90, 220}},
    {"town", {210, 120, 60}},
};

std::size_t checked_extent(int e) {
  if (e <= 0) throw DimensionError("grid extents must be positive, got " + std::to_string(e));
  return static_cast<std::size_t>(e);
}

// Disjoint-set forest used by the two-pass labelling.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Rgb default_color(std::string_view name) {
  for (const auto& entry : kPalette) {
    if (entry.name == name) return entry.color;
  }
  // FNV-1a keeps unknown names stable across runs.
  std::uint32_t h = 2166136261u;
  for (char c : name) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 16777619u;
  }
  return {static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8),
          static_cast<std::uint8_t>(h >> 16)};
}

Tileset::Tileset(std::vector<std::string> names, std::vector<Rgb> colors,
                 std::vector<std::string> voxel_names)
    : names_(std::move(names)), colors_(std::move(colors)), voxel_names_(std::move(voxel_names)) {
  if (names_.empty()) throw TilesetError("tileset must contain at least one tile");
  if (colors_.size() != names_.size() || voxel_names_.size() != names_.size())
    throw TilesetError("tileset colors and voxel names must match the tile count");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw TilesetError("duplicate tile name '" + n + "'");
  }
}

Tileset Tileset::from_names(std::vector<std::string> names) {
  std::vector<Rgb> colors;
  colors.reserve(names.size());
  for (const auto& n : names) colors.push_back(default_color(n));
  auto voxels = names;
  return Tileset(std::move(names), std::move(colors), std::move(voxels));
}

std::optional<TileId> Tileset::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<TileId>(i);
  }
  return std::nullopt;
}

TileId Tileset::require(std::string_view name) const {
  if (auto t = find(name)) return *t;
  throw TileError("tile '" + std::string(name) + "' is not in the tileset");
}

Shape::Shape(int w, int h) : ext_{w, h, 1}, ndim_(2) {
  checked_extent(w);
  checked_extent(h);
}

Shape::Shape(int w, int h, int d) : ext_{w, h, d}, ndim_(3) {
  checked_extent(w);
  checked_extent(h);
  checked_extent(d);
}

Shape Shape::of(std::span<const int> extents) {
  if (extents.size() == 2) return Shape(extents[0], extents[1]);
  if (extents.size() == 3) return Shape(extents[0], extents[1], extents[2]);
  throw DimensionError("levels are 2D or 3D, got " + std::to_string(extents.size()) + " extents");
}

Shape Shape::parse(std::string_view text) {
  std::vector<int> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('x', start);
    if (end == std::string_view::npos) end = text.size();
    int value = 0;
    auto piece = text.substr(start, end - start);
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty())
      throw DimensionError("cannot parse size '" + std::string(text) + "'");
    parts.push_back(value);
    start = end + 1;
  }
  return of(parts);
}

std::vector<int> Shape::to_vector() const {
  return std::vector<int>(ext_.begin(), ext_.begin() + ndim_);
}

std::string Shape::str() const {
  std::string s = std::to_string(ext_[0]) + "x" + std::to_string(ext_[1]);
  if (ndim_ == 3) s += "x" + std::to_string(ext_[2]);
  return s;
}

Grid::Grid(Shape shape, TileId fill) : shape_(shape), cells_(shape.cells(), fill) {}

Grid::Grid(Shape shape, std::vector<TileId> cells) : shape_(shape), cells_(std::move(cells)) {
  if (cells_.size() != shape_.cells())
    throw DimensionError("grid of shape " + shape_.str() + " needs " +
                         std::to_string(shape_.cells()) + " cells, got " +
                         std::to_string(cells_.size()));
}

Coord Grid::coord(std::size_t i) const {
  const auto w = static_cast<std::size_t>(shape_[0]);
  const auto h = static_cast<std::size_t>(shape_[1]);
  return {static_cast<int>(i % w), static_cast<int>((i / w) % h), static_cast<int>(i / (w * h))};
}

void validate_tiles(const Grid& g, const Tileset& tileset) {
  for (TileId t : g.cells()) {
    if (!tileset.contains(t))
      throw TileError("tile index " + std::to_string(t) + " outside tileset of size " +
                      std::to_string(tileset.size()));
  }
}

Grid new_grid(const Shape& shape, TileId fill, const Tileset& tileset) {
  if (!tileset.contains(fill))
    throw TileError("fill tile " + std::to_string(fill) + " outside tileset");
  return Grid(shape, fill);
}

TileDistribution tile_distribution(const Grid& g, std::size_t n_tiles) {
  if (g.size() == 0) throw EmptyGridError("tile distribution of an empty grid");
  std::vector<std::size_t> counts(n_tiles, 0);
  for (TileId t : g.cells()) {
    if (t < 0 || static_cast<std::size_t>(t) >= n_tiles)
      throw TileError("tile index " + std::to_string(t) + " outside tileset");
    ++counts[static_cast<std::size_t>(t)];
  }
  TileDistribution d;
  d.probs.reserve(n_tiles);
  const auto total = static_cast<double>(g.size());
  for (auto c : counts) d.probs.push_back(static_cast<double>(c) / total);
  return d;
}

TileClass::TileClass(std::initializer_list<TileId> tiles) {
  for (auto t : tiles) add(t);
}

TileClass::TileClass(std::span<const TileId> tiles) {
  for (auto t : tiles) add(t);
}

void TileClass::add(TileId t) {
  if (t < 0) throw TileError("negative tile index in tile class");
  if (static_cast<std::size_t>(t) >= mask_.size()) mask_.resize(static_cast<std::size_t>(t) + 1, false);
  mask_[static_cast<std::size_t>(t)] = true;
}

bool TileClass::empty() const { return std::none_of(mask_.begin(), mask_.end(), [](bool b) { return b; }); }

Regions label_regions(const Grid& g, const TileClass& tile_class) {
  const auto& s = g.shape();
  const std::size_t n = g.size();
  UnionFind uf(n);
  const std::size_t stride[3] = {1, static_cast<std::size_t>(s[0]),
                                 static_cast<std::size_t>(s[0]) * static_cast<std::size_t>(s[1])};

  // First pass: join each member with its already-visited axis predecessors.
  for (std::size_t i = 0; i < n; ++i) {
    if (!tile_class.contains(g[i])) continue;
    const Coord c = g.coord(i);
    for (int axis = 0; axis < 3; ++axis) {
      if (c[static_cast<std::size_t>(axis)] == 0) continue;
      const std::size_t j = i - stride[axis];
      if (tile_class.contains(g[j])) uf.unite(i, j);
    }
  }

  Regions out{s, std::vector<int>(n, 0), 0};
  std::unordered_map<std::size_t, int> root_label;
  for (std::size_t i = 0; i < n; ++i) {
    if (!tile_class.contains(g[i])) continue;
    auto [it, inserted] = root_label.try_emplace(uf.find(i), out.count + 1);
    if (inserted) ++out.count;
    out.labels[i] = it->second;
  }
  return out;
}

int count_axis_neighbors(const Grid& g, const Coord& pos, const TileClass& tile_class) {
  if (!g.in_bounds(pos)) throw BoundsError("position outside the grid");
  int count = 0;
  for (int axis = 0; axis < g.ndim(); ++axis) {
    for (int step : {-1, 1}) {
      Coord q = pos;
      q[static_cast<std::size_t>(axis)] += step;
      if (g.in_bounds(q) && tile_class.contains(g.at(q))) ++count;
    }
  }
  return count;
}

std::vector<CoalescedRect> coalesce(const Grid& g) {
  std::vector<CoalescedRect> rects;
  std::vector<bool> used(g.size(), false);

  // True when every cell of the box [lo, lo+ext) is `tile` and unconsumed.
  auto free_box = [&](const Coord& lo, const Coord& ext, TileId tile) {
    for (int z = lo[2]; z < lo[2] + ext[2]; ++z)
      for (int y = lo[1]; y < lo[1] + ext[1]; ++y)
        for (int x = lo[0]; x < lo[0] + ext[0]; ++x) {
          const Coord c{x, y, z};
          if (!g.in_bounds(c)) return false;
          const auto i = g.index(c);
          if (used[i] || g[i] != tile) return false;
        }
    return true;
  };

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (used[i]) continue;
    CoalescedRect r{g.coord(i), {1, 1, 1}, g[i]};
    for (std::size_t axis = 0; axis < 3; ++axis) {
      while (true) {
        Coord slab_origin = r.origin;
        slab_origin[axis] += r.extent[axis];
        Coord slab_extent = r.extent;
        slab_extent[axis] = 1;
        if (!free_box(slab_origin, slab_extent, r.tile)) break;
        ++r.extent[axis];
      }
    }
    for (int z = 0; z < r.extent[2]; ++z)
      for (int y = 0; y < r.extent[1]; ++y)
        for (int x = 0; x < r.extent[0]; ++x)
          used[g.index({r.origin[0] + x, r.origin[1] + y, r.origin[2] + z})] = true;
    rects.push_back(r);
  }
  return rects;
}

std::vector<CoalescedRect> unit_rects(const Grid& g) {
  std::vector<CoalescedRect> rects;
  rects.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rects.push_back({g.coord(i), {1, 1, 1}, g[i]});
  return rects;
}

double hamming(const Grid& a, const Grid& b) {
  if (a.shape() != b.shape())
    throw ShapeError("hamming needs equal shapes, got " + a.shape().str() + " and " +
                     b.shape().str());
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i] ? 1 : 0;
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double overlap(const Grid& a, const Grid& b) { return 1.0 - hamming(a, b); }

Grid downsample_windows(const Grid& g, int k, TileId fallback) {
  if (k < 1) throw DimensionError("window size must be at least 1");
  const auto& s = g.shape();
  for (int axis = 0; axis < s.ndim(); ++axis) {
    if (s[axis] % k != 0)
      throw DimensionError("extent " + std::to_string(s[axis]) + " not divisible by window " +
                           std::to_string(k));
  }
  const Shape out_shape = s.ndim() == 2 ? Shape(s[0] / k, s[1] / k)
                                        : Shape(s[0] / k, s[1] / k, s[2] / k);
  const int kz = s.ndim() == 3 ? k : 1;
  Grid out(out_shape, fallback);
  for (std::size_t o = 0; o < out.size(); ++o) {
    const Coord oc = out.coord(o);
    const TileId first = g.at({oc[0] * k, oc[1] * k, oc[2] * kz});
    bool uniform = true;
    for (int z = 0; z < kz && uniform; ++z)
      for (int y = 0; y < k && uniform; ++y)
        for (int x = 0; x < k && uniform; ++x)
          uniform = g.at({oc[0] * k + x, oc[1] * k + y, oc[2] * kz + z}) == first;
    out[o] = uniform ? first : fallback;
  }
  return out;
}

}  // namespace compogen
