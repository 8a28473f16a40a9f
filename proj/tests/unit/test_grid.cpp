#include "compogen/errors.hpp"
#include "compogen/grid.hpp"
#include "compogen/rng.hpp"
#include "helpers.hpp"

#include "doctest.h"

#include <map>
#include <queue>
#include <set>

using namespace compogen;
using testutil::rows;

namespace {

const Tileset kTown = Tileset::from_names({"house", "garden", "road"});
constexpr TileId H = 0, G = 1, R = 2;

// Breadth-first flood fill, independent of the union-find labelling.
std::pair<std::vector<int>, int> flood(const Grid& g, const std::set<TileId>& cls) {
  std::vector<int> lab(g.size(), 0);
  int n = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (!cls.count(g[s]) || lab[s]) continue;
    lab[s] = ++n;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const Coord c = g.coord(q.front());
      q.pop();
      for (int a = 0; a < 3; ++a)
        for (int d : {-1, 1}) {
          Coord nb = c;
          nb[static_cast<std::size_t>(a)] += d;
          if (!g.in_bounds(nb)) continue;
          const auto i = g.index(nb);
          if (cls.count(g[i]) && !lab[i]) {
            lab[i] = n;
            q.push(i);
          }
        }
    }
  }
  return {lab, n};
}

}  // namespace

TEST_CASE("tileset rejects empty or duplicate names") {
  CHECK_THROWS_AS(Tileset::from_names({}), TilesetError);
  CHECK_THROWS_AS(Tileset::from_names({"a", "a"}), TilesetError);
  CHECK(kTown.require("road") == R);
  CHECK_THROWS_AS(kTown.require("lava"), TileError);
}

TEST_CASE("shape parsing and validation") {
  CHECK(Shape::parse("7x5") == Shape(7, 5));
  CHECK(Shape::parse("2x3x4") == Shape(2, 3, 4));
  CHECK_THROWS_AS(Shape(0, 3), DimensionError);
  CHECK_THROWS_AS(Shape(2, -1, 3), DimensionError);
  CHECK_THROWS(Shape::parse("0x5"));
  CHECK_THROWS(Shape::parse("banana"));
}

TEST_CASE("new_grid fills every cell") {
  const Grid a = new_grid(Shape(2, 2), G, kTown);
  CHECK(a == rows("GG/GG", "HGR"));
  const Grid b = new_grid(Shape(1, 1, 1), H, kTown);
  CHECK(b.size() == 1);
  const Grid c = new_grid(Shape(3, 2), R, kTown);
  CHECK(c.size() == 6);
  for (auto t : c.cells()) CHECK(t == R);
  CHECK_THROWS_AS(new_grid(Shape(2, 2), 3, kTown), TileError);
  CHECK_THROWS_AS(new_grid(Shape(2, 2), -1, kTown), TileError);
}

TEST_CASE("row-major layout is x fastest") {
  Grid g(Shape(3, 2, 2), 0);
  CHECK(g.index({1, 0, 0}) == 1);
  CHECK(g.index({0, 1, 0}) == 3);
  CHECK(g.index({0, 0, 1}) == 6);
  CHECK(g.coord(11) == Coord{2, 1, 1});
}

TEST_CASE("tile_distribution counts fractions") {
  Grid g(Shape(10, 1), std::vector<TileId>{H, H, H, H, G, G, G, R, R, R});
  const auto d = tile_distribution(g, 3);
  CHECK(d.probs[H] == doctest::Approx(0.4));
  CHECK(d.probs[G] == doctest::Approx(0.3));
  CHECK(d.probs[R] == doctest::Approx(0.3));

  const auto u = tile_distribution(new_grid(Shape(4, 4), G, kTown), 3);
  CHECK(u.probs == std::vector<double>{0.0, 1.0, 0.0});

  const auto m = tile_distribution(rows("HG/RH", "HGR"), 3);
  CHECK(m.probs == std::vector<double>{0.5, 0.25, 0.25});
}

TEST_CASE("label_regions on the worked examples") {
  const Grid road = new_grid(Shape(6, 6), R, kTown);
  CHECK(label_regions(road, {R}).count == 1);
  CHECK(label_regions(road, {H}).count == 0);

  Grid split = road;
  for (int y = 0; y < 6; ++y) split.at({3, y, 0}) = G;
  const auto r = label_regions(split, {R});
  CHECK(r.count == 2);
  CHECK(r.labels[split.index({3, 2, 0})] == 0);
  CHECK(r.labels[split.index({0, 0, 0})] != r.labels[split.index({5, 0, 0})]);
}

TEST_CASE("label_regions ignores diagonal contact") {
  const Grid g = rows("HG/GH", "HGR");
  CHECK(label_regions(g, {H}).count == 2);
}

TEST_CASE("label_regions matches flood fill on random 2D and 3D grids") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const bool three = trial % 2 == 1;
    const int n_tiles = 2 + static_cast<int>(rng.below(3));
    const Shape s = three ? Shape(1 + static_cast<int>(rng.below(6)), 1 + static_cast<int>(rng.below(6)),
                                  1 + static_cast<int>(rng.below(6)))
                          : Shape(1 + static_cast<int>(rng.below(16)), 1 + static_cast<int>(rng.below(16)));
    Grid g(s, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<TileId>(rng.below(static_cast<std::uint64_t>(n_tiles)));
    const std::set<TileId> cls{0, static_cast<TileId>(n_tiles - 1)};
    const auto got = label_regions(g, TileClass{0, static_cast<TileId>(n_tiles - 1)});
    const auto [want, count] = flood(g, cls);
    REQUIRE(got.count == count);
    std::map<int, int> fwd, back;
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE((got.labels[i] == 0) == (want[i] == 0));
      if (!want[i]) continue;
      auto [f, fnew] = fwd.emplace(got.labels[i], want[i]);
      auto [b, bnew] = back.emplace(want[i], got.labels[i]);
      REQUIRE(f->second == want[i]);
      REQUIRE(b->second == got.labels[i]);
    }
  }
}

TEST_CASE("label ids are 1-based in first-appearance order") {
  const Grid g = rows("RGR/GGG/RGG", "HGR");
  const auto r = label_regions(g, {R});
  CHECK(r.count == 3);
  CHECK(r.labels[0] == 1);
  CHECK(r.labels[2] == 2);
  CHECK(r.labels[6] == 3);
}

TEST_CASE("count_axis_neighbors") {
  const Grid g = rows("RRR/RHR/RRR", "HGR");
  CHECK(count_axis_neighbors(g, {1, 1, 0}, {R}) == 4);
  const Grid c = rows("RR/RR", "HGR");
  CHECK(count_axis_neighbors(c, {0, 0, 0}, {R}) == 2);
  CHECK(count_axis_neighbors(g, {1, 1, 0}, TileClass{}) == 0);
  CHECK_THROWS_AS(count_axis_neighbors(g, {3, 0, 0}, {R}), BoundsError);
  const Grid cube(Shape(3, 3, 3), R);
  CHECK(count_axis_neighbors(cube, {1, 1, 1}, {R}) == 6);
}

TEST_CASE("coalesce worked examples") {
  const auto one = coalesce(rows("HH/HH", "HGR"));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == CoalescedRect{{0, 0, 0}, {2, 2, 1}, H});

  CHECK(coalesce(rows("HG/GH", "HGR")).size() == 4);

  const auto two = coalesce(rows("HHG/HHG", "HGR"));
  REQUIRE(two.size() == 2);
  CHECK(two[0] == CoalescedRect{{0, 0, 0}, {2, 2, 1}, H});
  CHECK(two[1] == CoalescedRect{{2, 0, 0}, {1, 2, 1}, G});
}

TEST_CASE("coalesce splits a non-rectangular component") {
  // An L shape: grows along x first, then the remaining cell is its own rect.
  const auto r = coalesce(rows("HH/HG", "HGR"));
  REQUIRE(r.size() == 3);
  CHECK(r[0] == CoalescedRect{{0, 0, 0}, {2, 1, 1}, H});
  CHECK(r[1] == CoalescedRect{{0, 1, 0}, {1, 1, 1}, H});
}

TEST_CASE("coalesce merges along z in 3D") {
  const Grid g(Shape(2, 2, 3), H);
  const auto r = coalesce(g);
  REQUIRE(r.size() == 1);
  CHECK(r[0].extent == Coord{2, 2, 3});
}

TEST_CASE("unit_rects yields one rect per cell") {
  const Grid g = rows("HH/HH", "HGR");
  const auto r = unit_rects(g);
  CHECK(r.size() == 4);
  for (const auto& x : r) CHECK(x.extent == Coord{1, 1, 1});
}

TEST_CASE("hamming and overlap") {
  const Grid a = rows("HH/HH", "HGR");
  const Grid b = rows("GG/GG", "HGR");
  const Grid c = rows("HG/GH", "HGR");
  CHECK(hamming(a, a) == 0.0);
  CHECK(hamming(a, b) == 1.0);
  CHECK(hamming(a, c) == 0.5);
  CHECK(overlap(a, a) == 1.0);
  CHECK(overlap(a, b) == 0.0);
  CHECK(overlap(a, c) == 0.5);
  CHECK_THROWS_AS(hamming(a, Grid(Shape(2, 3), 0)), ShapeError);
}

TEST_CASE("hamming is a metric on random triples") {
  Rng rng(5);
  auto random_grid = [&] {
    Grid g(Shape(4, 4), 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<TileId>(rng.below(3));
    return g;
  };
  for (int t = 0; t < 200; ++t) {
    const Grid a = random_grid(), b = random_grid(), c = random_grid();
    CHECK(hamming(a, b) == hamming(b, a));
    CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c) + 1e-12);
    CHECK((hamming(a, b) == 0.0) == (a == b));
    CHECK(overlap(a, b) + hamming(a, b) == 1.0);
  }
}

TEST_CASE("downsample_windows") {
  const Grid g = rows("HHRR/HHRG/GGRR/GGRR", "HGR");
  const Grid d = downsample_windows(g, 2, G);
  CHECK(d == rows("HG/GR", "HGR"));
  CHECK(downsample_windows(g, 1, G) == g);
  CHECK_THROWS_AS(downsample_windows(g, 3, G), DimensionError);

  // Replicating every cell k-fold and downsampling recovers the original.
  Rng rng(1);
  Grid small(Shape(3, 2, 2), 0);
  for (std::size_t i = 0; i < small.size(); ++i) small[i] = static_cast<TileId>(rng.below(3));
  Grid big(Shape(6, 4, 4), 0);
  for (std::size_t i = 0; i < big.size(); ++i) {
    const Coord c = big.coord(i);
    big[i] = small.at({c[0] / 2, c[1] / 2, c[2] / 2});
  }
  CHECK(downsample_windows(big, 2, G) == small);
}
