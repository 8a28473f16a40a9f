#include "compogen/errors.hpp"
#include "compogen/generator.hpp"

#include "doctest.h"

#include <cmath>
#include <set>

using namespace compogen;
using namespace compogen::neat;

namespace {

const Tileset kTiles = Tileset::from_names({"a", "b", "c"});

// All weights zero except the bias into output `favored`.
Genome constant_genome(int n_in, int n_out, int favored) {
  Rng rng(0);
  Genome g = init_genome(n_in, n_out, rng);
  for (auto& c : g.connections) c.weight = (c.from == n_in && c.to == n_in + 1 + favored) ? 1.0 : 0.0;
  return g;
}

GeneratorSpec spec_with(const GenParams& p, Genome g, int ndim = 2) {
  return GeneratorSpec{std::move(g), p, kTiles, ndim};
}

}  // namespace

TEST_CASE("input_size formula") {
  GenParams p;
  p.context_size = 1;
  p.num_random_vars = 1;
  CHECK(input_size(p, 3, 2) == 9);
  p.input_center_tile = true;
  CHECK(input_size(p, 3, 2) == 10);
  p.input_center_tile = false;
  p.num_random_vars = 0;
  p.context_size = 2;
  CHECK(input_size(p, 3, 2) == 24);
  p.context_size = 1;
  p.one_hot = true;
  CHECK(input_size(p, 3, 2) == 24);
  CHECK(input_size(p, 3, 3) == 78);
}

TEST_CASE("scalar encoding pads with -1 and maps tiles onto [-1,1]") {
  GenParams p;
  p.num_random_vars = 0;
  Grid g(Shape(3, 3), 1);
  Rng rng(0);
  const auto corner = encode_context(g, {0, 0, 0}, p, 3, rng);
  REQUIRE(corner.size() == 8);
  // Window order is x fastest: (-1,-1) (0,-1) (1,-1) (-1,0) (1,0) (-1,1) (0,1) (1,1).
  const std::vector<double> want{-1, -1, -1, -1, 0, -1, 0, 0};
  CHECK(corner == want);
  const auto mid = encode_context(g, {1, 1, 0}, p, 3, rng);
  for (double v : mid) CHECK(v == 0.0);
  CHECK_THROWS_AS(encode_context(g, {3, 0, 0}, p, 3, rng), BoundsError);
}

TEST_CASE("one-hot encoding and centre tile") {
  GenParams p;
  p.num_random_vars = 0;
  p.one_hot = true;
  p.input_center_tile = true;
  Grid g(Shape(2, 1), std::vector<TileId>{2, 0});
  Rng rng(0);
  const auto e = encode_context(g, {0, 0, 0}, p, 3, rng);
  REQUIRE(e.size() == 27);
  // Right neighbour (slot 4) is tile 0; the centre is appended last and is tile 2.
  CHECK(std::vector<double>(e.begin() + 12, e.begin() + 15) == std::vector<double>{1, 0, 0});
  CHECK(std::vector<double>(e.begin() + 24, e.end()) == std::vector<double>{0, 0, 1});
  CHECK(std::vector<double>(e.begin(), e.begin() + 3) == std::vector<double>{-1, -1, -1});
}

TEST_CASE("random inputs and perturbation") {
  GenParams p;
  p.num_random_vars = 2;
  Grid g(Shape(3, 3), 0);
  Rng a(1), b(1);
  const auto x = encode_context(g, {1, 1, 0}, p, 3, a);
  CHECK(x == encode_context(g, {1, 1, 0}, p, 3, b));
  CHECK(x.size() == 10);
  for (std::size_t i = 8; i < 10; ++i) {
    CHECK(x[i] >= -1.0);
    CHECK(x[i] <= 1.0);
  }
  p.num_random_vars = 0;
  p.perturb_size = 0.1;
  const auto y = encode_context(g, {1, 1, 0}, p, 3, a);
  for (double v : y) CHECK(std::abs(v - (-1.0)) <= 0.1);
}

TEST_CASE("constant network yields a uniform grid") {
  GenParams p;
  const int n_in = input_size(p, 3, 2);
  const auto spec = spec_with(p, constant_genome(n_in, 3, 2));
  const Grid g = generate(spec, Shape(7, 4), 3);
  for (auto t : g.cells()) CHECK(t == 2);
  CHECK(g.shape() == Shape(7, 4));
}

TEST_CASE("argmax ties go to the lowest tile") {
  const double v[] = {0.5, 0.9, 0.9};
  CHECK(argmax_tile(v) == 1);
}

TEST_CASE("generation is deterministic per seed") {
  GenParams p;
  p.iterations = 2;
  const int n_in = input_size(p, 3, 2);
  Rng rng(4);
  const auto spec = spec_with(p, init_genome(n_in, 3, rng));
  CHECK(generate(spec, Shape(10, 10), 1) == generate(spec, Shape(10, 10), 1));
  CHECK(generate(spec, Shape(10, 10), 1) != generate(spec, Shape(10, 10), 2));
}

TEST_CASE("two iterations equal two chained single sweeps") {
  GenParams p;
  p.iterations = 2;
  const int n_in = input_size(p, 3, 2);
  Rng rng(8);
  const auto spec = spec_with(p, init_genome(n_in, 3, rng));
  const Network net(spec.genome);
  const std::uint64_t seed = 77;

  Grid manual = start_grid(p, Shape(6, 5), 3, start_seed(seed));
  sweep(manual, spec, net, pass_seed(seed, 0));
  sweep(manual, spec, net, pass_seed(seed, 1));
  CHECK(generate(spec, Shape(6, 5), seed) == manual);
}

TEST_CASE("sweep writes in place") {
  // Border cells become tile 2; every other cell copies its left neighbour as
  // currently stored. In place, the 2 propagates along the row.
  GenParams p;
  p.num_random_vars = 0;
  Grid g(Shape(4, 1), 1);
  sweep(g, p, 3, 0, [](std::span<const double> in) {
    const double left = in[3];
    if (left == -1.0) return TileId{2};
    return static_cast<TileId>(std::lround(left + 1.0));
  });
  CHECK(g == Grid(Shape(4, 1), 2));
}

TEST_CASE("default start fills with the default tile") {
  GenParams p;
  p.start = StartPolicy::DefaultTile;
  p.default_tile = 2;
  CHECK(start_grid(p, Shape(3, 3), 3, 0) == Grid(Shape(3, 3), 2));
}

TEST_CASE("batch levels use split streams") {
  GenParams p;
  const int n_in = input_size(p, 3, 2);
  Rng rng(10);
  const auto spec = spec_with(p, init_genome(n_in, 3, rng));
  const auto batch = generate_batch(spec, Shape(10, 10), 5, 3);
  CHECK(batch[0] == generate(spec, Shape(10, 10), derive_seed(3, 0)));
  std::set<std::vector<TileId>> distinct;
  for (const auto& g : batch) distinct.insert({g.cells().begin(), g.cells().end()});
  CHECK(distinct.size() == 5);

  GenParams d = p;
  d.start = StartPolicy::DefaultTile;
  d.num_random_vars = 0;
  const auto dspec = spec_with(d, init_genome(input_size(d, 3, 2), 3, rng));
  const auto same = generate_batch(dspec, Shape(10, 10), 5, 3);
  for (const auto& g : same) CHECK(g == same[0]);
}

TEST_CASE("arity and dimensionality mismatches") {
  GenParams p;
  Rng rng(0);
  const auto bad = spec_with(p, init_genome(4, 3, rng));
  CHECK_THROWS_AS(generate(bad, Shape(3, 3), 0), SpecError);
  const auto ok = spec_with(p, init_genome(input_size(p, 3, 2), 3, rng));
  CHECK_THROWS_AS(generate(ok, Shape(3, 3, 3), 0), SpecError);
}

TEST_CASE("3D generation covers every cell") {
  GenParams p;
  Rng rng(2);
  const auto spec = spec_with(p, init_genome(input_size(p, 3, 3), 3, rng), 3);
  const Grid g = generate(spec, Shape(3, 4, 5), 9);
  CHECK(g.shape() == Shape(3, 4, 5));
  for (auto t : g.cells()) CHECK(kTiles.contains(t));
}

TEST_CASE("params validation") {
  GenParams p;
  p.iterations = 0;
  CHECK_THROWS_AS(p.validate(3), ConfigError);
  p = GenParams{};
  p.context_size = 0;
  CHECK_THROWS_AS(p.validate(3), ConfigError);
  p = GenParams{};
  p.perturb_size = -0.1;
  CHECK_THROWS_AS(p.validate(3), ConfigError);
  p = GenParams{};
  p.default_tile = 3;
  CHECK_THROWS_AS(p.validate(3), ConfigError);
}
