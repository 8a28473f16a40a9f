#include "compogen/composer.hpp"
#include "compogen/errors.hpp"
#include "compogen/fitness.hpp"
#include "compogen/layout.hpp"
#include "../support/trees.hpp"

#include "doctest.h"

#include <filesystem>

using namespace compogen;
using testutil::random_spec;

namespace {

// Generator whose argmax is always `favored`.
GeneratorSpec constant_spec(std::vector<std::string> names, int favored, int ndim = 2) {
  Rng rng(0);
  auto spec = random_spec(rng, std::move(names), ndim);
  const int n_in = spec.genome.n_inputs();
  for (auto& c : spec.genome.connections) c.weight = (c.from == n_in && c.to == n_in + 1 + favored) ? 1.0 : 0.0;
  return spec;
}


}  // namespace

TEST_CASE("leaf node composes directly") {
  Rng rng(1);
  const auto spec = random_spec(rng, {"a", "b"});
  const auto leaf = make_leaf("leaf", spec);
  const Level out = compose(*leaf, Shape(7, 7), 5);
  CHECK(out.grid == generate(spec, Shape(7, 7), 5));
  CHECK(total_size(*leaf, Shape(7, 7)) == Shape(7, 7));
}

TEST_CASE("size law for one and two levels") {
  Rng rng(2);
  auto town = constant_spec({"house", "road", "garden"}, 0);
  const auto house = make_leaf("house", random_spec(rng, {"wall", "air"}));
  std::map<TileId, NodePtr> m{{0, house}, {1, make_fill("road")}, {2, make_fill("garden")}};
  const auto t3 = make_node("town", town, {3, 3}, m);
  CHECK(total_size(*t3, Shape(10, 10)) == Shape(30, 30));
  CHECK(compose(*t3, Shape(30, 30), 1).grid.shape() == Shape(30, 30));

  const auto t5 = make_node("town", town, {5, 5}, m);
  CHECK(total_size(*t5, Shape(5, 5)) == Shape(25, 25));
  CHECK_THROWS_AS(compose(*t5, Shape(24, 25), 1), SizeError);
}

TEST_CASE("coalescing merges adjacent houses into one placement") {
  // Constant town: every abstract tile is a house, so with coalescing a single child covers all.
  const auto town = constant_spec({"house", "road"}, 0);
  Rng rng(3);
  const auto house = make_leaf("house", random_spec(rng, {"wall", "air"}));
  const auto node = make_node("town", town, {5, 5}, {{0, house}, {1, make_fill("road")}});
  std::vector<Placement> seen;
  ComposeOptions opts;
  opts.on_placement = [&](const Placement& p) { seen.push_back(p); };
  compose(*node, Shape(10, 5), 0, opts);
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].extent == Coord{10, 5, 1});

  seen.clear();
  opts.force_no_coalesce = true;
  compose(*node, Shape(10, 5), 0, opts);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0].extent == Coord{5, 5, 1});
  CHECK(seen[1].origin == Coord{5, 0, 0});
}

TEST_CASE("missing mapping entry is a mapping error") {
  const auto town = constant_spec({"house", "road"}, 1);
  Rng rng(3);
  const auto node = make_node("town", town, {2, 2}, {{0, make_fill("x")}});
  CHECK_THROWS_AS(compose(*node, Shape(4, 4), 0), MappingError);
}

TEST_CASE("rebind substitutes and leaves the original alone") {
  Rng rng(4);
  const auto town = constant_spec({"house", "road"}, 0);
  const auto house = make_leaf("house", random_spec(rng, {"wall", "air"}));
  const auto node = make_node("town", town, {5, 5}, {{0, house}, {1, make_fill("road")}});
  const auto same = rebind(node, "house", house);
  CHECK(compose(*same, Shape(10, 10), 9).grid == compose(*node, Shape(10, 10), 9).grid);

  const auto city = rebind(node, "house", node);
  CHECK(node->mapping.at(0) == house);
  CHECK(tree_depth(*city) == 3);
  CHECK(total_size(*city, Shape(4, 4)) == Shape(100, 100));
  const Level out = compose(*city, total_size(*city, Shape(2, 2)), 1);
  CHECK(out.grid.shape() == Shape(50, 50));
  CHECK_THROWS_AS(rebind(house, 0, node), StructureError);
}

TEST_CASE("heterogeneous child scales are rejected") {
  Rng rng(5);
  const auto a = make_node("a", constant_spec({"p", "q"}, 0), {2, 2}, {{0, make_fill("p")}, {1, make_fill("q")}});
  const auto b = make_node("b", constant_spec({"p", "q"}, 0), {3, 3}, {{0, make_fill("p")}, {1, make_fill("q")}});
  const auto mixed = std::make_shared<CompositionNode>(*a);
  mixed->mapping = {{0, a}, {1, b}};
  CHECK_THROWS_AS(effective_scale(*mixed), StructureError);
  CHECK_THROWS_AS(make_node("m", constant_spec({"p", "q"}, 0), {1, 1}, {{0, a}, {1, b}}), StructureError);
}

TEST_CASE("2D parent lifts into 3D children") {
  Rng rng(6);
  const auto town = constant_spec({"house", "road"}, 0);
  const auto house3 = make_leaf("house", random_spec(rng, {"wall", "air", "roof"}, 3));
  const auto node = make_node("town", town, {3, 3}, {{0, house3}, {1, make_fill("road")}}, true, 4);
  CHECK(output_ndim(*node) == 3);
  CHECK(total_size(*node, Shape(2, 2)) == Shape(6, 6, 4));
  const Level out = compose(*node, Shape(6, 6, 4), 2);
  CHECK(out.grid.shape() == Shape(6, 6, 4));
}

TEST_CASE("placements tile every region on random trees") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    int counter = 0;
    const auto tree = testutil::random_tree(rng, 3, counter);
    const Shape abstract(1 + static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(4)));
    const Shape size = total_size(*tree, abstract);
    std::vector<Placement> seen;
    ComposeOptions opts;
    opts.on_placement = [&](const Placement& p) { seen.push_back(p); };
    const Level out = compose(*tree, size, static_cast<std::uint64_t>(t), opts);
    CHECK(out.grid.shape() == size);
    std::string why;
    CHECK_MESSAGE(testutil::placements_tile(seen, why), why);
    CHECK(compose(*tree, size, static_cast<std::uint64_t>(t)).grid == out.grid);
  }
}

TEST_CASE("tree documents round trip") {
  Rng rng(8);
  const auto town = random_spec(rng, {"house", "road", "garden"});
  const auto house = make_leaf("house", random_spec(rng, {"wall", "air"}));
  const auto node =
      make_node("town", town, {5, 5}, {{0, house}, {1, make_fill("road")}, {2, make_fill("garden")}});
  const auto city = rebind(node, "house", node);
  const Json doc = save_tree(city);
  const auto back = load_tree(doc);
  CHECK(save_tree(back) == doc);
  CHECK(tree_depth(*back) == 3);
  CHECK(compose(*back, Shape(50, 50), 4) == compose(*city, Shape(50, 50), 4));
}

TEST_CASE("tree documents: references and errors") {
  Rng rng(9);
  const auto dir = std::filesystem::temp_directory_path() / "compogen_unit_tree";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto spec = random_spec(rng, {"house", "road"});
  write_json_file(dir / "town.json", generator_to_json(spec));
  Json doc = Json::parse(R"({"root":"t","nodes":{
      "t":{"generator":"town.json","subtile_size":[2,2],"mapping":{"house":"h","road":"r"},"coalesce":true},
      "h":{"fill":{"name":"wall"}}, "r":{"fill":{"name":"road"}}}})");
  write_json_file(dir / "tree.json", doc);
  const auto loaded = load_tree_file(dir / "tree.json");
  CHECK(loaded->source == "town.json");
  const Json saved = save_tree(loaded);
  CHECK(saved["nodes"]["t"] == doc["nodes"]["t"]);
  CHECK(save_tree(load_tree(saved, dir)) == saved);

  Json missing = doc;
  missing["nodes"]["t"]["generator"] = "nope.json";
  CHECK_THROWS_AS(load_tree(missing, dir), FormatError);

  Json cyclic = doc;
  cyclic["nodes"]["h"] = {{"generator", "town.json"}, {"subtile_size", {1, 1}}, {"mapping", {{"house", "t"}}}};
  CHECK_THROWS_AS(load_tree(cyclic, dir), FormatError);

  Json dangling = doc;
  dangling["nodes"]["t"]["mapping"]["road"] = "ghost";
  CHECK_THROWS_AS(load_tree(dangling, dir), FormatError);

  Json badtile = doc;
  badtile["nodes"]["t"]["mapping"]["lava"] = "r";
  CHECK_THROWS_AS(load_tree(badtile, dir), FormatError);
}

TEST_CASE("output tileset merges names in tree order") {
  Rng rng(10);
  const auto town = constant_spec({"house", "road"}, 0);
  const auto node = make_node("town", town, {2, 2},
                              {{0, make_leaf("house", random_spec(rng, {"wall", "air"}))}, {1, make_fill("road")}});
  CHECK(output_tileset(*node).names() == std::vector<std::string>{"wall", "air", "road"});
}

TEST_CASE("layout expansion") {
  const Tileset lt = Tileset::from_names({"house", "road", "garden"});
  const Tileset ft = Tileset::from_names({"road", "garden", "wall", "air"});
  const Grid layout(Shape(2, 1), std::vector<TileId>{0, 2});
  const Grid house = fitness::walled_room_target(Shape(3, 3), 2, 3);
  const Grid out = expand_layout(layout, lt, house, ft);
  CHECK(out.shape() == Shape(6, 3));
  CHECK(out.at({1, 1, 0}) == 3);
  CHECK(out.at({0, 0, 0}) == 2);
  CHECK(out.at({4, 1, 0}) == 1);

  const Grid r1 = random_layout(Shape(5, 5), 3, 1);
  CHECK(r1 == random_layout(Shape(5, 5), 3, 1));
  CHECK(r1 != random_layout(Shape(5, 5), 3, 2));
  CHECK_THROWS_AS(random_layout(RandomLayoutSpec{Shape(2, 2), {0.0, 0.0}, 0}), ConfigError);
  const Grid only = random_layout(RandomLayoutSpec{Shape(4, 4), {0.0, 1.0}, 3});
  CHECK(only == Grid(Shape(4, 4), 1));
}
