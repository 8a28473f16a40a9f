#include "compogen/errors.hpp"
#include "compogen/evolve.hpp"
#include "compogen/export.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

using namespace compogen;

namespace {

TrainConfig small_config() {
  return parse_train_config(Json::parse(R"({
    "level_size": [6, 6],
    "tileset": ["house", "road", "garden"],
    "generations": 4,
    "population_size": 10,
    "n_levels_per_eval": 2,
    "iterations": 2,
    "fitness": [
      {"name": "probability", "params": {"target": {"house": 0.4, "road": 0.3, "garden": 0.3}}},
      {"name": "reachability"}
    ]
  })"));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("seed streams are deterministic and distinct") {
  CHECK(seed_stream(1, 2, 3, 4) == seed_stream(1, 2, 3, 4));
  std::unordered_set<std::uint64_t> seen;
  for (int g = 0; g < 10; ++g)
    for (int i = 0; i < 100; ++i)
      for (int l = 0; l < 100; ++l) seen.insert(seed_stream(7, g, i, l));
  CHECK(seen.size() == 100000);
  CHECK(seed_stream(7, 0, 0, 0) != seed_stream(8, 0, 0, 0));
  CHECK_THROWS_AS(seed_stream(0, -1, 0, 0), SizeError);
}

TEST_CASE("evaluate_genome: self overlap and constant output") {
  TrainConfig c = small_config();
  c.n_levels_per_eval = 1;
  c.gen.start = StartPolicy::DefaultTile;
  c.gen.num_random_vars = 0;
  Rng rng(1);
  neat::Genome g = neat::init_genome(c.n_inputs(), 3, rng);
  // Generate the level once, then score the genome against that very level.
  const Grid level = generate(make_spec(g, c), c.level_size, derive_seed(11, 0));
  FitnessTerm self{"target_overlap", 1.0, Json::object()};
  self.params["target"] = {{"dims", level.shape().to_vector()}, {"tiles", std::vector<TileId>(level.cells().begin(), level.cells().end())}};
  c.fitness = {self};
  CHECK(evaluate_fitness(g, c, 11) == 1.0);

  // A constant network matches a degenerate single-tile target exactly.
  for (auto& conn : g.connections) conn.weight = (conn.from == c.n_inputs() && conn.to == c.n_inputs() + 2) ? 1.0 : 0.0;
  c.fitness = {{"probability", 1.0, Json::parse(R"({"target": {"road": 1.0}})")}};
  CHECK(evaluate_fitness(g, c, 3) == doctest::Approx(1.0));
  CHECK(evaluate_fitness(g, c, 3) == evaluate_fitness(g, c, 3));

  neat::Genome wrong = neat::init_genome(3, 3, rng);
  CHECK_THROWS_AS(evaluate_fitness(wrong, c, 0), SpecError);
}

TEST_CASE("train records one metrics row per generation") {
  const TrainConfig c = small_config();
  const auto r = train(c);
  REQUIRE(r.metrics.size() == 4);
  for (std::size_t g = 0; g < r.metrics.size(); ++g) {
    const auto& m = r.metrics[g];
    CHECK(m.generation == static_cast<int>(g));
    CHECK(m.max_fitness >= m.mean_fitness);
    CHECK(m.max_fitness == *std::max_element(r.fitnesses[g].begin(), r.fitnesses[g].end()));
    for (double f : r.fitnesses[g]) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
    if (g > 0) CHECK(m.max_fitness >= r.metrics[g - 1].max_fitness);
  }
  CHECK(r.best_fitness == r.metrics.back().max_fitness);
  CHECK(r.decisions.contains("offspring_allocation"));
}

TEST_CASE("train is deterministic across runs and thread counts") {
  TrainConfig c = small_config();
  c.master_seed = 5;
  const auto a = train(c, {1, {}});
  const auto b = train(c, {1, {}});
  const auto d = train(c, {4, {}});
  CHECK(a.metrics == b.metrics);
  CHECK(a.metrics == d.metrics);
  CHECK(a.best == d.best);
  c.master_seed = 6;
  CHECK(train(c).metrics != a.metrics);
}

TEST_CASE("novelty training runs and stays bounded") {
  TrainConfig c = small_config();
  c.novelty = true;
  c.fitness.push_back({"novelty", 1.0, Json::object()});
  c.fitness.push_back({"intra_novelty", 1.0, Json::object()});
  const auto r = train(c);
  for (const auto& row : r.fitnesses)
    for (double f : row) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
}

TEST_CASE("window downsampling during training") {
  TrainConfig c = small_config();
  c.level_size = Shape(12, 12);
  c.window = 2;
  c.window_default = 2;
  c.generations = 2;
  CHECK(c.scored_size() == Shape(6, 6));
  CHECK(train(c).metrics.size() == 2);
}

TEST_CASE("bundle files") {
  const auto r = train(small_config());
  const auto dir = std::filesystem::temp_directory_path() / "compogen_unit_bundle";
  std::filesystem::remove_all(dir);
  write_bundle(r, dir);
  const std::string csv = slurp(dir / "metrics.csv");
  CHECK(csv.rfind("generation,max_fitness,mean_fitness\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(generator_from_json(read_json_file(dir / "generator.json")) == r.best);
  const Json cfg = read_json_file(dir / "config.json");
  CHECK(parse_train_config(cfg["config"]).generations == 4);
}

TEST_CASE("parallel_for rethrows worker errors") {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw EvaluationError("boom");
                  }),
                  EvaluationError);
}

TEST_CASE("ppm and voxel export") {
  const Level one{Grid(Shape(1, 1), 0), Tileset({"red"}, {Rgb{255, 0, 0}}, {"stone"})};
  CHECK(export_ppm(one) == "P3\n1 1\n255\n255 0 0\n");
  const Level two{Grid(Shape(2, 1, 1), 0), one.tileset};
  CHECK(export_voxels(two) == "0 0 0 stone\n1 0 0 stone\n");
  CHECK_THROWS_AS(export_ppm(two), FormatError);
}
