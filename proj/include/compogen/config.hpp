#pragma once

#include "compogen/fitness.hpp"
#include "compogen/generator.hpp"
#include "compogen/io.hpp"
#include "compogen/neat.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace compogen {

struct FitnessTerm {
  std::string name;
  double weight = 1.0;
  Json params = Json::object();
};

/// Everything needed to train one generator. Keys of the JSON form mirror the
/// hyperparameter table rows; parse_train_config rejects anything else.
struct TrainConfig {
  Shape level_size{10, 10};
  Tileset tileset = Tileset::from_names({"tile"});
  GenParams gen;
  neat::NeatParams neat;
  int generations = 50;
  int n_levels_per_eval = 5;
  std::vector<FitnessTerm> fitness;
  bool novelty = false;  // "novelty": "hamming" | "none"
  fitness::NoveltyConfig novelty_config;
  // Fitness is computed on downsample_windows(level, window, window_default).
  int window = 1;
  TileId window_default = 0;
  std::uint64_t master_seed = 0;

  Shape scored_size() const;
  int n_inputs() const;
  void validate() const;
};

// Throws ConfigError naming the offending key.
TrainConfig parse_train_config(const Json& j);
Json train_config_to_json(const TrainConfig& c);

std::vector<FitnessTerm> parse_fitness_terms(const Json& j);
Json fitness_terms_to_json(const std::vector<FitnessTerm>& terms);

/// Resolves fitness terms against a tileset. Targets that depend on the level
/// size are built for `scored_size`. Tile names missing from the tileset raise
/// TilesetError.
fitness::WeightedFitness build_fitness(const std::vector<FitnessTerm>& terms, const Tileset& tileset,
                                       const Shape& scored_size,
                                       const fitness::NoveltyConfig& novelty = {});

// Names accepted in the "fitness" list.
const std::vector<std::string>& fitness_names();

}  // namespace compogen
