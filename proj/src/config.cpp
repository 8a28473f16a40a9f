#include "compogen/config.hpp"

#include "compogen/errors.hpp"
#include "compogen/layout.hpp"

#include <cmath>

namespace compogen {

namespace {

const char* const kTopKeys[] = {
    "level_size", "tileset", "context_size", "one_hot", "num_random_vars", "perturb_size",
    "iterations", "input_center_tile", "default_tile", "start", "novelty", "novelty_k",
    "novelty_archive_adds", "n_levels_per_eval", "generations", "population_size", "fitness",
    "neat", "window", "window_default", "seed"};

const char* const kNeatKeys[] = {"weight_mutate_rate", "weight_sigma", "weight_reset_prob",
                                 "add_connection_rate", "add_node_rate", "c1", "c2", "c3",
                                 "compatibility_threshold", "survival_fraction", "elitism",
                                 "crossover_rate", "disable_inherit_prob"};

template <std::size_t N>
void check_keys(const Json& j, const char* const (&allowed)[N], const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T read(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

TileId tile_param(const Json& params, const char* key, const char* fallback, const Tileset& tileset) {
  const std::string name = params.contains(key) ? params[key].get<std::string>() : fallback;
  auto t = tileset.find(name);
  if (!t) throw TilesetError("fitness tile '" + name + "' is not in the tileset");
  return *t;
}

void check_params(const FitnessTerm& term, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : term.params.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("fitness '" + term.name + "': unknown parameter '" + key + "'");
  }
}

}  // namespace

const std::vector<std::string>& fitness_names() {
  static const std::vector<std::string> names{"probability", "reachability", "equal_distribution",
                                              "target_overlap", "house", "garden", "boundary_layout",
                                              "walled_room", "layout_overlap", "novelty",
                                              "intra_novelty"};
  return names;
}

Shape TrainConfig::scored_size() const {
  const auto& s = level_size;
  if (window == 1) return s;
  return s.ndim() == 2 ? Shape(s[0] / window, s[1] / window)
                       : Shape(s[0] / window, s[1] / window, s[2] / window);
}

int TrainConfig::n_inputs() const {
  return input_size(gen, static_cast<int>(tileset.size()), level_size.ndim());
}

void TrainConfig::validate() const {
  if (generations < 1) throw ConfigError("generations must be at least 1");
  if (n_levels_per_eval < 1) throw ConfigError("n_levels_per_eval must be at least 1");
  if (window < 1) throw ConfigError("window must be at least 1");
  for (int a = 0; a < level_size.ndim(); ++a)
    if (level_size[a] % window != 0) throw ConfigError("level_size must be divisible by window");
  if (!tileset.contains(window_default)) throw ConfigError("window_default outside the tileset");
  gen.validate(tileset.size());
  neat.validate();
  if (fitness.empty()) throw ConfigError("fitness must list at least one component");
  for (const auto& t : fitness) {
    if ((t.name == "novelty" || t.name == "intra_novelty") && !novelty)
      throw ConfigError("fitness '" + t.name + "' requires \"novelty\": \"hamming\"");
  }
  if (novelty_config.k < 1) throw ConfigError("novelty_k must be at least 1");
  if (novelty_config.archive_adds < 0) throw ConfigError("novelty_archive_adds must be >= 0");
  // Resolving the fitness surfaces bad tile names and weights now.
  build_fitness(fitness, tileset, scored_size(), novelty_config).validate();
}

std::vector<FitnessTerm> parse_fitness_terms(const Json& j) {
  if (!j.is_array()) throw ConfigError("fitness must be an array of {name, weight, params}");
  std::vector<FitnessTerm> terms;
  for (const auto& e : j) {
    if (!e.is_object()) throw ConfigError("fitness entries must be objects");
    for (const auto& [key, _] : e.items())
      if (key != "name" && key != "weight" && key != "params")
        throw ConfigError("fitness entry: unknown key '" + key + "'");
    if (!e.contains("name")) throw ConfigError("fitness entry: missing key 'name'");
    FitnessTerm t;
    t.name = e["name"].get<std::string>();
    bool known = false;
    for (const auto& n : fitness_names()) known = known || n == t.name;
    if (!known) throw ConfigError("unknown fitness '" + t.name + "'");
    t.weight = read(e, "weight", 1.0);
    if (e.contains("params")) t.params = e["params"];
    if (!t.params.is_object()) throw ConfigError("fitness params must be an object");
    terms.push_back(std::move(t));
  }
  return terms;
}

Json fitness_terms_to_json(const std::vector<FitnessTerm>& terms) {
  Json arr = Json::array();
  for (const auto& t : terms) arr.push_back({{"name", t.name}, {"weight", t.weight}, {"params", t.params}});
  return arr;
}

TrainConfig parse_train_config(const Json& j) {
  check_keys(j, kTopKeys, "config");
  for (const char* required : {"level_size", "tileset", "fitness"})
    if (!j.contains(required)) throw ConfigError(std::string("config: missing required key '") + required + "'");

  TrainConfig c;
  try {
    c.level_size = Shape::of(j["level_size"].get<std::vector<int>>());
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key 'level_size' must be a list of 2 or 3 integers");
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("config key 'level_size': ") + e.what());
  }
  try {
    c.tileset = tileset_from_json(j["tileset"]);
  } catch (const FormatError& e) {
    throw ConfigError(std::string("config key 'tileset': ") + e.what());
  }
  auto tile_key = [&](const char* key, TileId fallback) {
    if (!j.contains(key)) return fallback;
    auto t = c.tileset.find(read<std::string>(j, key, ""));
    if (!t) throw ConfigError(std::string("config key '") + key + "' names a tile outside the tileset");
    return *t;
  };

  c.gen.context_size = read(j, "context_size", c.gen.context_size);
  c.gen.one_hot = read(j, "one_hot", c.gen.one_hot);
  c.gen.num_random_vars = read(j, "num_random_vars", c.gen.num_random_vars);
  c.gen.perturb_size = read(j, "perturb_size", c.gen.perturb_size);
  c.gen.iterations = read(j, "iterations", c.gen.iterations);
  c.gen.input_center_tile = read(j, "input_center_tile", c.gen.input_center_tile);
  c.gen.default_tile = tile_key("default_tile", 0);
  const auto start = read<std::string>(j, "start", "random");
  if (start == "random") {
    c.gen.start = StartPolicy::Random;
  } else if (start == "default") {
    c.gen.start = StartPolicy::DefaultTile;
  } else {
    throw ConfigError("config key 'start' must be \"random\" or \"default\"");
  }

  const auto novelty = read<std::string>(j, "novelty", "none");
  if (novelty != "none" && novelty != "hamming")
    throw ConfigError("config key 'novelty' must be \"none\" or \"hamming\"");
  c.novelty = novelty == "hamming";
  c.novelty_config.k = read(j, "novelty_k", c.novelty_config.k);
  c.novelty_config.archive_adds = read(j, "novelty_archive_adds", c.novelty_config.archive_adds);

  c.n_levels_per_eval = read(j, "n_levels_per_eval", c.n_levels_per_eval);
  c.generations = read(j, "generations", c.generations);
  c.neat.population_size = read(j, "population_size", c.neat.population_size);
  c.window = read(j, "window", c.window);
  c.window_default = tile_key("window_default", 0);
  c.master_seed = read<std::uint64_t>(j, "seed", 0);

  if (j.contains("neat")) {
    const Json& n = j["neat"];
    check_keys(n, kNeatKeys, "config.neat");
    c.neat.weight_mutate_rate = read(n, "weight_mutate_rate", c.neat.weight_mutate_rate);
    c.neat.weight_sigma = read(n, "weight_sigma", c.neat.weight_sigma);
    c.neat.weight_reset_prob = read(n, "weight_reset_prob", c.neat.weight_reset_prob);
    c.neat.add_connection_rate = read(n, "add_connection_rate", c.neat.add_connection_rate);
    c.neat.add_node_rate = read(n, "add_node_rate", c.neat.add_node_rate);
    c.neat.c1 = read(n, "c1", c.neat.c1);
    c.neat.c2 = read(n, "c2", c.neat.c2);
    c.neat.c3 = read(n, "c3", c.neat.c3);
    c.neat.compatibility_threshold = read(n, "compatibility_threshold", c.neat.compatibility_threshold);
    c.neat.survival_fraction = read(n, "survival_fraction", c.neat.survival_fraction);
    c.neat.elitism = read(n, "elitism", c.neat.elitism);
    c.neat.crossover_rate = read(n, "crossover_rate", c.neat.crossover_rate);
    c.neat.disable_inherit_prob = read(n, "disable_inherit_prob", c.neat.disable_inherit_prob);
  }

  c.fitness = parse_fitness_terms(j["fitness"]);
  try {
    c.validate();
  } catch (const TilesetError& e) {
    throw ConfigError(std::string("config key 'fitness': ") + e.what());
  } catch (const TileError& e) {
    throw ConfigError(std::string("config key 'fitness': ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("config key 'fitness': ") + e.what());
  } catch (const SizeError& e) {
    throw ConfigError(std::string("config key 'fitness': ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("config key 'fitness': ") + e.what());
  }
  return c;
}

Json train_config_to_json(const TrainConfig& c) {
  const auto& n = c.neat;
  Json j;
  j["level_size"] = c.level_size.to_vector();
  j["tileset"] = tileset_to_json(c.tileset);
  j["context_size"] = c.gen.context_size;
  j["one_hot"] = c.gen.one_hot;
  j["num_random_vars"] = c.gen.num_random_vars;
  j["perturb_size"] = c.gen.perturb_size;
  j["iterations"] = c.gen.iterations;
  j["input_center_tile"] = c.gen.input_center_tile;
  j["default_tile"] = c.tileset.name(c.gen.default_tile);
  j["start"] = c.gen.start == StartPolicy::Random ? "random" : "default";
  j["novelty"] = c.novelty ? "hamming" : "none";
  j["novelty_k"] = c.novelty_config.k;
  j["novelty_archive_adds"] = c.novelty_config.archive_adds;
  j["n_levels_per_eval"] = c.n_levels_per_eval;
  j["generations"] = c.generations;
  j["population_size"] = n.population_size;
  j["window"] = c.window;
  j["window_default"] = c.tileset.name(c.window_default);
  j["seed"] = c.master_seed;
  j["neat"] = {{"weight_mutate_rate", n.weight_mutate_rate},
               {"weight_sigma", n.weight_sigma},
               {"weight_reset_prob", n.weight_reset_prob},
               {"add_connection_rate", n.add_connection_rate},
               {"add_node_rate", n.add_node_rate},
               {"c1", n.c1},
               {"c2", n.c2},
               {"c3", n.c3},
               {"compatibility_threshold", n.compatibility_threshold},
               {"survival_fraction", n.survival_fraction},
               {"elitism", n.elitism},
               {"crossover_rate", n.crossover_rate},
               {"disable_inherit_prob", n.disable_inherit_prob}};
  j["fitness"] = fitness_terms_to_json(c.fitness);
  return j;
}

fitness::WeightedFitness build_fitness(const std::vector<FitnessTerm>& terms, const Tileset& tileset,
                                       const Shape& scored_size, const fitness::NoveltyConfig& novelty) {
  using fitness::Component;
  using fitness::TermKind;
  fitness::WeightedFitness w;
  w.novelty = novelty;
  for (const auto& term : terms) {
    Component comp{term.name, term.weight, TermKind::Level, {}};
    const Json& p = term.params;
    if (term.name == "probability") {
      check_params(term, {"target"});
      if (!p.contains("target") || !p["target"].is_object())
        throw ConfigError("fitness 'probability' needs a target {tile: fraction} object");
      TileDistribution target{std::vector<double>(tileset.size(), 0.0)};
      double sum = 0.0;
      for (const auto& [name, value] : p["target"].items()) {
        auto t = tileset.find(name);
        if (!t) throw TilesetError("probability target tile '" + name + "' is not in the tileset");
        const double v = value.get<double>();
        if (v < 0.0) throw ConfigError("probability target fractions must be non-negative");
        target.probs[static_cast<std::size_t>(*t)] = v;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("probability target must sum to 1");
      comp.score = [target](const Grid& g) { return fitness::probability_fitness(g, target); };
    } else if (term.name == "reachability") {
      check_params(term, {"house", "road", "garden", "mode"});
      const TileId house = tile_param(p, "house", "house", tileset);
      const TileId road = tile_param(p, "road", "road", tileset);
      const TileId garden = tile_param(p, "garden", "garden", tileset);
      const std::string mode = p.value("mode", std::string("product"));
      if (mode != "product" && mode != "mean")
        throw ConfigError("reachability mode must be \"product\" or \"mean\"");
      const bool mean = mode == "mean";
      comp.score = [=](const Grid& g) {
        const auto r = fitness::reachability_fitness(g, house, road, garden);
        return mean ? 0.5 * (r.a + r.b) : r.fitness;
      };
    } else if (term.name == "equal_distribution") {
      check_params(term, {"classes"});
      std::array<TileId, 3> classes{};
      const auto names = p.value("classes", std::vector<std::string>{"house", "road", "garden"});
      if (names.size() != 3) throw ConfigError("equal_distribution needs exactly three classes");
      for (std::size_t i = 0; i < 3; ++i) {
        auto t = tileset.find(names[i]);
        if (!t) throw TilesetError("equal_distribution tile '" + names[i] + "' is not in the tileset");
        classes[i] = *t;
      }
      comp.score = [classes](const Grid& g) { return fitness::equal_distribution_fitness(g, classes); };
    } else if (term.name == "target_overlap") {
      check_params(term, {"target"});
      if (!p.contains("target")) throw ConfigError("fitness 'target_overlap' needs a target");
      const Json& t = p["target"];
      reject_unknown_keys(t, {"dims", "tiles"}, "target_overlap target");
      Grid target(Shape::of(t.at("dims").get<std::vector<int>>()), t.at("tiles").get<std::vector<TileId>>());
      validate_tiles(target, tileset);
      if (target.shape() != scored_size)
        throw ShapeError("target_overlap target " + target.shape().str() + " does not match level size " +
                         scored_size.str());
      comp.score = [target](const Grid& g) { return fitness::target_overlap_fitness(g, target); };
    } else if (term.name == "house") {
      check_params(term, {"wall", "air", "roof"});
      const Grid target = fitness::hollow_cube_target(scored_size, tile_param(p, "wall", "wall", tileset),
                                                      tile_param(p, "air", "air", tileset),
                                                      tile_param(p, "roof", "roof", tileset));
      comp.score = [target](const Grid& g) { return fitness::target_overlap_fitness(g, target); };
    } else if (term.name == "garden") {
      check_params(term, {"tree", "flower", "water", "grass"});
      const TileId tree = tile_param(p, "tree", "tree", tileset);
      const TileId flower = tile_param(p, "flower", "flower", tileset);
      const TileId water = tile_param(p, "water", "water", tileset);
      const TileId grass = tile_param(p, "grass", "grass", tileset);
      comp.score = [=](const Grid& g) { return fitness::garden_fitness(g, tree, flower, water, grass).fitness; };
    } else if (term.name == "boundary_layout") {
      check_params(term, {"house", "road", "garden"});
      const Grid target = fitness::boundary_layout_target(
          scored_size, tile_param(p, "house", "house", tileset), tile_param(p, "road", "road", tileset),
          tile_param(p, "garden", "garden", tileset));
      comp.score = [target](const Grid& g) { return fitness::target_overlap_fitness(g, target); };
    } else if (term.name == "walled_room") {
      check_params(term, {"wall", "empty"});
      const Grid target = fitness::walled_room_target(scored_size, tile_param(p, "wall", "wall", tileset),
                                                      tile_param(p, "empty", "air", tileset));
      comp.score = [target](const Grid& g) { return fitness::target_overlap_fitness(g, target); };
    } else if (term.name == "layout_overlap") {
      // Overlap with a seeded random town layout, either abstract (one cell per
      // block) or expanded with a walled house template.
      check_params(term, {"seed", "block", "expand", "wall", "empty"});
      const auto seed = p.value("seed", std::uint64_t{0});
      const bool expand = p.value("expand", false);
      const int block = p.value("block", 5);
      if (block < 1) throw ConfigError("layout_overlap block must be positive");
      const Tileset layout_tiles = Tileset::from_names({"house", "road", "garden"});
      Grid target(scored_size, 0);
      if (!expand) {
        const Grid layout = random_layout(scored_size, 3, seed);
        std::vector<TileId> ids;
        for (const char* name : {"house", "road", "garden"}) {
          auto t = tileset.find(name);
          if (!t) throw TilesetError(std::string("layout_overlap needs tile '") + name + "' in the tileset");
          ids.push_back(*t);
        }
        for (std::size_t i = 0; i < layout.size(); ++i) target[i] = ids[static_cast<std::size_t>(layout[i])];
      } else {
        if (scored_size.ndim() != 2 || scored_size[0] % block != 0 || scored_size[1] % block != 0)
          throw ConfigError("layout_overlap level size must be a 2D multiple of block");
        const Grid layout = random_layout(Shape(scored_size[0] / block, scored_size[1] / block), 3, seed);
        const Grid house = fitness::walled_room_target(Shape(block, block), tile_param(p, "wall", "wall", tileset),
                                                       tile_param(p, "empty", "air", tileset));
        target = expand_layout(layout, layout_tiles, house, tileset);
      }
      comp.score = [target](const Grid& g) { return fitness::target_overlap_fitness(g, target); };
    } else if (term.name == "novelty") {
      check_params(term, {});
      comp.kind = TermKind::Novelty;
    } else if (term.name == "intra_novelty") {
      check_params(term, {});
      comp.kind = TermKind::IntraNovelty;
    } else {
      throw ConfigError("unknown fitness '" + term.name + "'");
    }
    w.components.push_back(std::move(comp));
  }
  return w;
}

}  // namespace compogen
