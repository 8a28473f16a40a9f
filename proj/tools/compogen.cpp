// compogen: train, generate, compose, evaluate and export tile levels.

#include "compogen/composer.hpp"
#include "compogen/config.hpp"
#include "compogen/errors.hpp"
#include "compogen/evolve.hpp"
#include "compogen/experiments.hpp"
#include "compogen/export.hpp"
#include "compogen/presets.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace compogen;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) { return g.seed.value_or(fallback); }

// A path ending in .json is the file itself; anything else is a directory
// that receives `default_name`.
fs::path output_file(const Globals& g, const std::string& default_name) {
  if (g.out.empty()) throw ConfigError("--out is required");
  fs::path p(g.out);
  if (p.extension() == ".json" || p.extension() == ".ppm" || p.extension() == ".txt") {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
  }
  fs::create_directories(p);
  return p / default_name;
}

Json load_config_json(const std::string& path, const std::string& preset) {
  if (!path.empty() && !preset.empty()) throw ConfigError("use either --config or --preset, not both");
  if (!preset.empty()) return preset_json(preset);
  if (path.empty()) throw ConfigError("one of --config or --preset is required");
  Json j = read_json_file(path);
  // A training bundle's config.json nests the config.
  if (j.contains("config") && j.contains("decisions")) return j["config"];
  return j;
}

Level load_level(const std::string& path) {
  try {
    return level_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

NodePtr find_node(const NodePtr& root, const std::string& name) {
  if (root->name == name) return root;
  for (const auto& [_, child] : root->mapping)
    if (auto hit = find_node(child, name)) return hit;
  return nullptr;
}

std::vector<std::uint64_t> parse_seeds(const std::vector<std::uint64_t>& given, std::size_t count, const Globals& g) {
  if (!given.empty()) return given;
  std::vector<std::uint64_t> s;
  for (std::size_t i = 0; i < count; ++i) s.push_back(seed_or(g, 0) + i);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compositional tile-level generation: evolve small generators and compose them"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory, or file for single-file outputs");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on this)")->check(CLI::PositiveNumber);

  // train
  auto* train_cmd = app.add_subcommand("train", "Evolve a generator and write generator.json, metrics.csv, config.json");
  train_cmd->fallthrough();
  std::string config_path, preset;
  std::optional<int> generations, population;
  bool quiet = false;
  train_cmd->add_option("--config", config_path, "Training config JSON");
  train_cmd->add_option("--preset", preset, "Built-in config name")->check(CLI::IsMember(preset_names()));
  train_cmd->add_option("--generations", generations, "Override generations");
  train_cmd->add_option("--population", population, "Override population size");
  train_cmd->add_flag("--quiet", quiet, "Do not print per-generation progress");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Generate a level with a trained generator");
  gen_cmd->fallthrough();
  std::string generator_path, size_text;
  gen_cmd->add_option("--generator", generator_path, "generator.json or a training bundle directory")->required();
  gen_cmd->add_option("--size", size_text, "Level size WxH or WxHxD")->required();

  // compose
  auto* compose_cmd = app.add_subcommand("compose", "Compose a generator tree into one level");
  compose_cmd->fallthrough();
  std::string tree_path, abstract_text;
  std::vector<std::string> rebinds;
  bool no_coalesce = false;
  compose_cmd->add_option("--tree", tree_path, "Tree document JSON")->required();
  auto* size_opt = compose_cmd->add_option("--size", size_text, "Final size WxH or WxHxD");
  compose_cmd->add_option("--abstract", abstract_text, "Abstract size of the root; final size follows")->excludes(size_opt);
  compose_cmd->add_flag("--no-coalesce", no_coalesce, "Expand every abstract tile separately");
  compose_cmd->add_option("--rebind", rebinds, "Root rebinding tile=node, node taken from the same tree");
  std::string save_tree_path;
  compose_cmd->add_option("--save-tree", save_tree_path, "Also write the (rebound) tree document here");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score levels with a fitness spec");
  eval_cmd->fallthrough();
  std::vector<std::string> level_paths;
  eval_cmd->add_option("--level", level_paths, "Level JSON (repeatable)")->required();
  eval_cmd->add_option("--config", config_path, "Training config whose fitness is used");
  eval_cmd->add_option("--preset", preset, "Built-in config whose fitness is used")->check(CLI::IsMember(preset_names()));

  // export
  auto* export_cmd = app.add_subcommand("export", "Export a level as a PPM image or voxel list");
  export_cmd->fallthrough();
  std::string level_path, format;
  export_cmd->add_option("--level", level_path, "Level JSON")->required();
  export_cmd->add_option("--format", format, "ppm or voxel")->required()->check(CLI::IsMember({"ppm", "voxel"}));

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run the window-size or composed-vs-flat study");
  exp_cmd->fallthrough();
  std::string kind;
  std::vector<int> windows{1, 2, 3, 4, 5, 10};
  std::vector<std::uint64_t> seeds;
  int n_seeds = 3, layouts = 20;
  bool full_scale = false;
  exp_cmd->add_option("kind", kind, "window_size or compose_vs_flat")
      ->required()
      ->check(CLI::IsMember({"window_size", "compose_vs_flat"}));
  exp_cmd->add_option("--windows", windows, "Window sizes")->delimiter(',');
  exp_cmd->add_option("--seeds", seeds, "Explicit seeds")->delimiter(',');
  exp_cmd->add_option("--n-seeds", n_seeds, "Number of seeds counted from --seed when --seeds is absent");
  exp_cmd->add_option("--layouts", layouts, "Random town layouts");
  exp_cmd->add_option("--generations", generations, "Generations per run");
  exp_cmd->add_option("--population", population, "Population size per run");
  exp_cmd->add_flag("--full-scale", full_scale, "Full-scale values: 150 generations, population 50, 10 seeds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      TrainConfig cfg = parse_train_config(load_config_json(config_path, preset));
      if (generations) cfg.generations = *generations;
      if (population) cfg.neat.population_size = *population;
      cfg.master_seed = seed_or(g, cfg.master_seed);
      cfg.validate();
      if (g.out.empty()) throw ConfigError("--out is required");
      TrainOptions opts{g.threads, {}};
      if (!quiet)
        opts.on_generation = [](const GenerationMetrics& m) {
          std::cerr << fmt::format("generation {:4d}  max {:.4f}  mean {:.4f}\n", m.generation, m.max_fitness,
                                   m.mean_fitness);
        };
      const auto result = train(cfg, opts);
      write_bundle(result, g.out);
      std::cout << fmt::format("best fitness {:.6f}; wrote {}\n", result.best_fitness, g.out);
    } else if (*gen_cmd) {
      fs::path p(generator_path);
      if (fs::is_directory(p)) p /= "generator.json";
      const GeneratorSpec spec = generator_from_json(read_json_file(p));
      const Shape size = Shape::parse(size_text);
      const Grid level = generate(spec, size, seed_or(g, 0));
      const auto out = output_file(g, "level.json");
      write_json_file(out, level_to_json({level, spec.tileset}));
      std::cout << fmt::format("wrote {} level to {}\n", size.str(), out.string());
    } else if (*compose_cmd) {
      NodePtr root = load_tree_file(tree_path);
      for (const auto& r : rebinds) {
        const auto eq = r.find('=');
        if (eq == std::string::npos) throw ConfigError("--rebind expects tile=node, got '" + r + "'");
        const std::string tile = r.substr(0, eq), node = r.substr(eq + 1);
        NodePtr child = find_node(root, node);
        if (!child) throw ConfigError("--rebind: no node named '" + node + "' in the tree");
        root = rebind(root, tile, child);
      }
      if (!save_tree_path.empty()) write_json_file(save_tree_path, save_tree(root));
      if (size_text.empty() && abstract_text.empty()) throw ConfigError("compose needs --size or --abstract");
      const Shape size = abstract_text.empty() ? Shape::parse(size_text) : total_size(*root, Shape::parse(abstract_text));
      ComposeOptions opts;
      opts.force_no_coalesce = no_coalesce;
      const Level level = compose(*root, size, seed_or(g, 0), opts);
      const auto out = output_file(g, "level.json");
      write_json_file(out, level_to_json(level));
      std::cout << fmt::format("wrote {} level (tree depth {}) to {}\n", size.str(), tree_depth(*root), out.string());
    } else if (*eval_cmd) {
      const TrainConfig cfg = parse_train_config(load_config_json(config_path, preset));
      std::vector<Grid> levels;
      for (const auto& path : level_paths) {
        const Level l = load_level(path);
        const Grid remapped = remap_tiles(l, cfg.tileset);
        levels.push_back(cfg.window > 1 ? downsample_windows(remapped, cfg.window, cfg.window_default) : remapped);
      }
      for (const auto& l : levels)
        if (l.shape() != levels.front().shape()) throw ShapeError("all levels must share one shape");
      const auto w = build_fitness(cfg.fitness, cfg.tileset, levels.front().shape(), cfg.novelty_config);
      if (w.needs(fitness::TermKind::IntraNovelty) && levels.size() < 2)
        throw ArityError("intra_novelty needs at least two --level files");
      auto values = fitness::component_values(w, levels);
      for (std::size_t c = 0; c < w.components.size(); ++c) {
        const auto& comp = w.components[c];
        if (comp.kind == fitness::TermKind::Novelty) {
          std::cout << fmt::format("{:<20} n/a (population measure, scored 0)  weight {}\n", comp.name, comp.weight);
          continue;
        }
        std::cout << fmt::format("{:<20} {:.6f}  weight {}\n", comp.name, values[c], comp.weight);
        if (comp.name == "reachability") {
          const Json& p = cfg.fitness[c].params;
          const auto& ts = cfg.tileset;
          for (std::size_t i = 0; i < levels.size(); ++i) {
            const auto r = fitness::reachability_fitness(
                levels[i], ts.require(p.value("house", std::string("house"))), ts.require(p.value("road", std::string("road"))),
                ts.require(p.value("garden", std::string("garden"))));
            std::cout << fmt::format(
                "  level {}: houses {} a {:.6f} c_road {} c_house_road {} d_road {} d_house_road {} b {:.6f} a*b {:.6f}\n", i,
                r.houses, r.a, r.c_road, r.c_house_road, r.d_road, r.d_house_road, r.b, r.fitness);
          }
        }
      }
      std::cout << fmt::format("{:<20} {:.6f}\n", "total", fitness::combine(w.weights(), values));
    } else if (*export_cmd) {
      const Level level = load_level(level_path);
      const bool ppm = format == "ppm";
      const std::string text = ppm ? export_ppm(level) : export_voxels(level);
      fs::path out(g.out);
      if (g.out.empty()) throw ConfigError("--out is required");
      if (fs::is_directory(out)) out /= ppm ? "level.ppm" : "level.txt";
      write_text_file(out, text);
      std::cout << fmt::format("wrote {}\n", out.string());
    } else if (*exp_cmd) {
      if (g.out.empty()) throw ConfigError("--out is required");
      if (full_scale) {
        generations = generations.value_or(150);
        population = population.value_or(50);
        n_seeds = 10;
      }
      const auto seed_list = parse_seeds(seeds, static_cast<std::size_t>(n_seeds), g);
      auto progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
      auto shrink = [&](TrainConfig c) {
        c.generations = generations.value_or(40);
        c.neat.population_size = population.value_or(24);
        return c;
      };
      if (kind == "window_size") {
        WindowSizeConfig cfg{shrink(parse_train_config(preset_json("hierarchy"))), windows, seed_list, 10, g.threads};
        const auto result = run_window_size_experiment(cfg, progress);
        write_window_size_outputs(cfg, result, g.out);
        for (std::size_t i = 0; i < windows.size(); ++i)
          std::cout << fmt::format("window {:>3}: mean final max fitness {:.4f}\n", windows[i], result.mean_final[i]);
      } else {
        ComposeVsFlatConfig cfg{shrink(parse_train_config(preset_json("flat"))),
                                shrink(parse_train_config(preset_json("composed_town"))),
                                shrink(parse_train_config(preset_json("composed_house"))),
                                layouts,
                                seed_list,
                                5,
                                g.threads};
        const auto result = run_compose_vs_flat(cfg, progress);
        write_compose_vs_flat_outputs(result, g.out);
        std::cout << fmt::format("flat {:.4f}  composed {:.4f}\n", result.mean_flat, result.mean_composed);
      }
    }
  } catch (const compogen::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
