#include "compogen/experiments.hpp"

#include "compogen/composer.hpp"
#include "compogen/errors.hpp"
#include "compogen/layout.hpp"

#include <fmt/format.h>

namespace compogen {

namespace {

constexpr std::uint64_t kLayoutDomain = 0x1a7;
constexpr std::uint64_t kComposeDomain = 0xc0;

void report(const Progress& p, const std::string& msg) {
  if (p) p(msg);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void WindowSizeConfig::validate() const {
  if (windows.empty()) throw ConfigError("window sizes must not be empty");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  for (int k : windows)
    if (k < 1) throw ConfigError("window sizes must be at least 1");
  if (base_size < 1) throw ConfigError("base size must be positive");
}

TrainConfig window_config(const WindowSizeConfig& cfg, int window, std::uint64_t seed) {
  TrainConfig c = cfg.base;
  const int n = cfg.base_size * window;
  c.level_size = cfg.base.level_size.ndim() == 2 ? Shape(n, n) : Shape(n, n, n);
  c.window = window;
  c.master_seed = seed;
  return c;
}

WindowSizeResult run_window_size_experiment(const WindowSizeConfig& cfg, const Progress& progress) {
  cfg.validate();
  WindowSizeResult result;
  for (int k : cfg.windows) {
    std::vector<double> finals;
    for (auto seed : cfg.seeds) {
      const auto tr = train(window_config(cfg, k, seed), {cfg.threads, {}});
      WindowRun run{k, seed, tr.metrics};
      finals.push_back(run.final_max());
      report(progress, fmt::format("window {} seed {}: final max fitness {:.4f}", k, seed, run.final_max()));
      result.runs.push_back(std::move(run));
    }
    result.mean_final.push_back(mean(finals));
  }
  return result;
}

void write_window_size_outputs(const WindowSizeConfig& cfg, const WindowSizeResult& result,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& r : result.runs)
    write_text_file(dir / fmt::format("window_{}_seed_{}.csv", r.window, r.seed), metrics_csv(r.metrics));
  std::string summary = "window,mean_final_max_fitness\n";
  for (std::size_t i = 0; i < cfg.windows.size(); ++i)
    summary += fmt::format("{},{}\n", cfg.windows[i], result.mean_final[i]);
  write_text_file(dir / "summary.csv", summary);
}

void ComposeVsFlatConfig::validate() const {
  if (layouts < 1) throw ConfigError("layouts must be at least 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (block < 1) throw ConfigError("block must be positive");
  if (town.level_size.ndim() != 2 || flat.level_size != Shape(town.level_size[0] * block, town.level_size[1] * block))
    throw ConfigError("flat level size must be the town size times the block");
  if (house.level_size != Shape(block, block)) throw ConfigError("house level size must equal the block");
}

Tileset layout_tileset() { return Tileset::from_names({"house", "road", "garden"}); }
Tileset flat_tileset() { return Tileset::from_names({"road", "garden", "wall", "air"}); }
Tileset house_tileset() { return Tileset::from_names({"wall", "air"}); }

std::uint64_t layout_seed(int layout) { return static_cast<std::uint64_t>(layout); }

Grid layout_for(int layout, int block_count) {
  return random_layout(Shape(block_count, block_count), 3, layout_seed(layout));
}

Grid flat_target(const Grid& layout, int block) {
  const Tileset flat = flat_tileset();
  const Grid house = fitness::walled_room_target(Shape(block, block), flat.require("wall"), flat.require("air"));
  return expand_layout(layout, layout_tileset(), house, flat);
}

TrainConfig with_layout(TrainConfig c, int layout, bool expand, int block) {
  for (auto& term : c.fitness) {
    if (term.name != "layout_overlap") continue;
    term.params["seed"] = layout_seed(layout);
    term.params["expand"] = expand;
    if (expand) term.params["block"] = block;
  }
  return c;
}

ComposeVsFlatResult run_compose_vs_flat(const ComposeVsFlatConfig& cfg, const Progress& progress) {
  cfg.validate();
  ComposeVsFlatResult result;
  const int blocks = cfg.town.level_size[0];

  // The house target does not depend on the layout, so one house per seed.
  std::vector<GeneratorSpec> houses;
  std::vector<double> house_finals;
  for (auto seed : cfg.seeds) {
    TrainConfig hc = cfg.house;
    hc.master_seed = seed;
    auto tr = train(hc, {cfg.threads, {}});
    report(progress, fmt::format("house seed {}: final max fitness {:.4f}", seed, tr.metrics.back().max_fitness));
    house_finals.push_back(tr.metrics.back().max_fitness);
    result.house.push_back(tr.metrics);
    houses.push_back(std::move(tr.best));
  }

  std::vector<double> flats, composed;
  for (int l = 0; l < cfg.layouts; ++l) {
    const Grid target = flat_target(layout_for(l, blocks), cfg.block);
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
      // Both arms share the NEAT seed for a given (layout, seed) pair.
      const std::uint64_t master = derive_seed(cfg.seeds[s], {kLayoutDomain, static_cast<std::uint64_t>(l)});
      TrainConfig fc = with_layout(cfg.flat, l, true, cfg.block);
      fc.master_seed = master;
      TrainConfig tc = with_layout(cfg.town, l, false, cfg.block);
      tc.master_seed = master;
      const auto flat = train(fc, {cfg.threads, {}});
      const auto town = train(tc, {cfg.threads, {}});

      const Tileset lt = town.best.tileset;
      std::map<TileId, NodePtr> mapping{{lt.require("house"), make_leaf("house", houses[s])},
                                        {lt.require("road"), make_fill("road")},
                                        {lt.require("garden"), make_fill("garden")}};
      const auto root = make_node("town", town.best, {cfg.block, cfg.block}, std::move(mapping), false);
      std::vector<double> scores;
      for (int level = 0; level < cfg.flat.n_levels_per_eval; ++level) {
        const Level out = compose(*root, target.shape(), derive_seed(master, {kComposeDomain, static_cast<std::uint64_t>(level)}));
        scores.push_back(fitness::target_overlap_fitness(remap_tiles(out, flat_tileset()), target));
      }

      ComposeVsFlatRun run{l, cfg.seeds[s], flat.metrics, town.metrics, flat.metrics.back().max_fitness,
                           mean(scores), town.metrics.back().max_fitness, house_finals[s]};
      report(progress, fmt::format("layout {} seed {}: flat {:.4f} composed {:.4f}", l, cfg.seeds[s], run.flat_final,
                                   run.composed_final));
      flats.push_back(run.flat_final);
      composed.push_back(run.composed_final);
      result.runs.push_back(std::move(run));
    }
  }
  result.mean_flat = mean(flats);
  result.mean_composed = mean(composed);
  return result;
}

void write_compose_vs_flat_outputs(const ComposeVsFlatResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string summary = "layout,seed,flat_final,composed_final,town_final,house_final\n";
  for (const auto& r : result.runs) {
    write_text_file(dir / fmt::format("flat_layout_{}_seed_{}.csv", r.layout, r.seed), metrics_csv(r.flat));
    write_text_file(dir / fmt::format("town_layout_{}_seed_{}.csv", r.layout, r.seed), metrics_csv(r.town));
    summary += fmt::format("{},{},{},{},{},{}\n", r.layout, r.seed, r.flat_final, r.composed_final, r.town_final,
                           r.house_final);
  }
  for (std::size_t s = 0; s < result.house.size(); ++s)
    write_text_file(dir / fmt::format("house_{}.csv", s), metrics_csv(result.house[s]));
  summary += fmt::format("mean,,{},{},,\n", result.mean_flat, result.mean_composed);
  write_text_file(dir / "summary.csv", summary);
  Json j{{"mean_flat", result.mean_flat},
         {"mean_composed", result.mean_composed},
         {"runs", result.runs.size()},
         {"note", "flat and town arms share the NEAT seed of each (layout, seed) pair; one house per seed"}};
  write_json_file(dir / "summary.json", j);
}

}  // namespace compogen
