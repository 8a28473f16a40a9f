#pragma once

#include "compogen/config.hpp"
#include "compogen/evolve.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace compogen {

using Progress = std::function<void(const std::string&)>;

// ---- window-size study ----

struct WindowSizeConfig {
  TrainConfig base;  // trained at base_size * k per axis, scored on k-windows
  std::vector<int> windows{1, 2, 3, 4, 5, 10};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int base_size = 10;
  int threads = 1;

  void validate() const;
};

struct WindowRun {
  int window = 1;
  std::uint64_t seed = 0;
  std::vector<GenerationMetrics> metrics;
  double final_max() const { return metrics.back().max_fitness; }
};

struct WindowSizeResult {
  std::vector<WindowRun> runs;
  // Mean over seeds of the final-generation max fitness, one per window in config order.
  std::vector<double> mean_final;
};

TrainConfig window_config(const WindowSizeConfig& cfg, int window, std::uint64_t seed);
WindowSizeResult run_window_size_experiment(const WindowSizeConfig& cfg, const Progress& progress = {});
void write_window_size_outputs(const WindowSizeConfig& cfg, const WindowSizeResult& result,
                               const std::filesystem::path& dir);

// ---- composed vs flat ----

struct ComposeVsFlatConfig {
  TrainConfig flat;   // 25x25 over {road, garden, wall, air}
  TrainConfig town;   // 5x5 over {house, road, garden}
  TrainConfig house;  // 5x5 over {wall, air}
  int layouts = 20;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int block = 5;
  int threads = 1;

  void validate() const;
};

struct ComposeVsFlatRun {
  int layout = 0;
  std::uint64_t seed = 0;
  std::vector<GenerationMetrics> flat;
  std::vector<GenerationMetrics> town;
  double flat_final = 0.0;      // final-generation max fitness of the flat arm
  double composed_final = 0.0;  // overlap of the composed best town + house with the target
  double town_final = 0.0;
  double house_final = 0.0;
};

struct ComposeVsFlatResult {
  std::vector<ComposeVsFlatRun> runs;
  std::vector<std::vector<GenerationMetrics>> house;  // one per seed
  double mean_flat = 0.0;
  double mean_composed = 0.0;
};

// Names of the tiles used by the experiment; also the expansion rules of the target.
Tileset layout_tileset();
Tileset flat_tileset();
Tileset house_tileset();

std::uint64_t layout_seed(int layout);
Grid layout_for(int layout, int block_count);
Grid flat_target(const Grid& layout, int block);

TrainConfig with_layout(TrainConfig c, int layout, bool expand, int block);

ComposeVsFlatResult run_compose_vs_flat(const ComposeVsFlatConfig& cfg, const Progress& progress = {});
void write_compose_vs_flat_outputs(const ComposeVsFlatResult& result, const std::filesystem::path& dir);

}  // namespace compogen
