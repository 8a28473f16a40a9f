#pragma once

#include "compogen/config.hpp"
#include "compogen/generator.hpp"
#include "compogen/io.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace compogen {

// Seed for generating the levels of individual i in generation g. The level-l
// stream is derive_seed(individual_seed(...), l), which is what generate_batch
// uses, so seed_stream(m, g, i, l) names exactly the RNG of that level.
std::uint64_t individual_seed(std::uint64_t master, int generation, int individual);
std::uint64_t seed_stream(std::uint64_t master, int generation, int individual, int level);

struct Evaluation {
  std::vector<double> components;  // one per fitness component, novelty left at 0
  std::vector<Grid> levels;        // as generated, before any window downsampling
};

Evaluation evaluate_genome(const neat::Genome& genome, const TrainConfig& config,
                           const fitness::WeightedFitness& fitness, std::uint64_t seed);

// Convenience overload: builds the fitness from the config, returns the combined score
// (novelty terms count as 0).
double evaluate_fitness(const neat::Genome& genome, const TrainConfig& config, std::uint64_t seed);

struct GenerationMetrics {
  int generation = 0;
  double max_fitness = 0.0;
  double mean_fitness = 0.0;
  friend bool operator==(const GenerationMetrics&, const GenerationMetrics&) = default;
};

struct TrainResult {
  GeneratorSpec best;
  double best_fitness = 0.0;
  std::vector<GenerationMetrics> metrics;
  std::vector<std::vector<double>> fitnesses;  // per generation, per individual
  Json config;
  Json decisions;
};

struct TrainOptions {
  int threads = 1;
  std::function<void(const GenerationMetrics&)> on_generation;
};

TrainResult train(const TrainConfig& config, const TrainOptions& options = {});

GeneratorSpec make_spec(const neat::Genome& genome, const TrainConfig& config);

std::string metrics_csv(const std::vector<GenerationMetrics>& metrics);

// Writes generator.json, metrics.csv and config.json into dir (created if needed).
void write_bundle(const TrainResult& result, const std::filesystem::path& dir);

// Runs body(i) for i in [0, n) on up to `threads` workers. The first exception by
// index is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace compogen
