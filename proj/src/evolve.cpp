#include "compogen/evolve.hpp"

#include "compogen/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace compogen {

namespace {

// Top-level seed domains under the master seed.
constexpr std::uint64_t kInitDomain = 0;
constexpr std::uint64_t kEvalDomain = 1;
constexpr std::uint64_t kBreedDomain = 2;

Json decision_metadata(const TrainConfig& c) {
  return {{"fitness_combination", "weighted mean of component scores"},
          {"probability_fitness", "1 - sqrt(JSD base 2)"},
          {"novelty", c.novelty ? fmt::format("hamming, k={}, archive_adds={}", c.novelty_config.k,
                                              c.novelty_config.archive_adds)
                                : std::string("none")},
          {"random_inputs", "fresh uniform [-1,1] draws at every tile visit"},
          {"perturbation", "applied to neighbourhood inputs only, not to random inputs"},
          {"compatibility_normaliser", "gene count of the larger genome"},
          {"offspring_allocation", "proportional to summed species fitness, largest remainder"},
          {"elites", "copied unchanged and keep their previous evaluation"},
          {"best_individual", "highest combined fitness in the final generation"},
          {"seed_scheme", "level l of individual i in generation g: derive(derive(master,1,g,i),l)"}};
}

}  // namespace

std::uint64_t individual_seed(std::uint64_t master, int generation, int individual) {
  if (generation < 0 || individual < 0) throw SizeError("seed indices must be non-negative");
  return derive_seed(master, {kEvalDomain, static_cast<std::uint64_t>(generation),
                              static_cast<std::uint64_t>(individual)});
}

std::uint64_t seed_stream(std::uint64_t master, int generation, int individual, int level) {
  if (level < 0) throw SizeError("seed indices must be non-negative");
  return derive_seed(individual_seed(master, generation, individual), static_cast<std::uint64_t>(level));
}

GeneratorSpec make_spec(const neat::Genome& genome, const TrainConfig& config) {
  GeneratorSpec spec{genome, config.gen, config.tileset, config.level_size.ndim()};
  spec.validate();
  return spec;
}

Evaluation evaluate_genome(const neat::Genome& genome, const TrainConfig& config,
                           const fitness::WeightedFitness& fitness, std::uint64_t seed) {
  const GeneratorSpec spec = make_spec(genome, config);
  Evaluation e;
  e.levels = generate_batch(spec, neat::Network(genome), config.level_size, config.n_levels_per_eval, seed);
  if (config.window == 1) {
    e.components = fitness::component_values(fitness, e.levels);
  } else {
    std::vector<Grid> scored;
    scored.reserve(e.levels.size());
    for (const auto& g : e.levels) scored.push_back(downsample_windows(g, config.window, config.window_default));
    e.components = fitness::component_values(fitness, scored);
  }
  return e;
}

double evaluate_fitness(const neat::Genome& genome, const TrainConfig& config, std::uint64_t seed) {
  const auto w = build_fitness(config.fitness, config.tileset, config.scored_size(), config.novelty_config);
  const auto e = evaluate_genome(genome, config, w, seed);
  return fitness::combine(w.weights(), e.components);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

TrainResult train(const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  const auto fitness = build_fitness(config.fitness, config.tileset, config.scored_size(), config.novelty_config);
  const auto weights = fitness.weights();
  const bool novelty = fitness.needs(fitness::TermKind::Novelty);
  std::size_t novelty_slot = 0;
  for (std::size_t c = 0; c < fitness.components.size(); ++c)
    if (fitness.components[c].kind == fitness::TermKind::Novelty) novelty_slot = c;

  const int n_in = config.n_inputs();
  const int n_out = static_cast<int>(config.tileset.size());
  const auto pop_size = static_cast<std::size_t>(config.neat.population_size);
  const std::uint64_t master = config.master_seed;

  neat::InnovationRegistry registry(n_in, n_out);
  std::vector<neat::Genome> population;
  population.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    Rng rng(derive_seed(master, {kInitDomain, i}));
    population.push_back(neat::init_genome(n_in, n_out, rng));
  }

  std::vector<GenerationMetrics> metrics;
  std::vector<std::vector<double>> history;
  std::vector<Evaluation> evals(pop_size);
  std::vector<bool> carried(pop_size, false);
  std::vector<fitness::LevelSet> archive;
  std::vector<double> combined(pop_size);

  for (int gen = 0; gen < config.generations; ++gen) {
    parallel_for(pop_size, options.threads, [&](std::size_t i) {
      if (carried[i]) return;
      evals[i] = evaluate_genome(population[i], config, fitness, individual_seed(master, gen, static_cast<int>(i)));
    });

    std::vector<double> novelty_values;
    if (novelty) {
      std::vector<fitness::LevelSet> sets;
      sets.reserve(pop_size);
      for (const auto& e : evals) sets.push_back(e.levels);
      novelty_values = fitness::novelty_scores(sets, config.novelty_config, archive);
    }
    for (std::size_t i = 0; i < pop_size; ++i) {
      auto values = evals[i].components;
      if (novelty) values[novelty_slot] = novelty_values[i];
      combined[i] = fitness::combine(weights, values);
      if (!std::isfinite(combined[i])) throw EvaluationError("fitness evaluation produced a non-finite value");
    }

    GenerationMetrics m{gen, *std::max_element(combined.begin(), combined.end()),
                        std::accumulate(combined.begin(), combined.end(), 0.0) / static_cast<double>(pop_size)};
    metrics.push_back(m);
    history.push_back(combined);
    if (options.on_generation) options.on_generation(m);

    if (gen + 1 == config.generations) break;

    // evolve_step places the elites first, unchanged, so their evaluations carry over.
    const auto elites = neat::elite_indices(
        combined, std::min(static_cast<std::size_t>(config.neat.elitism), pop_size));
    std::vector<Evaluation> kept;
    for (auto i : elites) kept.push_back(std::move(evals[i]));
    Rng breed(derive_seed(master, {kBreedDomain, static_cast<std::uint64_t>(gen)}));
    population = neat::evolve_step(population, combined, config.neat, registry, breed);
    std::fill(carried.begin(), carried.end(), false);
    for (std::size_t e = 0; e < kept.size(); ++e) {
      evals[e] = std::move(kept[e]);
      carried[e] = true;
    }
  }

  const auto best = static_cast<std::size_t>(std::max_element(combined.begin(), combined.end()) - combined.begin());
  return TrainResult{make_spec(population[best], config), combined[best], std::move(metrics),
                     std::move(history), train_config_to_json(config), decision_metadata(config)};
}

std::string metrics_csv(const std::vector<GenerationMetrics>& metrics) {
  std::string out = "generation,max_fitness,mean_fitness\n";
  for (const auto& m : metrics) out += fmt::format("{},{},{}\n", m.generation, m.max_fitness, m.mean_fitness);
  return out;
}

void write_bundle(const TrainResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_json_file(dir / "generator.json", generator_to_json(result.best));
  write_text_file(dir / "metrics.csv", metrics_csv(result.metrics));
  Json cfg;
  cfg["config"] = result.config;
  cfg["decisions"] = result.decisions;
  cfg["best_fitness"] = result.best_fitness;
  write_json_file(dir / "config.json", cfg);
}

}  // namespace compogen
