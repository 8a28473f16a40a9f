#pragma once

#include "compogen/rng.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace compogen::neat {

enum class NodeRole { Input, Bias, Output, Hidden };

struct NodeGene {
  int id = 0;
  NodeRole role = NodeRole::Hidden;
  friend bool operator==(const NodeGene&, const NodeGene&) = default;
};

struct ConnectionGene {
  int innovation = 0;
  int from = 0;
  int to = 0;
  double weight = 0.0;
  bool enabled = true;
  friend bool operator==(const ConnectionGene&, const ConnectionGene&) = default;
};

/// Node ids are laid out as inputs [0, n_in), bias n_in, outputs
/// [n_in + 1, n_in + 1 + n_out), hidden nodes above that. Nodes are kept sorted
/// by id and connections by innovation. The connection graph, including
/// disabled genes, is acyclic.
struct Genome {
  std::vector<NodeGene> nodes;
  std::vector<ConnectionGene> connections;

  int n_inputs() const;
  int n_outputs() const;
  bool has_node(int id) const;
  const ConnectionGene* find_connection(int innovation) const;

  friend bool operator==(const Genome&, const Genome&) = default;
};

struct NeatParams {
  int population_size = 50;
  double weight_mutate_rate = 0.8;
  double weight_sigma = 0.5;
  double weight_reset_prob = 0.1;
  double add_connection_rate = 0.1;
  double add_node_rate = 0.05;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 0.4;
  double compatibility_threshold = 3.0;
  double survival_fraction = 0.2;
  int elitism = 1;
  double crossover_rate = 0.75;
  double disable_inherit_prob = 0.75;

  // Throws ConfigError on the first violated constraint.
  void validate() const;
  friend bool operator==(const NeatParams&, const NeatParams&) = default;
};

/// Global innovation bookkeeping for one evolutionary run. The initial
/// fully-connected genes get fixed innovations so that init_genome needs no
/// registry.
class InnovationRegistry {
 public:
  InnovationRegistry(int n_inputs, int n_outputs);

  int connection(int from, int to);
  // Node id introduced by splitting the connection with this innovation.
  int split_node(int innovation);

 private:
  std::map<std::pair<int, int>, int> connections_;
  std::map<int, int> splits_;
  int next_innovation_ = 0;
  int next_node_ = 0;
};

// Innovation number of the initial input/bias -> output gene.
int initial_innovation(int source, int output_index, int n_outputs);

Genome init_genome(int n_inputs, int n_outputs, Rng& rng);

bool is_acyclic(const Genome& g);

/// Feed-forward phenotype. Built once per genome; activation is tanh on
/// hidden and output nodes.
class Network {
 public:
  explicit Network(const Genome& g);

  std::size_t n_inputs() const { return n_inputs_; }
  std::size_t n_outputs() const { return outputs_.size(); }

  // Throws ArityError if the spans have the wrong length.
  void activate(std::span<const double> inputs, std::span<double> outputs,
                std::vector<double>& scratch) const;
  std::vector<double> activate(std::span<const double> inputs) const;

 private:
  struct Step {
    std::size_t slot;
    std::size_t begin;
    std::size_t end;
  };
  std::size_t n_inputs_ = 0;
  std::size_t n_slots_ = 0;
  std::size_t bias_slot_ = 0;
  std::vector<Step> steps_;
  std::vector<std::size_t> sources_;
  std::vector<double> weights_;
  std::vector<std::size_t> outputs_;
};

std::vector<double> forward(const Genome& g, std::span<const double> inputs);

Genome mutate(const Genome& g, const NeatParams& params, InnovationRegistry& registry, Rng& rng);
// Structural mutations, exposed for tests. Both leave the genome unchanged
// when no legal site exists.
Genome add_connection(const Genome& g, InnovationRegistry& registry, Rng& rng);
Genome add_node(const Genome& g, InnovationRegistry& registry, Rng& rng);

Genome crossover(const Genome& fitter, const Genome& other, Rng& rng,
                 double disable_inherit_prob = 0.75);

double compatibility(const Genome& a, const Genome& b, const NeatParams& params);

// Species as lists of population indices. Each genome joins the first species
// whose founding member is within the compatibility threshold.
std::vector<std::vector<std::size_t>> speciate(std::span<const Genome> population,
                                               const NeatParams& params);

// Offspring per species proportional to `mass` (largest-remainder rounding);
// falls back to `sizes` when all masses are zero.
std::vector<std::size_t> allocate_offspring(std::span<const double> mass,
                                            std::span<const std::size_t> sizes,
                                            std::size_t total);

// Indices of the `count` best individuals, best first, ties to the lower index.
std::vector<std::size_t> elite_indices(std::span<const double> fitnesses, std::size_t count);

/// One NEAT generation. The first min(elitism, population) genomes of the
/// result are unchanged copies of elite_indices(fitnesses, elitism), in order.
std::vector<Genome> evolve_step(std::span<const Genome> population,
                                std::span<const double> fitnesses, const NeatParams& params,
                                InnovationRegistry& registry, Rng& rng);

}  // namespace compogen::neat
