#include "compogen/neat.hpp"

#include "compogen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace compogen::neat {

namespace {

bool is_source_role(NodeRole r) { return r != NodeRole::Output; }
bool is_target_role(NodeRole r) { return r == NodeRole::Output || r == NodeRole::Hidden; }

// True when `target` can be reached from `start` along any gene.
bool reaches(const Genome& g, int start, int target) {
  std::vector<int> stack{start};
  std::vector<int> seen;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (n == target) return true;
    if (std::find(seen.begin(), seen.end(), n) != seen.end()) continue;
    seen.push_back(n);
    for (const auto& c : g.connections) {
      if (c.from == n) stack.push_back(c.to);
    }
  }
  return false;
}

void insert_node(Genome& g, NodeGene node) {
  auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), node.id,
                             [](const NodeGene& n, int id) { return n.id < id; });
  g.nodes.insert(it, node);
}

void insert_connection(Genome& g, ConnectionGene c) {
  auto it = std::lower_bound(g.connections.begin(), g.connections.end(), c.innovation,
                             [](const ConnectionGene& x, int innov) { return x.innovation < innov; });
  g.connections.insert(it, c);
}

const NodeGene* find_node(const Genome& g, int id) {
  auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), id,
                             [](const NodeGene& n, int v) { return n.id < v; });
  return it != g.nodes.end() && it->id == id ? &*it : nullptr;
}

void check_rate(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ConfigError(std::string("neat.") + name + " must lie in [0,1]");
}

}  // namespace

int Genome::n_inputs() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const NodeGene& n) { return n.role == NodeRole::Input; }));
}

int Genome::n_outputs() const {
  return static_cast<int>(std::count_if(
      nodes.begin(), nodes.end(), [](const NodeGene& n) { return n.role == NodeRole::Output; }));
}

bool Genome::has_node(int id) const { return find_node(*this, id) != nullptr; }

const ConnectionGene* Genome::find_connection(int innovation) const {
  auto it = std::lower_bound(connections.begin(), connections.end(), innovation,
                             [](const ConnectionGene& c, int v) { return c.innovation < v; });
  return it != connections.end() && it->innovation == innovation ? &*it : nullptr;
}

void NeatParams::validate() const {
  if (population_size < 2) throw ConfigError("population_size must be at least 2");
  check_rate(weight_mutate_rate, "weight_mutate_rate");
  check_rate(weight_reset_prob, "weight_reset_prob");
  check_rate(add_connection_rate, "add_connection_rate");
  check_rate(add_node_rate, "add_node_rate");
  check_rate(survival_fraction, "survival_fraction");
  check_rate(crossover_rate, "crossover_rate");
  check_rate(disable_inherit_prob, "disable_inherit_prob");
  if (!(weight_sigma >= 0.0)) throw ConfigError("neat.weight_sigma must be non-negative");
  if (!(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0))
    throw ConfigError("neat compatibility coefficients must be non-negative");
  if (!(compatibility_threshold > 0.0))
    throw ConfigError("neat.compatibility_threshold must be positive");
  if (elitism < 0 || elitism > population_size)
    throw ConfigError("neat.elitism must lie in [0, population_size]");
}

InnovationRegistry::InnovationRegistry(int n_inputs, int n_outputs)
    : next_innovation_((n_inputs + 1) * n_outputs), next_node_(n_inputs + 1 + n_outputs) {
  for (int s = 0; s <= n_inputs; ++s)
    for (int o = 0; o < n_outputs; ++o)
      connections_[{s, n_inputs + 1 + o}] = initial_innovation(s, o, n_outputs);
}

int InnovationRegistry::connection(int from, int to) {
  auto [it, inserted] = connections_.try_emplace({from, to}, next_innovation_);
  if (inserted) ++next_innovation_;
  return it->second;
}

int InnovationRegistry::split_node(int innovation) {
  auto [it, inserted] = splits_.try_emplace(innovation, next_node_);
  if (inserted) ++next_node_;
  return it->second;
}

int initial_innovation(int source, int output_index, int n_outputs) {
  return source * n_outputs + output_index;
}

Genome init_genome(int n_inputs, int n_outputs, Rng& rng) {
  if (n_inputs < 1 || n_outputs < 1)
    throw SizeError("a genome needs at least one input and one output");
  Genome g;
  for (int i = 0; i < n_inputs; ++i) g.nodes.push_back({i, NodeRole::Input});
  g.nodes.push_back({n_inputs, NodeRole::Bias});
  for (int o = 0; o < n_outputs; ++o) g.nodes.push_back({n_inputs + 1 + o, NodeRole::Output});
  for (int s = 0; s <= n_inputs; ++s)
    for (int o = 0; o < n_outputs; ++o)
      g.connections.push_back({initial_innovation(s, o, n_outputs), s, n_inputs + 1 + o,
                               rng.uniform(-1.0, 1.0), true});
  return g;
}

bool is_acyclic(const Genome& g) {
  // Kahn's algorithm over all genes, disabled ones included.
  std::map<int, int> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = 0;
  for (const auto& c : g.connections) {
    if (!indegree.count(c.from) || !indegree.count(c.to)) return false;
    ++indegree[c.to];
  }
  std::vector<int> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.push_back(id);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const int n = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& c : g.connections) {
      if (c.from == n && --indegree[c.to] == 0) ready.push_back(c.to);
    }
  }
  return visited == g.nodes.size();
}

Network::Network(const Genome& g) {
  std::map<int, std::size_t> slot;
  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::Input) slot[n.id] = n_inputs_++;
  }
  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::Bias) {
      bias_slot_ = n_inputs_;
      slot[n.id] = bias_slot_;
    }
  }
  n_slots_ = n_inputs_ + 1;

  // Topological order of the computed nodes, smallest id first among ready ones.
  std::map<int, int> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = 0;
  for (const auto& c : g.connections) ++indegree.at(c.to);
  std::vector<int> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.push_back(id);
  std::vector<int> order;
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const int n = ready.back();
    ready.pop_back();
    order.push_back(n);
    for (const auto& c : g.connections)
      if (c.from == n && --indegree[c.to] == 0) ready.push_back(c.to);
  }
  if (order.size() != g.nodes.size()) throw SpecError("genome contains a cycle");

  for (int id : order) {
    const NodeRole role = find_node(g, id)->role;
    if (role == NodeRole::Input || role == NodeRole::Bias) continue;
    slot[id] = n_slots_++;
  }
  for (int id : order) {
    const NodeRole role = find_node(g, id)->role;
    if (role == NodeRole::Input || role == NodeRole::Bias) continue;
    Step step{slot.at(id), sources_.size(), 0};
    for (const auto& c : g.connections) {
      if (c.to == id && c.enabled) {
        sources_.push_back(slot.at(c.from));
        weights_.push_back(c.weight);
      }
    }
    step.end = sources_.size();
    steps_.push_back(step);
  }
  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::Output) outputs_.push_back(slot.at(n.id));
  }
}

void Network::activate(std::span<const double> inputs, std::span<double> outputs,
                       std::vector<double>& scratch) const {
  if (inputs.size() != n_inputs_)
    throw ArityError("network expects " + std::to_string(n_inputs_) + " inputs, got " +
                     std::to_string(inputs.size()));
  if (outputs.size() != outputs_.size())
    throw ArityError("network produces " + std::to_string(outputs_.size()) + " outputs");
  scratch.assign(n_slots_, 0.0);
  std::copy(inputs.begin(), inputs.end(), scratch.begin());
  scratch[bias_slot_] = 1.0;
  for (const auto& step : steps_) {
    double sum = 0.0;
    for (std::size_t k = step.begin; k < step.end; ++k) sum += weights_[k] * scratch[sources_[k]];
    scratch[step.slot] = std::tanh(sum);
  }
  for (std::size_t o = 0; o < outputs_.size(); ++o) outputs[o] = scratch[outputs_[o]];
}

std::vector<double> Network::activate(std::span<const double> inputs) const {
  std::vector<double> out(outputs_.size());
  std::vector<double> scratch;
  activate(inputs, out, scratch);
  return out;
}

std::vector<double> forward(const Genome& g, std::span<const double> inputs) {
  return Network(g).activate(inputs);
}

Genome add_connection(const Genome& g, InnovationRegistry& registry, Rng& rng) {
  std::vector<std::pair<int, int>> sites;
  for (const auto& a : g.nodes) {
    if (!is_source_role(a.role)) continue;
    for (const auto& b : g.nodes) {
      if (!is_target_role(b.role) || a.id == b.id) continue;
      const bool exists = std::any_of(g.connections.begin(), g.connections.end(), [&](const auto& c) {
        return c.from == a.id && c.to == b.id;
      });
      if (exists || reaches(g, b.id, a.id)) continue;
      sites.emplace_back(a.id, b.id);
    }
  }
  if (sites.empty()) return g;
  const auto [from, to] = sites[rng.below(sites.size())];
  Genome child = g;
  insert_connection(child, {registry.connection(from, to), from, to, rng.uniform(-1.0, 1.0), true});
  return child;
}

Genome add_node(const Genome& g, InnovationRegistry& registry, Rng& rng) {
  std::vector<std::size_t> enabled;
  for (std::size_t i = 0; i < g.connections.size(); ++i)
    if (g.connections[i].enabled) enabled.push_back(i);
  if (enabled.empty()) return g;
  const ConnectionGene old = g.connections[enabled[rng.below(enabled.size())]];
  const int node = registry.split_node(old.innovation);
  // The same split already happened in this lineage (the old gene was re-enabled).
  if (g.has_node(node)) return g;
  Genome child = g;
  for (auto& c : child.connections)
    if (c.innovation == old.innovation) c.enabled = false;
  insert_node(child, {node, NodeRole::Hidden});
  insert_connection(child, {registry.connection(old.from, node), old.from, node, 1.0, true});
  insert_connection(child, {registry.connection(node, old.to), node, old.to, old.weight, true});
  return child;
}

Genome mutate(const Genome& g, const NeatParams& params, InnovationRegistry& registry, Rng& rng) {
  Genome child = g;
  if (rng.bernoulli(params.weight_mutate_rate)) {
    for (auto& c : child.connections) {
      if (rng.bernoulli(params.weight_reset_prob)) {
        c.weight = rng.uniform(-1.0, 1.0);
      } else {
        c.weight += params.weight_sigma * rng.normal();
      }
    }
  }
  if (rng.bernoulli(params.add_connection_rate)) child = add_connection(child, registry, rng);
  if (rng.bernoulli(params.add_node_rate)) child = add_node(child, registry, rng);
  return child;
}

Genome crossover(const Genome& fitter, const Genome& other, Rng& rng, double disable_inherit_prob) {
  // Topology comes from the fitter parent, so the child stays acyclic.
  Genome child = fitter;
  for (auto& c : child.connections) {
    const ConnectionGene* match = other.find_connection(c.innovation);
    if (match == nullptr) continue;
    if (rng.bernoulli(0.5)) c.weight = match->weight;
    if (!c.enabled || !match->enabled) {
      c.enabled = !rng.bernoulli(disable_inherit_prob);
    }
  }
  return child;
}

double compatibility(const Genome& a, const Genome& b, const NeatParams& params) {
  const auto& ca = a.connections;
  const auto& cb = b.connections;
  const int max_a = ca.empty() ? -1 : ca.back().innovation;
  const int max_b = cb.empty() ? -1 : cb.back().innovation;
  std::size_t excess = 0, disjoint = 0, matching = 0;
  double weight_diff = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ca.size() || j < cb.size()) {
    if (j == cb.size() || (i < ca.size() && ca[i].innovation < cb[j].innovation)) {
      (ca[i].innovation > max_b ? excess : disjoint) += 1;
      ++i;
    } else if (i == ca.size() || cb[j].innovation < ca[i].innovation) {
      (cb[j].innovation > max_a ? excess : disjoint) += 1;
      ++j;
    } else {
      weight_diff += std::abs(ca[i].weight - cb[j].weight);
      ++matching;
      ++i;
      ++j;
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>({ca.size(), cb.size(), 1}));
  const double mean_diff = matching > 0 ? weight_diff / static_cast<double>(matching) : 0.0;
  return params.c1 * static_cast<double>(excess) / n + params.c2 * static_cast<double>(disjoint) / n +
         params.c3 * mean_diff;
}

std::vector<std::vector<std::size_t>> speciate(std::span<const Genome> population,
                                               const NeatParams& params) {
  std::vector<std::vector<std::size_t>> species;
  for (std::size_t i = 0; i < population.size(); ++i) {
    bool placed = false;
    for (auto& s : species) {
      if (compatibility(population[s.front()], population[i], params) <
          params.compatibility_threshold) {
        s.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) species.push_back({i});
  }
  return species;
}

std::vector<std::size_t> allocate_offspring(std::span<const double> mass,
                                            std::span<const std::size_t> sizes,
                                            std::size_t total) {
  std::vector<double> weight(mass.begin(), mass.end());
  double sum = std::accumulate(weight.begin(), weight.end(), 0.0);
  if (!(sum > 0.0)) {
    weight.assign(sizes.begin(), sizes.end());
    sum = std::accumulate(weight.begin(), weight.end(), 0.0);
  }
  std::vector<std::size_t> out(weight.size(), 0);
  if (weight.empty() || total == 0) return out;
  std::vector<double> remainder(weight.size());
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < weight.size(); ++s) {
    const double quota = static_cast<double>(total) * weight[s] / sum;
    out[s] = static_cast<std::size_t>(std::floor(quota));
    remainder[s] = quota - std::floor(quota);
    assigned += out[s];
  }
  std::vector<std::size_t> order(weight.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size(), ++assigned) ++out[order[k]];
  return out;
}

std::vector<std::size_t> elite_indices(std::span<const double> fitnesses, std::size_t count) {
  std::vector<std::size_t> order(fitnesses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
  order.resize(std::min(count, order.size()));
  return order;
}

std::vector<Genome> evolve_step(std::span<const Genome> population,
                                std::span<const double> fitnesses, const NeatParams& params,
                                InnovationRegistry& registry, Rng& rng) {
  if (population.size() != fitnesses.size())
    throw EvaluationError("population and fitness counts differ");
  if (population.empty()) throw EvaluationError("cannot evolve an empty population");
  for (double f : fitnesses)
    if (!std::isfinite(f)) throw EvaluationError("non-finite fitness value");

  // Selection works on non-negative fitness.
  const double lowest = *std::min_element(fitnesses.begin(), fitnesses.end());
  std::vector<double> fit(fitnesses.begin(), fitnesses.end());
  if (lowest < 0.0)
    for (auto& f : fit) f -= lowest;

  const auto target = static_cast<std::size_t>(params.population_size);
  std::vector<Genome> next;
  next.reserve(target);
  for (auto i : elite_indices(fitnesses, std::min(static_cast<std::size_t>(params.elitism), target)))
    next.push_back(population[i]);

  const auto species = speciate(population, params);
  std::vector<double> mass;
  std::vector<std::size_t> sizes;
  for (const auto& s : species) {
    double m = 0.0;
    for (auto i : s) m += fit[i];
    mass.push_back(m);
    sizes.push_back(s.size());
  }
  const auto quota = allocate_offspring(mass, sizes, target - next.size());

  for (std::size_t s = 0; s < species.size(); ++s) {
    if (quota[s] == 0) continue;
    std::vector<std::size_t> members = species[s];
    std::stable_sort(members.begin(), members.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
    const auto survivors = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(params.survival_fraction * static_cast<double>(members.size()))));
    members.resize(std::min(survivors, members.size()));
    for (std::size_t k = 0; k < quota[s]; ++k) {
      Genome child;
      if (members.size() >= 2 && rng.bernoulli(params.crossover_rate)) {
        std::size_t a = rng.below(members.size());
        std::size_t b = rng.below(members.size() - 1);
        if (b >= a) ++b;
        // members is sorted best first, so the lower rank is the fitter parent.
        if (b < a) std::swap(a, b);
        child = crossover(population[members[a]], population[members[b]], rng,
                          params.disable_inherit_prob);
      } else {
        child = population[members[rng.below(members.size())]];
      }
      next.push_back(mutate(child, params, registry, rng));
    }
  }
  return next;
}

}  // namespace compogen::neat
