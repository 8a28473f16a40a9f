#include "compogen/fitness.hpp"

#include "compogen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace compogen::fitness {

namespace {

double kl_to_mixture(std::span<const double> p, std::span<const double> m) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log2(p[i] / m[i]);
  }
  return kl;
}

std::vector<std::size_t> counts(const Grid& g, TileId max_tile) {
  std::vector<std::size_t> c(static_cast<std::size_t>(max_tile) + 1, 0);
  for (TileId t : g.cells()) {
    if (t >= 0 && t <= max_tile) ++c[static_cast<std::size_t>(t)];
  }
  return c;
}

void require_distinct(std::initializer_list<TileId> tiles) {
  std::vector<TileId> v(tiles);
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw TileError("fitness tile roles must be distinct tiles");
}

}  // namespace

double jsd2(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("distributions over different tile counts");
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  const double js = 0.5 * (kl_to_mixture(p, m) + kl_to_mixture(q, m));
  return std::clamp(js, 0.0, 1.0);
}

double probability_fitness(const Grid& g, const TileDistribution& target) {
  const auto dist = tile_distribution(g, target.probs.size());
  return std::clamp(1.0 - std::sqrt(jsd2(dist.probs, target.probs)), 0.0, 1.0);
}

ReachabilityBreakdown reachability_fitness(const Grid& g, TileId house, TileId road, TileId garden) {
  require_distinct({house, road, garden});
  ReachabilityBreakdown r;
  const TileClass roads{road};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] != house) continue;
    const int n = count_axis_neighbors(g, g.coord(i), roads);
    if (n >= 1 && n <= 3) ++r.houses;
  }
  r.a = std::min(static_cast<double>(r.houses) / 20.0, 1.0);
  r.c_road = label_regions(g, roads).count;
  r.c_house_road = label_regions(g, TileClass{house, road}).count;
  r.d_road = std::min(std::abs(1.0 - r.c_road), 10.0);
  r.d_house_road = std::min(std::abs(1.0 - r.c_house_road), 10.0);
  r.b = 1.0 / ((r.d_house_road + 1.0) * (r.d_road + 1.0));
  r.fitness = r.a * r.b;
  return r;
}

double equal_distribution_fitness(const Grid& g, const std::array<TileId, 3>& classes) {
  require_distinct({classes[0], classes[1], classes[2]});
  const auto c = counts(g, *std::max_element(classes.begin(), classes.end()));
  double total = 0.0;
  for (TileId t : classes) {
    const double n = static_cast<double>(c[static_cast<std::size_t>(t)]) / static_cast<double>(g.size());
    const double d = n - 1.0 / 3.0;
    total += std::max(1.0 - 10.0 * d * d, 0.0);
  }
  return total / 3.0;
}

double target_overlap_fitness(const Grid& g, const Grid& target) { return overlap(g, target); }

Grid hollow_cube_target(const Shape& size, TileId wall, TileId air, TileId roof) {
  if (size.ndim() != 3) throw SizeError("the house target is 3D");
  for (int a = 0; a < 3; ++a)
    if (size[a] < 2) throw SizeError("house target extents must be at least 2");
  Grid g(size, air);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Coord c = g.coord(i);
    if (c[2] == size[2] - 1) {
      g[i] = roof;
    } else if (c[0] == 0 || c[1] == 0 || c[0] == size[0] - 1 || c[1] == size[1] - 1) {
      g[i] = wall;
    }
  }
  return g;
}

Grid walled_room_target(const Shape& size, TileId wall, TileId empty) {
  if (size.ndim() != 2) throw SizeError("the room template is 2D");
  Grid g(size, empty);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Coord c = g.coord(i);
    if (c[0] == 0 || c[1] == 0 || c[0] == size[0] - 1 || c[1] == size[1] - 1) g[i] = wall;
  }
  return g;
}

GardenBreakdown garden_fitness(const Grid& g, TileId tree, TileId flower, TileId water, TileId grass) {
  require_distinct({tree, flower, water, grass});
  GardenBreakdown r;
  std::size_t n_tree = 0, n_flower = 0, n_water = 0, n_grass = 0;
  std::vector<Coord> trees;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const TileId t = g[i];
    if (t == tree) {
      ++n_tree;
      trees.push_back(g.coord(i));
    }
    n_flower += t == flower;
    n_water += t == water;
    n_grass += t == grass;
  }
  const double total = static_cast<double>(g.size());
  const double water_frac = static_cast<double>(n_water) / total;
  const double grass_frac = static_cast<double>(n_grass) / total;
  r.tree_and_flower = n_tree >= 1 && n_flower >= 1;
  r.some_water = water_frac > 0.0 && water_frac < 0.05;
  r.grass_density = grass_frac >= 0.2 && grass_frac <= 0.7;
  r.tree_spacing = true;
  for (std::size_t i = 0; i < trees.size() && r.tree_spacing; ++i)
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      int cheb = 0;
      for (int a = 0; a < 3; ++a)
        cheb = std::max(cheb, std::abs(trees[i][static_cast<std::size_t>(a)] -
                                       trees[j][static_cast<std::size_t>(a)]));
      if (cheb < 2) {
        r.tree_spacing = false;
        break;
      }
    }
  r.fitness = (r.tree_and_flower + r.some_water + r.grass_density + r.tree_spacing) / 4.0;
  return r;
}

Grid boundary_layout_target(const Shape& size, TileId house, TileId road, TileId garden) {
  if (size.ndim() != 2) throw SizeError("the town layout target is 2D");
  if (size[0] < 5 || size[1] < 5) throw SizeError("town layout target extents must be at least 5");
  Grid g(size, garden);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Coord c = g.coord(i);
    const int ring = std::min({c[0], c[1], size[0] - 1 - c[0], size[1] - 1 - c[1]});
    if (ring == 0) {
      g[i] = house;
    } else if (ring == 1) {
      g[i] = road;
    }
  }
  return g;
}

double level_set_distance(std::span<const Grid> a, std::span<const Grid> b) {
  if (a.size() != b.size() || a.empty())
    throw ArityError("level sets must be non-empty and equally sized");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += hamming(a[j], b[j]);
  return sum / static_cast<double>(a.size());
}

double intra_novelty(std::span<const Grid> levels) {
  if (levels.size() < 2) throw ArityError("intra-generator novelty needs at least two levels");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t j = i + 1; j < levels.size(); ++j) {
      sum += hamming(levels[i], levels[j]);
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

std::vector<double> novelty_scores(std::span<const LevelSet> population, const NoveltyConfig& config,
                                   std::vector<LevelSet>& archive) {
  if (config.k < 1) throw ConfigError("novelty k must be at least 1");
  const std::size_t n = population.size();
  // Pairwise distances are symmetric; compute each once.
  std::vector<double> pair(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pair[i * n + j] = pair[j * n + i] = level_set_distance(population[i], population[j]);

  std::vector<double> scores(n, 0.0);
  std::vector<double> d;
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d.push_back(pair[i * n + j]);
    for (const auto& entry : archive) d.push_back(level_set_distance(population[i], entry));
    if (d.empty()) continue;
    const std::size_t k = std::min(static_cast<std::size_t>(config.k), d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    scores[i] = std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
                static_cast<double>(k);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t adds = std::min(static_cast<std::size_t>(std::max(config.archive_adds, 0)), n);
  for (std::size_t r = 0; r < adds; ++r) archive.push_back(population[order[r]]);
  return scores;
}

void WeightedFitness::validate() const {
  if (components.empty()) throw ConfigError("fitness needs at least one component");
  bool positive = false;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
      throw ConfigError("fitness weight for '" + c.name + "' must be non-negative");
    positive = positive || c.weight > 0.0;
    if (c.kind == TermKind::Level && !c.score)
      throw ConfigError("fitness component '" + c.name + "' has no scoring function");
  }
  if (!positive) throw ConfigError("at least one fitness weight must be positive");
}

bool WeightedFitness::needs(TermKind kind) const {
  return std::any_of(components.begin(), components.end(),
                     [&](const Component& c) { return c.kind == kind && c.weight > 0.0; });
}

std::vector<double> WeightedFitness::weights() const {
  std::vector<double> w;
  w.reserve(components.size());
  for (const auto& c : components) w.push_back(c.weight);
  return w;
}

double combine(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size()) throw ArityError("one value per weight is required");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ConfigError("negative fitness weight");
    num += weights[i] * values[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw ConfigError("at least one fitness weight must be positive");
  return num / den;
}

std::vector<double> component_values(const WeightedFitness& w, std::span<const Grid> levels) {
  if (levels.empty()) throw ArityError("no levels to score");
  std::vector<double> values(w.components.size(), 0.0);
  for (std::size_t c = 0; c < w.components.size(); ++c) {
    const auto& comp = w.components[c];
    if (comp.kind == TermKind::Level) {
      double sum = 0.0;
      for (const auto& level : levels) sum += comp.score(level);
      values[c] = sum / static_cast<double>(levels.size());
    } else if (comp.kind == TermKind::IntraNovelty) {
      values[c] = levels.size() >= 2 ? intra_novelty(levels) : 0.0;
    }
  }
  return values;
}

}  // namespace compogen::fitness
