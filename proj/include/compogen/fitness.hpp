#pragma once

#include "compogen/grid.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace compogen::fitness {

// Jensen-Shannon divergence with base-2 logarithms, in [0, 1].
double jsd2(std::span<const double> p, std::span<const double> q);

/// 1 - sqrt(JSD2(level distribution, target)); 1 means a perfect match.
double probability_fitness(const Grid& g, const TileDistribution& target);

struct ReachabilityBreakdown {
  int houses = 0;  // houses with 1..3 axis-adjacent road cells
  double a = 0.0;
  int c_road = 0;
  int c_house_road = 0;
  double d_road = 0.0;
  double d_house_road = 0.0;
  double b = 0.0;
  double fitness = 0.0;  // a * b
};

ReachabilityBreakdown reachability_fitness(const Grid& g, TileId house, TileId road, TileId garden);

/// Mean over the three classes of max(1 - 10 (n_i - 1/3)^2, 0).
double equal_distribution_fitness(const Grid& g, const std::array<TileId, 3>& classes);

double target_overlap_fitness(const Grid& g, const Grid& target);

/// 3D house target: top layer (z = D - 1) roof, the side walls below it wall,
/// everything else air. The floor layer is not walled.
Grid hollow_cube_target(const Shape& size, TileId wall, TileId air, TileId roof);

/// 2D room: border cells wall, interior empty.
Grid walled_room_target(const Shape& size, TileId wall, TileId empty);

struct GardenBreakdown {
  bool tree_and_flower = false;
  bool some_water = false;     // 0 < water fraction < 0.05
  bool grass_density = false;  // grass fraction in [0.2, 0.7]
  bool tree_spacing = false;   // every pair of trees at Chebyshev distance >= 2
  double fitness = 0.0;
};

GardenBreakdown garden_fitness(const Grid& g, TileId tree, TileId flower, TileId water, TileId grass);

/// Outer ring house, second ring road, interior garden.
Grid boundary_layout_target(const Shape& size, TileId house, TileId road, TileId garden);

// Mean Hamming distance over aligned level pairs.
double level_set_distance(std::span<const Grid> a, std::span<const Grid> b);

/// Mean pairwise Hamming distance among one generator's levels.
double intra_novelty(std::span<const Grid> levels);

struct NoveltyConfig {
  int k = 10;
  int archive_adds = 1;
};

using LevelSet = std::vector<Grid>;

/// Mean distance of each individual to its k nearest neighbours among the
/// rest of the population and the archive. Afterwards the archive_adds most
/// novel level sets are appended to `archive`.
std::vector<double> novelty_scores(std::span<const LevelSet> population, const NoveltyConfig& config,
                                   std::vector<LevelSet>& archive);

enum class TermKind { Level, Novelty, IntraNovelty };

struct Component {
  std::string name;
  double weight = 1.0;
  TermKind kind = TermKind::Level;
  // Set for TermKind::Level; scores a single level.
  std::function<double(const Grid&)> score;
};

/// Weighted sum of fitness components normalised by the total weight.
struct WeightedFitness {
  std::vector<Component> components;
  NoveltyConfig novelty;

  // Throws ConfigError unless all weights are >= 0 and one is positive.
  void validate() const;
  bool needs(TermKind kind) const;
  std::vector<double> weights() const;
};

double combine(std::span<const double> weights, std::span<const double> values);

/// Level components averaged over `levels`, intra-novelty computed over them,
/// novelty entries left at 0 for the caller to fill in.
std::vector<double> component_values(const WeightedFitness& w, std::span<const Grid> levels);

}  // namespace compogen::fitness
