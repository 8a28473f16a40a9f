#pragma once

#include "compogen/grid.hpp"
#include "compogen/neat.hpp"
#include "compogen/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace compogen {

enum class StartPolicy { Random, DefaultTile };

/// Knobs of the per-tile sweep. The window around a cell spans
/// (2 * context_size + 1) cells per axis.
struct GenParams {
  static constexpr double kPadding = -1.0;

  int context_size = 1;
  bool one_hot = false;
  int num_random_vars = 1;
  double perturb_size = 0.0;
  int iterations = 1;
  bool input_center_tile = false;
  StartPolicy start = StartPolicy::Random;
  TileId default_tile = 0;

  void validate(std::size_t n_tiles) const;
  friend bool operator==(const GenParams&, const GenParams&) = default;
};

int input_size(const GenParams& params, int n_tiles, int ndim);

/// A trained network plus everything needed to run it as a level generator.
struct GeneratorSpec {
  neat::Genome genome;
  GenParams params;
  Tileset tileset;
  int ndim = 2;

  // Throws SpecError when the genome arity disagrees with the params.
  void validate() const;
  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

/// Network input for the cell at `pos`: neighbours in window order (x fastest),
/// optional centre tile, random variables, then perturbation noise on every
/// non-random component. Out-of-bounds cells read as the padding value.
std::vector<double> encode_context(const Grid& grid, const Coord& pos, const GenParams& params,
                                   int n_tiles, Rng& rng);

// Decides a tile from an encoded context.
using TileDecider = std::function<TileId(std::span<const double>)>;

// Lowest index among the maximal outputs.
TileId argmax_tile(std::span<const double> outputs);

Grid start_grid(const GenParams& params, const Shape& shape, int n_tiles, std::uint64_t seed);

/// One in-place pass over the grid in row-major order; later cells see the
/// values already written in this pass.
void sweep(Grid& grid, const GenParams& params, int n_tiles, std::uint64_t seed,
           const TileDecider& decide);
void sweep(Grid& grid, const GeneratorSpec& spec, const neat::Network& net, std::uint64_t seed);

// Stream layout under `seed`: start grid on index 0, pass i on index 1 + i.
std::uint64_t start_seed(std::uint64_t seed);
std::uint64_t pass_seed(std::uint64_t seed, int pass);

Grid generate(const GeneratorSpec& spec, const Shape& size, std::uint64_t seed);
Grid generate(const GeneratorSpec& spec, const neat::Network& net, const Shape& size,
              std::uint64_t seed);

// Level l uses derive_seed(seed, l).
std::vector<Grid> generate_batch(const GeneratorSpec& spec, const Shape& size, int n,
                                 std::uint64_t seed);
std::vector<Grid> generate_batch(const GeneratorSpec& spec, const neat::Network& net,
                                 const Shape& size, int n, std::uint64_t seed);

}  // namespace compogen
