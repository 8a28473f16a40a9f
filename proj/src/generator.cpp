#include "compogen/generator.hpp"

#include "compogen/errors.hpp"

#include <string>

namespace compogen {

namespace {

std::vector<Coord> window_offsets(int context, int ndim, bool include_center) {
  std::vector<Coord> offsets;
  const int zr = ndim == 3 ? context : 0;
  for (int dz = -zr; dz <= zr; ++dz)
    for (int dy = -context; dy <= context; ++dy)
      for (int dx = -context; dx <= context; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        offsets.push_back({dx, dy, dz});
      }
  if (include_center) offsets.push_back({0, 0, 0});
  return offsets;
}

double scalar_code(TileId t, int n_tiles) {
  if (n_tiles <= 1) return 0.0;
  return 2.0 * static_cast<double>(t) / static_cast<double>(n_tiles - 1) - 1.0;
}

// Reusable encoder; holds the window offsets and the input buffer.
class ContextEncoder {
 public:
  ContextEncoder(const GenParams& params, int n_tiles, int ndim)
      : params_(params),
        n_tiles_(n_tiles),
        offsets_(window_offsets(params.context_size, ndim, params.input_center_tile)),
        buffer_(static_cast<std::size_t>(input_size(params, n_tiles, ndim))) {}

  std::span<const double> encode(const Grid& grid, const Coord& pos, Rng& rng) {
    std::size_t k = 0;
    for (const auto& off : offsets_) {
      const Coord q{pos[0] + off[0], pos[1] + off[1], pos[2] + off[2]};
      const bool inside = grid.in_bounds(q);
      if (params_.one_hot) {
        const TileId t = inside ? grid.at(q) : -1;
        for (int i = 0; i < n_tiles_; ++i)
          buffer_[k++] = inside ? (i == t ? 1.0 : 0.0) : GenParams::kPadding;
      } else {
        buffer_[k++] = inside ? scalar_code(grid.at(q), n_tiles_) : GenParams::kPadding;
      }
    }
    const std::size_t non_random = k;
    for (int r = 0; r < params_.num_random_vars; ++r) buffer_[k++] = rng.uniform(-1.0, 1.0);
    if (params_.perturb_size > 0.0) {
      for (std::size_t i = 0; i < non_random; ++i)
        buffer_[i] += rng.uniform(-params_.perturb_size, params_.perturb_size);
    }
    return buffer_;
  }

 private:
  const GenParams& params_;
  int n_tiles_;
  std::vector<Coord> offsets_;
  std::vector<double> buffer_;
};

}  // namespace

void GenParams::validate(std::size_t n_tiles) const {
  if (context_size < 1) throw ConfigError("context_size must be at least 1");
  if (num_random_vars < 0) throw ConfigError("num_random_vars must be non-negative");
  if (!(perturb_size >= 0.0)) throw ConfigError("perturb_size must be non-negative");
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (default_tile < 0 || static_cast<std::size_t>(default_tile) >= n_tiles)
    throw ConfigError("default_tile outside the tileset");
}

int input_size(const GenParams& params, int n_tiles, int ndim) {
  int window = 1;
  for (int a = 0; a < ndim; ++a) window *= 2 * params.context_size + 1;
  const int cells = window - 1 + (params.input_center_tile ? 1 : 0);
  return cells * (params.one_hot ? n_tiles : 1) + params.num_random_vars;
}

void GeneratorSpec::validate() const {
  if (ndim != 2 && ndim != 3) throw SpecError("generators are 2D or 3D");
  params.validate(tileset.size());
  const int n_tiles = static_cast<int>(tileset.size());
  const int want = input_size(params, n_tiles, ndim);
  if (genome.n_inputs() != want)
    throw SpecError("genome has " + std::to_string(genome.n_inputs()) + " inputs but the params need " +
                    std::to_string(want));
  if (genome.n_outputs() != n_tiles)
    throw SpecError("genome has " + std::to_string(genome.n_outputs()) + " outputs for " +
                    std::to_string(n_tiles) + " tiles");
}

std::vector<double> encode_context(const Grid& grid, const Coord& pos, const GenParams& params,
                                   int n_tiles, Rng& rng) {
  if (!grid.in_bounds(pos)) throw BoundsError("encode_context position outside the grid");
  ContextEncoder enc(params, n_tiles, grid.ndim());
  auto v = enc.encode(grid, pos, rng);
  return {v.begin(), v.end()};
}

TileId argmax_tile(std::span<const double> outputs) {
  TileId best = 0;
  for (std::size_t i = 1; i < outputs.size(); ++i)
    if (outputs[i] > outputs[static_cast<std::size_t>(best)]) best = static_cast<TileId>(i);
  return best;
}

std::uint64_t start_seed(std::uint64_t seed) { return derive_seed(seed, 0); }
std::uint64_t pass_seed(std::uint64_t seed, int pass) {
  return derive_seed(seed, 1 + static_cast<std::uint64_t>(pass));
}

Grid start_grid(const GenParams& params, const Shape& shape, int n_tiles, std::uint64_t seed) {
  if (params.start == StartPolicy::DefaultTile) return Grid(shape, params.default_tile);
  Grid g(shape, 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = static_cast<TileId>(rng.below(static_cast<std::uint64_t>(n_tiles)));
  return g;
}

void sweep(Grid& grid, const GenParams& params, int n_tiles, std::uint64_t seed,
           const TileDecider& decide) {
  ContextEncoder enc(params, n_tiles, grid.ndim());
  Rng rng(seed);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const TileId t = decide(enc.encode(grid, grid.coord(i), rng));
    if (t < 0 || t >= n_tiles) throw TileError("decided tile outside the tileset");
    grid[i] = t;
  }
}

void sweep(Grid& grid, const GeneratorSpec& spec, const neat::Network& net, std::uint64_t seed) {
  const int n_tiles = static_cast<int>(spec.tileset.size());
  std::vector<double> out(static_cast<std::size_t>(n_tiles));
  std::vector<double> scratch;
  sweep(grid, spec.params, n_tiles, seed, [&](std::span<const double> in) {
    net.activate(in, out, scratch);
    return argmax_tile(out);
  });
}

Grid generate(const GeneratorSpec& spec, const neat::Network& net, const Shape& size,
              std::uint64_t seed) {
  if (size.ndim() != spec.ndim)
    throw SpecError("generator is " + std::to_string(spec.ndim) + "D but size " + size.str() +
                    " was requested");
  const int n_tiles = static_cast<int>(spec.tileset.size());
  Grid g = start_grid(spec.params, size, n_tiles, start_seed(seed));
  for (int pass = 0; pass < spec.params.iterations; ++pass) sweep(g, spec, net, pass_seed(seed, pass));
  return g;
}

Grid generate(const GeneratorSpec& spec, const Shape& size, std::uint64_t seed) {
  spec.validate();
  return generate(spec, neat::Network(spec.genome), size, seed);
}

std::vector<Grid> generate_batch(const GeneratorSpec& spec, const neat::Network& net,
                                 const Shape& size, int n, std::uint64_t seed) {
  if (n < 1) throw SizeError("generate_batch needs n >= 1");
  std::vector<Grid> levels;
  levels.reserve(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l)
    levels.push_back(generate(spec, net, size, derive_seed(seed, static_cast<std::uint64_t>(l))));
  return levels;
}

std::vector<Grid> generate_batch(const GeneratorSpec& spec, const Shape& size, int n,
                                 std::uint64_t seed) {
  spec.validate();
  return generate_batch(spec, neat::Network(spec.genome), size, n, seed);
}

}  // namespace compogen
