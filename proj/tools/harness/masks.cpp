#include "masks.hpp"

#include <cmath>

#include "psieve/density.hpp"
#include "psieve/io.hpp"

namespace psieve::harness {

namespace {

Mask draw(const MaskSpec& spec, const TFGrid& g, Rng& rng) {
  switch (spec.kind) {
    case MaskKind::Empty:
      return Mask(g);
    case MaskKind::Full:
      return Mask::full(g);
    case MaskKind::File:
      return io::read_mask(spec.path);
    case MaskKind::RandomCells: {
      std::vector<std::uint8_t> cells(g.size(), 0);
      for (std::size_t i = 0; i < g.nx; ++i) {
        for (std::size_t j = 0; j < g.nw; ++j) {
          const bool inside = std::abs(g.x(i)) <= spec.box && std::abs(g.w(j)) <= spec.box;
          // Draw for every cell so the stream does not depend on the box.
          const bool hit = rng.bernoulli(spec.p);
          cells[g.index(i, j)] = inside && hit ? 1 : 0;
        }
      }
      return Mask(g, std::move(cells));
    }
    case MaskKind::DiscUnion: {
      std::vector<std::uint8_t> cells(g.size(), 0);
      for (int d = 0; d < spec.discs; ++d) {
        const double cx = rng.uniform(-spec.box, spec.box);
        const double cw = rng.uniform(-spec.box, spec.box);
        const double r = rng.uniform(spec.radius_min, spec.radius_max);
        for (std::size_t i = 0; i < g.nx; ++i) {
          const double ux = g.x(i) - cx;
          if (std::abs(ux) > r) continue;
          for (std::size_t j = 0; j < g.nw; ++j) {
            const double uw = g.w(j) - cw;
            if (ux * ux + uw * uw <= r * r) cells[g.index(i, j)] = 1;
          }
        }
      }
      return Mask(g, std::move(cells));
    }
  }
  throw Error("generate_mask: unknown kind");
}

}  // namespace

GeneratedMask generate_mask(const MaskSpec& spec, const TFGrid& grid, double R, Rng& rng) {
  if (!spec.max_rho) return {draw(spec, grid, rng), 1, std::nullopt};
  for (int attempt = 1; attempt <= spec.max_attempts; ++attempt) {
    Mask m = draw(spec, grid, rng);
    const double rho = nyquist_density(m, R, {RasterMode::Outer, 1}).rho;
    if (rho <= *spec.max_rho) return {std::move(m), attempt, rho};
    if (spec.kind != MaskKind::RandomCells && spec.kind != MaskKind::DiscUnion) break;
  }
  throw Error("generate_mask: no " + to_string(spec.kind) + " mask with rho <= " + std::to_string(*spec.max_rho) +
              " after " + std::to_string(spec.max_attempts) + " attempts");
}

}  // namespace psieve::harness
