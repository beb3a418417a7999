#include "corpus.hpp"

#include <cmath>
#include <numbers>

#include "psieve/stft.hpp"

namespace psieve::harness {

namespace {
constexpr std::uint64_t kCorpusStream = 1;
}

Signal synthesize(const std::vector<Atom>& atoms, const SignalGeometry& geometry) {
  std::vector<Complex> s(geometry.n);
  for (const auto& a : atoms) {
    for (std::size_t k = 0; k < geometry.n; ++k) {
      const double t = geometry.time(k);
      s[k] += a.c * gaussian(t - a.x) * std::polar(1.0, 2.0 * std::numbers::pi * a.w * t);
    }
  }
  return Signal(std::move(s), geometry);
}

std::vector<CorpusEntry> generate_corpus(const ExperimentConfig& config) {
  const double box = config.shift_box();
  if (box > config.extent() - 3.0 + 1e-12) throw ConfigError("corpus: shift box leaves the safe interior");
  std::vector<CorpusEntry> out;
  out.reserve(config.corpus.count);
  for (std::size_t k = 0; k < config.corpus.count; ++k) {
    Rng rng(derive_seed(config.seed, kCorpusStream, k));
    const auto natoms = rng.integer(1, config.corpus.max_atoms);
    std::vector<Atom> atoms;
    for (std::int64_t a = 0; a < natoms; ++a) {
      Atom atom;
      atom.x = rng.uniform(-box, box);
      atom.w = rng.uniform(-box, box);
      switch (config.corpus.coefficients) {
        case Coefficients::ComplexNormal: atom.c = rng.complex_normal(); break;
        case Coefficients::UnitPhase: atom.c = rng.unit_phase(); break;
        case Coefficients::One: atom.c = 1.0; break;
      }
      if (std::abs(atom.x) > config.extent() - 3.0 + 1e-12 || std::abs(atom.w) > config.extent() - 3.0 + 1e-12) {
        throw ConfigError("corpus: atom placed outside the safe box");
      }
      atoms.push_back(atom);
    }
    Signal s = synthesize(atoms, config.signal);
    if (!(s.norm2() > 1e-8) || !std::isfinite(s.norm2())) throw Error("corpus: degenerate signal");
    out.push_back({std::move(atoms), std::move(s)});
  }
  return out;
}

json atoms_to_json(const std::vector<Atom>& atoms) {
  json a = json::array();
  for (const auto& atom : atoms) {
    a.push_back({{"re", atom.c.real()}, {"im", atom.c.imag()}, {"x", atom.x}, {"w", atom.w}});
  }
  return a;
}

}  // namespace psieve::harness
