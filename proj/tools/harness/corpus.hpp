#pragma once

#include <vector>

#include "config.hpp"
#include "psieve/random.hpp"

namespace psieve::harness {

/// One time-frequency shifted Gaussian c * e^{2 pi i w t} phi(t - x).
struct Atom {
  Complex c;
  double x = 0.0;
  double w = 0.0;
};

struct CorpusEntry {
  std::vector<Atom> atoms;
  Signal signal;
};

Signal synthesize(const std::vector<Atom>& atoms, const SignalGeometry& geometry);

/// Deterministic corpus: entry k uses its own seed derived from (config.seed, k).
/// Throws ConfigError if an atom would leave the interior box.
std::vector<CorpusEntry> generate_corpus(const ExperimentConfig& config);

json atoms_to_json(const std::vector<Atom>& atoms);

}  // namespace psieve::harness
