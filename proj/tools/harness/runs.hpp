#pragma once

#include <filesystem>

#include "config.hpp"

namespace psieve::harness {

struct RunOutcome {
  json report;
  /// 0 when every assertion holds, 1 otherwise.
  int exit_code = 0;
};

/// Concentration-bound and uncertainty checks over cases drawn from corpus x masks x [R_min, R_max],
/// preceded by an stft vs. quadrature cross-check on the first corpus signal.
RunOutcome run_verify(const ExperimentConfig& config, unsigned parallel = 1);

/// Denoising or inpainting sweep; recovered signals go to `out/signals` when enabled.
RunOutcome run_recover(const ExperimentConfig& config, const std::filesystem::path& out, unsigned parallel = 1);

/// Density and sieve-bound curves over R_grid for one draw of every mask spec.
/// Masks are written to `out/masks`.
RunOutcome run_density(const ExperimentConfig& config, const std::filesystem::path& out, unsigned parallel = 1);

/// Writes the corpus to `out/corpus` and returns its summary.
RunOutcome run_corpus(const ExperimentConfig& config, const std::filesystem::path& out);

/// Writes flat CSV tables for a verify, recover or density report. Returns the files written.
std::vector<std::filesystem::path> emit_plotdata(const json& report, const std::filesystem::path& out);

/// Serialized form used for every report file.
std::string dump_report(const json& report);

}  // namespace psieve::harness
