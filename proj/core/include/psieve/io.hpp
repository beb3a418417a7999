#pragma once

#include <filesystem>
#include <string>

#include "psieve/density.hpp"
#include "psieve/recover.hpp"
#include "psieve/types.hpp"

namespace psieve::io {

/// Signal on disk: `<stem>.bin` holds little-endian float64 pairs (re, im) in time order,
/// `<stem>.json` holds {"format": "planar-sieve/1", "kind": "signal", "n", "dt", "t0"}.
void write_signal(const std::filesystem::path& stem, const Signal& s);
Signal read_signal(const std::filesystem::path& stem);

/// TFRepr on disk: same binary layout, row-major with time as the slow index,
/// and a JSON sidecar carrying the grid.
void write_tfrepr(const std::filesystem::path& stem, const TFRepr& v);
TFRepr read_tfrepr(const std::filesystem::path& stem);

/// Mask as plain PBM (P1), one text row per time index, plus a JSON grid sidecar.
void write_mask(const std::filesystem::path& stem, const Mask& m);
Mask read_mask(const std::filesystem::path& stem);

std::string grid_to_json(const TFGrid& g);
TFGrid grid_from_json(const std::string& text);

std::string to_json(const DensityReport& r);
std::string to_json(const SolverParams& p);
/// Unknown keys are rejected; missing keys keep their defaults.
SolverParams solver_params_from_json(const std::string& text);
/// Traces and scalar results; the recovered signal is written separately with write_signal.
std::string to_json(const RecoveryResult& r);

}  // namespace psieve::io
