#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psieve/recover.hpp"
#include "psieve/types.hpp"

namespace psieve::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Raised for malformed or inconsistent experiment configurations (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Coefficients { ComplexNormal, UnitPhase, One };

struct CorpusSpec {
  std::size_t count = 10;
  int max_atoms = 3;
  Coefficients coefficients = Coefficients::ComplexNormal;
  /// Atom time/frequency shifts are drawn from [-shift_box, shift_box]; defaults to extent - 3.
  std::optional<double> shift_box;
};

enum class MaskKind { Empty, Full, RandomCells, DiscUnion, File };

struct MaskSpec {
  MaskKind kind = MaskKind::Empty;
  double p = 0.05;           ///< random_cells inclusion probability
  double box = 6.0;          ///< cells / disc centers restricted to |x|, |w| <= box
  int discs = 3;             ///< disc_union
  double radius_min = 0.25;
  double radius_max = 0.75;
  std::string path;          ///< file: PBM stem (absolute or relative to the config)
  std::optional<double> max_rho;  ///< resample until rho_outer(Delta, R) <= max_rho
  int max_attempts = 200;
};

struct VerifySpec {
  std::size_t cases = 100;
  double R_min = 0.5;
  double R_max = 2.0;
  double slack = 0.05;
  std::size_t quadrature_points = 8;  ///< stft vs. quadrature cross-check on the first signal
  double quadrature_tol = 1e-6;
};

enum class RecoverMode { Denoise, Inpaint };
enum class NoiseKind { None, Adversarial, Gaussian };

struct RecoverSpec {
  RecoverMode mode = RecoverMode::Denoise;
  std::size_t cases = 10;
  double R = 1.0;
  NoiseKind noise = NoiseKind::None;
  /// Denoise: adversarial noise amplitude relative to max|V|, or Gaussian noise scale.
  double noise_scale = 2.0;
  /// Inpaint: ||P_{Delta^c} N||_1 with ||V f||_1 normalized to 1.
  double epsilon = 0.0;
  double tolerance = 1e-2;
  double bound_slack = 0.05;
  bool write_signals = true;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  SignalGeometry signal{256, 1.0 / 16.0, -8.0};
  TFGrid grid = TFGrid::symmetric(8.0, 1.0 / 16.0);
  CorpusSpec corpus;
  std::vector<MaskSpec> masks;
  std::vector<double> R_grid;
  VerifySpec verify;
  RecoverSpec recover;
  SolverParams solver;
  std::string output_dir;
  std::filesystem::path base_dir;

  /// Half-width of the grid on its smaller axis.
  double extent() const;
  double shift_box() const;
};

/// Throws ConfigError on any schema violation.
ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
json config_to_json(const ExperimentConfig& c);

std::string to_string(MaskKind k);
std::string to_string(RecoverMode m);
std::string to_string(NoiseKind k);

/// Independent, platform-stable seed for (stream, index) derived from the experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace psieve::harness
