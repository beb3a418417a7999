#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "psieve/density.hpp"
#include "psieve/io.hpp"
#include "psieve/stft.hpp"

namespace psieve::harness {

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, where);
  out = v;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

Coefficients coefficients_of(const std::string& s) {
  if (s == "complex_normal") return Coefficients::ComplexNormal;
  if (s == "unit_phase") return Coefficients::UnitPhase;
  if (s == "one") return Coefficients::One;
  throw ConfigError("corpus.coefficients: unknown value '" + s + "'");
}

std::string coefficients_name(Coefficients c) {
  switch (c) {
    case Coefficients::ComplexNormal: return "complex_normal";
    case Coefficients::UnitPhase: return "unit_phase";
    case Coefficients::One: return "one";
  }
  return "";
}

MaskKind mask_kind_of(const std::string& s) {
  if (s == "empty") return MaskKind::Empty;
  if (s == "full") return MaskKind::Full;
  if (s == "random_cells") return MaskKind::RandomCells;
  if (s == "disc_union") return MaskKind::DiscUnion;
  if (s == "file") return MaskKind::File;
  throw ConfigError("masks[].kind: unknown value '" + s + "'");
}

NoiseKind noise_of(const std::string& s) {
  if (s == "none") return NoiseKind::None;
  if (s == "adversarial") return NoiseKind::Adversarial;
  if (s == "gaussian") return NoiseKind::Gaussian;
  throw ConfigError("recover.noise: unknown value '" + s + "'");
}

RecoverMode mode_of(const std::string& s) {
  if (s == "denoise") return RecoverMode::Denoise;
  if (s == "inpaint") return RecoverMode::Inpaint;
  throw ConfigError("recover.mode: unknown value '" + s + "'");
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

double ExperimentConfig::extent() const {
  const double ex = 0.5 * (grid.x_last() - grid.x0);
  const double ew = 0.5 * (grid.w_last() - grid.w0);
  return std::min(ex, ew);
}

double ExperimentConfig::shift_box() const { return corpus.shift_box.value_or(extent() - 3.0); }

std::string to_string(MaskKind k) {
  switch (k) {
    case MaskKind::Empty: return "empty";
    case MaskKind::Full: return "full";
    case MaskKind::RandomCells: return "random_cells";
    case MaskKind::DiscUnion: return "disc_union";
    case MaskKind::File: return "file";
  }
  return "";
}

std::string to_string(RecoverMode m) { return m == RecoverMode::Denoise ? "denoise" : "inpaint"; }

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Adversarial: return "adversarial";
    case NoiseKind::Gaussian: return "gaussian";
  }
  return "";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(splitmix(seed) ^ stream) ^ index);
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config",
             {"schema_version", "seed", "geometry", "corpus", "masks", "R_grid", "verify", "recover", "solver",
              "output_dir"});
  ExperimentConfig c;
  c.base_dir = base_dir;
  require(j.contains("schema_version"), "config: missing schema_version");
  read(j, "schema_version", c.schema_version, "config");
  require(c.schema_version == kSchemaVersion,
          "config: unsupported schema_version " + std::to_string(c.schema_version));
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");

  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    check_keys(g, "geometry", {"signal", "grid"});
    if (g.contains("signal")) {
      const auto& s = g.at("signal");
      check_keys(s, "geometry.signal", {"n", "dt", "t0"});
      read(s, "n", c.signal.n, "geometry.signal");
      read(s, "dt", c.signal.dt, "geometry.signal");
      read(s, "t0", c.signal.t0, "geometry.signal");
    }
    if (g.contains("grid")) {
      const auto& gr = g.at("grid");
      if (gr.contains("extent")) {
        check_keys(gr, "geometry.grid", {"extent", "step"});
        double extent = 8.0;
        double step = 1.0 / 16.0;
        read(gr, "extent", extent, "geometry.grid");
        read(gr, "step", step, "geometry.grid");
        require(extent > 0.0 && step > 0.0, "geometry.grid: extent and step must be positive");
        c.grid = TFGrid::symmetric(extent, step);
      } else {
        check_keys(gr, "geometry.grid", {"nx", "nw", "dx", "dw", "x0", "w0"});
        read(gr, "nx", c.grid.nx, "geometry.grid");
        read(gr, "nw", c.grid.nw, "geometry.grid");
        read(gr, "dx", c.grid.dx, "geometry.grid");
        read(gr, "dw", c.grid.dw, "geometry.grid");
        read(gr, "x0", c.grid.x0, "geometry.grid");
        read(gr, "w0", c.grid.w0, "geometry.grid");
      }
    }
  }
  try {
    c.signal.validate();
    c.grid.validate();
    StftOperator probe(c.signal, c.grid);
  } catch (const Error& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }

  if (j.contains("corpus")) {
    const auto& s = j.at("corpus");
    check_keys(s, "corpus", {"count", "max_atoms", "coefficients", "shift_box"});
    read(s, "count", c.corpus.count, "corpus");
    read(s, "max_atoms", c.corpus.max_atoms, "corpus");
    std::string coeff = coefficients_name(c.corpus.coefficients);
    read(s, "coefficients", coeff, "corpus");
    c.corpus.coefficients = coefficients_of(coeff);
    read_opt(s, "shift_box", c.corpus.shift_box, "corpus");
  }
  require(c.corpus.count >= 1, "corpus.count must be at least 1");
  require(c.corpus.max_atoms >= 1, "corpus.max_atoms must be at least 1");
  require(c.shift_box() >= 0.0, "corpus.shift_box must be nonnegative");
  require(c.shift_box() <= c.extent() - 3.0 + 1e-12, "corpus.shift_box: atoms must stay inside extent - 3");

  if (j.contains("masks")) {
    const auto& ms = j.at("masks");
    require(ms.is_array(), "masks: expected an array");
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const auto& m = ms[k];
      const std::string where = "masks[" + std::to_string(k) + "]";
      check_keys(m, where,
                 {"kind", "p", "box", "discs", "radius_min", "radius_max", "path", "max_rho", "max_attempts"});
      MaskSpec spec;
      require(m.contains("kind"), where + ": missing kind");
      std::string kind;
      read(m, "kind", kind, where);
      spec.kind = mask_kind_of(kind);
      read(m, "p", spec.p, where);
      read(m, "box", spec.box, where);
      read(m, "discs", spec.discs, where);
      read(m, "radius_min", spec.radius_min, where);
      read(m, "radius_max", spec.radius_max, where);
      read(m, "path", spec.path, where);
      read_opt(m, "max_rho", spec.max_rho, where);
      read(m, "max_attempts", spec.max_attempts, where);
      require(spec.p >= 0.0 && spec.p <= 1.0, where + ".p must lie in [0, 1]");
      require(spec.box >= 0.0, where + ".box must be nonnegative");
      require(spec.discs >= 0, where + ".discs must be nonnegative");
      require(spec.radius_min > 0.0 && spec.radius_min <= spec.radius_max, where + ": invalid radius range");
      require(spec.max_attempts >= 1, where + ".max_attempts must be positive");
      if (spec.kind == MaskKind::File) {
        require(!spec.path.empty(), where + ": file masks need a path");
        std::filesystem::path p(spec.path);
        if (p.is_relative()) p = base_dir / p;
        spec.path = p.string();
        auto pbm = p;
        pbm += ".pbm";
        require(std::filesystem::exists(pbm), where + ": mask file " + pbm.string() + " does not exist");
        try {
          const Mask loaded = io::read_mask(p);
          require(loaded.grid() == c.grid, where + ": mask grid does not match the experiment grid");
        } catch (const Error& e) {
          if (dynamic_cast<const ConfigError*>(&e)) throw;
          throw ConfigError(where + ": " + e.what());
        }
      }
      c.masks.push_back(spec);
    }
  }
  if (c.masks.empty()) c.masks.push_back(MaskSpec{});

  if (j.contains("R_grid")) {
    const auto& r = j.at("R_grid");
    if (r.is_string()) {
      require(r.get<std::string>() == "default", "R_grid: expected \"default\" or an array");
      c.R_grid = default_R_grid();
    } else {
      read(j, "R_grid", c.R_grid, "config");
    }
  } else {
    c.R_grid = default_R_grid();
  }
  require(!c.R_grid.empty(), "R_grid must not be empty");
  for (double R : c.R_grid) require(R > 0.0 && std::isfinite(R), "R_grid entries must be positive");

  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    check_keys(v, "verify", {"cases", "R_min", "R_max", "slack", "quadrature_points", "quadrature_tol"});
    read(v, "cases", c.verify.cases, "verify");
    read(v, "R_min", c.verify.R_min, "verify");
    read(v, "R_max", c.verify.R_max, "verify");
    read(v, "slack", c.verify.slack, "verify");
    read(v, "quadrature_points", c.verify.quadrature_points, "verify");
    read(v, "quadrature_tol", c.verify.quadrature_tol, "verify");
  }
  require(c.verify.R_min > 0.0 && c.verify.R_min <= c.verify.R_max, "verify: invalid R range");
  require(c.verify.slack >= 0.0, "verify.slack must be nonnegative");
  require(admissible_R(c.grid, c.verify.R_max), "verify.R_max: disc smaller than one cell");

  if (j.contains("recover")) {
    const auto& r = j.at("recover");
    check_keys(r, "recover",
               {"mode", "cases", "R", "noise", "noise_scale", "epsilon", "tolerance", "bound_slack", "write_signals"});
    std::string mode = to_string(c.recover.mode);
    read(r, "mode", mode, "recover");
    c.recover.mode = mode_of(mode);
    read(r, "cases", c.recover.cases, "recover");
    read(r, "R", c.recover.R, "recover");
    std::string noise = to_string(c.recover.noise);
    read(r, "noise", noise, "recover");
    c.recover.noise = noise_of(noise);
    read(r, "noise_scale", c.recover.noise_scale, "recover");
    read(r, "epsilon", c.recover.epsilon, "recover");
    read(r, "tolerance", c.recover.tolerance, "recover");
    read(r, "bound_slack", c.recover.bound_slack, "recover");
    read(r, "write_signals", c.recover.write_signals, "recover");
  }
  require(c.recover.R > 0.0 && admissible_R(c.grid, c.recover.R), "recover.R: not admissible for the grid");
  require(c.recover.noise_scale >= 0.0, "recover.noise_scale must be nonnegative");
  require(c.recover.epsilon >= 0.0, "recover.epsilon must be nonnegative");
  require(c.recover.tolerance > 0.0, "recover.tolerance must be positive");

  if (j.contains("solver")) {
    try {
      c.solver = io::solver_params_from_json(j.at("solver").dump());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json masks = json::array();
  for (const auto& m : c.masks) {
    json e = {{"kind", to_string(m.kind)}};
    switch (m.kind) {
      case MaskKind::RandomCells:
        e["p"] = m.p;
        e["box"] = m.box;
        break;
      case MaskKind::DiscUnion:
        e["discs"] = m.discs;
        e["radius_min"] = m.radius_min;
        e["radius_max"] = m.radius_max;
        e["box"] = m.box;
        break;
      case MaskKind::File:
        e["path"] = std::filesystem::path(m.path).filename().string();
        break;
      default:
        break;
    }
    if (m.max_rho) e["max_rho"] = *m.max_rho;
    masks.push_back(e);
  }
  return {{"schema_version", c.schema_version},
          {"seed", c.seed},
          {"geometry",
           {{"signal", {{"n", c.signal.n}, {"dt", c.signal.dt}, {"t0", c.signal.t0}}},
            {"grid",
             {{"nx", c.grid.nx},
              {"nw", c.grid.nw},
              {"dx", c.grid.dx},
              {"dw", c.grid.dw},
              {"x0", c.grid.x0},
              {"w0", c.grid.w0}}}}},
          {"corpus",
           {{"count", c.corpus.count},
            {"max_atoms", c.corpus.max_atoms},
            {"coefficients", coefficients_name(c.corpus.coefficients)},
            {"shift_box", c.shift_box()}}},
          {"masks", masks},
          {"R_grid", c.R_grid},
          {"solver", json::parse(io::to_json(c.solver))}};
}

}  // namespace psieve::harness
