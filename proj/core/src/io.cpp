#include "psieve/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace psieve::io {

namespace {

using json = nlohmann::json;
constexpr const char* kFormat = "planar-sieve/1";

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(what + ": " + e.what());
  }
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

void write_complex(const std::filesystem::path& p, const std::vector<Complex>& v) {
  std::string buf(v.size() * 16, '\0');
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::uint64_t re = to_le(std::bit_cast<std::uint64_t>(v[k].real()));
    const std::uint64_t im = to_le(std::bit_cast<std::uint64_t>(v[k].imag()));
    std::memcpy(buf.data() + 16 * k, &re, 8);
    std::memcpy(buf.data() + 16 * k + 8, &im, 8);
  }
  write_text(p, buf);
}

std::vector<Complex> read_complex(const std::filesystem::path& p, std::size_t count) {
  const std::string buf = read_text(p);
  if (buf.size() != count * 16) throw InvalidArgument(p.string() + ": unexpected file size");
  std::vector<Complex> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t re = 0;
    std::uint64_t im = 0;
    std::memcpy(&re, buf.data() + 16 * k, 8);
    std::memcpy(&im, buf.data() + 16 * k + 8, 8);
    v[k] = Complex(std::bit_cast<double>(to_le(re)), std::bit_cast<double>(to_le(im)));
  }
  return v;
}

json grid_json(const TFGrid& g) {
  return {{"nx", g.nx}, {"nw", g.nw}, {"dx", g.dx}, {"dw", g.dw}, {"x0", g.x0}, {"w0", g.w0}};
}

TFGrid grid_of(const json& j) {
  try {
    TFGrid g{j.at("nx").get<std::size_t>(), j.at("nw").get<std::size_t>(), j.at("dx").get<double>(),
             j.at("dw").get<double>(),      j.at("x0").get<double>(),      j.at("w0").get<double>()};
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("grid: ") + e.what());
  }
}

json sidecar(const std::filesystem::path& stem, const char* kind) {
  const auto j = parse(read_text(with_ext(stem, ".json")), with_ext(stem, ".json").string());
  if (j.value("format", "") != kFormat || j.value("kind", "") != kind) {
    throw InvalidArgument(with_ext(stem, ".json").string() + ": not a " + kind + " sidecar");
  }
  return j;
}

}  // namespace

void write_signal(const std::filesystem::path& stem, const Signal& s) {
  write_complex(with_ext(stem, ".bin"), s.samples());
  const json j = {{"format", kFormat}, {"kind", "signal"}, {"n", s.size()}, {"dt", s.dt()}, {"t0", s.t0()}};
  write_text(with_ext(stem, ".json"), j.dump(2) + "\n");
}

Signal read_signal(const std::filesystem::path& stem) {
  const auto j = sidecar(stem, "signal");
  try {
    const auto n = j.at("n").get<std::size_t>();
    return Signal(read_complex(with_ext(stem, ".bin"), n), j.at("dt").get<double>(), j.at("t0").get<double>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("signal sidecar: ") + e.what());
  }
}

void write_tfrepr(const std::filesystem::path& stem, const TFRepr& v) {
  write_complex(with_ext(stem, ".bin"), v.values());
  const json j = {{"format", kFormat}, {"kind", "tfrepr"}, {"grid", grid_json(v.grid())}};
  write_text(with_ext(stem, ".json"), j.dump(2) + "\n");
}

TFRepr read_tfrepr(const std::filesystem::path& stem) {
  const auto j = sidecar(stem, "tfrepr");
  const TFGrid g = grid_of(j.at("grid"));
  return TFRepr(g, read_complex(with_ext(stem, ".bin"), g.size()));
}

void write_mask(const std::filesystem::path& stem, const Mask& m) {
  const auto& g = m.grid();
  std::string text = "P1\n" + std::to_string(g.nw) + " " + std::to_string(g.nx) + "\n";
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nw; ++j) {
      if (j) text += ' ';
      text += m.at(i, j) ? '1' : '0';
    }
    text += '\n';
  }
  write_text(with_ext(stem, ".pbm"), text);
  const json j = {{"format", kFormat}, {"kind", "mask"}, {"grid", grid_json(g)}};
  write_text(with_ext(stem, ".json"), j.dump(2) + "\n");
}

Mask read_mask(const std::filesystem::path& stem) {
  const auto j = sidecar(stem, "mask");
  const TFGrid g = grid_of(j.at("grid"));
  std::istringstream in(read_text(with_ext(stem, ".pbm")));
  std::vector<std::uint8_t> cells;
  cells.reserve(g.size());
  std::string token;
  std::size_t width = 0;
  std::size_t height = 0;
  int header = 0;
  while (in >> token) {
    if (token[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (header == 0) {
      if (token != "P1") throw InvalidArgument("mask: not a plain PBM file");
      ++header;
    } else if (header == 1) {
      width = std::stoul(token);
      ++header;
    } else if (header == 2) {
      height = std::stoul(token);
      ++header;
      if (width != g.nw || height != g.nx) throw InvalidArgument("mask: PBM size does not match the grid");
    } else {
      // P1 allows pixels without separators.
      for (const char c : token) {
        if (c != '0' && c != '1') throw InvalidArgument("mask: invalid PBM pixel");
        cells.push_back(c == '1' ? 1 : 0);
      }
    }
  }
  if (cells.size() != g.size()) throw InvalidArgument("mask: PBM pixel count does not match the grid");
  return Mask(g, std::move(cells));
}

std::string grid_to_json(const TFGrid& g) { return grid_json(g).dump(); }

TFGrid grid_from_json(const std::string& text) { return grid_of(parse(text, "grid")); }

std::string to_json(const DensityReport& r) {
  const json j = {{"R", r.R},
                  {"rho", r.rho},
                  {"measure", r.measure},
                  {"bound", r.bound},
                  {"count", r.count},
                  {"argmax_center", {{"i", r.center_i}, {"j", r.center_j}, {"x", r.center_x}, {"w", r.center_w}}}};
  return j.dump(2);
}

std::string to_json(const SolverParams& p) {
  const json j = {{"max_iters", p.max_iters},   {"gap_tol", p.gap_tol},   {"step_ratio", p.step_ratio},
                  {"op_norm_iters", p.op_norm_iters}, {"seed", p.seed},  {"gap_every", p.gap_every},
                  {"cg_iters", p.cg_iters},     {"cg_tol", p.cg_tol},     {"restart_every", p.restart_every}};
  return j.dump(2);
}

SolverParams solver_params_from_json(const std::string& text) {
  const auto j = parse(text, "solver params");
  if (!j.is_object()) throw InvalidArgument("solver params: expected an object");
  SolverParams p;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "max_iters") p.max_iters = value.get<int>();
      else if (key == "gap_tol") p.gap_tol = value.get<double>();
      else if (key == "step_ratio") p.step_ratio = value.get<double>();
      else if (key == "op_norm_iters") p.op_norm_iters = value.get<int>();
      else if (key == "seed") p.seed = value.get<std::uint64_t>();
      else if (key == "gap_every") p.gap_every = value.get<int>();
      else if (key == "cg_iters") p.cg_iters = value.get<int>();
      else if (key == "cg_tol") p.cg_tol = value.get<double>();
      else if (key == "restart_every") p.restart_every = value.get<int>();
      else throw InvalidArgument("solver params: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("solver params: ") + e.what());
  }
  p.validate();
  return p;
}

std::string to_json(const RecoveryResult& r) {
  const json j = {{"status", to_string(r.status)},
                  {"iterations", r.iterations},
                  {"residual_l1", r.residual_l1},
                  {"op_norm", r.op_norm},
                  {"objective_trace", r.objective_trace},
                  {"gap_trace", r.gap_trace}};
  return j.dump(2);
}

}  // namespace psieve::io
