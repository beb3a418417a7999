#include "runs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "corpus.hpp"
#include "masks.hpp"
#include "psieve/density.hpp"
#include "psieve/io.hpp"
#include "psieve/oracle.hpp"
#include "psieve/recover.hpp"
#include "psieve/stft.hpp"

namespace psieve::harness {

namespace {

constexpr std::uint64_t kVerifyStream = 3;
constexpr std::uint64_t kRecoverStream = 4;
constexpr std::uint64_t kCrossCheckStream = 5;
constexpr std::uint64_t kDensityStream = 6;

// Runs fn(k) for k in [0, n) on up to `workers` threads. Exceptions are rethrown
// in index order after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

std::string case_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case_%04zu", k);
  return buf;
}

double max_or_zero(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

std::vector<TFRepr> corpus_stfts(const std::vector<CorpusEntry>& corpus, const TFGrid& grid) {
  const StftOperator op(corpus.front().signal.geometry(), grid);
  std::vector<TFRepr> out;
  out.reserve(corpus.size());
  for (const auto& e : corpus) out.push_back(op.forward(e.signal));
  return out;
}

json cross_check(const ExperimentConfig& config, const CorpusEntry& entry, const TFRepr& v) {
  const auto& g = config.grid;
  Rng rng(derive_seed(config.seed, kCrossCheckStream, 0));
  const double box = config.extent() - 3.0;
  std::vector<std::pair<double, double>> points;
  std::vector<Complex> fast;
  while (points.size() < config.verify.quadrature_points) {
    const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(g.nx) - 1));
    const auto j = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(g.nw) - 1));
    if (std::abs(g.x(i)) > box || std::abs(g.w(j)) > box) continue;
    points.emplace_back(g.x(i), g.w(j));
    fast.push_back(v.at(i, j));
  }
  const auto atoms = entry.atoms;
  oracle::ContinuousSignal cs{[atoms](double t) {
                                Complex s{};
                                for (const auto& a : atoms) {
                                  s += a.c * gaussian(t - a.x) * std::polar(1.0, 2.0 * std::numbers::pi * a.w * t);
                                }
                                return s;
                              },
                              config.signal.t0, config.signal.t_last()};
  const auto ref = oracle::quadrature_stft(cs, points, 1e-10);
  double worst = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(ref[k] - fast[k]));
  return {{"points", points.size()},
          {"max_abs_error", worst},
          {"tolerance", config.verify.quadrature_tol},
          {"pass", worst <= config.verify.quadrature_tol}};
}

}  // namespace

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

RunOutcome run_verify(const ExperimentConfig& config, unsigned parallel) {
  const auto corpus = generate_corpus(config);
  const auto stfts = corpus_stfts(corpus, config.grid);

  RunOutcome out;
  out.report = {{"command", "verify"}, {"config", config_to_json(config)}};
  const json cc = cross_check(config, corpus.front(), stfts.front());
  out.report["cross_check"] = cc;
  if (!cc["pass"].get<bool>()) {
    out.report["aborted"] = "stft does not match the quadrature oracle";
    out.report["cases"] = json::array();
    out.exit_code = 1;
    return out;
  }

  const std::size_t n = config.verify.cases;
  std::vector<json> cases(n);
  std::vector<char> passed(n, 0);
  std::vector<double> ratios(n, 0.0);
  parallel_for(n, parallel, [&](std::size_t k) {
    Rng rng(derive_seed(config.seed, kVerifyStream, k));
    const double R = rng.uniform(config.verify.R_min, config.verify.R_max);
    const std::size_t mi = k % config.masks.size();
    const std::size_t si = k % corpus.size();
    const auto gm = generate_mask(config.masks[mi], config.grid, R, rng);
    const auto& v = stfts[si];
    const double rho = nyquist_density(gm.mask, R, {RasterMode::Outer, 1}).rho;
    const auto t1 = verify_theorem1(v, gm.mask, rho, R, config.verify.slack);
    const auto best = optimize_R(gm.mask, config.R_grid, RasterMode::Outer);
    const auto unc = uncertainty_check(v, gm.mask, best, config.verify.slack);
    const bool ok = t1.pass && unc.pass;
    passed[k] = ok;
    ratios[k] = t1.ratio;
    cases[k] = {{"case", k},
                {"signal", si},
                {"mask_spec", mi},
                {"mask_kind", to_string(config.masks[mi].kind)},
                {"mask_attempts", gm.attempts},
                {"measure", gm.mask.measure()},
                {"R", R},
                {"rho_outer", rho},
                {"lhs", t1.lhs},
                {"rhs", t1.rhs},
                {"ratio", t1.ratio},
                {"theorem1_pass", t1.pass},
                {"epsilon", unc.epsilon},
                {"inf_bound", unc.inf_bound},
                {"best_R", unc.best_R},
                {"uncertainty_pass", unc.pass},
                {"pass", ok}};
  });
  const auto npass = static_cast<std::size_t>(std::count(passed.begin(), passed.end(), 1));
  out.report["cases"] = cases;
  out.report["summary"] = {{"cases", n},
                           {"passed", npass},
                           {"pass_rate", n ? static_cast<double>(npass) / static_cast<double>(n) : 1.0},
                           {"max_ratio", max_or_zero(ratios)}};
  out.exit_code = npass == n ? 0 : 1;
  return out;
}

RunOutcome run_recover(const ExperimentConfig& config, const std::filesystem::path& out_dir, unsigned parallel) {
  const auto corpus = generate_corpus(config);
  const auto& spec = config.recover;
  const double R = spec.R;
  const SignalGeometry& geom = config.signal;
  const StftOperator op(geom, config.grid);
  const double dA = config.grid.cell_area();
  std::filesystem::path sig_dir = out_dir / "signals";
  if (spec.write_signals) std::filesystem::create_directories(sig_dir);

  const std::size_t n = spec.cases;
  std::vector<json> cases(n);
  std::vector<char> passed(n, 0), guaranteed(n, 0), converged(n, 0);
  parallel_for(n, parallel, [&](std::size_t k) {
    Rng rng(derive_seed(config.seed, kRecoverStream, k));
    const std::size_t si = k % corpus.size();
    const std::size_t mi = k % config.masks.size();
    const auto gm = generate_mask(config.masks[mi], config.grid, R, rng);
    const Mask& mask = gm.mask;

    // Normalize so that ||V f||_1 = 1.
    const TFRepr raw = op.forward(corpus[si].signal);
    const double scale = 1.0 / tf_norm(raw, Norm::L1);
    std::vector<Complex> fs = corpus[si].signal.samples();
    for (auto& x : fs) x *= scale;
    const Signal f(std::move(fs), geom);
    const TFRepr v = op.forward(f);

    const double rho_outer = nyquist_density(mask, R, {RasterMode::Outer, 1}).rho;
    const double rho_center = nyquist_density(mask, R, {RasterMode::CenterIn, 1}).rho;

    json c = {{"case", k},
              {"signal", si},
              {"mask_spec", mi},
              {"mask_kind", to_string(config.masks[mi].kind)},
              {"mask_attempts", gm.attempts},
              {"measure", mask.measure()},
              {"R", R},
              {"rho_outer", rho_outer},
              {"rho_center_in", rho_center}};

    std::vector<Complex> obs = v.values();
    RecoveryResult res{Signal::zeros(geom), {}, {}, 0, SolverStatus::MaxIters, 0.0, 0.0};
    bool guarantee = false;
    bool ok = false;
    double objective_truth = 0.0;
    if (spec.mode == RecoverMode::Denoise) {
      double vmax = 0.0;
      for (const auto& x : obs) vmax = std::max(vmax, std::abs(x));
      for (std::size_t cell = 0; cell < obs.size(); ++cell) {
        if (!mask.cells()[cell]) continue;
        switch (spec.noise) {
          case NoiseKind::None: break;
          case NoiseKind::Adversarial: obs[cell] += -v.values()[cell] + spec.noise_scale * vmax * rng.complex_normal(); break;
          case NoiseKind::Gaussian: obs[cell] += spec.noise_scale * rng.complex_normal(); break;
        }
      }
      const TFRepr G(config.grid, obs);
      for (std::size_t cell = 0; cell < obs.size(); ++cell) objective_truth += std::abs(obs[cell] - v.values()[cell]);
      objective_truth *= dA;
      res = denoise_l1(G, geom, config.solver);
      const double threshold = denoise_threshold(R);
      guarantee = spec.noise == NoiseKind::None || rho_outer < threshold;
      double diff = 0.0;
      for (std::size_t t = 0; t < geom.n; ++t) diff += std::abs(f.samples()[t] - res.recovered.samples()[t]);
      const double rel = diff * geom.dt / f.norm1();
      ok = !guarantee || rel <= spec.tolerance;
      c["threshold"] = threshold;
      c["relative_signal_l1_error"] = rel;
      c["tolerance"] = spec.tolerance;
    } else {
      std::vector<Complex> noise(obs.size());
      double noise_l1 = 0.0;
      for (std::size_t cell = 0; cell < obs.size(); ++cell) {
        if (mask.cells()[cell]) continue;
        noise[cell] = rng.complex_normal();
        noise_l1 += std::abs(noise[cell]);
      }
      noise_l1 *= dA;
      const double nscale = spec.epsilon > 0.0 && noise_l1 > 0.0 ? spec.epsilon / noise_l1 : 0.0;
      double eps = 0.0;
      for (std::size_t cell = 0; cell < obs.size(); ++cell) {
        if (mask.cells()[cell]) {
          obs[cell] = Complex{};
        } else {
          obs[cell] += nscale * noise[cell];
          eps += std::abs(nscale * noise[cell]);
          objective_truth += std::abs(nscale * noise[cell]);
        }
      }
      eps *= dA;
      objective_truth *= dA;
      res = inpaint_l1(TFRepr(config.grid, obs), mask, geom, config.solver);
      const auto bound = missing_data_bound(eps, rho_outer, R);
      guarantee = bound.has_value();
      std::vector<Complex> d(geom.n);
      for (std::size_t t = 0; t < geom.n; ++t) d[t] = f.samples()[t] - res.recovered.samples()[t];
      const double err = tf_norm(op.forward(Signal(std::move(d), geom)), Norm::L1);
      const double limit = eps > 0.0 && bound ? *bound * (1.0 + spec.bound_slack) : spec.tolerance;
      ok = !guarantee || err <= limit;
      c["threshold"] = inpaint_threshold(R);
      c["epsilon"] = eps;
      c["stft_l1_error"] = err;
      c["bound"] = bound ? json(*bound) : json(nullptr);
      c["limit"] = limit;
    }
    const bool conv = res.status == SolverStatus::Converged;
    c["guarantee"] = guarantee;
    c["condition"] = guarantee ? "satisfied" : "no guarantee";
    c["objective"] = res.residual_l1;
    c["objective_at_truth"] = objective_truth;
    c["status"] = to_string(res.status);
    c["iterations"] = res.iterations;
    c["final_gap"] = res.gap_trace.empty() ? json(nullptr) : json(res.gap_trace.back());
    c["gap_trace"] = res.gap_trace;
    c["op_norm"] = res.op_norm;
    c["pass"] = ok;
    if (spec.write_signals) {
      io::write_signal(sig_dir / case_name(k), res.recovered);
      write_file(sig_dir / (case_name(k) + ".result.json"), io::to_json(res) + "\n");
    }
    cases[k] = std::move(c);
    passed[k] = ok;
    guaranteed[k] = guarantee;
    converged[k] = conv;
  });
  auto count = [](const std::vector<char>& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)); };
  RunOutcome out;
  out.report = {{"command", "recover"},
                {"mode", to_string(spec.mode)},
                {"noise", to_string(spec.noise)},
                {"config", config_to_json(config)},
                {"cases", cases},
                {"summary",
                 {{"cases", n},
                  {"passed", count(passed)},
                  {"guaranteed", count(guaranteed)},
                  {"no_guarantee", n - count(guaranteed)},
                  {"converged", count(converged)}}}};
  out.exit_code = count(passed) == n ? 0 : 1;
  return out;
}

RunOutcome run_density(const ExperimentConfig& config, const std::filesystem::path& out_dir, unsigned parallel) {
  const auto mask_dir = out_dir / "masks";
  std::filesystem::create_directories(mask_dir);
  const std::size_t n = config.masks.size();
  std::vector<json> entries(n);
  parallel_for(n, parallel, [&](std::size_t k) {
    Rng rng(derive_seed(config.seed, kDensityStream, k));
    const auto gm = generate_mask(config.masks[k], config.grid, config.recover.R, rng);
    char name[32];
    std::snprintf(name, sizeof name, "mask_%04zu", k);
    io::write_mask(mask_dir / name, gm.mask);
    json curve = json::array();
    for (double R : config.R_grid) {
      if (!admissible_R(config.grid, R)) continue;
      const auto ci = nyquist_density(gm.mask, R, {RasterMode::CenterIn, 1});
      const auto ou = nyquist_density(gm.mask, R, {RasterMode::Outer, 1});
      curve.push_back({{"R", R},
                       {"center_in", json::parse(io::to_json(ci))},
                       {"outer", json::parse(io::to_json(ou))}});
    }
    const auto best_ci = optimize_R(gm.mask, config.R_grid, RasterMode::CenterIn);
    const auto best_ou = optimize_R(gm.mask, config.R_grid, RasterMode::Outer);
    entries[k] = {{"mask", k},
                  {"kind", to_string(config.masks[k].kind)},
                  {"file", std::string(name) + ".pbm"},
                  {"measure", gm.mask.measure()},
                  {"curve", curve},
                  {"optimum_center_in", {{"R", best_ci.R}, {"bound", best_ci.bound}, {"rho", best_ci.rho}}},
                  {"optimum_outer", {{"R", best_ou.R}, {"bound", best_ou.bound}, {"rho", best_ou.rho}}}};
  });
  RunOutcome out;
  out.report = {{"command", "density"}, {"config", config_to_json(config)}, {"masks", entries}};
  return out;
}

RunOutcome run_corpus(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const auto corpus = generate_corpus(config);
  const auto dir = out_dir / "corpus";
  std::filesystem::create_directories(dir);
  json entries = json::array();
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "signal_%04zu", k);
    io::write_signal(dir / name, corpus[k].signal);
    entries.push_back({{"index", k},
                       {"file", name},
                       {"atoms", atoms_to_json(corpus[k].atoms)},
                       {"norm1", corpus[k].signal.norm1()},
                       {"norm2", corpus[k].signal.norm2()}});
  }
  RunOutcome out;
  out.report = {{"command", "corpus"}, {"config", config_to_json(config)}, {"signals", entries}};
  return out;
}

namespace {

std::string num(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.get<std::string>();
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (std::size_t c = 0; c < header.size(); ++c) s += (c ? "," : "") + header[c];
  s += '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) s += (c ? "," : "") + r[c];
    s += '\n';
  }
  return s;
}

std::vector<std::vector<std::string>> rows_of(const json& cases, const std::vector<std::string>& keys) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cases) {
    std::vector<std::string> r;
    for (const auto& k : keys) r.push_back(c.contains(k) ? num(c.at(k)) : "");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::vector<std::filesystem::path> emit_plotdata(const json& report, const std::filesystem::path& out) {
  if (!report.is_object() || !report.contains("command")) throw InvalidArgument("plotdata: not a report");
  std::filesystem::create_directories(out);
  const std::string cmd = report.at("command").get<std::string>();
  const json empty = json::array();
  std::vector<std::filesystem::path> written;
  if (cmd == "verify") {
    const std::vector<std::string> keys = {"case", "signal", "mask_kind", "measure", "R", "rho_outer", "lhs", "rhs",
                                           "ratio", "epsilon", "inf_bound", "best_R", "pass"};
    const auto p = out / "verify_cases.csv";
    write_file(p, table(keys, rows_of(report.value("cases", empty), keys)));
    written.push_back(p);
  } else if (cmd == "recover") {
    const std::vector<std::string> keys = {"case",  "signal", "mask_kind", "measure", "R",          "rho_outer",
                                           "rho_center_in", "threshold", "relative_signal_l1_error", "stft_l1_error",
                                           "epsilon", "bound", "guarantee", "status", "iterations", "pass"};
    const auto p = out / "recover_error_vs_rho.csv";
    write_file(p, table(keys, rows_of(report.value("cases", empty), keys)));
    written.push_back(p);
  } else if (cmd == "density") {
    const std::vector<std::string> header = {"mask", "kind", "R", "rho_center_in", "bound_center_in", "rho_outer",
                                             "bound_outer"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : report.value("masks", empty)) {
      for (const auto& pt : m.at("curve")) {
        rows.push_back({num(m.at("mask")), num(m.at("kind")), num(pt.at("R")), num(pt.at("center_in").at("rho")),
                        num(pt.at("center_in").at("bound")), num(pt.at("outer").at("rho")),
                        num(pt.at("outer").at("bound"))});
      }
    }
    const auto p = out / "density_vs_bound.csv";
    write_file(p, table(header, rows));
    written.push_back(p);
  } else {
    throw InvalidArgument("plotdata: unsupported report command '" + cmd + "'");
  }
  return written;
}

}  // namespace psieve::harness
