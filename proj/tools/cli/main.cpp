#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "config.hpp"
#include "runs.hpp"

namespace fs = std::filesystem;
using namespace psieve;
using namespace psieve::harness;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned parallel = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (defaults to the config's output_dir)");
  sub->add_option("--seed", c.seed, "Override the configuration seed");
  sub->add_option("--parallel", c.parallel, "Worker threads for independent cases")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const Common& c, fs::path& out_dir) {
  auto cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  out_dir = !c.out.empty() ? fs::path(c.out) : fs::path(cfg.output_dir);
  if (out_dir.empty()) throw ConfigError("no output directory: pass --out or set output_dir");
  if (out_dir.is_relative() && c.out.empty()) out_dir = cfg.base_dir / out_dir;
  fs::create_directories(out_dir);
  return cfg;
}

void save(const fs::path& path, const json& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dump_report(report);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar large-sieve toolkit: STFT concentration bounds and L1 recovery experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "psieve 0.1.0");

  Common verify_opts, recover_opts, density_opts, corpus_opts;
  auto* verify = app.add_subcommand("verify", "Check the large-sieve concentration bound over a randomized corpus");
  add_common(verify, verify_opts);
  auto* recover = app.add_subcommand("recover", "Run the denoising or inpainting sweep");
  add_common(recover, recover_opts);
  std::string mode_override;
  recover->add_option("--mode", mode_override, "Override recover.mode")->check(CLI::IsMember({"denoise", "inpaint"}));
  auto* density = app.add_subcommand("density", "Planar density and sieve bound curves for the configured masks");
  add_common(density, density_opts);
  auto* corpus = app.add_subcommand("corpus", "Write the test-signal corpus");
  add_common(corpus, corpus_opts);
  auto* plot = app.add_subcommand("plotdata", "Flatten a report into CSV tables");
  std::string report_path, plot_out;
  plot->add_option("--report", report_path, "Report JSON written by verify, recover or density")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    fs::path out_dir;
    RunOutcome outcome;
    fs::path report_file;
    if (*verify) {
      const auto cfg = load(verify_opts, out_dir);
      outcome = run_verify(cfg, verify_opts.parallel);
      report_file = out_dir / "verify_report.json";
    } else if (*recover) {
      auto cfg = load(recover_opts, out_dir);
      if (!mode_override.empty()) cfg.recover.mode = mode_override == "denoise" ? RecoverMode::Denoise : RecoverMode::Inpaint;
      outcome = run_recover(cfg, out_dir, recover_opts.parallel);
      report_file = out_dir / "recover_report.json";
    } else if (*density) {
      const auto cfg = load(density_opts, out_dir);
      outcome = run_density(cfg, out_dir, density_opts.parallel);
      report_file = out_dir / "density_report.json";
    } else if (*corpus) {
      const auto cfg = load(corpus_opts, out_dir);
      outcome = run_corpus(cfg, out_dir);
      report_file = out_dir / "corpus.json";
    } else {
      std::ifstream in(report_path);
      json report;
      try {
        in >> report;
      } catch (const json::exception& e) {
        throw ConfigError("report " + report_path + ": " + e.what());
      }
      for (const auto& p : emit_plotdata(report, plot_out)) std::cout << p.string() << "\n";
      return 0;
    }
    save(report_file, outcome.report);
    std::cout << report_file.string() << "\n";
    if (outcome.report.contains("summary")) std::cout << outcome.report["summary"].dump() << "\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
