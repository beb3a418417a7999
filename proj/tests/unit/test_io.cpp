#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "psieve/io.hpp"
#include "support.hpp"

using namespace psieve;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const auto dir = fs::temp_directory_path() / "psieve_io_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(SignalIo, RoundTripIsExact) {
  Rng rng(181);
  const auto dir = scratch_dir();
  const auto s = test::random_samples(test::default_signal(), rng);
  io::write_signal(dir / "sig", s);
  EXPECT_EQ(fs::file_size(dir / "sig.bin"), s.size() * 16);
  const auto back = io::read_signal(dir / "sig");
  EXPECT_EQ(back.samples(), s.samples());
  EXPECT_EQ(back.geometry(), s.geometry());

  const auto side = nlohmann::json::parse(std::ifstream(dir / "sig.json"));
  EXPECT_EQ(side.at("format"), "planar-sieve/1");
  EXPECT_EQ(side.at("kind"), "signal");
  EXPECT_EQ(side.at("n"), s.size());
}

TEST(SignalIo, RejectsTruncatedData) {
  Rng rng(191);
  const auto dir = scratch_dir();
  io::write_signal(dir / "sig", test::random_samples(test::toy_signal(), rng));
  fs::resize_file(dir / "sig.bin", 40);
  EXPECT_THROW(io::read_signal(dir / "sig"), InvalidArgument);
  EXPECT_THROW(io::read_signal(dir / "missing"), Error);
}

TEST(TfReprIo, RoundTripIsExact) {
  Rng rng(193);
  const auto dir = scratch_dir();
  const auto v = test::random_field(test::toy_grid(), rng);
  io::write_tfrepr(dir / "v", v);
  const auto back = io::read_tfrepr(dir / "v");
  EXPECT_EQ(back.grid(), v.grid());
  EXPECT_EQ(back.values(), v.values());
  EXPECT_THROW(io::read_signal(dir / "v"), InvalidArgument);
}

TEST(MaskIo, RoundTripAndPbmLayout) {
  Rng rng(197);
  const auto dir = scratch_dir();
  const TFGrid g{3, 5, 0.5, 0.25, -1.0, -0.5};
  std::vector<std::uint8_t> cells(g.size(), 0);
  cells[g.index(0, 4)] = 1;
  cells[g.index(2, 1)] = 1;
  const Mask m(g, cells);
  io::write_mask(dir / "m", m);
  std::ifstream in(dir / "m.pbm");
  std::string magic;
  std::size_t w = 0, h = 0;
  in >> magic >> w >> h;
  EXPECT_EQ(magic, "P1");
  EXPECT_EQ(w, g.nw);
  EXPECT_EQ(h, g.nx);
  EXPECT_EQ(io::read_mask(dir / "m"), m);

  const auto big = test::random_mask(test::default_grid(), rng, 0.3);
  io::write_mask(dir / "big", big);
  EXPECT_EQ(io::read_mask(dir / "big"), big);
}

TEST(MaskIo, RejectsMalformedPbm) {
  const auto dir = scratch_dir();
  const TFGrid g{2, 2, 1.0, 1.0, 0.0, 0.0};
  io::write_mask(dir / "m", Mask(g));
  std::ofstream(dir / "m.pbm") << "P1\n2 2\n0 1\n1 2\n";
  EXPECT_THROW(io::read_mask(dir / "m"), InvalidArgument);
  std::ofstream(dir / "m.pbm") << "P1\n3 2\n0 1 0\n1 0 0\n";
  EXPECT_THROW(io::read_mask(dir / "m"), InvalidArgument);
}

TEST(GridJson, RoundTripIsExact) {
  const TFGrid g{7, 9, 0.1, 1.0 / 3.0, -0.3, -4.0 / 3.0};
  EXPECT_EQ(io::grid_from_json(io::grid_to_json(g)), g);
  EXPECT_THROW(io::grid_from_json("{\"nx\": 1}"), InvalidArgument);
}

TEST(SolverParamsJson, RoundTripAndUnknownKeys) {
  SolverParams p;
  p.max_iters = 123;
  p.gap_tol = 3e-7;
  p.restart_every = 0;
  p.seed = 99;
  const auto back = io::solver_params_from_json(io::to_json(p));
  EXPECT_EQ(back.max_iters, 123);
  EXPECT_EQ(back.gap_tol, 3e-7);
  EXPECT_EQ(back.restart_every, 0);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(io::solver_params_from_json("{}").max_iters, SolverParams{}.max_iters);
  EXPECT_THROW(io::solver_params_from_json("{\"iters\": 5}"), InvalidArgument);
  EXPECT_THROW(io::solver_params_from_json("{\"max_iters\": \"many\"}"), InvalidArgument);
  EXPECT_THROW(io::solver_params_from_json("[]"), InvalidArgument);
}

TEST(ReportJson, DensityAndRecoveryFields) {
  DensityReport d;
  d.R = 1.5;
  d.rho = 0.25;
  d.count = 64;
  const auto jd = nlohmann::json::parse(io::to_json(d));
  EXPECT_EQ(jd.at("R"), 1.5);
  EXPECT_EQ(jd.at("rho"), 0.25);
  EXPECT_EQ(jd.at("count"), 64);

  RecoveryResult r{Signal::zeros(test::toy_signal()), {1.0, 0.5}, {0.1}, 2, SolverStatus::Converged, 0.5, 3.0};
  const auto jr = nlohmann::json::parse(io::to_json(r));
  EXPECT_EQ(jr.at("status"), "converged");
  EXPECT_EQ(jr.at("iterations"), 2);
  EXPECT_EQ(jr.at("objective_trace").size(), 2u);
}
