#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qomsim/config.hpp"
#include "qomsim/correlations.hpp"
#include "qomsim/csv.hpp"
#include "qomsim/runner.hpp"
#include "qomsim/trajectory.hpp"

using namespace qomsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qomsim_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(f);
  f << content;
}

int run_cli(const std::string& args, const TempDir& dir) {
  const std::string cmd = std::string(QOMSIM_CLI_PATH) + " " + args + " > " +
                          dir.file("stdout.txt") + " 2> " + dir.file("stderr.txt");
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto cfg = parse_config_text(
      "# a comment\n"
      "delta_c = 1.5   # trailing comment\n"
      "\n"
      "g_opt=0.3\n"
      "rhs_variant = composed\n");
  CHECK(cfg.size() == 3);
  SystemParams p;
  SimConfig sim;
  CHECK(apply_config(cfg, p, sim).empty());
  CHECK(p.delta_c == 1.5);
  CHECK(p.g_opt == 0.3);
  CHECK(sim.rhs_variant == RhsVariant::composed);

  CHECK_THROWS_WITH_AS(parse_config_text("delta_c 1.5\n"), doctest::Contains("line 1"),
                       std::invalid_argument);
}

TEST_CASE("unknown keys and bad values are reported with the key name") {
  SystemParams p;
  SimConfig sim;
  const auto errs = apply_config(parse_config_text("bogus = 1\n gamma_a = abc\n"), p, sim);
  REQUIRE(errs.size() == 2);
  bool saw_unknown = false, saw_value = false;
  for (const auto& e : errs) {
    if (e.find("unknown config key 'bogus'") != std::string::npos &&
        e.find("delta_c") != std::string::npos)
      saw_unknown = true;
    if (e.find("gamma_a") != std::string::npos && e.find("abc") != std::string::npos)
      saw_value = true;
  }
  CHECK(saw_unknown);
  CHECK(saw_value);
}

TEST_CASE("config text round-trips parameters exactly") {
  SystemParams p;
  p.delta_c = 1.3;
  p.g_opt = 1.4;
  p.rabi = 0.6;
  p.gamma_a = 0.01;
  SimConfig sim;
  sim.t_end = 37.5;
  sim.n_samples = 101;
  sim.rhs_variant = RhsVariant::composed;

  SystemParams p2;
  SimConfig sim2;
  CHECK(apply_config(parse_config_text(to_config_text(p, sim)), p2, sim2).empty());
  CHECK(p2.delta_c == p.delta_c);
  CHECK(p2.g_opt == p.g_opt);
  CHECK(p2.rabi == p.rabi);
  CHECK(p2.gamma_a == p.gamma_a);
  CHECK(sim2.t_end == sim.t_end);
  CHECK(sim2.n_samples == sim.n_samples);
  CHECK(sim2.rhs_variant == sim.rhs_variant);
}

TEST_CASE("17-digit formatting round-trips doubles bitwise") {
  std::mt19937_64 rng(123);
  for (int k = 0; k < 2000; ++k) {
    const int exp = static_cast<int>(rng() % 613) - 306;
    double x = std::ldexp(static_cast<double>(rng() >> 11) * 0x1.0p-53 + 0.5, exp);
    if (rng() & 1) x = -x;
    const double back = std::strtod(format_g17(x).c_str(), nullptr);
    CHECK(back == x);
  }
  CHECK(format_g17(0.0) == "0");
}

TEST_CASE("observables CSV schema and empty-marker round-trip") {
  CHECK(std::string(kObservablesHeader) ==
        "t,re_a,im_a,re_ad,im_ad,re_b,im_b,re_bd,im_bd,n_a,n_b,"
        "re_abd,im_abd,re_adb,im_adb,re_ab,im_ab,re_adbd,im_adbd,"
        "re_aa,im_aa,re_adad,im_adad,re_bb,im_bb,re_bdbd,im_bdbd,"
        "g2_a,g2_b,g2_ab");

  std::mt19937_64 rng(5);
  const std::vector<double> times = {0.0, 0.5};
  std::vector<MomentState> states = {MomentState{}, random_moment_state(rng)};
  std::vector<std::array<std::optional<double>, 3>> g2 = {
      {std::nullopt, std::nullopt, std::nullopt},
      {3.0, 64.25e-17, std::nullopt}};
  std::ostringstream os;
  write_observables_csv(os, times, states, g2);

  std::istringstream is(os.str());
  const CsvTable t = read_csv(is);
  REQUIRE(t.columns.size() == 30);
  REQUIRE(t.rows.size() == 2);
  CHECK(!t.rows[0][27].has_value());
  CHECK(!t.rows[0][28].has_value());
  CHECK(*t.rows[1][27] == 3.0);
  CHECK(*t.rows[1][28] == 64.25e-17);
  CHECK(!t.rows[1][29].has_value());
  // state columns round-trip bitwise
  const auto slots = states[1].slots();
  CHECK(*t.rows[1][1] == slots[0].real());
  CHECK(*t.rows[1][2] == slots[0].imag());
  CHECK(*t.rows[1][9] == slots[4].real());
}

TEST_CASE("csv reader rejects ragged rows") {
  std::istringstream is("a,b\n1,2\n3\n");
  CHECK_THROWS_WITH_AS(read_csv(is), doctest::Contains("line 3"), std::invalid_argument);
}

TEST_CASE("flat state JSON loading") {
  TempDir dir;
  CHECK_THROWS_AS(load_flat_state_json(dir.file("missing.json")), std::invalid_argument);
  spit(dir.file("short.json"), "[1, 2, 3]");
  CHECK_THROWS_WITH_AS(load_flat_state_json(dir.file("short.json")),
                       doctest::Contains("28"), std::invalid_argument);
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < 28; ++i) os << (i ? "," : "") << 0.25 * i;
  os << "]";
  spit(dir.file("ok.json"), os.str());
  const auto flat = load_flat_state_json(dir.file("ok.json"));
  CHECK(flat[4] == 1.0);
  CHECK(flat[27] == 6.75);
}

TEST_CASE("compare: identical, perturbed, and mismatched inputs") {
  TempDir dir;
  const std::string a = dir.file("a.csv"), b = dir.file("b.csv");
  spit(a, "t,x,y\n0,1,\n1,2,5\n");
  spit(b, "t,x,y\n0,1,\n1,2,5\n");

  std::ostringstream msg, err;
  CHECK(cmd_compare({a, b, 1e-12, 1e-12}, msg, err) == kExitOk);

  spit(b, "t,x,y\n0,1,\n1,2.5,5\n");
  CHECK(cmd_compare({a, b, 1e-12, 1e-12}, msg, err) == kExitComparisonFailure);
  CHECK(cmd_compare({a, b, 1.0, 0.0}, msg, err) == kExitOk);

  // a defined value against an empty marker is a mismatch
  spit(b, "t,x,y\n0,1,\n1,2,\n");
  CHECK(cmd_compare({a, b, 10.0, 10.0}, msg, err) == kExitComparisonFailure);

  // different grids are a usage error, not a comparison result
  spit(b, "t,x,y\n0,1,\n2,2,5\n");
  CHECK(cmd_compare({a, b, 1e-12, 1e-12}, msg, err) == kExitConfigError);
  spit(b, "t,x,z\n0,1,\n1,2,5\n");
  CHECK(cmd_compare({a, b, 1e-12, 1e-12}, msg, err) == kExitConfigError);
}

TEST_CASE("sweep: value files byte-match standalone runs, any worker count") {
  TempDir dir;
  std::ostringstream msg, err;

  SweepOptions swp;
  swp.base.o.preset_name = "fig5a";
  swp.base.o.t_end = 10.0;
  swp.base.o.n_samples = 101;
  swp.param = "g_opt";
  swp.values = {"0.8", "1.7"};
  swp.out_dir = dir.file("sweep1");
  swp.jobs = 1;
  REQUIRE(cmd_sweep(swp, msg, err) == kExitOk);

  swp.out_dir = dir.file("sweep4");
  swp.jobs = 4;
  REQUIRE(cmd_sweep(swp, msg, err) == kExitOk);

  for (const char* f : {"g_opt_0.8.csv", "g_opt_1.7.csv"}) {
    CHECK(slurp(dir.file("sweep1/") + f) == slurp(dir.file("sweep4/") + f));
  }
  CHECK(fs::exists(dir.file("sweep1/index.json")));

  // standalone run with the same parameters gives the same bytes
  SimulateOptions one;
  one.o.preset_name = "fig5a";
  one.o.t_end = 10.0;
  one.o.n_samples = 101;
  one.o.g_opt = 1.7;
  one.out = dir.file("one.csv");
  REQUIRE(cmd_simulate(one, msg, err) == kExitOk);
  CHECK(slurp(dir.file("one.csv")) == slurp(dir.file("sweep1/g_opt_1.7.csv")));

  // error paths
  SweepOptions bad = swp;
  bad.param = "bogus";
  CHECK(cmd_sweep(bad, msg, err) == kExitConfigError);
  bad = swp;
  bad.values.clear();
  CHECK(cmd_sweep(bad, msg, err) == kExitConfigError);
}

TEST_CASE("cli: preset run is reproducible byte for byte") {
  TempDir dir;
  REQUIRE(run_cli("simulate --preset fig1b --t-end 10 --n-samples 201 --out " +
                      dir.file("a.csv"),
                  dir) == 0);
  REQUIRE(run_cli("simulate --preset fig1b --t-end 10 --n-samples 201 --out " +
                      dir.file("b.csv"),
                  dir) == 0);
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
  CHECK(fs::exists(dir.file("a.json")));
}

TEST_CASE("cli: sidecar reproduces the exact run") {
  TempDir dir;
  REQUIRE(run_cli("simulate --preset fig3b --t-end 8 --n-samples 81 --out " +
                      dir.file("a.csv"),
                  dir) == 0);
  REQUIRE(run_cli("simulate --from-sidecar " + dir.file("a.json") + " --out " +
                      dir.file("b.csv"),
                  dir) == 0);
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
}

TEST_CASE("cli: thermal relaxation column matches the analytic curve") {
  TempDir dir;
  REQUIRE(run_cli("simulate --g-opt 0 --rabi 0 --nbar-b 2 --gamma-b 0.1 --t-end 50 "
                  "--n-samples 501 --out " +
                      dir.file("relax.csv"),
                  dir) == 0);
  const CsvTable t = read_csv_file(dir.file("relax.csv"));
  REQUIRE(t.rows.size() == 501);
  for (const auto& row : t.rows) {
    const double time = *row[0];
    const double nb = *row[10];
    CHECK(std::abs(nb - 2.0 * (1.0 - std::exp(-0.1 * time))) < 1e-6);
  }
}

TEST_CASE("cli: config errors exit with code 1 and name the field") {
  TempDir dir;
  CHECK(run_cli("simulate --t-end 0 --out " + dir.file("x.csv"), dir) ==
        kExitConfigError);
  CHECK(slurp(dir.file("stderr.txt")).find("t_end") != std::string::npos);

  CHECK(run_cli("simulate --preset fig9z --out " + dir.file("x.csv"), dir) ==
        kExitConfigError);
  CHECK(slurp(dir.file("stderr.txt")).find("fig1b") != std::string::npos);

  CHECK(run_cli("oracle --n-cut-a 1 --out " + dir.file("x.csv"), dir) ==
        kExitConfigError);
}

TEST_CASE("cli: dark oracle emits constant zero columns") {
  TempDir dir;
  REQUIRE(run_cli("oracle --g-opt 1.4 --rabi 0 --gamma-a 0.01 --gamma-b 0.001 "
                  "--t-end 2 --n-samples 11 --n-cut-a 3 --n-cut-b 3 "
                  "--no-convergence-check --out " +
                      dir.file("dark.csv"),
                  dir) == 0);
  const CsvTable t = read_csv_file(dir.file("dark.csv"));
  REQUIRE(t.rows.size() == 11);
  for (const auto& row : t.rows) {
    for (std::size_t c = 1; c <= 26; ++c) CHECK(std::abs(*row[c]) < 1e-12);
    CHECK(!row[27].has_value());  // vacuum: correlations undefined
  }
}

TEST_CASE("cli: compare closure against itself through files") {
  TempDir dir;
  REQUIRE(run_cli("simulate --preset fig2a --t-end 5 --n-samples 51 --out " +
                      dir.file("a.csv"),
                  dir) == 0);
  CHECK(run_cli("compare " + dir.file("a.csv") + " " + dir.file("a.csv"), dir) == 0);
  REQUIRE(run_cli("simulate --preset fig2b --t-end 5 --n-samples 51 --out " +
                      dir.file("b.csv"),
                  dir) == 0);
  CHECK(run_cli("compare " + dir.file("a.csv") + " " + dir.file("b.csv"), dir) ==
        kExitComparisonFailure);
}
