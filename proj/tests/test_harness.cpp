#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"

using namespace atomnc;
namespace fs = std::filesystem;

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("run_single with defaults and GFL") {
  const RunOutcome out = run_single(GenParams{}, SolverConfig{}, Configuration::kGFL);
  CHECK(out.test_accuracy >= 0.95);
  REQUIRE(out.state.has_value());
  CHECK(out.iterations == out.state->t);
}

TEST_CASE("G-spectral at p = q sits in the chance band") {
  std::vector<double> acc;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenParams g;
    g.p = 0.05;
    g.seed = seed;
    SolverConfig s;
    s.seed = seed;
    const RunOutcome out = run_single(g, s, Configuration::kGSpectral);
    CHECK(std::isnan(out.final_objective));
    CHECK_FALSE(out.state.has_value());
    acc.push_back(out.test_accuracy);
  }
  const double med = median_of(acc);
  CHECK(med >= 0.18);
  CHECK(med <= 0.52);
}

TEST_CASE("feature-only configuration at small omega") {
  std::vector<double> acc;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenParams g;
    g.seed = seed;
    SolverConfig s;
    s.seed = seed;
    acc.push_back(run_single(g, s, Configuration::kF).test_accuracy);
  }
  CHECK(median_of(acc) >= 0.9);
}

TEST_CASE("run_single tags the failing stage") {
  GenParams g;
  g.p = 2;
  try {
    run_single(g, SolverConfig{}, Configuration::kGFL);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("[generate]", 0) == 0);
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
  SolverConfig s;
  s.r = 4;
  g = GenParams{};
  g.n0 = 20;
  try {
    run_single(g, s, Configuration::kGF);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("[solve]", 0) == 0);
    CHECK(e.kind() == ErrorKind::kUnsupported);
  }
}

TEST_CASE("sweep row count and order") {
  SweepSpec spec;
  spec.gen.n0 = 40;
  spec.axis = SweepAxis::kP;
  spec.values = {0.05, 0.1, 0.15};
  spec.configurations = {Configuration::kGSpectral, Configuration::kGFL};
  spec.seeds = {0, 1, 2};
  spec.solver.max_iters = 50;
  const SweepResult r = run_sweep(spec);
  REQUIRE(r.rows.size() == 18);
  std::size_t i = 0;
  for (double v : spec.values) {
    for (Configuration c : spec.configurations) {
      for (std::uint64_t s : spec.seeds) {
        CHECK(r.rows[i].axis_value == v);
        CHECK(r.rows[i].configuration == c);
        CHECK(r.rows[i].seed == s);
        CHECK_FALSE(r.rows[i].failed());
        ++i;
      }
    }
  }
}

TEST_CASE("sweep validation") {
  SweepSpec spec;
  spec.configurations = {Configuration::kGFL};
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec.values = {0.1, 0.1};
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec.values = {0.2, 0.1};
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec.values = {0.1};
  spec.seeds.clear();
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec.seeds = {0};
  spec.values = {1.5};
  CHECK_THROWS_AS(run_sweep(spec), Error);
}

TEST_CASE("failing runs leave marker rows and the sweep carries on") {
  SweepSpec spec;
  spec.gen.n0 = 20;
  spec.solver.r = 4;
  spec.solver.max_iters = 5;
  spec.axis = SweepAxis::kP;
  spec.values = {0.1};
  spec.configurations = {Configuration::kGF, Configuration::kGFL};
  spec.seeds = {0, 1};
  const SweepResult r = run_sweep(spec);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].failed());
  CHECK(r.rows[0].status.find("[solve]") != std::string::npos);
  CHECK(std::isnan(r.rows[0].test_accuracy));
  CHECK_FALSE(r.rows[2].failed());
  CHECK(r.any_failed());
  const std::string csv = serialize_csv(r);
  CHECK(csv.find("error: [solve]") != std::string::npos);
}

TEST_CASE("apply_axis semantics") {
  GenParams g;
  SolverConfig s;
  apply_axis(SweepAxis::kN, 600, g, s);
  CHECK(g.n0 == 200);
  CHECK_THROWS_AS(apply_axis(SweepAxis::kN, 601, g, s), Error);
  g = GenParams{};
  apply_axis(SweepAxis::kM, 10, g, s);
  CHECK(g.m == 10);
  CHECK(g.m_omega == 8);
  apply_axis(SweepAxis::kK, 4, g, s);
  CHECK(g.K == 4);
  CHECK(s.r == 4);
  apply_axis(SweepAxis::kBetaL, 7, g, s);
  CHECK(s.weights.beta_l == 7);
  apply_axis(SweepAxis::kTrainRatio, 0.4, g, s);
  CHECK(g.train_ratio == 0.4);
}

TEST_CASE("summarize examples") {
  SweepResult single;
  single.rows.push_back({0.1, Configuration::kGFL, 0, 0.75, 1.0, 3, 0.0, "ok"});
  auto s = summarize(single);
  REQUIRE(s.size() == 1);
  CHECK(s[0].median == 0.75);
  CHECK(s[0].iqr() == 0.0);

  SweepResult constant;
  for (std::uint64_t seed = 0; seed < 5; ++seed) constant.rows.push_back({0.1, Configuration::kF, seed, 0.5, 0, 0, 0, "ok"});
  s = summarize(constant);
  CHECK(s[0].iqr() == 0.0);
  CHECK(s[0].median == 0.5);

  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("summarize matches a brute-force grouping") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0, 1);
  std::uniform_int_distribution<int> pick(0, 2);
  const std::vector<Configuration> cfgs{Configuration::kGFL, Configuration::kF, Configuration::kGSpectral};
  SweepResult r;
  for (int i = 0; i < 200; ++i) {
    r.rows.push_back({0.1 * pick(rng), cfgs[pick(rng)], static_cast<std::uint64_t>(i), unit(rng), 0, 0, 0, "ok"});
  }
  std::map<std::pair<double, int>, std::vector<double>> groups;
  for (const auto& row : r.rows) groups[{row.axis_value, static_cast<int>(row.configuration)}].push_back(row.test_accuracy);
  const auto s = summarize(r);
  CHECK(s.size() == groups.size());
  for (const auto& row : s) {
    const auto& vals = groups.at({row.axis_value, static_cast<int>(row.configuration)});
    CHECK(row.count == static_cast<int>(vals.size()));
    CHECK(row.median == doctest::Approx(median_of(vals)));
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const double pos = 0.25 * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double q1 = sorted[lo] + (pos - lo) * (sorted[std::min(lo + 1, sorted.size() - 1)] - sorted[lo]);
    CHECK(row.q1 == doctest::Approx(q1));
  }
}

TEST_CASE("CSV round-trip") {
  SweepResult r;
  r.axis = SweepAxis::kOmega;
  r.rows.push_back({0.04, Configuration::kGFL, 3, 0.987654321, 123.456, 500, 0, "ok"});
  r.rows.push_back({5, Configuration::kGSpectral, 4, 1.0 / 3, std::nan(""), 0, 0, "ok"});
  r.rows.push_back({5, Configuration::kF, 0, std::nan(""), std::nan(""), 0, 0, "error: [solve] bad; thing"});
  const SweepResult back = parse_csv(serialize_csv(r));
  CHECK(back.axis == r.axis);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& a = r.rows[i];
    const auto& b = back.rows[i];
    CHECK(a.axis_value == b.axis_value);
    CHECK(a.configuration == b.configuration);
    CHECK(a.seed == b.seed);
    CHECK((a.test_accuracy == b.test_accuracy || (std::isnan(a.test_accuracy) && std::isnan(b.test_accuracy))));
    CHECK((a.final_objective == b.final_objective || (std::isnan(a.final_objective) && std::isnan(b.final_objective))));
    CHECK(a.iterations == b.iterations);
    CHECK(a.status == b.status);
  }
  CHECK(serialize_csv(back) == serialize_csv(r));
}

TEST_CASE("sweep config parsing") {
  const SweepSpec spec = parse_sweep_config(
      "gen.p=0.12\ngen.n0=50\nsolver.beta_f=3\nsweep.axis=omega\nsweep.values=0.04, 1, 5\n"
      "sweep.configurations=GFL,F,G-spectral\nsweep.seeds=7,8\nsweep.output=out.csv\nsweep.threads=2\n");
  CHECK(spec.gen.p == 0.12);
  CHECK(spec.gen.n0 == 50);
  CHECK(spec.solver.weights.beta_f == 3);
  CHECK(spec.axis == SweepAxis::kOmega);
  CHECK(spec.values == std::vector<double>{0.04, 1, 5});
  CHECK(spec.configurations.size() == 3);
  CHECK(spec.configurations[2] == Configuration::kGSpectral);
  CHECK(spec.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(spec.output_path == "out.csv");
  CHECK(spec.threads == 2);

  CHECK_THROWS_AS(parse_sweep_config("sweep.axis=p\nsweep.values=0.1\nsweep.configurations=GFL\ngen.bogus=1\n"), Error);
  CHECK_THROWS_AS(parse_sweep_config("sweep.axis=zeta\n"), Error);
  CHECK_THROWS_AS(parse_sweep_config("sweep.axis=p\nsweep.values=\nsweep.configurations=GFL\n"), Error);
  CHECK_THROWS_AS(parse_sweep_config("sweep.axis=p\nsweep.values=0.1\nsweep.configurations=XYZ\n"), Error);
  CHECK(parse_configuration("G") == Configuration::kG);
  CHECK(is_spectral(Configuration::kG));
}

TEST_CASE("sweep output files and thread-count independence") {
  const fs::path dir = fs::temp_directory_path() / "atomnc_harness_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SweepSpec spec;
  spec.gen.n0 = 30;
  spec.solver.max_iters = 30;
  spec.axis = SweepAxis::kTrainRatio;
  spec.values = {0.1, 0.3};
  spec.configurations = {Configuration::kGFL, Configuration::kFL, Configuration::kG};
  spec.seeds = {0, 1};
  spec.output_path = (dir / "one.csv").string();
  run_sweep(spec);
  spec.output_path = (dir / "two.csv").string();
  spec.threads = 3;
  run_sweep(spec);
  const std::string a = io::read_text_file((dir / "one.csv").string());
  CHECK(a == io::read_text_file((dir / "two.csv").string()));
  CHECK(fs::exists(dir / "one.csv.timing.csv"));
  CHECK(fs::exists(dir / "one.csv.summary.csv"));
  CHECK(a.rfind("axis,axis_value,configuration,seed,test_accuracy,final_objective,iterations,status\n", 0) == 0);
}
