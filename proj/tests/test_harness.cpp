#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "signbench/harness.hpp"

using namespace signbench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_power_cfg(const std::string& out_dir) {
  std::string text =
      "[problem]\n"
      "kind = power_norm\n"
      "power = 2\n"
      "dim = 2\n"
      "[optimizer]\n"
      "method = signsgd\n"
      "[tuning]\n"
      "mode = manual\n"
      "gamma0 = 0.05\n"
      "[noise]\n"
      "family = gaussian\n"
      "sigma = [0.5]\n"
      "kappa = [2]\n"
      "[run]\n"
      "horizon = 20\n"
      "repeats = 3\n"
      "base_seed = 7\n"
      "record_every = 1\n"
      "[output]\n"
      "dir = " +
      out_dir + "\n";
  return parse_config_text(text, "test");
}

}  // namespace

TEST_CASE("empty config text keeps documented defaults") {
  ExperimentConfig cfg = parse_config_text("", "empty");
  CHECK(cfg.problem_kind == "logistic_linear");
  CHECK(cfg.method == Method::signsgd);
  CHECK(cfg.tuning_mode == "manual");
  CHECK(cfg.gamma0 == doctest::Approx(1e-3));
  CHECK(cfg.batch == std::vector<long long>{1});
  CHECK(cfg.sigma == std::vector<double>{0.0});
  CHECK(cfg.kappa == std::vector<double>{2.0});
  CHECK(cfg.family == NoiseFamily::none);
  CHECK(cfg.horizon == 1000);
  CHECK(cfg.repeats == 1);
  CHECK(cfg.record_every == 1);
  CHECK(cfg.plot_style == "loglinear");
}

TEST_CASE("unknown keys are rejected with a suggestion") {
  CHECK_THROWS_WITH_AS(
      parse_config_text("[tuning]\nlearningrate = 0.1\n", "cfg"),
      doctest::Contains("did you mean 'gamma0'"), ConfigError);
  // near-miss spelling falls back to edit distance
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nhorizonn = 5\n", "cfg"),
                       doctest::Contains("horizon"), ConfigError);
}

TEST_CASE("parse errors carry the origin and line number") {
  CHECK_THROWS_WITH_AS(parse_config_text("[run]\nhorizon 5\n", "cfg"),
                       doctest::Contains("cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[nope]\n", "cfg"),
                       doctest::Contains("unknown section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("horizon = 5\n", "cfg"),
                       doctest::Contains("before any [section]"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[run\n", "cfg"),
                       doctest::Contains("malformed section"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[tuning]\nmode = fancy\n", "cfg"),
                  ConfigError);
}

TEST_CASE("comments and list values parse") {
  ExperimentConfig cfg = parse_config_text(
      "[noise]\n"
      "family = stable  # heavy tails\n"
      "sigma = [0.1, 0.01, 0.001]\n"
      "kappa = [2, 1.5, 1]\n"
      "[optimizer]\n"
      "batch = [1, 8, 64]\n",
      "cfg");
  CHECK(cfg.family == NoiseFamily::stable);
  CHECK(cfg.sigma == std::vector<double>{0.1, 0.01, 0.001});
  CHECK(cfg.kappa == std::vector<double>{2.0, 1.5, 1.0});
  CHECK(cfg.batch == std::vector<long long>{1, 8, 64});
}

TEST_CASE("shipped noise-dependence config loads") {
  const char* dir = std::getenv("SIGNBENCH_CONFIG_DIR");
  REQUIRE(dir != nullptr);
  ExperimentConfig cfg =
      load_config((fs::path(dir) / "noise_deps.cfg").string());
  CHECK(cfg.problem_kind == "logistic_linear");
  CHECK(cfg.expected_rows == 6499);
  CHECK(cfg.lambda_l0 == std::vector<double>{0.01});
  CHECK(cfg.lambda_l1 == doctest::Approx(0.001));
  CHECK(cfg.method == Method::signsgd);
  CHECK(cfg.gamma0 == doctest::Approx(3e-4));
  CHECK(cfg.family == NoiseFamily::stable);
  CHECK(cfg.sigma.size() == 3);
  CHECK(cfg.kappa.size() == 3);
  CHECK(cfg.horizon == 3000);
  CHECK(cfg.repeats == 10);
  CHECK(cfg.base_seed == 1000);
  CHECK(cfg.record_every == 10);
}

TEST_CASE("run_experiment produces the full cell x seed matrix") {
  auto out = fresh_dir("sb_harness_run");
  ExperimentConfig cfg = small_power_cfg(out.string());
  ResultTable table = run_experiment(cfg);
  CHECK(table.failures.empty());
  REQUIRE(table.cell_order.size() == 1);
  CHECK(table.raw.size() == 3 * 20);
  // seed law: base_seed + cell_index * repeats + repeat
  std::set<std::uint64_t> seeds;
  for (const auto& r : table.raw) {
    seeds.insert(r.seed);
    CHECK(r.cell_id == table.cell_order[0]);
    CHECK(r.batch == 1);
    CHECK(r.gamma == doctest::Approx(0.05));
    CHECK(r.samples == r.k);  // batch 1, one draw per iteration
  }
  CHECK(seeds == std::set<std::uint64_t>{7, 8, 9});
  // aggregation pools exactly the repeats
  for (const auto& a : table.agg) {
    CHECK(a.n == 3);
    CHECK(a.stddev >= 0.0);
  }
  CHECK(fs::exists(out / "raw.csv"));
  CHECK(fs::exists(out / "agg.csv"));
}

TEST_CASE("multi-cell sweep assigns disjoint seed blocks") {
  auto out = fresh_dir("sb_harness_cells");
  ExperimentConfig cfg = small_power_cfg(out.string());
  cfg.sigma = {0.5, 0.1};
  cfg.repeats = 2;
  ResultTable table = run_experiment(cfg);
  REQUIRE(table.cell_order.size() == 2);
  std::map<std::string, std::set<std::uint64_t>> by_cell;
  for (const auto& r : table.raw) by_cell[r.cell_id].insert(r.seed);
  CHECK(by_cell.at(table.cell_order[0]) == std::set<std::uint64_t>{7, 8});
  CHECK(by_cell.at(table.cell_order[1]) == std::set<std::uint64_t>{9, 10});
}

TEST_CASE("repeated runs write identical CSV bytes") {
  auto out1 = fresh_dir("sb_harness_det1");
  auto out2 = fresh_dir("sb_harness_det2");
  ExperimentConfig a = small_power_cfg(out1.string());
  ExperimentConfig b = small_power_cfg(out2.string());
  run_experiment(a);
  run_experiment(b);
  CHECK(slurp(out1 / "raw.csv") == slurp(out2 / "raw.csv"));
  CHECK(slurp(out1 / "agg.csv") == slurp(out2 / "agg.csv"));
}

TEST_CASE("single repeat gives zero spread and T recorded rows") {
  auto out = fresh_dir("sb_harness_r1");
  ExperimentConfig cfg = small_power_cfg(out.string());
  cfg.repeats = 1;
  ResultTable table = run_experiment(cfg);
  CHECK(table.raw.size() == 20);
  for (const auto& a : table.agg) {
    CHECK(a.n == 1);
    CHECK(a.stddev == 0.0);
  }
}

TEST_CASE("agg CSV round-trips through read_agg_csv") {
  auto out = fresh_dir("sb_harness_rt");
  ExperimentConfig cfg = small_power_cfg(out.string());
  ResultTable table = run_experiment(cfg);
  ResultTable back = read_agg_csv((out / "agg.csv").string());
  REQUIRE(back.agg.size() == table.agg.size());
  CHECK(back.cell_order == table.cell_order);
  for (std::size_t i = 0; i < back.agg.size(); ++i) {
    CHECK(back.agg[i].cell_id == table.agg[i].cell_id);
    CHECK(back.agg[i].k == table.agg[i].k);
    CHECK(back.agg[i].metric == table.agg[i].metric);
    CHECK(back.agg[i].mean == doctest::Approx(table.agg[i].mean).epsilon(1e-12));
    CHECK(back.agg[i].n == table.agg[i].n);
  }
  CHECK_THROWS_AS(read_agg_csv((out / "raw.csv").string()), std::runtime_error);
}

TEST_CASE("emit_plots writes one deterministic SVG per metric") {
  auto out = fresh_dir("sb_harness_plot");
  ExperimentConfig cfg = small_power_cfg(out.string());
  ResultTable table = run_experiment(cfg);
  auto files = emit_plots(table, PlotStyle::loglinear, (out / "p1").string());
  REQUIRE(!files.empty());
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    CHECK(slurp(f).rfind("<svg", 0) == 0);
  }
  auto files2 = emit_plots(table, PlotStyle::loglinear, (out / "p2").string());
  REQUIRE(files2.size() == files.size());
  for (std::size_t i = 0; i < files.size(); ++i)
    CHECK(slurp(files[i]) == slurp(files2[i]));
  ResultTable empty;
  CHECK_THROWS_AS(emit_plots(empty, PlotStyle::loglinear, (out / "p3").string()),
                  std::runtime_error);
}

TEST_CASE("cli rejects unknown subcommands with a usage error") {
  CHECK(cli_dispatch({"definitely-not-a-command"}) == 2);
}
