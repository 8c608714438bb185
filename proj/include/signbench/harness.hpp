#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "signbench/optimizers.hpp"
#include "signbench/problems.hpp"
#include "signbench/tuning.hpp"

namespace signbench {

// Line-oriented `key = value` configuration with [section] headers and
// list syntax `key = [a, b, c]`. See README for the full key reference.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // problem
  std::string problem_kind = "logistic_linear";
  std::string dataset;  // resolved via resolve_data_path
  std::optional<int> expected_rows;
  int dim = 2;
  int power = 2;
  std::vector<double> lambda_l0{0.0};  // sweep axis when > 1 entry
  double lambda_l1 = 0.0;
  double dropout = 0.1;
  // optimizer
  Method method = Method::signsgd;
  std::vector<long long> batch{1};  // B or M; sweep axis
  // tuning
  std::string tuning_mode = "manual";  // manual | optimal | arbitrary | anytime
  double gamma0 = 1e-3;
  double beta = 0.9;
  double clip_lambda = 1.0;
  std::string phase_switch = "none";  // none | auto | <integer>
  double epsilon = 0.1;
  std::optional<double> delta;
  double confidence = 0.1;
  // noise
  NoiseFamily family = NoiseFamily::none;
  std::vector<double> kappa{2.0};  // tail index; sweep axis
  std::vector<double> sigma{0.0};  // per-coordinate scale; sweep axis
  // run
  long long horizon = 1000;
  int repeats = 1;
  std::uint64_t base_seed = 1;
  long long record_every = 1;
  // output
  std::string out_dir = "out";
  std::string plot_style = "loglinear";  // loglinear | loglog

  std::string digest_source;  // canonical text the config digest hashes
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

struct RawRow {
  std::string cell_id;
  std::uint64_t seed = 0;
  long long k = 0;
  double gamma = 0.0;
  long long batch = 1;
  double grad_l1 = 0.0, grad_l2 = 0.0;
  std::optional<double> func_gap;
  long long samples = 0;
};

struct AggRow {
  std::string cell_id;
  long long k = 0;
  std::string metric;
  double mean = 0.0, stddev = 0.0;
  int n = 0;
};

struct ResultTable {
  std::vector<RawRow> raw;
  std::vector<AggRow> agg;
  std::vector<std::string> cell_order;
  std::vector<std::string> failures;  // per-cell error messages; matrix continues
};

// Execute the full cell x seed matrix (parallel with a deterministic merge),
// write raw.csv / agg.csv into cfg.out_dir, return the table.
ResultTable run_experiment(const ExperimentConfig& cfg);

enum class PlotStyle { loglinear, loglog };
// One SVG per metric: iteration vs per-cell mean with a +-1 std band.
std::vector<std::string> emit_plots(const ResultTable& table, PlotStyle style,
                                    const std::string& out_dir);

ResultTable read_agg_csv(const std::string& path);

// Subcommands: run, tune, verify, plot, replicate, dataset.
// Exit codes: 0 ok, 1 run failure, 2 usage error, 3 verification violation.
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace signbench
