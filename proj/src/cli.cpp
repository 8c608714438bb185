#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "signbench/distsim.hpp"
#include "signbench/harness.hpp"
#include "signbench/rng.hpp"
#include "signbench/verify.hpp"

namespace fs = std::filesystem;

namespace signbench {

namespace {

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open facts file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = line;
    t.erase(0, t.find_first_not_of(" \t\r\n"));
    if (!t.empty()) t.erase(t.find_last_not_of(" \t\r\n") + 1);
    if (t.empty() || t.front() == '[') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = t.substr(0, eq);
    std::string val = t.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    kv[key] = val;
  }
  return kv;
}

void print_plan(std::ostream& os, const TuningPlan& plan) {
  os << "method: " << plan.method << "\n";
  os << "regime: " << (plan.regime == Regime::fast_L1 ? "fast_L1" : "slow_L0") << "\n";
  os << "T: " << plan.T << "\n";
  os << "k,gamma,batch,beta\n";
  std::vector<long long> ks;
  if (plan.T > 0 && plan.T <= 20)
    for (long long k = 1; k <= plan.T; ++k) ks.push_back(k);
  else {
    for (long long k = 1; k <= 10; ++k) ks.push_back(k);
    if (plan.T > 10) ks.push_back(plan.T);
  }
  char buf[64];
  for (long long k : ks) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%lld,", k, plan.gamma(k),
                  plan.batch ? plan.batch(k) : 1);
    os << buf;
    if (plan.beta) {
      std::snprintf(buf, sizeof buf, "%.17g", plan.beta(k));
      os << buf;
    }
    os << "\n";
  }
}

int run_verify_suite(std::ostream& os, long long trials) {
  long long violations = 0;
  auto rng = make_stream(20250825, 0);
  auto report = [&](const BoundCheckReport& rep, const std::string& what) {
    violations += rep.violations;
    os << (rep.violations ? "VIOLATION " : "ok        ") << what << " ["
       << rep.parameters << "] trials=" << rep.trials
       << " worst_slack=" << rep.worst_slack << "\n";
  };

  // batching moment bound
  std::vector<std::pair<std::string, std::function<double(std::mt19937_64&)>>> dists;
  dists.emplace_back("rademacher", [](std::mt19937_64& r) {
    return (r() & 1ULL) ? 1.0 : -1.0;
  });
  NoiseModel gauss{NoiseFamily::gaussian, 2.0, Vec::Ones(1), true};
  dists.emplace_back("gaussian", [gauss](std::mt19937_64& r) {
    return noise_draw(gauss, 0, r);
  });
  NoiseModel t3{NoiseFamily::student_t, 3.0, Vec::Ones(1), true};
  dists.emplace_back("student_t(3)", [t3](std::mt19937_64& r) {
    return noise_draw(t3, 0, r);
  });
  for (auto& [label, sampler] : dists)
    for (double kappa : {1.2, 1.5, 2.0})
      for (int B : {1, 4, 16, 64})
        report(check_batching_lemma(sampler, label, 4, B, kappa, trials, rng),
               "batching-moment-bound");

  // majority failure: exact binomial vs printed bound on the full grid
  {
    long long bad = 0;
    for (double q = 0.01; q < 0.495; q += 0.02)
      for (int M = 1; M <= 101; M += 2)
        if (exact_majority_failure(q, M) >
            majority_failure_bound({q, M}) * (1.0 + 1e-12))
          ++bad;
    violations += bad;
    os << (bad ? "VIOLATION " : "ok        ")
       << "majority-failure-bound grid q=0.01..0.49 x odd M=1..101"
       << (bad ? " (" + std::to_string(bad) + " failures)" : "") << "\n";
  }

  // unimodal tail bound vs empirical tails
  for (auto& [label, moment, model] :
       std::vector<std::tuple<std::string, double, NoiseModel>>{
           {"gaussian", 1.0, gauss}, {"student_t(3)", 3.0, t3}}) {
    long long n = std::max<long long>(trials * 5, 100000);
    std::vector<long long> hits(4, 0);
    std::vector<double> taus{0.5, 1.0, 2.0, 3.0};
    for (long long i = 0; i < n; ++i) {
      double x = std::abs(noise_draw(model, 0, rng));
      for (std::size_t t = 0; t < taus.size(); ++t)
        if (x >= taus[t]) ++hits[t];
    }
    long long bad = 0;
    double worst = 1e300;
    for (std::size_t t = 0; t < taus.size(); ++t) {
      double p = double(hits[t]) / double(n);
      double se = std::sqrt(p * (1.0 - p) / double(n));
      double bound = gauss_tail_bound(2.0, taus[t], moment);
      if (p > bound + 3.0 * se) ++bad;
      worst = std::min(worst, bound + 3.0 * se - p);
    }
    violations += bad;
    os << (bad ? "VIOLATION " : "ok        ") << "unimodal-tail-bound [" << label
       << " kappa=2] n=" << n << " worst_slack=" << worst << "\n";
  }

  // one-step descent inequality
  {
    Vec a = 0.3 * Vec::Ones(5);
    Vec diag(4);
    diag << 1, 2, 3, 4;
    std::vector<Objective> objs{make_power_norm(2, 5), make_exp_inner(a),
                                make_quadratic(Mat(diag.asDiagonal()), Vec::Ones(4))};
    for (const auto& obj : objs) {
      double gmax = obj.l1 > 0.0 ? 1.0 / (4.0 * obj.l1 * obj.dim) : 0.05;
      report(check_sign_update_lemma(obj, 300, gmax, rng), "sign-update-descent");
    }
  }

  // PL inequality on a strongly convex quadratic
  {
    Vec diag(2);
    diag << 1, 4;
    Objective q = make_quadratic(Mat(diag.asDiagonal()), Vec::Zero(2));
    report(check_pl_condition(q, 200, rng), "pl-condition");
  }

  os << (violations ? "FAIL" : "PASS") << ": " << violations << " violation(s)\n";
  return violations ? 3 : 0;
}

int cmd_tune(const std::string& facts_path, std::ostream& os) {
  auto kv = read_kv_file(facts_path);
  auto num = [&](const std::string& k, double dflt) {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : std::stod(it->second);
  };
  ProblemFacts f;
  f.delta = num("delta", 1.0);
  f.l0 = num("l0", 0.0);
  f.l1 = num("l1", 0.0);
  f.d = int(num("d", 1));
  f.sigma_l1 = num("sigma_l1", 0.0);
  f.sigma_kappa = num("sigma_kappa", f.sigma_l1);
  f.kappa = num("kappa", 2.0);
  f.epsilon = num("epsilon", 0.5);
  f.confidence_delta = num("confidence", 0.1);
  f.mu = num("mu", 0.0);
  std::string plan_kind = kv.count("plan") ? kv["plan"] : "minibatch";
  if (plan_kind == "minibatch") {
    print_plan(os, optimal_minibatch_plan(f));
  } else if (plan_kind == "majority") {
    print_plan(os, optimal_majority_plan(f));
  } else if (plan_kind == "msignsgd") {
    print_plan(os, optimal_msignsgd_plan(f, (long long)num("T", 1000)));
  } else if (plan_kind == "restart_minibatch" || plan_kind == "restart_majority") {
    auto rounds = restart_plan(f, plan_kind == "restart_minibatch"
                                      ? RestartMode::minibatch
                                      : RestartMode::majority);
    os << "rounds: " << rounds.size() << "\n";
    for (std::size_t n = 0; n < rounds.size(); ++n) {
      os << "--- round " << (n + 1) << " ---\n";
      print_plan(os, rounds[n]);
    }
  } else if (plan_kind == "anytime") {
    os << "method: minibatch_signsgd (anytime)\nk,gamma,batch,beta\n";
    for (long long k : {1LL, 2LL, 4LL, 8LL, 16LL, 64LL, 256LL, 1024LL}) {
      auto [g, b] = anytime_minibatch_schedule(k, f);
      os << k << "," << g << "," << b << ",\n";
    }
  } else if (plan_kind == "distributed") {
    int workers = int(num("workers", 1));
    os << "workers: " << workers
       << "\nper_worker_batch: " << distributed_batch(f, workers) << "\n";
  } else {
    throw ConfigError("unknown plan kind: " + plan_kind);
  }
  return 0;
}

std::string find_shipped_config(const std::string& name) {
  static const std::map<std::string, std::string> files = {
      {"noise-deps", "noise_deps.cfg"},
      {"reduction-laws", "reduction_laws.cfg"},
      {"two-phase", "two_phase.cfg"},
  };
  auto it = files.find(name);
  if (it == files.end())
    throw ConfigError("unknown replicate target: " + name +
                      " (expected noise-deps | reduction-laws | two-phase)");
  std::vector<fs::path> roots;
  if (const char* env = std::getenv("SIGNBENCH_CONFIG_DIR")) roots.push_back(env);
  roots.push_back("configs");
  for (const auto& root : roots) {
    fs::path p = root / fs::path(it->second);
    if (fs::exists(p)) return p.string();
  }
  throw ConfigError("shipped config " + it->second +
                    " not found (set SIGNBENCH_CONFIG_DIR)");
}

int run_and_plot(ExperimentConfig cfg, const std::string& out_override) {
  if (!out_override.empty()) cfg.out_dir = out_override;
  ResultTable table = run_experiment(cfg);
  emit_plots(table,
             cfg.plot_style == "loglog" ? PlotStyle::loglog : PlotStyle::loglinear,
             cfg.out_dir);
  for (const auto& fail : table.failures)
    std::cerr << "cell failed: " << fail << "\n";
  return table.failures.empty() ? 0 : 1;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
  CLI::App app{"sign-based stochastic optimization benchmark"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
  std::string run_config, run_out;
  run_cmd->add_option("--config", run_config, "config file")->required();
  run_cmd->add_option("--out", run_out, "output directory override");

  auto* tune_cmd = app.add_subcommand("tune", "print a theorem-derived plan");
  std::string facts_path;
  tune_cmd->add_option("--facts", facts_path, "facts file (key = value)")->required();

  auto* verify_cmd = app.add_subcommand("verify", "run the inequality test suite");
  long long verify_trials = 20000;
  verify_cmd->add_option("--trials", verify_trials, "Monte-Carlo trials per check");

  auto* plot_cmd = app.add_subcommand("plot", "render SVGs from an aggregated CSV");
  std::string plot_in, plot_out = "plots", plot_style = "loglinear";
  plot_cmd->add_option("--in", plot_in, "agg.csv path")->required();
  plot_cmd->add_option("--out", plot_out, "output directory");
  plot_cmd->add_option("--style", plot_style, "loglinear | loglog");

  auto* rep_cmd = app.add_subcommand("replicate", "run a shipped experiment config");
  std::string rep_name, rep_out;
  rep_cmd->add_option("name", rep_name, "noise-deps | reduction-laws | two-phase")
      ->required();
  rep_cmd->add_option("--out", rep_out, "output directory override");

  auto* data_cmd = app.add_subcommand("dataset", "write the synthetic dataset");
  std::string data_out = "mushrooms_synth.libsvm";
  int data_rows = 6499, data_dim = 112;
  std::uint64_t data_seed = 20250817;
  double data_norm = 5.58;
  data_cmd->add_option("--out", data_out, "output file");
  data_cmd->add_option("--rows", data_rows, "row count");
  data_cmd->add_option("--dim", data_dim, "feature dimension");
  data_cmd->add_option("--seed", data_seed, "generator seed");
  data_cmd->add_option("--target-norm", data_norm, "target ||X^T y||_2");

  std::vector<const char*> argv;
  argv.push_back("signbench");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return run_and_plot(load_config(run_config), run_out);
    if (*tune_cmd) return cmd_tune(facts_path, std::cout);
    if (*verify_cmd) return run_verify_suite(std::cout, verify_trials);
    if (*plot_cmd) {
      ResultTable table = read_agg_csv(plot_in);
      emit_plots(table,
                 plot_style == "loglog" ? PlotStyle::loglog : PlotStyle::loglinear,
                 plot_out);
      return 0;
    }
    if (*rep_cmd)
      return run_and_plot(load_config(find_shipped_config(rep_name)), rep_out);
    if (*data_cmd) {
      save_libsvm(make_synthetic_mushrooms(data_rows, data_dim, data_seed, data_norm),
                  data_out);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace signbench
