#include "signbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "signbench/distsim.hpp"
#include "signbench/rng.hpp"
#include "signbench/verify.hpp"

namespace fs = std::filesystem;

namespace signbench {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  // "[a, b, c]" -> {"a","b","c"}; a bare scalar is a one-element list
  std::string s = trim(v);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
    s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }
  return {s};
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value '" + s + "' for key " + key);
  }
}

long long to_ll(const std::string& s, const std::string& key) {
  try {
    std::size_t pos;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing garbage");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value '" + s + "' for key " + key);
  }
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = int(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = int(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"problem",
     {"kind", "dataset", "expected_rows", "dim", "power", "lambda_l0", "lambda_l1",
      "dropout"}},
    {"optimizer", {"method", "batch"}},
    {"tuning",
     {"mode", "gamma0", "beta", "clip_lambda", "phase_switch", "epsilon", "delta",
      "confidence"}},
    {"noise", {"family", "kappa", "sigma"}},
    {"run", {"horizon", "repeats", "base_seed", "record_every"}},
    {"output", {"dir", "plots"}},
};

const std::map<std::string, std::string> kAliases = {
    {"learningrate", "gamma0"}, {"learning_rate", "gamma0"}, {"lr", "gamma0"},
    {"stepsize", "gamma0"},     {"batchsize", "batch"},      {"seed", "base_seed"},
};

std::string suggest_key(const std::string& key) {
  auto alias = kAliases.find(key);
  if (alias != kAliases.end()) return alias->second;
  int best = 1 << 20;
  std::string who;
  for (const auto& [sec, keys] : kKnownKeys)
    for (const auto& k : keys) {
      int d = edit_distance(key, k);
      if (d < best) {
        best = d;
        who = k;
      }
    }
  return who;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;  // "section.key" -> raw value
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kKnownKeys.count(section))
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + ": key before any [section]");
    if (!kKnownKeys.at(section).count(key))
      throw ConfigError(where + ": unknown key '" + key + "' in [" + section +
                        "]; did you mean '" + suggest_key(key) + "'?");
    kv[section + "." + key] = val;
  }

  auto has = [&](const std::string& k) { return kv.count(k) > 0; };
  auto str = [&](const std::string& k) { return kv.at(k); };

  if (has("problem.kind")) cfg.problem_kind = str("problem.kind");
  if (has("problem.dataset")) cfg.dataset = str("problem.dataset");
  if (has("problem.expected_rows"))
    cfg.expected_rows = int(to_ll(str("problem.expected_rows"), "expected_rows"));
  if (has("problem.dim")) cfg.dim = int(to_ll(str("problem.dim"), "dim"));
  if (has("problem.power")) cfg.power = int(to_ll(str("problem.power"), "power"));
  if (has("problem.lambda_l0")) {
    cfg.lambda_l0.clear();
    for (auto& s : split_list(str("problem.lambda_l0")))
      cfg.lambda_l0.push_back(to_double(s, "lambda_l0"));
  }
  if (has("problem.lambda_l1"))
    cfg.lambda_l1 = to_double(str("problem.lambda_l1"), "lambda_l1");
  if (has("problem.dropout"))
    cfg.dropout = to_double(str("problem.dropout"), "dropout");
  if (has("optimizer.method")) cfg.method = method_from(str("optimizer.method"));
  if (has("optimizer.batch")) {
    cfg.batch.clear();
    for (auto& s : split_list(str("optimizer.batch")))
      cfg.batch.push_back(to_ll(s, "batch"));
  }
  if (has("tuning.mode")) cfg.tuning_mode = str("tuning.mode");
  if (cfg.tuning_mode != "manual" && cfg.tuning_mode != "optimal" &&
      cfg.tuning_mode != "arbitrary" && cfg.tuning_mode != "anytime")
    throw ConfigError("unknown tuning mode: " + cfg.tuning_mode);
  if (has("tuning.gamma0")) cfg.gamma0 = to_double(str("tuning.gamma0"), "gamma0");
  if (has("tuning.beta")) cfg.beta = to_double(str("tuning.beta"), "beta");
  if (has("tuning.clip_lambda"))
    cfg.clip_lambda = to_double(str("tuning.clip_lambda"), "clip_lambda");
  if (has("tuning.phase_switch")) cfg.phase_switch = str("tuning.phase_switch");
  if (has("tuning.epsilon")) cfg.epsilon = to_double(str("tuning.epsilon"), "epsilon");
  if (has("tuning.delta")) cfg.delta = to_double(str("tuning.delta"), "delta");
  if (has("tuning.confidence"))
    cfg.confidence = to_double(str("tuning.confidence"), "confidence");
  if (has("noise.family")) cfg.family = noise_family_from(str("noise.family"));
  if (has("noise.kappa")) {
    cfg.kappa.clear();
    for (auto& s : split_list(str("noise.kappa")))
      cfg.kappa.push_back(to_double(s, "kappa"));
  }
  if (has("noise.sigma")) {
    cfg.sigma.clear();
    for (auto& s : split_list(str("noise.sigma")))
      cfg.sigma.push_back(to_double(s, "sigma"));
  }
  if (has("run.horizon")) cfg.horizon = to_ll(str("run.horizon"), "horizon");
  if (has("run.repeats")) cfg.repeats = int(to_ll(str("run.repeats"), "repeats"));
  if (has("run.base_seed"))
    cfg.base_seed = std::uint64_t(to_ll(str("run.base_seed"), "base_seed"));
  if (has("run.record_every"))
    cfg.record_every = to_ll(str("run.record_every"), "record_every");
  if (has("output.dir")) cfg.out_dir = str("output.dir");
  if (has("output.plots")) cfg.plot_style = str("output.plots");
  if (cfg.plot_style != "loglinear" && cfg.plot_style != "loglog")
    throw ConfigError("output.plots must be loglinear or loglog");
  if (cfg.repeats < 1 || cfg.horizon < 1 || cfg.record_every < 1)
    throw ConfigError("run section: horizon/repeats/record_every must be >= 1");

  std::ostringstream canon;
  for (const auto& [k, v] : kv) canon << k << "=" << v << "\n";
  cfg.digest_source = canon.str();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), fs::path(path).filename().string());
}

namespace {

struct Cell {
  std::string id;
  double sigma, kappa, lambda_l0;
  long long batch;
};

std::vector<Cell> make_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  bool logistic = cfg.problem_kind.rfind("logistic", 0) == 0;
  for (double s : cfg.sigma)
    for (double k : cfg.kappa)
      for (double l0 : cfg.lambda_l0)
        for (long long b : cfg.batch) {
          std::ostringstream id;
          id << "sigma=" << fmt_short(s) << "|kappa=" << fmt_short(k);
          if (logistic) id << "|l0=" << fmt_short(l0);
          if (cfg.batch.size() > 1 || cfg.batch[0] != 1)
            id << "|B=" << b;
          cells.push_back({id.str(), s, k, l0, b});
        }
  return cells;
}

Objective build_objective(const ExperimentConfig& cfg, const Dataset* data,
                          double lambda_l0) {
  if (cfg.problem_kind == "logistic_linear")
    return make_logistic_linear(*data, lambda_l0, cfg.lambda_l1);
  if (cfg.problem_kind == "logistic_nn")
    return make_logistic_nn(*data, lambda_l0, cfg.lambda_l1, cfg.dropout);
  if (cfg.problem_kind == "power_norm")
    return make_power_norm(cfg.power, cfg.dim);
  if (cfg.problem_kind == "exp_inner") {
    Vec a = Vec::Ones(cfg.dim) / std::sqrt(double(cfg.dim));
    return make_exp_inner(a);
  }
  if (cfg.problem_kind == "quadratic") {
    Vec diag(cfg.dim);
    for (int i = 0; i < cfg.dim; ++i)
      diag[i] = 1.0 + 3.0 * (cfg.dim == 1 ? 0.0 : double(i) / double(cfg.dim - 1));
    return make_quadratic(Mat(diag.asDiagonal()), Vec::Ones(cfg.dim));
  }
  throw ConfigError("unknown problem kind: " + cfg.problem_kind);
}

Vec initial_point(const ExperimentConfig& cfg, const Objective& obj) {
  if (cfg.problem_kind == "power_norm" || cfg.problem_kind == "exp_inner" ||
      cfg.problem_kind == "quadratic")
    return Vec::Ones(obj.dim);
  return Vec::Zero(obj.dim);
}

TuningPlan build_plan(const ExperimentConfig& cfg, const Objective& obj,
                      const Cell& cell, const Vec& x1) {
  TuningPlan plan;
  double g0 = cfg.gamma0;
  long long b0 = cell.batch;
  if (cfg.tuning_mode == "manual") {
    plan.method = to_string(cfg.method);
    plan.gamma = [g0](long long) { return g0; };
    plan.batch = [b0](long long) { return b0; };
    double beta = cfg.beta;
    plan.beta = [beta](long long) { return beta; };
    if (cfg.phase_switch == "auto") {
      plan.auto_decay = true;
    } else if (cfg.phase_switch != "none") {
      long long ps = to_ll(cfg.phase_switch, "phase_switch");
      plan.gamma = [g0, ps](long long k) {
        return k < ps ? g0 : g0 / std::sqrt(double(k - ps + 1));
      };
      plan.phase_switch = ps;
    }
    return plan;
  }

  ProblemFacts facts;
  facts.l0 = obj.l0;
  facts.l1 = obj.l1;
  facts.d = obj.dim;
  facts.kappa = cell.kappa;
  facts.epsilon = cfg.epsilon;
  facts.confidence_delta = cfg.confidence;
  facts.sigma_l1 = cell.sigma * double(obj.dim);
  facts.sigma_kappa =
      cell.sigma * std::pow(double(obj.dim), 1.0 / std::max(cell.kappa, 1e-9));
  if (cfg.delta)
    facts.delta = *cfg.delta;
  else if (obj.f_star)
    facts.delta = obj.value(x1) - *obj.f_star;
  else
    throw ConfigError("tuning.delta required when the objective has no known optimum");

  if (cfg.tuning_mode == "optimal") {
    if (cfg.method == Method::majority_signsgd) return optimal_majority_plan(facts);
    if (cfg.method == Method::m_signsgd)
      return optimal_msignsgd_plan(facts, cfg.horizon);
    return optimal_minibatch_plan(facts);
  }
  if (cfg.tuning_mode == "arbitrary") {
    if (cfg.phase_switch == "auto")
      throw ConfigError(
          "arbitrary mode needs an integer phase_switch (auto decay is a manual-mode "
          "feature)");
    std::optional<long long> ps;
    if (cfg.phase_switch != "none") ps = to_ll(cfg.phase_switch, "phase_switch");
    plan.method = to_string(cfg.method);
    plan.gamma = [g0, b0, ps](long long k) {
      return arbitrary_minibatch_schedule(k, g0, b0, ps).first;
    };
    plan.batch = [g0, b0, ps](long long k) {
      return arbitrary_minibatch_schedule(k, g0, b0, ps).second;
    };
    plan.phase_switch = ps;
    return plan;
  }
  // anytime
  plan.method = to_string(cfg.method);
  plan.gamma = [facts](long long k) {
    return anytime_minibatch_schedule(k, facts).first;
  };
  plan.batch = [facts](long long k) {
    return anytime_minibatch_schedule(k, facts).second;
  };
  return plan;
}

void append_rows(std::vector<RawRow>& rows, const RunTrace& trace,
                 const std::string& cell_id, std::uint64_t seed, long long every) {
  for (const auto& rec : trace.records) {
    if (rec.k % every != 0 && rec.k != 1 &&
        rec.k != trace.records.back().k)
      continue;
    RawRow r;
    r.cell_id = cell_id;
    r.seed = seed;
    r.k = rec.k;
    r.gamma = rec.gamma;
    r.batch = rec.batch;
    r.grad_l1 = rec.grad_l1;
    r.grad_l2 = rec.grad_l2;
    r.func_gap = rec.func_gap;
    r.samples = rec.samples;
    rows.push_back(std::move(r));
  }
}

void write_raw_csv(const std::vector<RawRow>& raw, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "cell_id,seed,k,gamma,batch,grad_l1,grad_l2,func_gap,samples\n";
  for (const auto& r : raw) {
    out << r.cell_id << ',' << r.seed << ',' << r.k << ',' << fmt(r.gamma) << ','
        << r.batch << ',' << fmt(r.grad_l1) << ',' << fmt(r.grad_l2) << ',';
    if (r.func_gap) out << fmt(*r.func_gap);
    out << ',' << r.samples << "\n";
  }
}

void write_agg_csv(const std::vector<AggRow>& agg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "cell_id,k,metric,mean,std,n\n";
  for (const auto& r : agg)
    out << r.cell_id << ',' << r.k << ',' << r.metric << ',' << fmt(r.mean) << ','
        << fmt(r.stddev) << ',' << r.n << "\n";
}

void aggregate(ResultTable& table) {
  // raw is ordered by (cell, seed, k); group over seeds for each (cell, k)
  struct Key {
    std::string cell;
    long long k;
    bool operator<(const Key& o) const {
      return cell != o.cell ? cell < o.cell : k < o.k;
    }
  };
  std::map<Key, std::vector<const RawRow*>> groups;
  for (const auto& r : table.raw) groups[{r.cell_id, r.k}].push_back(&r);
  // preserve cell order as first-seen in raw, k ascending
  std::vector<std::pair<Key, std::vector<const RawRow*>>> ordered;
  std::map<std::string, int> cell_rank;
  for (const auto& c : table.cell_order) cell_rank[c] = int(cell_rank.size());
  for (auto& [key, rows] : groups) ordered.emplace_back(key, rows);
  std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
    int ra = cell_rank.count(a.first.cell) ? cell_rank[a.first.cell] : 1 << 20;
    int rb = cell_rank.count(b.first.cell) ? cell_rank[b.first.cell] : 1 << 20;
    if (ra != rb) return ra < rb;
    return a.first.k < b.first.k;
  });
  auto push = [&](const Key& key, const std::string& metric,
                  const std::vector<double>& vals) {
    AggRow a;
    a.cell_id = key.cell;
    a.k = key.k;
    a.metric = metric;
    a.n = int(vals.size());
    double m = 0.0;
    for (double v : vals) m += v;
    m /= double(vals.size());
    double s2 = 0.0;
    for (double v : vals) s2 += (v - m) * (v - m);
    a.mean = m;
    a.stddev = vals.size() > 1 ? std::sqrt(s2 / double(vals.size() - 1)) : 0.0;
    table.agg.push_back(std::move(a));
  };
  for (auto& [key, rows] : ordered) {
    std::vector<double> l1, l2, gap;
    bool all_gap = true;
    for (const RawRow* r : rows) {
      l1.push_back(r->grad_l1);
      l2.push_back(r->grad_l2);
      if (r->func_gap)
        gap.push_back(*r->func_gap);
      else
        all_gap = false;
    }
    push(key, "grad_l1", l1);
    push(key, "grad_l2", l2);
    if (all_gap && !gap.empty()) push(key, "func_gap", gap);
  }
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  std::optional<Dataset> data;
  if (cfg.problem_kind.rfind("logistic", 0) == 0) {
    if (cfg.dataset.empty()) throw ConfigError("logistic problems need problem.dataset");
    data = load_libsvm(resolve_data_path(cfg.dataset), cfg.dim);
    if (cfg.expected_rows && data->X.rows() != *cfg.expected_rows)
      throw ConfigError("dataset has " + std::to_string(data->X.rows()) +
                        " rows, expected " + std::to_string(*cfg.expected_rows));
  }
  std::vector<Cell> cells = make_cells(cfg);
  ResultTable table;
  for (const auto& c : cells) table.cell_order.push_back(c.id);

  struct Task {
    int cell_index;
    int rep;
  };
  std::vector<Task> tasks;
  for (int c = 0; c < int(cells.size()); ++c)
    for (int r = 0; r < cfg.repeats; ++r) tasks.push_back({c, r});

  std::vector<std::vector<RawRow>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      const Cell& cell = cells[std::size_t(t.cell_index)];
      std::uint64_t seed =
          cfg.base_seed + std::uint64_t(t.cell_index) * std::uint64_t(cfg.repeats) +
          std::uint64_t(t.rep);
      try {
        Objective obj =
            build_objective(cfg, data ? &*data : nullptr, cell.lambda_l0);
        NoiseModel noise;
        noise.family = cfg.family;
        noise.tail_index = cell.kappa;
        noise.scale = cell.sigma * Vec::Ones(obj.dim);
        GradientOracle oracle(obj, noise, seed);
        Vec x1 = initial_point(cfg, obj);
        TuningPlan plan = build_plan(cfg, obj, cell, x1);
        long long T = (cfg.tuning_mode == "optimal" && plan.T > 0) ? plan.T
                                                                   : cfg.horizon;
        RunTrace trace = run(cfg.method, obj, oracle, plan, T, x1, cfg.clip_lambda);
        trace.config_digest =
            std::to_string(fnv1a(cfg.digest_source + cell.id)) + "-" +
            std::to_string(seed);
        append_rows(results[i], trace, cell.id, seed, cfg.record_every);
      } catch (const std::exception& e) {
        errors[i] = cell.id + ": " + e.what();
      }
    }
  };

  unsigned n_threads = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                             unsigned(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i].empty()) {
      if (std::find(table.failures.begin(), table.failures.end(), errors[i]) ==
          table.failures.end())
        table.failures.push_back(errors[i]);
      continue;
    }
    for (auto& r : results[i]) table.raw.push_back(std::move(r));
  }
  aggregate(table);

  fs::create_directories(cfg.out_dir);
  write_raw_csv(table.raw, (fs::path(cfg.out_dir) / "raw.csv").string());
  write_agg_csv(table.agg, (fs::path(cfg.out_dir) / "agg.csv").string());
  return table;
}

ResultTable read_agg_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ResultTable table;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "cell_id,k,metric,mean,std,n")
    throw std::runtime_error(path + ": not an aggregated results CSV");
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, ',')) f.push_back(item);
    if (f.size() != 6) throw std::runtime_error(path + ": malformed row: " + line);
    AggRow r;
    r.cell_id = f[0];
    r.k = to_ll(f[1], "k");
    r.metric = f[2];
    r.mean = to_double(f[3], "mean");
    r.stddev = to_double(f[4], "std");
    r.n = int(to_ll(f[5], "n"));
    if (seen.insert(r.cell_id).second) table.cell_order.push_back(r.cell_id);
    table.agg.push_back(std::move(r));
  }
  return table;
}

namespace {

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<std::string> emit_plots(const ResultTable& table, PlotStyle style,
                                    const std::string& out_dir) {
  if (table.agg.empty()) throw std::runtime_error("emit_plots: empty table");
  fs::create_directories(out_dir);
  std::set<std::string> metrics;
  for (const auto& r : table.agg) metrics.insert(r.metric);
  std::vector<std::string> files;

  const double W = 880, H = 560, ml = 80, mr = 240, mt = 30, mb = 60;
  for (const std::string& metric : metrics) {
    // collect per-cell series in stable cell order
    std::vector<std::pair<std::string, std::vector<const AggRow*>>> series;
    for (const auto& cell : table.cell_order) {
      std::vector<const AggRow*> s;
      for (const auto& r : table.agg)
        if (r.metric == metric && r.cell_id == cell) s.push_back(&r);
      if (!s.empty()) series.emplace_back(cell, std::move(s));
    }
    double min_pos = std::numeric_limits<double>::infinity();
    for (auto& [_, s] : series)
      for (auto* r : s)
        if (r->mean > 0.0) min_pos = std::min(min_pos, r->mean);
    if (!std::isfinite(min_pos)) min_pos = 1e-12;
    double floor_y = min_pos / 10.0;
    auto ylog = [&](double v) { return std::log10(std::max(v, floor_y)); };
    bool logx = style == PlotStyle::loglog;
    auto xmap = [&](double k) { return logx ? std::log10(std::max(k, 1.0)) : k; };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& [_, s] : series)
      for (auto* r : s) {
        xmin = std::min(xmin, xmap(double(r->k)));
        xmax = std::max(xmax, xmap(double(r->k)));
        ymin = std::min(ymin, ylog(std::max(r->mean - r->stddev, floor_y)));
        ymax = std::max(ymax, ylog(r->mean + r->stddev));
      }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    auto X = [&](double k) {
      return ml + (xmap(k) - xmin) / (xmax - xmin) * (W - ml - mr);
    };
    auto Y = [&](double v) {
      return H - mb - (ylog(v) - ymin) / (ymax - ymin) * (H - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
        << "\" height=\"" << (H - mt - mb)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    // axis ticks
    for (int i = 0; i <= 5; ++i) {
      double tx = xmin + (xmax - xmin) * i / 5.0;
      double px = ml + (W - ml - mr) * i / 5.0;
      double xv = logx ? std::pow(10.0, tx) : tx;
      svg << "<line x1=\"" << fmt2(px) << "\" y1=\"" << (H - mb) << "\" x2=\""
          << fmt2(px) << "\" y2=\"" << (H - mb + 6) << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << fmt2(px) << "\" y=\"" << (H - mb + 22)
          << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_short(xv)
          << "</text>\n";
      double ty = ymin + (ymax - ymin) * i / 5.0;
      double py = H - mb - (H - mt - mb) * i / 5.0;
      svg << "<line x1=\"" << (ml - 6) << "\" y1=\"" << fmt2(py) << "\" x2=\"" << ml
          << "\" y2=\"" << fmt2(py) << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << (ml - 10) << "\" y=\"" << fmt2(py + 4)
          << "\" font-size=\"12\" text-anchor=\"end\">"
          << fmt_short(std::pow(10.0, ty)) << "</text>\n";
    }
    svg << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 15)
        << "\" font-size=\"13\" text-anchor=\"middle\">iteration</text>\n";
    svg << "<text x=\"20\" y=\"" << (mt + (H - mt - mb) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << (mt + (H - mt - mb) / 2) << ")\">" << metric << "</text>\n";

    int ci = 0;
    for (auto& [cell, s] : series) {
      const char* color = kPalette[ci % 10];
      // +-1 std band
      std::ostringstream band;
      band << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" "
           << "stroke=\"none\" points=\"";
      for (auto* r : s)
        band << fmt2(X(double(r->k))) << "," << fmt2(Y(r->mean + r->stddev)) << " ";
      for (auto it = s.rbegin(); it != s.rend(); ++it)
        band << fmt2(X(double((*it)->k))) << ","
             << fmt2(Y(std::max((*it)->mean - (*it)->stddev, floor_y))) << " ";
      band << "\"/>\n";
      svg << band.str();
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (auto* r : s)
        svg << fmt2(X(double(r->k))) << "," << fmt2(Y(r->mean)) << " ";
      svg << "\"/>\n";
      double ly = mt + 18 + 18 * ci;
      svg << "<line x1=\"" << (W - mr + 10) << "\" y1=\"" << fmt2(ly - 4)
          << "\" x2=\"" << (W - mr + 34) << "\" y2=\"" << fmt2(ly - 4)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << (W - mr + 40) << "\" y=\"" << fmt2(ly)
          << "\" font-size=\"11\">" << cell << "</text>\n";
      ++ci;
    }
    svg << "</svg>\n";
    std::string path = (fs::path(out_dir) / (metric + ".svg")).string();
    std::ofstream out(path);
    out << svg.str();
    files.push_back(path);
  }
  return files;
}

}  // namespace signbench
