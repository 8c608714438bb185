#include "signbench/distsim.hpp"

#include <cmath>
#include <fstream>

#include "signbench/rng.hpp"

namespace signbench {

std::pair<Vec, RoundLedger> simulate_round(const Vec& x, GradientOracle& oracle,
                                           const ClusterConfig& cfg, long long round,
                                           std::mt19937_64& drop_rng) {
  if (cfg.workers < 1 || cfg.per_worker_batch < 1)
    throw std::invalid_argument("simulate_round: bad cluster configuration");
  std::vector<Vec> signs;
  signs.reserve(std::size_t(cfg.workers));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 0; j < cfg.workers; ++j) {
    if (cfg.drop_probability > 0.0 && u(drop_rng) < cfg.drop_probability) continue;
    signs.push_back(sign_vec(oracle.minibatch(x, cfg.per_worker_batch, j)));
  }
  if (signs.empty())
    throw std::runtime_error("simulate_round: all workers dropped in round " +
                             std::to_string(round));
  long long d = x.size();
  long long sign_bytes = (cfg.sign_packing_bits * d + 7) / 8;
  RoundLedger ledger;
  ledger.round = round;
  ledger.workers_heard = int(signs.size());
  ledger.upstream_bytes = ledger.workers_heard * sign_bytes;
  ledger.downstream_bytes = ledger.workers_heard * 8 * d;  // full-precision point
  return {majority_vote_aggregate(signs), ledger};
}

DistributedResult run_distributed(const Objective& obj, GradientOracle& oracle,
                                  const ClusterConfig& cfg, const TuningPlan& plan,
                                  long long T, const Vec& x1) {
  if (T < 1) throw std::invalid_argument("run_distributed: T >= 1");
  DistributedResult res;
  res.trace.seed = oracle.seed();
  res.trace.records.reserve(std::size_t(T));
  res.ledgers.reserve(std::size_t(T));
  OptimizerState st = make_state(obj, x1);
  auto drop_rng = make_stream(oracle.seed(), 0x40000000ULL);  // off the worker streams
  for (long long k = 1; k <= T; ++k) {
    double gamma = plan.gamma(k);
    if (gamma > plan.stepsize_cap) res.trace.stepsize_cap_warning = true;
    TraceRecord rec;
    rec.k = k;
    rec.gamma = gamma;
    rec.batch = cfg.per_worker_batch;
    rec.grad_l1 = lp_norm(st.last_true_grad, 1.0);
    rec.grad_l2 = st.last_true_grad.norm();
    if (obj.f_star) rec.func_gap = obj.value(st.x) - *obj.f_star;
    auto [agg, ledger] = simulate_round(st.x, oracle, cfg, k, drop_rng);
    rec.samples = oracle.sample_counter();
    res.trace.records.push_back(rec);
    res.ledgers.push_back(ledger);
    signsgd_step(st, agg, gamma);
  }
  res.total_samples = oracle.sample_counter();
  res.per_worker_samples = T * cfg.per_worker_batch;
  return res;
}

void write_ledger_csv(const std::vector<RoundLedger>& ledgers,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ledger_csv: cannot open " + path);
  out << "round,upstream_bytes,downstream_bytes,workers_heard\n";
  for (const auto& l : ledgers)
    out << l.round << ',' << l.upstream_bytes << ',' << l.downstream_bytes << ','
        << l.workers_heard << "\n";
}

}  // namespace signbench
