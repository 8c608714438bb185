#pragma once

#include "signbench/optimizers.hpp"

namespace signbench {

struct ClusterConfig {
  int workers = 1;            // M
  long long per_worker_batch = 1;  // B
  int sign_packing_bits = 2;  // {-1,0,+1} needs 2 bits/coordinate
  double drop_probability = 0.0;  // straggler extension, default off
};

struct RoundLedger {
  long long round = 0;
  long long upstream_bytes = 0;
  long long downstream_bytes = 0;
  int workers_heard = 0;
};

// One server round: each heard worker ships the sign of its B-averaged noisy
// gradient (sub-stream = worker index), the server majority-votes in worker
// order. drop_rng is only consulted when drop_probability > 0 so that the
// default configuration shares draw-for-draw the majority-vote method's
// randomness.
std::pair<Vec, RoundLedger> simulate_round(const Vec& x, GradientOracle& oracle,
                                           const ClusterConfig& cfg, long long round,
                                           std::mt19937_64& drop_rng);

struct DistributedResult {
  RunTrace trace;
  std::vector<RoundLedger> ledgers;
  long long per_worker_samples = 0;
  long long total_samples = 0;
};

DistributedResult run_distributed(const Objective& obj, GradientOracle& oracle,
                                  const ClusterConfig& cfg, const TuningPlan& plan,
                                  long long T, const Vec& x1);

void write_ledger_csv(const std::vector<RoundLedger>& ledgers,
                      const std::string& path);

}  // namespace signbench
