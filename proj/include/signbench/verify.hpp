#pragma once

#include <random>

#include "signbench/core.hpp"
#include "signbench/noise.hpp"

namespace signbench {

struct MajorityFailureModel {
  double q = 0.0;  // single-voter failure probability
  int M = 1;
  double epsilon_margin() const { return 0.5 - q; }
};

struct BoundCheckReport {
  long long trials = 0;
  long long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();  // min(rhs - lhs)
  std::string parameters;
};

// Monte-Carlo check of the batching moment bound
//   E || (1/B) sum X_i ||_2^kappa  <=  (2/B^kappa) sum E ||X_i||_2^kappa
// where X_i are d-dimensional vectors with iid coordinates from `dist`.
// The comparison allows 3 combined standard errors of slack.
BoundCheckReport check_batching_lemma(const NoiseModel& dist, int d, int B,
                                      double kappa, long long n_trials,
                                      std::mt19937_64& rng);
// Same check for an arbitrary iid scalar sampler (e.g. Rademacher +-1).
BoundCheckReport check_batching_lemma(
    const std::function<double(std::mt19937_64&)>& sampler, const std::string& label,
    int d, int B, double kappa, long long n_trials, std::mt19937_64& rng);

// Exact binomial probability that at least M/2 of M voters fail (ties count
// as failure, consistent with sign(0) = 0).
double exact_majority_failure(double q, int M);

// Printed bound 1/(1 + M/(1/(4 eps^2) - 1)); continuity extension: 0 at q=0.
double majority_failure_bound(const MajorityFailureModel& model);

// Two-branch tail bound for unimodal symmetric noise with kappa-th moment.
double gauss_tail_bound(double kappa, double tau, double moment);

// Randomized check of the one-step descent inequality for x' = x - gamma*sign(m):
//   f(x') - f(x) <= -gamma ||g||_1 + 2 gamma sqrt(d) ||m - g||_2
//                   + ((L0 + L1 ||g||_2)/2) e^{gamma L1 sqrt(d)} gamma^2 d
BoundCheckReport check_sign_update_lemma(const Objective& obj, long long n_trials,
                                         double gamma_max, std::mt19937_64& rng);

// ||grad f(x)||^2 >= 2 mu (f(x) - f*) at random points.
BoundCheckReport check_pl_condition(const Objective& obj, long long n_points,
                                    std::mt19937_64& rng);

}  // namespace signbench
