#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "signbench/core.hpp"

namespace signbench {

// Problem constants the schedules are computed from.
struct ProblemFacts {
  double delta = 0.0;        // f(x1) - f*
  double l0 = 0.0;
  double l1 = 0.0;
  int d = 1;
  double sigma_l1 = 0.0;     // ||sigma||_1
  double sigma_kappa = 0.0;  // ||sigma||_kappa
  double kappa = 2.0;
  double epsilon = 1.0;      // target accuracy
  double confidence_delta = 0.1;
  double mu = 0.0;           // PL constant (restart plans only)
};

enum class Regime { fast_L1, slow_L0 };

struct TuningPlan {
  std::string method;
  long long T = -1;  // -1 = anytime (no fixed horizon)
  std::function<double(long long)> gamma;
  std::function<long long(long long)> batch;  // B_k or M_k
  std::function<double(long long)> beta;      // set for momentum methods only
  Regime regime = Regime::slow_L0;
  std::optional<long long> phase_switch;
  // plateau-triggered 1/sqrt(k) stepsize decay (parameter-agnostic tuning)
  bool auto_decay = false;
  int plateau_window = 50;
  double plateau_tol = 0.01;
  bool delta_estimated = false;  // delta came from a running-min fallback
  // Stepsize cap 1/(48 L1 d^{3/2} log(1/delta)); runs exceeding it proceed
  // but set a warning flag on the trace.
  double stepsize_cap = std::numeric_limits<double>::infinity();

  // C_T = max_k gamma_k * sum_{tau<k} gamma_tau (needs a finite horizon)
  double C_T() const;
};

Regime regime_of(const ProblemFacts& facts);

TuningPlan optimal_minibatch_plan(const ProblemFacts& facts);
TuningPlan optimal_majority_plan(const ProblemFacts& facts);
TuningPlan optimal_msignsgd_plan(const ProblemFacts& facts, long long T);
// beta = 1 - T^{-2/3}, gamma = gamma0 * (1 - beta)
TuningPlan arbitrary_msignsgd_plan(double gamma0, long long T);

// (gamma_k, B_k) for the parameter-agnostic schedule: constant gamma with
// B0*k^2 growth before the switch, gamma0/sqrt(k') and B0*k' after.
std::pair<double, long long> arbitrary_minibatch_schedule(
    long long k, double gamma0, long long B0, std::optional<long long> phase_switch);

// (gamma_k, B_k) for the infinite-horizon two-phase schedule.
std::pair<double, long long> anytime_minibatch_schedule(long long k,
                                                        const ProblemFacts& facts);

enum class RestartMode { minibatch, majority };
// One plan per restart round; round n targets gap delta/2^{n-1}.
std::vector<TuningPlan> restart_plan(const ProblemFacts& facts, RestartMode mode);

// Per-worker batch size for the distributed majority-vote method.
long long distributed_batch(const ProblemFacts& facts, int workers);

}  // namespace signbench
