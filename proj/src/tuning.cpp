#include "signbench/tuning.hpp"

#include <cmath>
#include <stdexcept>

namespace signbench {

namespace {

double log_conf(const ProblemFacts& f) { return std::log(1.0 / f.confidence_delta); }

long long ceil_ll(double x) {
  if (x <= 1.0) return 1;
  if (x > 9e18) throw std::overflow_error("schedule size overflows 64-bit");
  return static_cast<long long>(std::ceil(x));
}

void require_batching_kappa(double kappa) {
  if (!(kappa > 1.0) || kappa > 2.0)
    throw std::invalid_argument("batching-based plans need kappa in (1,2]");
}

}  // namespace

double TuningPlan::C_T() const {
  if (T < 1) throw std::runtime_error("C_T needs a finite horizon");
  double run_sum = 0.0, best = 0.0;
  for (long long k = 1; k <= T; ++k) {
    double g = gamma(k);
    best = std::max(best, g * run_sum);
    run_sum += g;
  }
  return best;
}

Regime regime_of(const ProblemFacts& f) {
  if (f.l1 == 0.0) return Regime::slow_L0;
  if (f.l0 == 0.0) return Regime::fast_L1;
  return f.epsilon >= 8.0 * f.l0 / (f.l1 * std::sqrt(double(f.d)))
             ? Regime::fast_L1
             : Regime::slow_L0;
}

TuningPlan optimal_minibatch_plan(const ProblemFacts& f) {
  require_batching_kappa(f.kappa);
  double d = double(f.d), d32 = std::pow(d, 1.5);
  double l0d = f.l0 * log_conf(f), l1d = f.l1 * log_conf(f);
  long long B = 1;
  if (f.sigma_l1 > 0.0)
    B = ceil_ll(std::pow(16.0 * f.sigma_l1 / f.epsilon, f.kappa / (f.kappa - 1.0)));
  TuningPlan plan;
  plan.method = "minibatch_signsgd";
  plan.regime = regime_of(f);
  plan.batch = [B](long long) { return B; };
  if (l1d > 0.0) plan.stepsize_cap = 1.0 / (48.0 * l1d * d32);
  if (plan.regime == Regime::fast_L1) {
    double g = 1.0 / (48.0 * l1d * d32);
    plan.T = ceil_ll(384.0 * f.delta * l1d * d32 / f.epsilon);
    plan.gamma = [g](long long) { return g; };
  } else {
    plan.T = ceil_ll(5120.0 * f.delta * l0d * d / (f.epsilon * f.epsilon));
    double g = std::sqrt(f.delta / (20.0 * l0d * d * double(plan.T)));
    plan.gamma = [g](long long) { return g; };
  }
  return plan;
}

TuningPlan optimal_majority_plan(const ProblemFacts& f) {
  if (!(f.kappa > 0.0) || f.kappa > 2.0)
    throw std::invalid_argument("majority plans need kappa in (0,2]");
  double d = double(f.d), d32 = std::pow(d, 1.5);
  double l0d = f.l0 * log_conf(f), l1d = f.l1 * log_conf(f);
  long long M = ceil_ll(160.0 / (f.kappa * f.kappa));
  if (f.sigma_l1 > 0.0)
    M = std::max(M, ceil_ll(65536.0 * f.sigma_l1 * f.sigma_l1 /
                            (f.epsilon * f.epsilon)));
  TuningPlan plan;
  plan.method = "majority_signsgd";
  plan.regime = regime_of(f);
  plan.batch = [M](long long) { return M; };
  if (l1d > 0.0) plan.stepsize_cap = 1.0 / (48.0 * l1d * d32);
  if (plan.regime == Regime::fast_L1) {
    double g = 1.0 / (48.0 * l1d * d32);
    plan.T = ceil_ll(10240.0 * f.delta * l1d * d32 / f.epsilon);
    plan.gamma = [g](long long) { return g; };
  } else {
    plan.T = ceil_ll(51200.0 * f.delta * l0d * d / (f.epsilon * f.epsilon));
    double g = std::sqrt(f.delta / (80.0 * l0d * d * double(plan.T)));
    plan.gamma = [g](long long) { return g; };
  }
  return plan;
}

TuningPlan optimal_msignsgd_plan(const ProblemFacts& f, long long T) {
  require_batching_kappa(f.kappa);
  if (T < 1) throw std::invalid_argument("optimal_msignsgd_plan: T >= 1");
  double d = double(f.d);
  TuningPlan plan;
  plan.method = "m_signsgd";
  plan.T = T;
  bool fast = (f.l1 > 0.0) &&
              (f.l0 == 0.0 || f.epsilon >= 3.0 * f.l0 / f.l1);
  plan.regime = fast ? Regime::fast_L1 : Regime::slow_L0;
  double one_minus_beta, g;
  if (fast) {
    one_minus_beta = 1.0;
    if (f.sigma_kappa > 0.0)
      one_minus_beta = std::min(
          1.0, std::pow(f.delta * f.l1 * std::sqrt(d) / (double(T) * f.sigma_kappa),
                        f.kappa / (2.0 * f.kappa - 1.0)));
    g = one_minus_beta / (8.0 * f.l1 * d);
  } else {
    one_minus_beta = 1.0;
    if (f.sigma_kappa > 0.0)
      one_minus_beta = std::min(
          1.0, std::pow(f.delta * f.l0 / (double(T) * f.sigma_kappa * f.sigma_kappa),
                        f.kappa / (3.0 * f.kappa - 2.0)));
    if (f.l0 <= 0.0)
      throw std::invalid_argument("msignsgd slow branch needs L0 > 0");
    g = std::sqrt(f.delta * one_minus_beta / (double(T) * f.l0 * d));
  }
  double beta = 1.0 - one_minus_beta;
  plan.gamma = [g](long long) { return g; };
  plan.batch = [](long long) { return 1LL; };
  plan.beta = [beta](long long) { return beta; };
  double l1d = f.l1 * log_conf(f);
  if (l1d > 0.0) plan.stepsize_cap = 1.0 / (48.0 * l1d * std::pow(d, 1.5));
  return plan;
}

TuningPlan arbitrary_msignsgd_plan(double gamma0, long long T) {
  if (T < 1) throw std::invalid_argument("arbitrary_msignsgd_plan: T >= 1");
  double beta = 1.0 - std::pow(double(T), -2.0 / 3.0);
  double g = gamma0 * (1.0 - beta);
  TuningPlan plan;
  plan.method = "m_signsgd";
  plan.T = T;
  plan.gamma = [g](long long) { return g; };
  plan.batch = [](long long) { return 1LL; };
  plan.beta = [beta](long long) { return beta; };
  return plan;
}

std::pair<double, long long> arbitrary_minibatch_schedule(
    long long k, double gamma0, long long B0, std::optional<long long> phase_switch) {
  if (k < 1) throw std::invalid_argument("arbitrary_minibatch_schedule: k >= 1");
  if (B0 < 1) throw std::invalid_argument("arbitrary_minibatch_schedule: B0 >= 1");
  if (!phase_switch || k < *phase_switch)
    return {gamma0, B0 * k * k};
  long long kp = k - *phase_switch + 1;
  return {gamma0 / std::sqrt(double(kp)), B0 * kp};
}

std::pair<double, long long> anytime_minibatch_schedule(long long k,
                                                        const ProblemFacts& f) {
  require_batching_kappa(f.kappa);
  if (k < 1) throw std::invalid_argument("anytime_minibatch_schedule: k >= 1");
  double d = double(f.d);
  double l0d = f.l0 * log_conf(f), l1d = f.l1 * log_conf(f);
  bool phase1;
  if (f.l0 == 0.0)
    phase1 = true;  // boundary is infinite
  else if (f.l1 == 0.0)
    phase1 = false;
  else
    phase1 = double(k) <= std::ceil(64.0 * f.delta * l1d * f.l1 * d * d / f.l0);
  if (phase1) {
    double g = 1.0 / (48.0 * l1d * std::pow(d, 1.5));
    long long B = ceil_ll(std::pow(16.0 * double(k), f.kappa / (f.kappa - 1.0)));
    return {g, B};
  }
  double g = std::sqrt(f.delta / (20.0 * d * l0d * double(k)));
  long long B =
      ceil_ll(std::pow(16.0 * double(k), f.kappa / (2.0 * (f.kappa - 1.0))));
  return {g, B};
}

std::vector<TuningPlan> restart_plan(const ProblemFacts& f, RestartMode mode) {
  if (!(f.mu > 0.0)) throw std::invalid_argument("restart_plan: mu must be > 0");
  if (mode == RestartMode::minibatch)
    require_batching_kappa(f.kappa);
  else if (!(f.kappa > 0.0) || f.kappa > 2.0)
    throw std::invalid_argument("majority restart plans need kappa in (0,2]");
  std::vector<TuningPlan> rounds;
  if (f.epsilon >= f.delta) return rounds;  // zero rounds, target already met
  long long tau = ceil_ll(std::log2(f.delta / f.epsilon));
  double d = double(f.d), d32 = std::pow(d, 1.5);
  // per-round confidence delta/tau => L^delta uses log(tau/delta)
  double lg = std::log(double(tau) / f.confidence_delta);
  double l0d = f.l0 * lg, l1d = f.l1 * lg;
  bool fast;
  if (f.l1 == 0.0)
    fast = false;
  else if (f.l0 == 0.0)
    fast = true;
  else
    fast = f.epsilon >= std::pow(8.0 * f.l0 / (f.l1 * std::sqrt(d)), 2.0);
  long long bn = 1;
  if (f.sigma_l1 > 0.0) {
    double base = 1024.0 * f.sigma_l1 * f.sigma_l1 / (f.mu * f.epsilon);
    if (mode == RestartMode::minibatch)
      bn = ceil_ll(std::pow(base, f.kappa / (2.0 * (f.kappa - 1.0))));
    else
      bn = ceil_ll(base);
  }
  if (mode == RestartMode::majority)
    bn = std::max(bn, ceil_ll(160.0 / (f.kappa * f.kappa)));
  for (long long n = 1; n <= tau; ++n) {
    double delta_n = f.delta / std::pow(2.0, double(n - 1));
    TuningPlan plan;
    plan.method =
        mode == RestartMode::minibatch ? "minibatch_signsgd" : "majority_signsgd";
    plan.regime = fast ? Regime::fast_L1 : Regime::slow_L0;
    plan.batch = [bn](long long) { return bn; };
    if (l1d > 0.0) plan.stepsize_cap = 1.0 / (48.0 * l1d * d32);
    if (fast) {
      plan.T = ceil_ll(48.0 * l1d * d32 * std::sqrt(2.0 * 1028.0 * delta_n / f.mu));
      double g = 1.0 / (48.0 * l1d * d32);
      plan.gamma = [g](long long) { return g; };
    } else {
      plan.T = ceil_ll(16384.0 * l0d * d / f.mu);
      double g = std::sqrt(f.delta /
                           (std::pow(2.0, double(n + 4)) * double(plan.T) * l0d * d));
      plan.gamma = [g](long long) { return g; };
    }
    rounds.push_back(std::move(plan));
  }
  return rounds;
}

long long distributed_batch(const ProblemFacts& f, int workers) {
  require_batching_kappa(f.kappa);
  if (workers < 1) throw std::invalid_argument("distributed_batch: workers >= 1");
  if (f.sigma_l1 == 0.0) return 1;
  double base = 16.0 * f.sigma_l1 / (std::sqrt(double(workers)) * f.epsilon);
  return ceil_ll(std::pow(base, f.kappa / (f.kappa - 1.0)));
}

}  // namespace signbench
