#pragma once

#include <random>
#include <vector>

#include "signbench/core.hpp"
#include "signbench/noise.hpp"
#include "signbench/tuning.hpp"

namespace signbench {

enum class Method {
  signsgd,
  minibatch_signsgd,
  majority_signsgd,
  m_signsgd,
  clip_sgd,
  nsgd,
  m_nsgd,
  m_clipsgd
};

Method method_from(const std::string& name);
std::string to_string(Method m);

// Noisy-gradient source. Parallel voters/workers use per-index generator
// sub-streams so that results are reproducible under any scheduling.
class GradientOracle {
 public:
  GradientOracle(const Objective& obj, NoiseModel noise, std::uint64_t seed)
      : obj_(&obj), noise_(std::move(noise)), seed_(seed) {}

  const Objective& objective() const { return *obj_; }
  const NoiseModel& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }
  long long sample_counter() const { return sample_counter_; }

  std::mt19937_64& stream(int j);
  // One noisy gradient draw on sub-stream j; sample_counter += 1.
  Vec sample(const Vec& x, int j = 0);
  // Mean of B draws on sub-stream j; sample_counter += B.
  Vec minibatch(const Vec& x, long long B, int j = 0);

 private:
  const Objective* obj_;
  NoiseModel noise_;
  std::uint64_t seed_;
  long long sample_counter_ = 0;
  std::vector<std::mt19937_64> streams_;
};

Vec minibatch_gradient(GradientOracle& oracle, const Vec& x, long long B);

struct OptimizerState {
  Vec x;
  long long k = 1;
  Vec m;             // momentum buffer (m^0 = 0)
  const Objective* obj = nullptr;
  Vec last_true_grad;  // true gradient at the current x (simulation privilege)
  Vec best_x;
  double best_grad_l2 = std::numeric_limits<double>::infinity();
};

OptimizerState make_state(const Objective& obj, const Vec& x1);

void signsgd_step(OptimizerState& state, const Vec& g, double gamma);
void msignsgd_step(OptimizerState& state, const Vec& g, double gamma, double beta);

// Coordinate-wise sign of the coordinate-wise sum of sign vectors.
Vec majority_vote_aggregate(const std::vector<Vec>& signs);

enum class BaselineMode { clip, normalize };
// clip scales into the lambda ball; normalize returns a unit vector, mapping
// the zero vector to zero (flagged via *zero_flagged when provided).
Vec baseline_transform(const Vec& g, BaselineMode mode, double lambda = 1.0,
                       bool* zero_flagged = nullptr);

struct RunResult {
  RunTrace trace;
  OptimizerState state;
  std::optional<long long> plateau_switch_k;  // set when auto decay triggered
};

RunResult run_with_state(Method method, const Objective& obj, GradientOracle& oracle,
                         const TuningPlan& plan, long long T, const Vec& x1,
                         double clip_lambda = 1.0);
RunTrace run(Method method, const Objective& obj, GradientOracle& oracle,
             const TuningPlan& plan, long long T, const Vec& x1,
             double clip_lambda = 1.0);

struct RestartResult {
  RunTrace trace;
  Vec x_out;
  std::vector<long long> round_ends;  // global iteration index at each round end
};

// Restarted wrapper: tau = ceil(log2(delta/epsilon)) rounds of the base
// method with per-round theorem parameters; each round starts from the
// previous round's minimal-l2-gradient point.
RestartResult restarted_run(RestartMode mode, const Objective& obj,
                            GradientOracle& oracle, ProblemFacts facts,
                            const Vec& x1);

}  // namespace signbench
