#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace signbench {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when an objective evaluation overflows/diverges; carries the
// offending coordinate when known (-1 otherwise).
struct EvalError : std::runtime_error {
  int coord;
  explicit EvalError(const std::string& msg, int c = -1)
      : std::runtime_error(msg), coord(c) {}
};

void require_finite(const Vec& v, const char* what);

// Coordinate-wise sign with the tie rule sign(0) = 0.
Vec sign_vec(const Vec& v);

// lp norm for p in [1, inf]; pass std::numeric_limits<double>::infinity()
// for the max norm. p < 1 is rejected.
double lp_norm(const Vec& v, double p);

struct Objective {
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  // Optional stochastic gradient hook (e.g. dropout); when set, oracles call
  // this instead of grad() before adding coordinate noise.
  std::function<Vec(const Vec&, std::mt19937_64&)> grad_noisy;
  double l0 = 0.0;  // generalized-smoothness constants
  double l1 = 0.0;
  bool smoothness_declared = true;  // false for best-effort objectives
  std::optional<double> mu;         // PL constant
  std::optional<double> f_star;     // optimal value
  std::string name;
};

// Max over coordinates of |central difference - analytic| / max(1, |analytic|).
double grad_check(const Objective& obj, const Vec& x, double h);

struct TraceRecord {
  long long k = 0;
  double gamma = 0.0;
  long long batch = 1;
  double grad_l1 = 0.0;
  double grad_l2 = 0.0;
  std::optional<double> func_gap;
  long long samples = 0;  // cumulative oracle samples
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::uint64_t seed = 0;
  std::string config_digest;
  bool stepsize_cap_warning = false;
};

enum class Metric { avg_l1, avg_l2, min_l1, final_func_gap };

double trace_metrics(const RunTrace& trace, Metric metric);

// Mean of grad_l1 over the trailing `window` records (plateau level readout).
double tail_mean_l1(const RunTrace& trace, std::size_t window);

// FNV-1a over a string; used for config digests.
std::uint64_t fnv1a(const std::string& s);

}  // namespace signbench
