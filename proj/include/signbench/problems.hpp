#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>

#include "signbench/core.hpp"

namespace signbench {

struct Dataset {
  Mat X;  // n x d
  Vec y;  // entries in {-1, +1}
  std::string name;
};

// Example-family objectives with declared generalized-smoothness constants.
Objective make_power_norm(int n, int d);
Objective make_exp_inner(const Vec& a);
Objective make_quadratic(const Mat& A, const Vec& b);

// Aggregate-logit logistic objective
//   f(theta) = log(1 + exp(-<y, X theta>)) + (lam_l0/2)||theta||^2
//              + exp(lam_l1 <1, theta>)            [last term only if lam_l1 > 0]
Objective make_logistic_linear(const Dataset& data, double lam_l0, double lam_l1);

// Small fixed-architecture net (d -> 32 -> 1, ReLU, batch-norm in inference
// mode) on the same aggregate-logit loss; gradients are hand-derived backprop.
// Dropout (rate 0.1 on hidden activations) enters only through the stochastic
// gradient hook. Best-effort: no valid smoothness constants are declared.
Objective make_logistic_nn(const Dataset& data, double lam_l0, double lam_l1,
                           double dropout = 0.1);

// LibSVM sparse text reader; labels {1,2} map to {+1,-1}; 1-based indices.
Dataset load_libsvm(const std::string& path, std::optional<int> expected_dim = {});
void save_libsvm(const Dataset& data, const std::string& path);

// Deterministic synthetic stand-in for the mushrooms train split: one active
// column per categorical group, labels from a noisy linear rule, features
// rescaled so that ||X^T y||_2 hits target_a_norm.
Dataset make_synthetic_mushrooms(int rows = 6499, int dim = 112,
                                 std::uint64_t seed = 20250817,
                                 double target_a_norm = 5.58);

// Resolve a dataset file: absolute/relative as-is, else under $SIGNBENCH_DATA_DIR.
std::string resolve_data_path(const std::string& name);

struct SmoothnessCertificate {
  bool passed = true;
  double worst_ratio = 0.0;  // max over pairs of lhs / rhs
  std::optional<std::pair<Vec, Vec>> witness;
};

// Check ||grad f(x) - grad f(y)|| <= (L0 + L1 sup_segment ||grad f||) ||x-y||
// on random pairs inside the radius ball around `center` (origin by default);
// the segment supremum is approximated by 11 evenly spaced interior points.
SmoothnessCertificate verify_l0l1_smoothness(const Objective& obj, int n_pairs,
                                             double radius, std::mt19937_64& rng,
                                             const Vec* center = nullptr);

}  // namespace signbench
