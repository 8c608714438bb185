#pragma once

#include <random>
#include <vector>

#include "signbench/core.hpp"

namespace signbench {

enum class NoiseFamily { none, gaussian, stable, student_t };

// Per-coordinate symmetric noise spec. tail_index is alpha for the stable
// family and the degrees of freedom for student_t; ignored otherwise.
// Stable draws follow the S1 convention S(alpha, beta=0, sigma, 0), so
// alpha=2 is a Gaussian with standard deviation sqrt(2)*sigma.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::none;
  double tail_index = 2.0;
  Vec scale;  // sigma_i >= 0, one per coordinate
  bool symmetric = true;
};

NoiseFamily noise_family_from(const std::string& name);
std::string to_string(NoiseFamily f);

// One draw from the symmetric alpha-stable law S(alpha, 0, scale, 0) using
// the Chambers-Mallows-Stuck construction (dedicated alpha=1 closed form).
double sample_stable(double alpha, double scale, std::mt19937_64& rng);

// One scalar noise draw for coordinate i of the model.
double noise_draw(const NoiseModel& model, int i, std::mt19937_64& rng);

// g + eta, eta_i independent symmetric with scale sigma_i.
Vec corrupt_gradient(const Vec& g, const NoiseModel& model, std::mt19937_64& rng);

// (1/n) sum |s_j|^kappa
double empirical_moment(const std::vector<double>& samples, double kappa);

}  // namespace signbench
