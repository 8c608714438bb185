#include "signbench/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace signbench {

namespace {

const double kPi = std::numbers::pi;

double uniform_open(std::mt19937_64& rng) {
  // (0,1) exclusive on both sides to keep logs/tans finite
  std::uniform_real_distribution<double> u(std::numeric_limits<double>::min(), 1.0);
  return u(rng);
}

double gaussian01(std::mt19937_64& rng) {
  // Box-Muller, one deviate per call (fixed consumption of two uniforms)
  double u1 = uniform_open(rng);
  double u2 = uniform_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace

NoiseFamily noise_family_from(const std::string& name) {
  if (name == "none") return NoiseFamily::none;
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "stable") return NoiseFamily::stable;
  if (name == "student_t") return NoiseFamily::student_t;
  throw std::invalid_argument("unknown noise family: " + name);
}

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::none: return "none";
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::stable: return "stable";
    case NoiseFamily::student_t: return "student_t";
  }
  return "?";
}

double sample_stable(double alpha, double scale, std::mt19937_64& rng) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw std::invalid_argument("sample_stable: alpha must be in (0,2]");
  if (scale < 0.0)
    throw std::invalid_argument("sample_stable: scale must be >= 0");
  double u = (uniform_open(rng) - 0.5) * kPi;             // U ~ Uniform(-pi/2, pi/2)
  double w = -std::log(uniform_open(rng));                // W ~ Exp(1)
  if (scale == 0.0) return 0.0;
  if (alpha == 1.0) return scale * std::tan(u);           // Cauchy closed form
  double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
             std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
  return scale * x;
}

double noise_draw(const NoiseModel& model, int i, std::mt19937_64& rng) {
  double s = model.scale.size() ? model.scale[i] : 0.0;
  switch (model.family) {
    case NoiseFamily::none:
      return 0.0;
    case NoiseFamily::gaussian:
      return s * gaussian01(rng);
    case NoiseFamily::stable:
      return sample_stable(model.tail_index, s, rng);
    case NoiseFamily::student_t: {
      double nu = model.tail_index;
      if (!(nu > 0.0))
        throw std::invalid_argument("student_t needs tail_index > 0");
      double z = gaussian01(rng);
      std::gamma_distribution<double> chi(nu / 2.0, 2.0);  // chi^2_nu
      double c = chi(rng);
      return s * z / std::sqrt(c / nu);
    }
  }
  throw std::logic_error("noise_draw: unknown family");
}

Vec corrupt_gradient(const Vec& g, const NoiseModel& model, std::mt19937_64& rng) {
  if (model.family == NoiseFamily::none) return g;
  if (model.scale.size() != g.size())
    throw std::invalid_argument("corrupt_gradient: scale/gradient dimension mismatch");
  if (model.family == NoiseFamily::stable &&
      (!(model.tail_index > 0.0) || model.tail_index > 2.0))
    throw std::invalid_argument("corrupt_gradient: stable tail_index out of (0,2]");
  Vec out = g;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    out[i] += noise_draw(model, int(i), rng);
  return out;
}

double empirical_moment(const std::vector<double>& samples, double kappa) {
  if (samples.empty())
    throw std::invalid_argument("empirical_moment: empty sample list");
  if (!(kappa > 0.0))
    throw std::invalid_argument("empirical_moment: kappa must be > 0");
  double acc = 0.0;
  for (double s : samples) acc += std::pow(std::abs(s), kappa);
  return acc / double(samples.size());
}

}  // namespace signbench
