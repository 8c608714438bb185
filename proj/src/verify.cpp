#include "signbench/verify.hpp"

#include <cmath>
#include <sstream>

namespace signbench {

namespace {

struct MeanVar {
  double mean = 0.0, m2 = 0.0;
  long long n = 0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  double se() const { return n > 1 ? std::sqrt(m2 / double(n - 1) / double(n)) : 0.0; }
};

}  // namespace

BoundCheckReport check_batching_lemma(
    const std::function<double(std::mt19937_64&)>& sampler, const std::string& label,
    int d, int B, double kappa, long long n_trials, std::mt19937_64& rng) {
  if (d < 1 || B < 1 || n_trials < 1)
    throw std::invalid_argument("check_batching_lemma: bad configuration");
  if (!(kappa > 0.0))
    throw std::invalid_argument("check_batching_lemma: kappa > 0");
  MeanVar lhs, rhs;
  Vec mean(d), x(d);
  for (long long t = 0; t < n_trials; ++t) {
    mean.setZero();
    double sum_moments = 0.0;
    for (int i = 0; i < B; ++i) {
      for (int j = 0; j < d; ++j) x[j] = sampler(rng);
      mean += x;
      sum_moments += std::pow(x.norm(), kappa);
    }
    mean /= double(B);
    lhs.add(std::pow(mean.norm(), kappa));
    rhs.add(2.0 / std::pow(double(B), kappa) * sum_moments);
  }
  BoundCheckReport rep;
  rep.trials = n_trials;
  double slack = rhs.mean + 3.0 * std::hypot(lhs.se(), rhs.se()) - lhs.mean;
  rep.worst_slack = slack;
  rep.violations = slack < 0.0 ? 1 : 0;
  std::ostringstream ps;
  ps << "dist=" << label << " d=" << d << " B=" << B << " kappa=" << kappa;
  rep.parameters = ps.str();
  return rep;
}

BoundCheckReport check_batching_lemma(const NoiseModel& dist, int d, int B,
                                      double kappa, long long n_trials,
                                      std::mt19937_64& rng) {
  NoiseModel m = dist;
  if (m.scale.size() != d) m.scale = Vec::Ones(d);
  auto sampler = [&m](std::mt19937_64& r) { return noise_draw(m, 0, r); };
  return check_batching_lemma(sampler, to_string(m.family), d, B, kappa, n_trials,
                              rng);
}

double exact_majority_failure(double q, int M) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("exact_majority_failure: q in [0,1]");
  if (M < 1) throw std::invalid_argument("exact_majority_failure: M >= 1");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  // P[failures >= M/2], failures ~ Bin(M, q); even M counts the tie j = M/2
  int j0 = (M + 1) / 2;
  if (M % 2 == 0) j0 = M / 2;
  double lq = std::log(q), l1q = std::log1p(-q);
  double p = 0.0;
  for (int j = j0; j <= M; ++j) {
    double lb = std::lgamma(M + 1.0) - std::lgamma(j + 1.0) - std::lgamma(M - j + 1.0);
    p += std::exp(lb + j * lq + (M - j) * l1q);
  }
  return std::min(1.0, p);
}

double majority_failure_bound(const MajorityFailureModel& model) {
  double eps = model.epsilon_margin();
  if (!(eps > 0.0))
    throw std::invalid_argument("majority_failure_bound: needs q < 1/2");
  if (model.M < 1) throw std::invalid_argument("majority_failure_bound: M >= 1");
  double denom = 1.0 / (4.0 * eps * eps) - 1.0;
  if (denom <= 0.0) return 0.0;  // q -> 0 continuity extension
  return 1.0 / (1.0 + double(model.M) / denom);
}

double gauss_tail_bound(double kappa, double tau, double moment) {
  if (!(kappa > 0.0)) throw std::invalid_argument("gauss_tail_bound: kappa > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("gauss_tail_bound: tau > 0");
  if (moment < 0.0) throw std::invalid_argument("gauss_tail_bound: moment >= 0");
  double tk = std::pow(tau, kappa);
  double boundary = std::pow(kappa, kappa) / std::pow(kappa + 1.0, kappa - 1.0) * moment;
  if (tk >= boundary)
    return std::pow(kappa / (kappa + 1.0), kappa) * moment / tk;
  return 1.0 - std::pow(tk / ((kappa + 1.0) * moment), 1.0 / kappa);
}

BoundCheckReport check_sign_update_lemma(const Objective& obj, long long n_trials,
                                         double gamma_max, std::mt19937_64& rng) {
  if (!(gamma_max > 0.0))
    throw std::invalid_argument("check_sign_update_lemma: gamma_max > 0");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sd = std::sqrt(double(obj.dim));
  BoundCheckReport rep;
  rep.parameters = "obj=" + obj.name;
  for (long long t = 0; t < n_trials; ++t) {
    Vec x(obj.dim), e(obj.dim);
    for (int i = 0; i < obj.dim; ++i) {
      x[i] = gauss(rng);
      e[i] = 0.5 * gauss(rng);
    }
    Vec g = obj.grad(x);
    Vec m = g + e;
    double gamma = gamma_max * std::max(unif(rng), 1e-6);
    Vec xp = x - gamma * sign_vec(m);
    double lhs = obj.value(xp) - obj.value(x);
    double rhs = -gamma * lp_norm(g, 1.0) + 2.0 * gamma * sd * (m - g).norm() +
                 0.5 * (obj.l0 + obj.l1 * g.norm()) *
                     std::exp(gamma * obj.l1 * sd) * gamma * gamma * double(obj.dim);
    ++rep.trials;
    double tol = 1e-12 * std::max(1.0, std::abs(rhs));
    if (lhs > rhs + tol) ++rep.violations;
    rep.worst_slack = std::min(rep.worst_slack, rhs - lhs);
  }
  return rep;
}

BoundCheckReport check_pl_condition(const Objective& obj, long long n_points,
                                    std::mt19937_64& rng) {
  if (!obj.mu || !obj.f_star)
    throw std::runtime_error("check_pl_condition: objective needs mu and f_star");
  std::normal_distribution<double> gauss(0.0, 1.0);
  BoundCheckReport rep;
  rep.parameters = "obj=" + obj.name;
  for (long long t = 0; t < n_points; ++t) {
    Vec x(obj.dim);
    for (int i = 0; i < obj.dim; ++i) x[i] = gauss(rng);
    double lhs = obj.grad(x).squaredNorm();
    double rhs = 2.0 * (*obj.mu) * (obj.value(x) - *obj.f_star);
    ++rep.trials;
    double tol = 1e-12 * std::max(1.0, std::abs(rhs));
    if (lhs < rhs - tol) ++rep.violations;
    rep.worst_slack = std::min(rep.worst_slack, lhs - rhs);
  }
  return rep;
}

}  // namespace signbench
