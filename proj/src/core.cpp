#include "signbench/core.hpp"

#include <cmath>
#include <limits>

namespace signbench {

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

Vec sign_vec(const Vec& v) {
  require_finite(v, "sign_vec");
  Vec s(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    s[i] = (v[i] > 0.0) ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
  return s;
}

double lp_norm(const Vec& v, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), p);
  return std::pow(acc, 1.0 / p);
}

double grad_check(const Objective& obj, const Vec& x, double h) {
  if (h <= 0.0) throw std::invalid_argument("grad_check: h must be > 0");
  Vec g = obj.grad(x);
  double worst = 0.0;
  Vec xp = x;
  for (int i = 0; i < obj.dim; ++i) {
    xp[i] = x[i] + h;
    double fp = obj.value(xp);
    xp[i] = x[i] - h;
    double fm = obj.value(xp);
    xp[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw EvalError("grad_check: value overflow at coordinate " + std::to_string(i), i);
    double fd = (fp - fm) / (2.0 * h);
    double err = std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

double trace_metrics(const RunTrace& trace, Metric metric) {
  if (trace.records.empty())
    throw std::invalid_argument("trace_metrics: empty trace");
  switch (metric) {
    case Metric::avg_l1: {
      double s = 0.0;
      for (const auto& r : trace.records) s += r.grad_l1;
      return s / double(trace.records.size());
    }
    case Metric::avg_l2: {
      double s = 0.0;
      for (const auto& r : trace.records) s += r.grad_l2;
      return s / double(trace.records.size());
    }
    case Metric::min_l1: {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& r : trace.records) m = std::min(m, r.grad_l1);
      return m;
    }
    case Metric::final_func_gap: {
      const auto& last = trace.records.back();
      if (!last.func_gap)
        throw std::runtime_error("trace_metrics: func_gap needs a known optimum value");
      return *last.func_gap;
    }
  }
  throw std::logic_error("trace_metrics: unknown metric");
}

double tail_mean_l1(const RunTrace& trace, std::size_t window) {
  if (trace.records.empty())
    throw std::invalid_argument("tail_mean_l1: empty trace");
  std::size_t n = std::min(window, trace.records.size());
  double s = 0.0;
  for (std::size_t i = trace.records.size() - n; i < trace.records.size(); ++i)
    s += trace.records[i].grad_l1;
  return s / double(n);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace signbench
