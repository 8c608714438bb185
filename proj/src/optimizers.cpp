#include "signbench/optimizers.hpp"

#include <cmath>

#include "signbench/rng.hpp"

namespace signbench {

Method method_from(const std::string& name) {
  if (name == "signsgd") return Method::signsgd;
  if (name == "minibatch_signsgd") return Method::minibatch_signsgd;
  if (name == "majority_signsgd") return Method::majority_signsgd;
  if (name == "m_signsgd") return Method::m_signsgd;
  if (name == "clip_sgd") return Method::clip_sgd;
  if (name == "nsgd") return Method::nsgd;
  if (name == "m_nsgd") return Method::m_nsgd;
  if (name == "m_clipsgd") return Method::m_clipsgd;
  throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::signsgd: return "signsgd";
    case Method::minibatch_signsgd: return "minibatch_signsgd";
    case Method::majority_signsgd: return "majority_signsgd";
    case Method::m_signsgd: return "m_signsgd";
    case Method::clip_sgd: return "clip_sgd";
    case Method::nsgd: return "nsgd";
    case Method::m_nsgd: return "m_nsgd";
    case Method::m_clipsgd: return "m_clipsgd";
  }
  return "?";
}

std::mt19937_64& GradientOracle::stream(int j) {
  if (j < 0) throw std::invalid_argument("oracle stream index must be >= 0");
  while (int(streams_.size()) <= j)
    streams_.push_back(make_stream(seed_, streams_.size()));
  return streams_[j];
}

Vec GradientOracle::sample(const Vec& x, int j) {
  Vec g = obj_->grad_noisy ? obj_->grad_noisy(x, stream(j)) : obj_->grad(x);
  ++sample_counter_;
  return corrupt_gradient(g, noise_, stream(j));
}

Vec GradientOracle::minibatch(const Vec& x, long long B, int j) {
  if (B < 1) throw std::invalid_argument("minibatch size must be >= 1");
  Vec acc = sample(x, j);
  for (long long i = 1; i < B; ++i) acc += sample(x, j);
  return acc / double(B);
}

Vec minibatch_gradient(GradientOracle& oracle, const Vec& x, long long B) {
  return oracle.minibatch(x, B);
}

OptimizerState make_state(const Objective& obj, const Vec& x1) {
  if (x1.size() != obj.dim)
    throw std::invalid_argument("make_state: x1 dimension mismatch");
  OptimizerState st;
  st.x = x1;
  st.obj = &obj;
  st.m = Vec::Zero(obj.dim);
  st.last_true_grad = obj.grad(x1);
  st.best_x = x1;
  st.best_grad_l2 = st.last_true_grad.norm();
  return st;
}

namespace {

void finish_step(OptimizerState& state) {
  ++state.k;
  state.last_true_grad = state.obj->grad(state.x);
  double n2 = state.last_true_grad.norm();
  if (n2 < state.best_grad_l2) {
    state.best_grad_l2 = n2;
    state.best_x = state.x;
  }
}

}  // namespace

void signsgd_step(OptimizerState& state, const Vec& g, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("signsgd_step: gamma > 0");
  state.x -= gamma * sign_vec(g);
  finish_step(state);
}

void msignsgd_step(OptimizerState& state, const Vec& g, double gamma, double beta) {
  if (!(gamma > 0.0)) throw std::invalid_argument("msignsgd_step: gamma > 0");
  if (beta < 0.0 || beta >= 1.0)
    throw std::invalid_argument("msignsgd_step: beta in [0,1)");
  require_finite(g, "msignsgd_step");
  state.m = beta * state.m + (1.0 - beta) * g;
  state.x -= gamma * sign_vec(state.m);
  finish_step(state);
}

Vec majority_vote_aggregate(const std::vector<Vec>& signs) {
  if (signs.empty()) throw std::invalid_argument("majority_vote_aggregate: empty");
  Vec sum = Vec::Zero(signs.front().size());
  for (const Vec& s : signs) {
    if (s.size() != sum.size())
      throw std::invalid_argument("majority_vote_aggregate: dimension mismatch");
    sum += s;
  }
  return sign_vec(sum);
}

Vec baseline_transform(const Vec& g, BaselineMode mode, double lambda,
                       bool* zero_flagged) {
  require_finite(g, "baseline_transform");
  double n = g.norm();
  if (mode == BaselineMode::clip) {
    if (!(lambda > 0.0)) throw std::invalid_argument("clip: lambda > 0");
    return std::min(1.0, lambda / std::max(n, 1e-300)) * g;
  }
  if (n == 0.0) {
    if (zero_flagged) *zero_flagged = true;
    return g;
  }
  return g / n;
}

RunResult run_with_state(Method method, const Objective& obj, GradientOracle& oracle,
                         const TuningPlan& plan, long long T, const Vec& x1,
                         double clip_lambda) {
  if (T < 1) throw std::invalid_argument("run: T >= 1");
  RunResult res;
  res.state = make_state(obj, x1);
  OptimizerState& st = res.state;
  RunTrace& trace = res.trace;
  trace.seed = oracle.seed();
  trace.records.reserve(std::size_t(T));

  bool momentum = method == Method::m_signsgd || method == Method::m_nsgd ||
                  method == Method::m_clipsgd;
  long long switch_k = 0;
  const int W = plan.plateau_window;

  for (long long k = 1; k <= T; ++k) {
    double gamma;
    if (plan.auto_decay && switch_k > 0)
      gamma = plan.gamma(switch_k) / std::sqrt(double(k - switch_k + 1));
    else
      gamma = plan.gamma(k);
    if (gamma > plan.stepsize_cap) trace.stepsize_cap_warning = true;

    long long batch = plan.batch ? plan.batch(k) : 1;
    TraceRecord rec;
    rec.k = k;
    rec.gamma = gamma;
    rec.grad_l1 = lp_norm(st.last_true_grad, 1.0);
    rec.grad_l2 = st.last_true_grad.norm();
    if (obj.f_star) rec.func_gap = obj.value(st.x) - *obj.f_star;

    switch (method) {
      case Method::signsgd: {
        batch = 1;
        Vec g = oracle.sample(st.x);
        rec.batch = batch;
        rec.samples = oracle.sample_counter();
        trace.records.push_back(rec);
        signsgd_step(st, g, gamma);
        break;
      }
      case Method::minibatch_signsgd: {
        Vec g = oracle.minibatch(st.x, batch);
        rec.batch = batch;
        rec.samples = oracle.sample_counter();
        trace.records.push_back(rec);
        signsgd_step(st, g, gamma);
        break;
      }
      case Method::majority_signsgd: {
        // one single-sample voter per sub-stream, reduced in index order
        std::vector<Vec> signs;
        signs.reserve(std::size_t(batch));
        for (long long j = 0; j < batch; ++j)
          signs.push_back(sign_vec(oracle.sample(st.x, int(j))));
        Vec agg = majority_vote_aggregate(signs);
        rec.batch = batch;
        rec.samples = oracle.sample_counter();
        trace.records.push_back(rec);
        signsgd_step(st, agg, gamma);
        break;
      }
      case Method::m_signsgd: {
        batch = 1;
        double beta = plan.beta ? plan.beta(k) : 0.0;
        Vec g = oracle.sample(st.x);
        rec.batch = batch;
        rec.samples = oracle.sample_counter();
        trace.records.push_back(rec);
        msignsgd_step(st, g, gamma, beta);
        break;
      }
      case Method::clip_sgd:
      case Method::nsgd:
      case Method::m_nsgd:
      case Method::m_clipsgd: {
        batch = 1;
        Vec g = oracle.sample(st.x);
        rec.batch = batch;
        rec.samples = oracle.sample_counter();
        trace.records.push_back(rec);
        Vec dir = g;
        if (momentum) {
          double beta = plan.beta ? plan.beta(k) : 0.9;
          st.m = beta * st.m + (1.0 - beta) * g;
          dir = st.m;
        }
        BaselineMode bm = (method == Method::clip_sgd || method == Method::m_clipsgd)
                              ? BaselineMode::clip
                              : BaselineMode::normalize;
        st.x -= gamma * baseline_transform(dir, bm, clip_lambda);
        finish_step(st);
        break;
      }
    }

    if (plan.auto_decay && switch_k == 0 && W > 0 && k >= 2 * W && k % W == 0) {
      double m_prev = 0.0, m_curr = 0.0;
      for (long long i = k - 2 * W; i < k - W; ++i)
        m_prev += trace.records[std::size_t(i)].grad_l1;
      for (long long i = k - W; i < k; ++i)
        m_curr += trace.records[std::size_t(i)].grad_l1;
      m_prev /= W;
      m_curr /= W;
      if (m_prev > 0.0 && (m_prev - m_curr) / m_prev < plan.plateau_tol) {
        switch_k = k + 1;
        res.plateau_switch_k = switch_k;
      }
    }
  }
  return res;
}

RunTrace run(Method method, const Objective& obj, GradientOracle& oracle,
             const TuningPlan& plan, long long T, const Vec& x1,
             double clip_lambda) {
  return run_with_state(method, obj, oracle, plan, T, x1, clip_lambda).trace;
}

RestartResult restarted_run(RestartMode mode, const Objective& obj,
                            GradientOracle& oracle, ProblemFacts facts,
                            const Vec& x1) {
  if (!obj.mu || !obj.f_star)
    throw std::runtime_error("restarted_run: objective needs mu and f_star metadata");
  facts.mu = *obj.mu;
  RestartResult res;
  res.x_out = x1;
  auto rounds = restart_plan(facts, mode);
  Method method = mode == RestartMode::minibatch ? Method::minibatch_signsgd
                                                 : Method::majority_signsgd;
  long long k_off = 0;
  for (const TuningPlan& plan : rounds) {
    RunResult rr = run_with_state(method, obj, oracle, plan, plan.T, res.x_out);
    for (TraceRecord rec : rr.trace.records) {
      rec.k += k_off;
      res.trace.records.push_back(rec);
    }
    k_off += plan.T;
    res.round_ends.push_back(k_off);
    res.trace.stepsize_cap_warning |= rr.trace.stepsize_cap_warning;
    res.x_out = rr.state.best_x;  // minimal-l2-gradient point of the round
  }
  res.trace.seed = oracle.seed();
  return res;
}

}  // namespace signbench
