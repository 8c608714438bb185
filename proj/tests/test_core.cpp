#include <doctest.h>

#include <cmath>

#include "signbench/core.hpp"
#include "signbench/problems.hpp"
#include "signbench/rng.hpp"

using namespace signbench;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(long(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("sign_vec basic values and tie rule") {
  Vec s = sign_vec(vec({2.0, -3.5, 0.0}));
  CHECK(s[0] == 1.0);
  CHECK(s[1] == -1.0);
  CHECK(s[2] == 0.0);
  CHECK(sign_vec(vec({0.0, 0.0})).isZero());
}

TEST_CASE("sign_vec on an analytic gradient") {
  // grad of ||x||^4 at (1,-2) is 4*||x||^2*x = (20,-40)
  Objective f = make_power_norm(2, 2);
  Vec g = f.grad(vec({1.0, -2.0}));
  CHECK(g[0] == doctest::Approx(20.0));
  CHECK(g[1] == doctest::Approx(-40.0));
  Vec s = sign_vec(g);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == -1.0);
}

TEST_CASE("sign_vec symmetry and positive-scale invariance") {
  auto rng = make_stream(1);
  std::normal_distribution<double> n;
  for (int t = 0; t < 100; ++t) {
    Vec v(5);
    for (int i = 0; i < 5; ++i) v[i] = n(rng);
    CHECK((sign_vec(-v) + sign_vec(v)).isZero());
    CHECK(sign_vec(3.7 * v) == sign_vec(v));
  }
}

TEST_CASE("sign_vec rejects non-finite input") {
  Vec v = vec({1.0, std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS_AS(sign_vec(v), std::invalid_argument);
}

TEST_CASE("lp_norm values") {
  Vec v = vec({3.0, 4.0});
  CHECK(lp_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(lp_norm(v, 1.0) == doctest::Approx(7.0));
  CHECK(lp_norm(v, std::numeric_limits<double>::infinity()) == doctest::Approx(4.0));
  CHECK_THROWS_AS(lp_norm(v, 0.5), std::invalid_argument);
  // all-ones: l1 = d = sqrt(d) * l2 (equality case of the norm relation)
  int d = 9;
  Vec ones = Vec::Ones(d);
  CHECK(lp_norm(ones, 1.0) == doctest::Approx(double(d)));
  CHECK(lp_norm(ones, 1.0) == doctest::Approx(std::sqrt(double(d)) * lp_norm(ones, 2.0)));
}

TEST_CASE("norm relation on random vectors") {
  // ||v||_q <= ||v||_p <= d^{1/p-1/q} ||v||_q for p <= q
  auto rng = make_stream(2);
  std::normal_distribution<double> n;
  const int d = 7;
  for (int t = 0; t < 10000; ++t) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = n(rng);
    for (double p : {1.0, 1.5}) {
      for (double q : {1.5, 2.0}) {
        if (q < p) continue;
        double np = lp_norm(v, p), nq = lp_norm(v, q);
        CHECK(nq <= np * (1 + 1e-12));
        CHECK(np <= std::pow(double(d), 1.0 / p - 1.0 / q) * nq * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("grad_check is exact on quadratics") {
  Objective q = make_quadratic(Mat::Identity(3, 3), Vec::Zero(3));
  CHECK(grad_check(q, vec({0.3, -1.2, 2.0}), 1e-5) < 1e-8);
}

TEST_CASE("grad_check flags a negated gradient") {
  Objective q = make_quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  Objective bad = q;
  auto g = q.grad;
  bad.grad = [g](const Vec& x) -> Vec { return -g(x); };
  double err = grad_check(bad, vec({1.0, 2.0}), 1e-5);
  CHECK(err == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("grad_check reports the overflowing coordinate") {
  Objective f;
  f.dim = 2;
  f.value = [](const Vec& x) { return x[1] > 0.5 ? HUGE_VAL : x.squaredNorm(); };
  f.grad = [](const Vec& x) -> Vec { return 2 * x; };
  try {
    grad_check(f, vec({0.0, 0.5}), 1e-3);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.coord == 1);
  }
}

TEST_CASE("trace_metrics") {
  RunTrace t;
  TraceRecord r;
  r.k = 1;
  r.grad_l1 = 3.0;
  r.grad_l2 = 2.0;
  t.records.push_back(r);
  CHECK(trace_metrics(t, Metric::avg_l1) == doctest::Approx(3.0));
  r.k = 2;
  r.grad_l1 = 5.0;  // mean of 3 and 5 is 4... spec wants 2,4 -> 3
  t.records.back().grad_l1 = 2.0;
  r.grad_l1 = 4.0;
  t.records.push_back(r);
  CHECK(trace_metrics(t, Metric::avg_l1) == doctest::Approx(3.0));
  CHECK(trace_metrics(t, Metric::min_l1) == doctest::Approx(2.0));
  CHECK(trace_metrics(t, Metric::avg_l1) >= trace_metrics(t, Metric::min_l1));
  CHECK_THROWS(trace_metrics(t, Metric::final_func_gap));  // no func_gap recorded
  t.records.back().func_gap = 0.25;
  t.records.front().func_gap = 1.0;
  CHECK(trace_metrics(t, Metric::final_func_gap) == doctest::Approx(0.25));
}

TEST_CASE("tail_mean_l1") {
  RunTrace t;
  for (int k = 1; k <= 10; ++k) {
    TraceRecord r;
    r.k = k;
    r.grad_l1 = double(k);
    t.records.push_back(r);
  }
  CHECK(tail_mean_l1(t, 4) == doctest::Approx((7 + 8 + 9 + 10) / 4.0));
  CHECK(tail_mean_l1(t, 100) == doctest::Approx(5.5));  // window clamps to size
}

TEST_CASE("fnv1a is stable and input-sensitive") {
  CHECK(fnv1a("abc") == fnv1a("abc"));
  CHECK(fnv1a("abc") != fnv1a("abd"));
  CHECK(fnv1a("") == 14695981039346656037ULL);
}

TEST_CASE("make_stream gives decorrelated reproducible streams") {
  auto a1 = make_stream(42, 0);
  auto a2 = make_stream(42, 0);
  auto b = make_stream(42, 1);
  CHECK(a1() == a2());
  auto c = make_stream(43, 0);
  CHECK(make_stream(42, 0)() != b());
  CHECK(make_stream(42, 0)() != c());
}
