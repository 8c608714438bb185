#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

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

std::string tmp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("power_norm values, gradient, metadata") {
  Objective f = make_power_norm(2, 2);
  CHECK(f.value(vec({1.0, -2.0})) == doctest::Approx(25.0));
  Vec g = f.grad(vec({1.0, -2.0}));
  CHECK(g[0] == doctest::Approx(20.0));
  CHECK(g[1] == doctest::Approx(-40.0));
  CHECK(f.value(Vec::Zero(2)) == 0.0);
  CHECK(f.grad(Vec::Zero(2)).isZero());
  CHECK(f.l0 == doctest::Approx(4.0));  // (2n, 2n-1)
  CHECK(f.l1 == doctest::Approx(3.0));
  CHECK(*f.f_star == 0.0);
  CHECK_THROWS_AS(make_power_norm(0, 2), std::invalid_argument);
}

TEST_CASE("exp_inner values, gradient, metadata, clamp") {
  Vec a = vec({0.5, -1.0});
  Objective f = make_exp_inner(a);
  CHECK(f.value(Vec::Zero(2)) == doctest::Approx(1.0));
  CHECK(f.grad(Vec::Zero(2)) == a);
  CHECK(f.l0 == 0.0);
  CHECK(f.l1 == doctest::Approx(a.norm()));

  Objective c = make_exp_inner(vec({0.0, 0.0}));
  CHECK(c.value(vec({5.0, -3.0})) == doctest::Approx(1.0));
  CHECK(c.grad(vec({5.0, -3.0})).isZero());

  auto rng = make_stream(20);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    Vec x(2);
    x << n(rng), n(rng);
    CHECK(grad_check(f, x, 1e-6) < 1e-6);
  }

  CHECK_THROWS_AS(f.value(vec({2000.0, 0.0})), EvalError);
}

TEST_CASE("quadratic values and metadata") {
  Objective f = make_quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  CHECK(f.value(vec({3.0, 4.0})) == doctest::Approx(12.5));
  CHECK(f.grad(vec({3.0, 4.0})) == vec({3.0, 4.0}));

  Vec diag(2);
  diag << 1, 4;
  Objective g = make_quadratic(Mat(diag.asDiagonal()), Vec::Zero(2));
  CHECK(*g.mu == doctest::Approx(1.0));
  CHECK(g.l0 == doctest::Approx(4.0));
  CHECK(g.l1 == 0.0);

  Mat bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(make_quadratic(bad, Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("quadratic PL equality in the isotropic case") {
  double mu = 2.0;
  Objective f = make_quadratic(mu * Mat::Identity(3, 3), vec({1.0, -1.0, 0.5}));
  auto rng = make_stream(21);
  std::normal_distribution<double> n;
  for (int t = 0; t < 50; ++t) {
    Vec x(3);
    x << n(rng), n(rng), n(rng);
    double lhs = f.grad(x).squaredNorm();
    double rhs = 2 * mu * (f.value(x) - *f.f_star);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("logistic_linear analytic origin values") {
  Dataset data = make_synthetic_mushrooms(64, 8, 1, 2.0);
  double lam_l1 = 0.01;
  Objective f = make_logistic_linear(data, 0.0, lam_l1);
  CHECK(f.value(Vec::Zero(8)) == doctest::Approx(std::log(2.0) + 1.0));
  Vec a = data.X.transpose() * data.y;
  Vec g = f.grad(Vec::Zero(8));
  for (int i = 0; i < 8; ++i)
    CHECK(g[i] == doctest::Approx(-0.5 * a[i] + lam_l1));
  CHECK(f.l0 == 0.0);
  CHECK(f.l1 == doctest::Approx(a.norm() + lam_l1 * std::sqrt(8.0)));
}

TEST_CASE("logistic_linear gradient check at random points") {
  Dataset data = make_synthetic_mushrooms(128, 10, 2, 3.0);
  Objective f = make_logistic_linear(data, 0.01, 0.001);
  auto rng = make_stream(22);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    Vec x(10);
    for (int i = 0; i < 10; ++i) x[i] = 0.5 * n(rng);
    CHECK(grad_check(f, x, 1e-6) < 1e-5);
  }
}

TEST_CASE("logistic value decreases along the negative gradient ray") {
  Dataset data = make_synthetic_mushrooms(64, 6, 3, 2.0);
  Objective f = make_logistic_linear(data, 0.01, 0.001);
  auto rng = make_stream(23);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    Vec x(6);
    for (int i = 0; i < 6; ++i) x[i] = 0.3 * n(rng);
    Vec g = f.grad(x);
    if (g.norm() < 1e-12) continue;
    CHECK(f.value(x - 1e-6 * g) <= f.value(x));
  }
}

TEST_CASE("logistic_nn evaluates and backprop matches finite differences") {
  Dataset data = make_synthetic_mushrooms(32, 6, 4, 2.0);
  Objective f = make_logistic_nn(data, 0.01, 0.001, 0.1);
  CHECK_FALSE(f.smoothness_declared);
  REQUIRE(f.grad_noisy);
  auto rng = make_stream(24);
  std::normal_distribution<double> n;
  for (int t = 0; t < 5; ++t) {
    Vec x(f.dim);
    for (int i = 0; i < f.dim; ++i) x[i] = 0.2 * n(rng);
    CHECK(grad_check(f, x, 1e-6) < 1e-5);
  }
  // the dropout hook is unbiased-ish in expectation but certainly dimensioned
  auto r2 = make_stream(25);
  Vec x = 0.1 * Vec::Ones(f.dim);
  CHECK(f.grad_noisy(x, r2).size() == f.dim);
  CHECK_THROWS_AS(make_logistic_nn(data, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("libsvm loader basics") {
  std::string path = tmp_file("sb_libsvm_basic.txt");
  {
    std::ofstream out(path);
    out << "1 1:0.5 3:-2\n2 2:1\n";
  }
  Dataset d = load_libsvm(path, 3);
  CHECK(d.X.rows() == 2);
  CHECK(d.X.cols() == 3);
  CHECK(d.X(0, 0) == doctest::Approx(0.5));
  CHECK(d.X(0, 1) == 0.0);
  CHECK(d.X(0, 2) == doctest::Approx(-2.0));
  CHECK(d.y[0] == 1.0);
  CHECK(d.y[1] == -1.0);  // label 2 -> -1
  std::remove(path.c_str());
}

TEST_CASE("libsvm loader rejects malformed input") {
  std::string path = tmp_file("sb_libsvm_bad.txt");
  {
    std::ofstream out(path);
    out << "1 1:0.5\n3 1:1\n";  // label 3 invalid
  }
  CHECK_THROWS_WITH_AS(load_libsvm(path), doctest::Contains("line 2"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << "1 0:0.5\n";  // 0-based index
  }
  CHECK_THROWS_AS(load_libsvm(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "\n\n";
  }
  CHECK_THROWS_AS(load_libsvm(path), std::runtime_error);  // empty dataset
  std::remove(path.c_str());
}

TEST_CASE("libsvm round-trip is idempotent") {
  Dataset d = make_synthetic_mushrooms(50, 12, 5, 1.5);
  std::string p1 = tmp_file("sb_rt1.txt"), p2 = tmp_file("sb_rt2.txt");
  save_libsvm(d, p1);
  Dataset d2 = load_libsvm(p1, 12);
  save_libsvm(d2, p2);
  std::ifstream f1(p1), f2(p2);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  CHECK(d2.X == d.X);
  CHECK(d2.y == d.y);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("synthetic dataset shape, labels, and calibrated norm") {
  Dataset d = make_synthetic_mushrooms(6499, 112, 20250817, 5.58);
  CHECK(d.X.rows() == 6499);
  CHECK(d.X.cols() == 112);
  for (int i = 0; i < d.y.size(); ++i) CHECK(std::abs(d.y[i]) == 1.0);
  CHECK((d.X.transpose() * d.y).norm() == doctest::Approx(5.58).epsilon(1e-9));
  // deterministic
  Dataset e = make_synthetic_mushrooms(6499, 112, 20250817, 5.58);
  CHECK(d.X == e.X);
  CHECK(d.y == e.y);
}

TEST_CASE("smoothness certificates for the example objectives") {
  auto rng = make_stream(26);
  SUBCASE("exp_inner passes with declared constants") {
    Objective f = make_exp_inner(vec({0.6, -0.8, 0.3}));
    auto cert = verify_l0l1_smoothness(f, 2000, 1.0, rng);
    CHECK(cert.passed);
  }
  SUBCASE("exp_inner with halved L1 yields a witness") {
    Objective f = make_exp_inner(vec({0.6, -0.8, 0.3}));
    f.l1 *= 0.5;
    auto cert = verify_l0l1_smoothness(f, 10000, 1.0, rng);
    CHECK_FALSE(cert.passed);
    CHECK(cert.witness.has_value());
    CHECK(cert.worst_ratio > 1.0);
  }
  SUBCASE("quadratic passes with worst ratio at most 1") {
    Vec diag(3);
    diag << 1, 2.5, 4;
    Objective f = make_quadratic(Mat(diag.asDiagonal()), Vec::Ones(3));
    auto cert = verify_l0l1_smoothness(f, 2000, 1.0, rng);
    CHECK(cert.passed);
    CHECK(cert.worst_ratio <= 1.0 + 1e-9);
  }
  SUBCASE("power_norm passes") {
    Objective f = make_power_norm(2, 3);
    auto cert = verify_l0l1_smoothness(f, 2000, 1.0, rng);
    CHECK(cert.passed);
  }
}

TEST_CASE("resolve_data_path falls back to the data dir") {
  CHECK_THROWS_AS(resolve_data_path("definitely_not_here.libsvm"),
                  std::runtime_error);
}
