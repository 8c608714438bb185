#include "signbench/problems.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "signbench/rng.hpp"

namespace signbench {

namespace {

const double kExpClamp = 700.0;

double softplus(double t) {  // log(1 + exp(t)), overflow-safe
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

Objective make_power_norm(int n, int d) {
  if (n < 1) throw std::invalid_argument("make_power_norm: n must be >= 1");
  Objective obj;
  obj.dim = d;
  obj.l0 = 2.0 * n;
  obj.l1 = 2.0 * n - 1.0;
  obj.name = "power_norm(" + std::to_string(n) + ")";
  obj.f_star = 0.0;
  obj.value = [n](const Vec& x) { return std::pow(x.squaredNorm(), n); };
  obj.grad = [n](const Vec& x) -> Vec {
    double r2 = x.squaredNorm();
    double c = (n == 1) ? 2.0 : 2.0 * n * std::pow(r2, n - 1);
    return c * x;
  };
  return obj;
}

Objective make_exp_inner(const Vec& a) {
  require_finite(a, "make_exp_inner");
  Objective obj;
  obj.dim = int(a.size());
  obj.l0 = 0.0;
  obj.l1 = a.norm();
  obj.name = "exp_inner";
  Vec ac = a;
  obj.value = [ac](const Vec& x) {
    double t = ac.dot(x);
    if (t > kExpClamp) throw EvalError("exp_inner: exponent exceeds clamp");
    return std::exp(t);
  };
  obj.grad = [ac](const Vec& x) -> Vec {
    double t = ac.dot(x);
    if (t > kExpClamp) throw EvalError("exp_inner: exponent exceeds clamp");
    return std::exp(t) * ac;
  };
  return obj;
}

Objective make_quadratic(const Mat& A, const Vec& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("make_quadratic: dimension mismatch");
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("make_quadratic: A must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  Vec evals = es.eigenvalues();
  double lmin = evals.minCoeff();
  double lmax = evals.maxCoeff();
  if (lmin < -1e-10 * std::max(1.0, lmax))
    throw std::invalid_argument("make_quadratic: A must be PSD");

  Objective obj;
  obj.dim = int(b.size());
  obj.l0 = std::max(0.0, lmax);
  obj.l1 = 0.0;
  obj.name = "quadratic";
  if (lmin > 0.0) obj.mu = lmin;
  // f* = -1/2 b^T A^+ b when b lies in range(A)
  Vec proj = es.eigenvectors().transpose() * b;
  bool in_range = true;
  double fstar = 0.0;
  double tol = 1e-12 * std::max(1.0, lmax);
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] > tol)
      fstar -= 0.5 * proj[i] * proj[i] / evals[i];
    else if (std::abs(proj[i]) > 1e-10)
      in_range = false;
  }
  if (in_range) obj.f_star = fstar;
  Mat Ac = A;
  Vec bc = b;
  obj.value = [Ac, bc](const Vec& x) { return 0.5 * x.dot(Ac * x) + bc.dot(x); };
  obj.grad = [Ac, bc](const Vec& x) -> Vec { return Ac * x + bc; };
  return obj;
}

Objective make_logistic_linear(const Dataset& data, double lam_l0, double lam_l1) {
  if (data.X.rows() != data.y.size())
    throw std::invalid_argument("make_logistic_linear: X/y row mismatch");
  if (lam_l0 < 0.0 || lam_l1 < 0.0)
    throw std::invalid_argument("make_logistic_linear: negative regularizer");
  Vec a = data.X.transpose() * data.y;  // aggregate-logit direction
  int d = int(a.size());
  Objective obj;
  obj.dim = d;
  obj.l0 = lam_l0;
  obj.l1 = a.norm() + lam_l1 * std::sqrt(double(d));
  obj.name = "logistic_linear(" + data.name + ")";
  obj.value = [a, lam_l0, lam_l1](const Vec& th) {
    double f = softplus(-a.dot(th)) + 0.5 * lam_l0 * th.squaredNorm();
    if (lam_l1 > 0.0) {
      double t = lam_l1 * th.sum();
      if (t > kExpClamp) throw EvalError("logistic_linear: regularizer exponent exceeds clamp");
      f += std::exp(t);
    }
    return f;
  };
  obj.grad = [a, lam_l0, lam_l1, d](const Vec& th) -> Vec {
    Vec g = -sigmoid(-a.dot(th)) * a + lam_l0 * th;
    if (lam_l1 > 0.0) {
      double t = lam_l1 * th.sum();
      if (t > kExpClamp) throw EvalError("logistic_linear: regularizer exponent exceeds clamp");
      g.array() += lam_l1 * std::exp(t);
    }
    return g;
  };
  return obj;
}

namespace {

// Parameter layout for the (d -> H -> 1) net.
struct NnShape {
  int d, H;
  int w1_off = 0;
  int bn_scale_off, bn_shift_off, w2_off, b2_off, total;
  explicit NnShape(int d_, int H_) : d(d_), H(H_) {
    bn_scale_off = H * d;
    bn_shift_off = bn_scale_off + H;
    w2_off = bn_shift_off + H;
    b2_off = w2_off + H;
    total = b2_off + 1;
  }
};

struct NnForward {
  Mat Z;   // n x H pre-batchnorm
  Mat Hh;  // n x H post-affine
  Mat A;   // n x H post-ReLU (and dropout mask if any)
  double u;
};

NnForward nn_forward(const NnShape& s, const Mat& X, const Vec& y, const Vec& th,
                     const Mat* mask) {
  Eigen::Map<const Mat> W1(th.data() + s.w1_off, s.H, s.d);
  Eigen::Map<const Vec> bs(th.data() + s.bn_scale_off, s.H);
  Eigen::Map<const Vec> bt(th.data() + s.bn_shift_off, s.H);
  Eigen::Map<const Vec> W2(th.data() + s.w2_off, s.H);
  double b2 = th[s.b2_off];
  NnForward f;
  f.Z = X * W1.transpose();
  // batch-norm in inference mode with frozen stats (0,1): pure affine
  f.Hh = (f.Z.array().rowwise() * bs.transpose().array()).rowwise() +
         bt.transpose().array();
  f.A = f.Hh.cwiseMax(0.0);
  if (mask) f.A = f.A.cwiseProduct(*mask);
  Vec o = f.A * W2;
  o.array() += b2;
  f.u = y.dot(o);
  return f;
}

Vec nn_grad(const NnShape& s, const Mat& X, const Vec& y, const Vec& th,
            double lam_l0, double lam_l1, const Mat* mask) {
  Eigen::Map<const Vec> bs(th.data() + s.bn_scale_off, s.H);
  Eigen::Map<const Vec> W2(th.data() + s.w2_off, s.H);
  NnForward f = nn_forward(s, X, y, th, mask);
  double c = -sigmoid(-f.u);
  Vec g = Vec::Zero(s.total);
  Eigen::Map<Mat> dW1(g.data() + s.w1_off, s.H, s.d);
  Eigen::Map<Vec> dbs(g.data() + s.bn_scale_off, s.H);
  Eigen::Map<Vec> dbt(g.data() + s.bn_shift_off, s.H);
  Eigen::Map<Vec> dW2(g.data() + s.w2_off, s.H);

  Vec cy = c * y;                               // d(loss)/d(o_i)
  dW2 = f.A.transpose() * cy;
  g[s.b2_off] = cy.sum();
  Mat dA = cy * W2.transpose();                 // n x H
  if (mask) dA = dA.cwiseProduct(*mask);
  Mat dH = dA.cwiseProduct((f.Hh.array() > 0.0).cast<double>().matrix());
  dbs = dH.cwiseProduct(f.Z).colwise().sum();
  dbt = dH.colwise().sum();
  Mat dZ = dH.array().rowwise() * bs.transpose().array();
  dW1 = dZ.transpose() * X;

  g += lam_l0 * th;
  if (lam_l1 > 0.0) {
    double t = lam_l1 * th.sum();
    if (t > kExpClamp) throw EvalError("logistic_nn: regularizer exponent exceeds clamp");
    g.array() += lam_l1 * std::exp(t);
  }
  return g;
}

}  // namespace

Objective make_logistic_nn(const Dataset& data, double lam_l0, double lam_l1,
                           double dropout) {
  if (dropout < 0.0 || dropout >= 1.0)
    throw std::invalid_argument("make_logistic_nn: dropout must be in [0,1)");
  NnShape s(int(data.X.cols()), 32);
  Mat X = data.X;
  Vec y = data.y;
  Objective obj;
  obj.dim = s.total;
  obj.smoothness_declared = false;  // ReLU net: no valid (L0,L1) certificate
  obj.name = "logistic_nn(" + data.name + ")";
  obj.value = [s, X, y, lam_l0, lam_l1](const Vec& th) {
    NnForward f = nn_forward(s, X, y, th, nullptr);
    double v = softplus(-f.u) + 0.5 * lam_l0 * th.squaredNorm();
    if (lam_l1 > 0.0) {
      double t = lam_l1 * th.sum();
      if (t > kExpClamp) throw EvalError("logistic_nn: regularizer exponent exceeds clamp");
      v += std::exp(t);
    }
    return v;
  };
  obj.grad = [s, X, y, lam_l0, lam_l1](const Vec& th) -> Vec {
    return nn_grad(s, X, y, th, lam_l0, lam_l1, nullptr);
  };
  if (dropout > 0.0) {
    double keep = 1.0 - dropout;
    obj.grad_noisy = [s, X, y, lam_l0, lam_l1, keep](const Vec& th,
                                                     std::mt19937_64& rng) -> Vec {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Mat mask(X.rows(), s.H);  // inverted dropout on hidden activations
      for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
          mask(i, j) = (u(rng) < keep) ? 1.0 / keep : 0.0;
      return nn_grad(s, X, y, th, lam_l0, lam_l1, &mask);
    };
  }
  return obj;
}

Dataset load_libsvm(const std::string& path, std::optional<int> expected_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_libsvm: cannot open " + path);
  std::vector<double> labels;
  std::vector<std::vector<std::pair<int, double>>> rows;
  int max_idx = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double label;
    if (!(ls >> label))
      throw std::runtime_error("load_libsvm: parse error at line " + std::to_string(lineno));
    double mapped;
    if (label == 1.0) mapped = 1.0;
    else if (label == 2.0 || label == -1.0) mapped = -1.0;
    else
      throw std::runtime_error("load_libsvm: label outside {1,2,+1,-1} at line " +
                               std::to_string(lineno));
    std::vector<std::pair<int, double>> row;
    std::string tok;
    while (ls >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("load_libsvm: parse error at line " + std::to_string(lineno));
      int idx;
      double val;
      try {
        idx = std::stoi(tok.substr(0, colon));
        val = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("load_libsvm: parse error at line " + std::to_string(lineno));
      }
      if (idx < 1)
        throw std::runtime_error("load_libsvm: indices are 1-based, line " +
                                 std::to_string(lineno));
      max_idx = std::max(max_idx, idx);
      row.emplace_back(idx, val);
    }
    labels.push_back(mapped);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_libsvm: empty dataset in " + path);
  int d = expected_dim.value_or(max_idx);
  if (max_idx > d)
    throw std::runtime_error("load_libsvm: feature index " + std::to_string(max_idx) +
                             " exceeds expected_dim " + std::to_string(d));
  Dataset data;
  data.name = std::filesystem::path(path).stem().string();
  data.X = Mat::Zero(Eigen::Index(rows.size()), d);
  data.y = Vec(Eigen::Index(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.y[Eigen::Index(i)] = labels[i];
    for (auto& [idx, val] : rows[i]) data.X(Eigen::Index(i), idx - 1) = val;
  }
  return data;
}

void save_libsvm(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_libsvm: cannot open " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    out << (data.y[i] > 0 ? "1" : "-1");
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
      if (data.X(i, j) != 0.0) {
        std::snprintf(buf, sizeof buf, " %lld:%.17g", static_cast<long long>(j + 1),
                      data.X(i, j));
        out << buf;
      }
    }
    out << "\n";
  }
}

Dataset make_synthetic_mushrooms(int rows, int dim, std::uint64_t seed,
                                 double target_a_norm) {
  if (rows < 1 || dim < 1)
    throw std::invalid_argument("make_synthetic_mushrooms: bad shape");
  auto rng = make_stream(seed, 0);
  // one-hot categorical groups of ~5 columns, like one-hot encoded attributes
  int n_groups = std::max(1, dim / 5);
  std::vector<int> bounds(n_groups + 1);
  for (int g = 0; g <= n_groups; ++g) bounds[g] = g * dim / n_groups;
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec w(dim);
  for (int j = 0; j < dim; ++j) w[j] = gauss(rng);
  Dataset data;
  data.name = "mushrooms_synth";
  data.X = Mat::Zero(rows, dim);
  data.y = Vec(rows);
  for (int i = 0; i < rows; ++i) {
    double score = 0.0;
    for (int g = 0; g < n_groups; ++g) {
      std::uniform_int_distribution<int> pick(bounds[g], bounds[g + 1] - 1);
      int j = pick(rng);
      data.X(i, j) = 1.0;
      score += w[j];
    }
    score += 2.0 * gauss(rng);
    data.y[i] = score >= 0.0 ? 1.0 : -1.0;
  }
  if (target_a_norm > 0.0) {
    double norm = (data.X.transpose() * data.y).norm();
    if (norm > 0.0) data.X *= target_a_norm / norm;
  }
  return data;
}

std::string resolve_data_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  if (const char* dir = std::getenv("SIGNBENCH_DATA_DIR")) {
    fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p.string();
  }
  throw std::runtime_error("dataset not found: " + name +
                           " (searched cwd and $SIGNBENCH_DATA_DIR)");
}

SmoothnessCertificate verify_l0l1_smoothness(const Objective& obj, int n_pairs,
                                             double radius, std::mt19937_64& rng,
                                             const Vec* center) {
  if (n_pairs < 1) throw std::invalid_argument("verify_l0l1_smoothness: n_pairs >= 1");
  Vec c = center ? *center : Vec::Zero(obj.dim);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto ball_point = [&]() -> Vec {
    Vec g(obj.dim);
    for (int i = 0; i < obj.dim; ++i) g[i] = gauss(rng);
    double n = g.norm();
    if (n == 0.0) return c;
    double r = radius * std::pow(unif(rng), 1.0 / double(obj.dim));
    return c + (r / n) * g;
  };
  SmoothnessCertificate cert;
  for (int p = 0; p < n_pairs; ++p) {
    Vec x = ball_point();
    Vec y = ball_point();
    double dist = (x - y).norm();
    if (dist == 0.0) continue;
    double lhs = (obj.grad(x) - obj.grad(y)).norm();
    // 11 evenly spaced interior points approximate the segment supremum
    double sup = 0.0;
    for (int j = 1; j <= 11; ++j) {
      double t = double(j) / 12.0;
      sup = std::max(sup, obj.grad(x + t * (y - x)).norm());
    }
    double rhs = (obj.l0 + obj.l1 * sup) * dist;
    double ratio = rhs > 0.0 ? lhs / rhs
                             : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > cert.worst_ratio) cert.worst_ratio = ratio;
    if (lhs > rhs * (1.0 + 1e-12) + 1e-15) {
      cert.passed = false;
      if (!cert.witness) cert.witness = std::make_pair(x, y);
    }
  }
  return cert;
}

}  // namespace signbench
