#include "biscat/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace biscat::quad {

namespace detail {
const double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
const double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

namespace {

Rule build_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule build_laguerre(int n, double alpha) {
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0 + alpha;
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k * (k + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const double mu0 = std::tgamma(alpha + 1.0);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(build_legendre(n));
  return *slot;
}

Rule gauss_legendre(int n, double a, double b) {
  const Rule& base = gauss_legendre(n);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = c + h * base.nodes[i];
    r.weights[i] = h * base.weights[i];
  }
  return r;
}

const Rule& gauss_laguerre(int n, double alpha) {
  static std::mutex m;
  static std::map<std::pair<int, double>, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{n, alpha}];
  if (!slot) slot = std::make_unique<Rule>(build_laguerre(n, alpha));
  return *slot;
}

Rule composite(const std::vector<double>& edges, int nodes_per_panel) {
  const Rule& base = gauss_legendre(nodes_per_panel);
  Rule r;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double c = 0.5 * (edges[k] + edges[k + 1]);
    const double h = 0.5 * (edges[k + 1] - edges[k]);
    for (int i = 0; i < nodes_per_panel; ++i) {
      r.nodes.push_back(c + h * base.nodes[i]);
      r.weights.push_back(h * base.weights[i]);
    }
  }
  return r;
}

std::vector<double> graded_edges(double a, double b, int levels) {
  std::vector<double> e;
  e.push_back(a);
  for (int k = levels; k >= 1; --k) e.push_back(a + (b - a) * std::ldexp(1.0, -k));
  e.push_back(b);
  return e;
}

}  // namespace biscat::quad
