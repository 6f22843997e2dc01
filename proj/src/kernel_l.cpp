#include "biscat/kernel_l.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "biscat/fourier.hpp"
#include "biscat/quadrature.hpp"
#include "biscat/specfun.hpp"

namespace biscat {

namespace {

// Truncated bivariate Taylor polynomial in (r, rho), degree <= 2 in each.
struct Jet {
  double c[3][3]{};

  static Jet constant(double v) {
    Jet j;
    j.c[0][0] = v;
    return j;
  }
  static Jet var_r(double r) {
    Jet j = constant(r);
    j.c[1][0] = 1.0;
    return j;
  }
  static Jet var_rho(double rho) {
    Jet j = constant(rho);
    j.c[0][1] = 1.0;
    return j;
  }
  // Univariate jet from value, first and second derivative.
  static Jet of_r(double f, double d1, double d2) {
    Jet j;
    j.c[0][0] = f;
    j.c[1][0] = d1;
    j.c[2][0] = 0.5 * d2;
    return j;
  }
  static Jet of_rho(double f, double d1, double d2) {
    Jet j;
    j.c[0][0] = f;
    j.c[0][1] = d1;
    j.c[0][2] = 0.5 * d2;
    return j;
  }
};

Jet operator+(Jet a, const Jet& b) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a.c[i][j] += b.c[i][j];
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (a.c[i][j] == 0.0) continue;
      for (int k = 0; i + k < 3; ++k)
        for (int l = 0; j + l < 3; ++l) out.c[i + k][j + l] += a.c[i][j] * b.c[k][l];
    }
  return out;
}

Jet operator*(double s, Jet a) {
  for (auto& row : a.c)
    for (double& v : row) v *= s;
  return a;
}

Jet reciprocal(const Jet& g) {
  const double g0 = g.c[0][0];
  Jet d = g;
  d.c[0][0] = 0.0;
  d = (-1.0 / g0) * d;
  // 1/g = (1/g0) sum_n d^n; d^5 has no term of degree <= 4.
  Jet term = Jet::constant(1.0), sum = Jet::constant(1.0);
  for (int n = 1; n <= 4; ++n) {
    term = term * d;
    sum = sum + term;
  }
  return (1.0 / g0) * sum;
}

// chi_{<=a} with its first two derivatives.
std::array<double, 3> chi_low_jet(double a, double t) {
  if (t <= a || t >= 2.0 * a) return {chi_low(a, t), 0.0, 0.0};
  const double s = (t - a) / a;
  const double d1 = 30.0 * s * s * (1.0 - s) * (1.0 - s);
  const double d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
  return {chi_low(a, t), -d1 / a, -d2 / (a * a)};
}

// chi_{<=a}(rho) rho^2 / ((r^2 + rho^2)(r + rho)) as a jet at (r, rho).
Jet inner_amplitude(double a, double r, double rho) {
  const Jet R = Jet::var_r(r), P = Jet::var_rho(rho);
  const auto ch = chi_low_jet(a, rho);
  const Jet chi = Jet::of_rho(ch[0], ch[1], ch[2]);
  return chi * P * P * reciprocal((R * R + P * P) * (R + P));
}

std::vector<double> panel_edges(double upper, double ramp, double k, double split) {
  // Geometric grading toward 0, then panels no wider than 2/k.
  const double first = std::min(upper / 16.0, 1.0 / k);
  std::vector<double> edges = quad::graded_edges(0.0, first, 40);
  std::vector<double> breaks{first, ramp, upper};
  if (split > first && split < upper) breaks.push_back(split);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double width = std::min(2.0 / k, upper / 8.0);
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b], hi = breaks[b + 1];
    if (hi <= lo) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    for (int p = 1; p <= pieces; ++p) edges.push_back(lo + (hi - lo) * p / pieces);
  }
  return edges;
}

struct Sum {
  double value = 0.0;
  double scale = 0.0;
};

Sum naive(double X, double Y, double a, int nodes) {
  const quad::Rule rr = quad::composite(panel_edges(8.0 * a, 4.0 * a, X, 0.0), nodes);
  const quad::Rule pr = quad::composite(panel_edges(2.0 * a, a, Y, 0.0), nodes);
  std::vector<double> A(rr.size()), B(pr.size());
  for (std::size_t i = 0; i < rr.size(); ++i) {
    const double r = rr.nodes[i];
    A[i] = rr.weights[i] * specfun::bessel_j0(r * X) * chi_low(4.0 * a, r) * r;
  }
  for (std::size_t j = 0; j < pr.size(); ++j) {
    const double p = pr.nodes[j];
    B[j] = pr.weights[j] * specfun::bessel_j0(p * Y) * chi_low(a, p) * p * p;
  }
  Sum s;
  for (std::size_t i = 0; i < rr.size(); ++i) {
    if (A[i] == 0.0) continue;
    const double r = rr.nodes[i];
    double row = 0.0, row_abs = 0.0;
    for (std::size_t j = 0; j < pr.size(); ++j) {
      const double p = pr.nodes[j];
      const double t = B[j] / ((r * r + p * p) * (r + p));
      row += t;
      row_abs += std::abs(t);
    }
    s.value += A[i] * row;
    s.scale += std::abs(A[i]) * row_abs;
  }
  return s;
}

double bessel_j1(double x) { return std::cyl_bessel_j(1.0, x); }

// I(r) and its first two r-derivatives, as coefficients (I, I', I''/2).
// Rules carry w J0(rho |y|) in place of w.
std::array<double, 3> inner_jet(double r, double Y, double a, const quad::Rule& direct, const quad::Rule& parts,
                                double split, bool use_parts, double& scale) {
  std::array<double, 3> out{};
  auto add = [&](double w, const double* coeffs) {
    for (int i = 0; i < 3; ++i) out[i] += w * coeffs[i];
  };
  for (std::size_t j = 0; j < direct.size(); ++j) {
    const double p = direct.nodes[j];
    const Jet f = inner_amplitude(a, r, p);
    const double w = direct.weights[j];
    const double c0[3] = {f.c[0][0], f.c[1][0], f.c[2][0]};
    add(w, c0);
    scale += std::abs(w * c0[0]);
  }
  if (!use_parts) return out;
  const double k = Y, s = split;
  // h = f_rho - f / rho, h' = f_rhorho - f_rho / rho + f / rho^2, per r-order.
  {
    const Jet f = inner_amplitude(a, r, s);
    for (int i = 0; i < 3; ++i) {
      const double h = f.c[i][1] - f.c[i][0] / s;
      out[i] += -f.c[i][0] * bessel_j1(k * s) / k - h * specfun::bessel_j0(k * s) / (k * k);
    }
  }
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const double p = parts.nodes[j];
    const Jet f = inner_amplitude(a, r, p);
    const double w = -parts.weights[j] / (k * k);
    for (int i = 0; i < 3; ++i) {
      const double hp = 2.0 * f.c[i][2] - f.c[i][1] / p + f.c[i][0] / (p * p);
      out[i] += w * hp;
      if (i == 0) scale += std::abs(w * hp);
    }
  }
  return out;
}

Sum by_parts(double X, double Y, double a, int nodes) {
  const double sy = 1.0 / Y, sx = 1.0 / X;
  const bool inner_parts = sy < 2.0 * a, outer_parts = sx < 8.0 * a;

  auto rule_on = [nodes](const std::vector<double>& edges, double lo, double hi) {
    std::vector<double> e;
    for (double v : edges)
      if (v >= lo && v <= hi) e.push_back(v);
    if (e.empty() || e.front() > lo) e.insert(e.begin(), lo);
    if (e.back() < hi) e.push_back(hi);
    return quad::composite(e, nodes);
  };
  const std::vector<double> pe = panel_edges(2.0 * a, a, Y, inner_parts ? sy : 0.0);
  const std::vector<double> re = panel_edges(8.0 * a, 4.0 * a, X, outer_parts ? sx : 0.0);
  quad::Rule p_direct = rule_on(pe, 0.0, inner_parts ? sy : 2.0 * a);
  quad::Rule p_parts = inner_parts ? rule_on(pe, sy, 2.0 * a) : quad::Rule{};
  for (quad::Rule* rule : {&p_direct, &p_parts})
    for (std::size_t j = 0; j < rule->size(); ++j) rule->weights[j] *= specfun::bessel_j0(rule->nodes[j] * Y);
  const quad::Rule r_direct = rule_on(re, 0.0, outer_parts ? sx : 8.0 * a);
  const quad::Rule r_parts = outer_parts ? rule_on(re, sx, 8.0 * a) : quad::Rule{};

  Sum s;
  // G(r) = r chi_{<=4a}(r) I(r) as a univariate jet.
  auto g_jet = [&](double r, double& scale) {
    const auto I = inner_jet(r, Y, a, p_direct, p_parts, sy, inner_parts, scale);
    const auto ch = chi_low_jet(4.0 * a, r);
    const Jet G = Jet::var_r(r) * Jet::of_r(ch[0], ch[1], ch[2]) * Jet::of_r(I[0], I[1], 2.0 * I[2]);
    return std::array<double, 3>{G.c[0][0], G.c[1][0], G.c[2][0]};
  };
  for (std::size_t i = 0; i < r_direct.size(); ++i) {
    const double r = r_direct.nodes[i];
    double sc = 0.0;
    const auto G = g_jet(r, sc);
    const double w = r_direct.weights[i] * specfun::bessel_j0(r * X);
    s.value += w * G[0];
    s.scale += std::abs(w) * r * sc;
  }
  if (outer_parts) {
    const double k = X;
    double sc = 0.0;
    const auto G = g_jet(sx, sc);
    const double h = G[1] - G[0] / sx;
    s.value += -G[0] * bessel_j1(k * sx) / k - h * specfun::bessel_j0(k * sx) / (k * k);
    for (std::size_t i = 0; i < r_parts.size(); ++i) {
      const double r = r_parts.nodes[i];
      double sc2 = 0.0;
      const auto Gr = g_jet(r, sc2);
      const double hp = 2.0 * Gr[2] - Gr[1] / r + Gr[0] / (r * r);
      const double w = -r_parts.weights[i] * specfun::bessel_j0(r * k) / (k * k);
      s.value += w * hp;
      s.scale += std::abs(w * hp);
    }
  }
  return s;
}

}  // namespace

KernelLValue eval_kernel_l(double x_norm, double y_norm, double a, LPath path) {
  if (!(x_norm > 0.0) || !(y_norm > 0.0)) throw OutOfDomain("kernel L needs |x|, |y| > 0");
  if (!(a > 0.0)) throw OutOfDomain("kernel L needs a > 0");
  auto run = [&](int nodes) { return path == LPath::Naive ? naive(x_norm, y_norm, a, nodes) : by_parts(x_norm, y_norm, a, nodes); };
  const Sum lo = run(12), hi = run(16);
  KernelLValue out{hi.value, std::abs(hi.value - lo.value), hi.scale};
  if (out.error > 1e-9 * (out.scale + std::abs(out.value)))
    throw QuadratureNonConverged("kernel L rules disagree by " + std::to_string(out.error));
  return out;
}

double eval_kernel_l(const std::array<double, 2>& x, const std::array<double, 2>& y, double a, LPath path) {
  return eval_kernel_l(std::hypot(x[0], x[1]), std::hypot(y[0], y[1]), a, path).value;
}

int kernel_l_domain(double x_norm, double y_norm, double radius) {
  const bool xin = x_norm <= radius, yin = y_norm <= radius;
  if (xin && yin) return 1;
  if (xin) return 2;
  if (yin) return 3;
  return 4;
}

double normalized_l(double x_norm, double y_norm, double l_value) {
  return std::abs(l_value) * (x_norm * x_norm + y_norm * y_norm) / japanese(std::log(x_norm / y_norm));
}

LBoundReport verify_l_bound(double a, const std::vector<double>& sample_radii, int per_domain, std::uint64_t seed,
                            double domain_radius) {
  if (sample_radii.empty()) throw InvalidArgument("need at least one sample radius");
  if (per_domain < 1) throw InvalidArgument("need at least one sample per domain");
  LBoundReport rep;
  rep.a = a;
  rep.domain_radius = domain_radius > 0.0 ? domain_radius : 10.0 / a;
  rep.sample_radii = sample_radii;
  const double rd = rep.domain_radius;
  if (sample_radii.front() <= rd) throw InvalidArgument("sample radius must exceed the domain radius");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
  constexpr double kInner = 0.1;

  // Pairs in each domain; after the first radius one coordinate reaches into
  // the newly added shell (prev, radius].
  std::vector<std::pair<double, double>> pairs;
  std::vector<std::size_t> cut;
  double prev = 0.0;
  for (double radius : sample_radii) {
    for (int d = 1; d <= 4; ++d)
      for (int k = 0; k < per_domain; ++k) {
        double x = 0.0, y = 0.0;
        const double out_lo = std::max(rd, prev);
        switch (d) {
          case 1:
            x = log_uniform(kInner, rd);
            y = log_uniform(kInner, rd);
            break;
          case 2:
            x = log_uniform(kInner, rd);
            y = log_uniform(out_lo, radius);
            break;
          case 3:
            x = log_uniform(out_lo, radius);
            y = log_uniform(kInner, rd);
            break;
          default:
            x = log_uniform(out_lo, radius);
            y = log_uniform(rd, radius);
            if (unit(rng) < 0.5) std::swap(x, y);
        }
        pairs.emplace_back(x, y);
      }
    cut.push_back(pairs.size());
    prev = radius;
  }

  rep.samples.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [x, y] = pairs[i];
    const double v = eval_kernel_l(x, y, a).value;
    rep.samples[i] = {x, y, kernel_l_domain(x, y, rd), v, normalized_l(x, y, v)};
  });

  double running = 0.0;
  std::array<double, 4> dom{};
  std::size_t start = 0;
  for (std::size_t k = 0; k < sample_radii.size(); ++k) {
    for (std::size_t i = start; i < cut[k]; ++i) {
      const auto& s = rep.samples[i];
      running = std::max(running, s.normalized);
      dom[s.domain - 1] = std::max(dom[s.domain - 1], s.normalized);
      if (s.domain == 3)
        rep.d3_constant = std::max(rep.d3_constant, std::abs(s.value) * s.x_norm * s.x_norm / japanese(std::log(s.x_norm)));
    }
    start = cut[k];
    rep.running_sup.push_back(running);
    rep.domain_sup.push_back(dom);
  }
  rep.saturated = true;
  for (std::size_t k = 1; k < rep.running_sup.size(); ++k) {
    rep.growth.push_back(rep.running_sup[k] / rep.running_sup[k - 1] - 1.0);
    rep.saturated = rep.saturated && rep.growth.back() <= 0.05;
  }
  return rep;
}

}  // namespace biscat
