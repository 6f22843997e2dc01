#include "biscat/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "biscat/quadrature.hpp"
#include "biscat/specfun.hpp"
#include "biscat/threshold.hpp"

namespace biscat {

namespace {

// int_{lo}^{hi} f(t) dt with unit panels of 16 Gauss-Legendre nodes.
double unit_panels(const std::function<double(double)>& f, double lo, double hi) {
  const quad::Rule& gl = quad::gauss_legendre(16);
  double sum = 0.0;
  for (double t0 = lo; t0 < hi; t0 += 1.0) {
    const double c = t0 + 0.5;
    for (std::size_t k = 0; k < gl.size(); ++k) sum += 0.5 * gl.weights[k] * f(c + 0.5 * gl.nodes[k]);
  }
  return sum;
}

constexpr double kMaxLogRadius = 256.0;

}  // namespace

double majorant_integral(const RadialMajorant& f, double p) {
  if (!(p > 0.0)) throw InvalidArgument("majorant integral needs p > 0");
  const double power = 2.0 / p;
  // r = e^{-t} on (0, 1), r = e^t on (1, inf); the factor r dr becomes r^2 dt.
  auto inner = [&](double t) {
    const double r = std::exp(-t);
    return f(r) * std::exp(-t * (2.0 - power)) / (1.0 + r * r);
  };
  auto outer = [&](double t) { return f(std::exp(t)) * std::exp(-t * power) / (1.0 + std::exp(-2.0 * t)); };
  double total = 0.0, reach = 0.0;
  for (double span = 8.0; span <= kMaxLogRadius; span *= 2.0) {
    const double inc = unit_panels(inner, reach, span) + unit_panels(outer, reach, span);
    total += inc;
    reach = span;
    if (!std::isfinite(total)) break;
    if (reach > 8.0 && std::abs(inc) <= 1e-14 * std::abs(total)) return 2.0 * kPi * total;
  }
  throw MajorantDiverges("majorant integral has not settled at |y| = e^" + std::to_string(kMaxLogRadius) +
                         " for p = " + std::to_string(p));
}

double homogeneous_operator_norm(const RadialKernelFactor& factor, const Field& u, double p) {
  const PlaneGrid& g = u.grid;
  const double h = g.spacing();
  const double rho_max = g.half_width() * std::sqrt(2.0);

  std::vector<double> edges = quad::graded_edges(0.0, h, 30);
  const int panels = static_cast<int>(std::ceil((rho_max - h) / h));
  for (int k = 1; k <= panels; ++k) edges.push_back(h + (rho_max - h) * k / panels);
  const quad::Rule rho = quad::composite(edges, 8);
  std::vector<cplx> mean(rho.size());
  parallel_for(rho.size(), [&](std::size_t j) { mean[j] = spherical_mean(u, rho.nodes[j]); });

  auto transformed = [&](double r) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
      const double q = rho.nodes[j];
      s += rho.weights[j] * factor(r, q) * mean[j] * q / (r * r + q * q);
    }
    return 2.0 * kPi * s;
  };

  // sum over r = e^t, t in [log 1e-8, log(1e4 rho_max)], plus the r^-2 tail.
  const double t_lo = std::log(1e-8), t_hi = std::log(1e4 * rho_max);
  const int tpanels = static_cast<int>(std::ceil((t_hi - t_lo) / 0.25));
  std::vector<double> tedges;
  for (int k = 0; k <= tpanels; ++k) tedges.push_back(t_lo + (t_hi - t_lo) * k / tpanels);
  const quad::Rule tr = quad::composite(tedges, 8);
  std::vector<double> terms(tr.size());
  parallel_for(tr.size(), [&](std::size_t i) {
    const double r = std::exp(tr.nodes[i]);
    terms[i] = tr.weights[i] * std::pow(std::abs(transformed(r)), p) * r * r;
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  const double r_end = std::exp(t_hi);
  const double tail_coeff = std::abs(transformed(r_end)) * r_end * r_end;
  if (p > 1.0) sum += std::pow(tail_coeff, p) * std::pow(r_end, 2.0 - 2.0 * p) / (2.0 * p - 2.0);
  return std::pow(2.0 * kPi * sum, 1.0 / p);
}

HomogeneousBoundReport homogeneous_kernel_bound(const RadialKernelFactor& factor, const RadialMajorant& majorant,
                                                double p, const std::vector<Field>& probes) {
  HomogeneousBoundReport rep;
  rep.p = p;
  rep.majorant_violation = -1.0;
  for (int i = 0; i <= 24; ++i)
    for (int j = 0; j <= 24; ++j) {
      const double r = std::pow(10.0, -3.0 + 0.25 * i), t = std::pow(10.0, -3.0 + 0.25 * j);
      rep.majorant_violation = std::max(rep.majorant_violation, std::abs(factor(r, r * t)) / majorant(t) - 1.0);
    }
  if (rep.majorant_violation > 1e-12) throw InvalidArgument("kernel factor exceeds the supplied majorant");
  rep.constant = majorant_integral(majorant, p);
  rep.ratios.resize(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k)
    rep.ratios[k] = homogeneous_operator_norm(factor, probes[k], p) / lp_norm(probes[k], p);
  rep.max_ratio = rep.ratios.empty() ? 0.0 : *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.holds = rep.max_ratio <= rep.constant;
  return rep;
}

std::vector<Field> bump_probes(const PlaneGrid& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Field> out;
  const double reach = g.half_width();
  for (int k = 0; k < count; ++k) {
    const double s = 0.4 + 1.1 * unit(rng);
    const double room = std::max(0.0, reach - 7.0 * s);
    const double c1 = room * (2.0 * unit(rng) - 1.0) / std::sqrt(2.0);
    const double c2 = room * (2.0 * unit(rng) - 1.0) / std::sqrt(2.0);
    const bool modulated = k % 2 == 1;
    const double k1 = modulated ? 2.0 * unit(rng) - 1.0 : 0.0;
    const double k2 = modulated ? 2.0 * unit(rng) - 1.0 : 0.0;
    out.push_back(Field::sample(g, [=](double x1, double x2) {
      const double d2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
      return std::exp(-d2 / (2.0 * s * s)) * std::exp(kI * (k1 * x1 + k2 * x2));
    }));
  }
  return out;
}

cplx radial_hankel(const std::function<cplx(double)>& mu, const std::vector<double>& breaks, double x) {
  if (breaks.empty() || !(breaks.front() > 0.0)) throw InvalidArgument("radial transform needs positive breakpoints");
  if (!(x > 0.0)) throw OutOfDomain("radial transform needs |x| > 0");
  const double first = std::min(breaks.front() / 16.0, 1.0 / x);
  std::vector<double> edges = quad::graded_edges(0.0, first, 60);
  double lo = first;
  for (double b : breaks) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - lo) * x)));
    for (int k = 1; k <= pieces; ++k) edges.push_back(lo + (b - lo) * k / pieces);
    lo = b;
  }
  auto run = [&](int nodes, double& scale) {
    const quad::Rule rule = quad::composite(edges, nodes);
    cplx s = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double r = rule.nodes[k];
      const cplx t = rule.weights[k] * specfun::bessel_j0(x * r) * mu(r) * r;
      s += t;
      scale += std::abs(t);
    }
    return s;
  };
  double scale = 0.0, unused = 0.0;
  const cplx lo_rule = run(12, unused), hi_rule = run(16, scale);
  if (std::abs(hi_rule - lo_rule) > 1e-8 * std::abs(hi_rule) + 1e-15 * scale)
    throw QuadratureNonConverged("radial transform rules disagree at |x| = " + std::to_string(x));
  return hi_rule;
}

FourierDecayReport fourier_decay_check(const AnalyticMap& map, double a, double epsilon, int samples) {
  if (!(a > 0.0)) throw InvalidArgument("fourier decay check needs a > 0");
  if (samples < 2) throw InvalidArgument("fourier decay check needs two or more samples");
  FourierDecayReport rep;
  rep.a = a;
  rep.epsilon = epsilon;
  auto mu = [&](double r) { return map(1.0 / specfun::g_n(1, cplx(r, 0.0))) * chi_low(a, r); };
  rep.x.resize(samples);
  rep.transform.resize(samples);
  for (int k = 0; k < samples; ++k) rep.x[k] = std::pow(10.0, 3.0 * k / (samples - 1));
  parallel_for(rep.x.size(), [&](std::size_t k) { rep.transform[k] = radial_hankel(mu, {a, 2.0 * a}, rep.x[k]); });

  rep.vanishes = std::all_of(rep.transform.begin(), rep.transform.end(), [](cplx v) { return v == 0.0; });
  if (rep.vanishes) {
    rep.exponent = -std::numeric_limits<double>::infinity();
    rep.passed = true;
    return rep;
  }
  std::vector<double> logs(samples), weighted(samples);
  for (int k = 0; k < samples; ++k) {
    const double jx = japanese(rep.x[k]), jl = japanese(std::log(rep.x[k]));
    logs[k] = jl;
    weighted[k] = std::abs(rep.transform[k]) * jx * jx;
    rep.weighted_sup = std::max(rep.weighted_sup, weighted[k] * std::pow(jl, 2.0 - epsilon));
  }
  rep.exponent = loglog_slope(logs, weighted);
  rep.passed = rep.exponent <= -1.5;
  return rep;
}

}  // namespace biscat
