#include "biscat/specfun.hpp"

#include <cmath>

#include "biscat/quadrature.hpp"

namespace biscat::specfun {

namespace {

constexpr int kSeriesCap = 60;
constexpr int kLaguerreNodes = 96;
constexpr int kLaguerreCheckNodes = 64;
constexpr double kAsymptoticRadius = 25.0;
constexpr double kIntegralTolerance = 1e-8;

bool on_cut(cplx z) { return z.real() == 0.0 && z.imag() <= 0.0; }

void check_branch(cplx z) {
  if (on_cut(z)) throw BranchCut("argument on i(-inf, 0]");
}

cplx hankel_series(cplx z) {
  const cplx L = log_cut_down(0.5 * z) + kEulerGamma;
  const cplx q = -0.25 * z * z;
  cplx term = 1.0;
  cplx sum = 1.0 + (2.0 * kI / kPi) * L;
  double hk = 0.0;
  for (int k = 1; k <= kSeriesCap; ++k) {
    term *= q / (double(k) * double(k));
    hk += 1.0 / k;
    const cplx add = term * (1.0 + (2.0 * kI / kPi) * (L - hk));
    sum += add;
    if (std::abs(add) < 1e-16 * std::abs(sum)) return sum;
  }
  throw QuadratureNonConverged("Hankel power series did not converge within the term cap");
}

// (2 e^{iz} / (i pi)) int_0^inf e^{-t} t^{-1/2} (t - 2iz)^{-1/2} dt
cplx hankel_laguerre(cplx z, int nodes) {
  const quad::Rule& rule = quad::gauss_laguerre(nodes, -0.5);
  cplx acc = 0.0;
  const cplx shift = -2.0 * kI * z;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] / std::sqrt(rule.nodes[i] + shift);
  return 2.0 * std::exp(kI * z) / (kI * kPi) * acc;
}

// Large-|z| expansion of the same integral (Watson's lemma).
cplx hankel_asymptotic(cplx z) {
  const cplx pref = std::sqrt(2.0 / (kPi * z)) * std::exp(kI * (z - 0.25 * kPi));
  cplx term = 1.0, sum = 1.0;
  const cplx step = -kI / (8.0 * z);
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= step * (odd * odd) / double(k);
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
    if (mag < 1e-17) break;
  }
  return pref * sum;
}

cplx hankel_integral(cplx z) {
  if (std::abs(z) >= kAsymptoticRadius) return hankel_asymptotic(z);
  const cplx fine = hankel_laguerre(z, kLaguerreNodes);
  const cplx coarse = hankel_laguerre(z, kLaguerreCheckNodes);
  if (std::abs(fine - coarse) > kIntegralTolerance * std::abs(fine) * 1e2)
    throw QuadratureNonConverged("Laguerre rule tail estimate above tolerance");
  return fine;
}

cplx green_from_series(cplx w) {
  // Gamma = (i/4) H0(w)
  return 0.25 * kI * hankel_series(w);
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= 12.0) {
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
      term *= q / (double(k) * double(k));
      sum += term;
      if (std::abs(term) < 1e-17) break;
    }
    return sum;
  }
  return hankel_integral(cplx(x, 0.0)).real();
}

double bessel_j0_two_term(double x) {
  const double ph = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (std::cos(ph) + std::sin(ph) / (8.0 * x));
}

cplx log_cut_down(cplx z) {
  double arg = std::atan2(z.imag(), z.real());
  if (arg <= -0.5 * kPi) arg += 2.0 * kPi;
  return {std::log(std::abs(z)), arg};
}

cplx hankel_h01(cplx z, HankelPath path) {
  check_branch(z);
  switch (path) {
    case HankelPath::Series: return hankel_series(z);
    case HankelPath::Integral: return hankel_integral(z);
    case HankelPath::Auto: break;
  }
  return std::abs(z) <= 2.0 ? hankel_series(z) : hankel_integral(z);
}

double harmonic_number(int n) {
  double h = 0.0;
  for (int j = 1; j <= n; ++j) h += 1.0 / j;
  return h;
}

double series_constant(int n) { return harmonic_number(n); }

cplx g_log(cplx z) { return -log_cut_down(0.5 * z) / (2.0 * kPi) - kEulerGamma / (2.0 * kPi); }

cplx g_n(int n, cplx z) { return g_log(z) + series_constant(n) / (2.0 * kPi) + 0.125 * kI; }

cplx green_kernel(cplx z, double r, HankelPath path) {
  check_branch(z);
  if (r <= 0.0) throw OutOfDomain("green_kernel requires r > 0");
  const cplx w = z * r;
  if (path == HankelPath::Auto)
    path = std::abs(w) <= kSwitchRadius ? HankelPath::Series : HankelPath::Integral;
  if (path == HankelPath::Series) return green_from_series(w);
  return 0.25 * kI * hankel_integral(w);
}

cplx green_kernel(const SpectralPoint& p, double r, HankelPath path) {
  return green_kernel(p.argument(), r, path);
}

cplx biharm_resolvent_kernel(cplx z, double r, double switch_radius) {
  if (z == cplx(0.0)) throw BranchCut("spectral parameter must be non-zero");
  if (z.real() < 0.0 || z.imag() < 0.0) throw BranchCut("R(z, r) is defined for z in the closed first quadrant");
  const cplx z2 = z * z;
  if (r == 0.0) return 0.125 * kI / z2;
  if (std::abs(z) * r > switch_radius)
    return (green_kernel(z, r, HankelPath::Integral) - green_kernel(kI * z, r, HankelPath::Integral)) / (2.0 * z2);
  // Direct series: (i/8) sum_{n even} a_n - sum_{n odd} g_n(zr) a_n, over z^2
  const cplx q = 0.25 * z2 * r * r;
  const cplx g = g_log(z * r);
  cplx a = 1.0;
  cplx even = 1.0, odd = 0.0;
  double hn = 0.0;
  for (int n = 1; n <= kSeriesCap; ++n) {
    a *= q / (double(n) * double(n));
    hn += 1.0 / n;
    if (n % 2 == 0) {
      even += a;
    } else {
      odd += (g + hn / (2.0 * kPi) + 0.125 * kI) * a;
    }
    if (std::abs(a) * (1.0 + std::abs(g) + hn) < 1e-17 * std::abs(even)) break;
  }
  return (0.125 * kI * even - odd) / z2;
}

double tail_g2l(double r) { return r > 0.0 ? r * r * std::log(r) / (8.0 * kPi) : 0.0; }

double tail_g6l(double r) { return r > 0.0 ? std::pow(r, 6) * std::log(r) / (2.0 * kPi * 2304.0) : 0.0; }

cplx ComplexKernel::eval(cplx z, double r) const {
  switch (kind) {
    case KernelKind::Green: return green_kernel(z, r);
    case KernelKind::BiharmonicResolvent: return biharm_resolvent_kernel(z, r, switch_radius);
    case KernelKind::G0: return tail_g0();
    case KernelKind::G2: return tail_g2(r);
    case KernelKind::G2l: return tail_g2l(r);
    case KernelKind::G4: return tail_g4(r);
    case KernelKind::G6: return tail_g6(r);
    case KernelKind::G6l: return tail_g6l(r);
  }
  return 0.0;
}

std::string ComplexKernel::name() const {
  switch (kind) {
    case KernelKind::Green: return "Gamma";
    case KernelKind::BiharmonicResolvent: return "R";
    case KernelKind::G0: return "G0";
    case KernelKind::G2: return "G2";
    case KernelKind::G2l: return "G2l";
    case KernelKind::G4: return "G4";
    case KernelKind::G6: return "G6";
    case KernelKind::G6l: return "G6l";
  }
  return "?";
}

TailKernels series_tail_kernels(int n) {
  switch (n) {
    case 1: return {{KernelKind::G2}, ComplexKernel{KernelKind::G2l}};
    case 2: return {{KernelKind::G4}, std::nullopt};
    case 3: return {{KernelKind::G6}, ComplexKernel{KernelKind::G6l}};
    default: throw UnsupportedOrder("tail kernels exist for n in {1, 2, 3}");
  }
}

cplx resolvent_expansion(double lambda, double r, int terms) {
  const double l2 = lambda * lambda;
  cplx sum = 0.0;
  if (terms >= 1) sum += tail_g0() / l2;
  if (terms >= 2) sum += g_n(1, lambda) * tail_g2(r);
  if (terms >= 3) sum += tail_g2l(r);
  if (terms >= 4) sum += l2 * tail_g4(r);
  if (terms >= 5) sum += l2 * l2 * (g_n(3, lambda) * tail_g6(r) + tail_g6l(r));
  return sum;
}

double green_bound_ratio(cplx z, double r) {
  const cplx g = green_kernel(z, r);
  const double s = std::abs(z) * r;
  if (s >= kSwitchRadius) return std::abs(g) / (std::exp(-z.imag() * r) / std::sqrt(s));
  return std::abs(g) / japanese(std::log(s));
}

double green_derivative_ratio(cplx z, double r) {
  const double h = 1e-5 * std::max(1.0, std::abs(z));
  const cplx d = (green_kernel(z + h, r) - green_kernel(z - h, r)) / (2.0 * h);
  return std::abs(d) / (std::exp(-z.imag() * r) * std::pow(std::abs(z), -0.5) * std::sqrt(r));
}

double resolvent_bound_ratio(double lambda, double r) {
  return std::abs(biharm_resolvent_kernel(lambda, r)) * std::pow(lambda, 2.5) * std::sqrt(r);
}

}  // namespace biscat::specfun
