#pragma once

#include <optional>
#include <string>

#include "biscat/common.hpp"

namespace biscat::specfun {

enum class HankelPath { Auto, Series, Integral };

enum class Branch {
  Upper,    // Im z >= 0, z used as given
  Rotated,  // z with Re z >= 0, evaluated at i z
};

struct SpectralPoint {
  cplx z;
  Branch branch = Branch::Upper;
  cplx argument() const { return branch == Branch::Rotated ? kI * z : z; }
};

// Default radius |z| r separating series and integral evaluation.
inline constexpr double kSwitchRadius = 0.5;

double bessel_j0(double x);

// sqrt(2/(pi x)) (cos(x - pi/4) + sin(x - pi/4) / (8x))
double bessel_j0_two_term(double x);

// Log with the cut along i(-inf, 0]; arg in (-pi/2, 3pi/2].
cplx log_cut_down(cplx z);

// H_0^(1)(z) for z off i(-inf, 0]. Auto picks the series for |z| <= 2 and
// the Laguerre integral otherwise.
cplx hankel_h01(cplx z, HankelPath path = HankelPath::Auto);

double harmonic_number(int n);

// Constant entering g_n. The expansion of the Hankel series gives the
// harmonic number H_n here; see README for the comparison.
double series_constant(int n);

// g(z) = -(1/2pi) log(z/2) - gamma/(2pi)
cplx g_log(cplx z);

// g_n(z) = g(z) + c_n/(2pi) + i/8
cplx g_n(int n, cplx z);

// Gamma(z, r) = (i/4) H_0^(1)(z r)
cplx green_kernel(cplx z, double r, HankelPath path = HankelPath::Auto);
cplx green_kernel(const SpectralPoint& p, double r, HankelPath path = HankelPath::Auto);

// R(z, r) = (Gamma(z, r) - Gamma(iz, r)) / (2 z^2) for z in the closed first
// quadrant, r >= 0. Direct power series for |z| r <= switch_radius.
cplx biharm_resolvent_kernel(cplx z, double r, double switch_radius = kSwitchRadius);
inline cplx biharm_resolvent_kernel(double lambda, double r) {
  return biharm_resolvent_kernel(cplx(lambda, 0.0), r);
}

enum class KernelKind { Green, BiharmonicResolvent, G0, G2, G2l, G4, G6, G6l };

struct ComplexKernel {
  KernelKind kind = KernelKind::Green;
  double switch_radius = kSwitchRadius;
  cplx eval(cplx z, double r) const;
  std::string name() const;
};

struct TailKernels {
  ComplexKernel power;
  std::optional<ComplexKernel> log;
};

// Order-n spatial kernels of the small-lambda expansion of R:
// n=1 -> (G2, G2l), n=2 -> (G4), n=3 -> (G6, G6l).
TailKernels series_tail_kernels(int n);

// Spatial kernel values.
inline cplx tail_g0() { return cplx(0.0, 0.125); }
inline double tail_g2(double r) { return -0.25 * r * r; }
double tail_g2l(double r);
inline cplx tail_g4(double r) { return cplx(0.0, r * r * r * r / 512.0); }
inline double tail_g6(double r) { return -std::pow(r, 6) / 2304.0; }
double tail_g6l(double r);

// lambda^-2 G0 + g1 G2 + G2l + lambda^2 G4 + lambda^4 (g3 G6 + G6l) truncated
// after `terms` groups (1..5).
cplx resolvent_expansion(double lambda, double r, int terms = 5);

// |Gamma| normalised by the large- or small-argument envelope.
double green_bound_ratio(cplx z, double r);
// |d_z Gamma| / (e^{-Im z r} |z|^{-1/2} r^{1/2}), central difference in z.
double green_derivative_ratio(cplx z, double r);
// |R(lambda, r)| lambda^{5/2} r^{1/2}
double resolvent_bound_ratio(double lambda, double r);

}  // namespace biscat::specfun
