#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "biscat/fourier.hpp"

namespace biscat {

// Kernel factor F(|x|, |y|) of T u(x) = int F(x, y) u(y) / (|x|^2 + |y|^2) dy.
using RadialKernelFactor = std::function<double(double x_norm, double y_norm)>;
using RadialMajorant = std::function<double(double t)>;

// F_p = int f(|y|) / ((1 + |y|^2) |y|^{2/p}) dy over R^2. Throws
// MajorantDiverges if the tails have not settled by |y| in [e^-256, e^256],
// InvalidArgument for p <= 0.
double majorant_integral(const RadialMajorant& f, double p);

struct HomogeneousBoundReport {
  double p = 0.0;
  double constant = 0.0;                 // F_p
  double majorant_violation = 0.0;       // max of |F(r, r t)| / f(t) - 1 over the sample set, <= 0 if OK
  std::vector<double> ratios;            // ||T u||_p / ||u||_p per probe
  double max_ratio = 0.0;
  bool holds = false;                    // every ratio <= F_p
};

// ||T u||_p for a factor depending on |x|, |y| only: T u is radial, built
// from the spherical means of u and integrated in the radius.
double homogeneous_operator_norm(const RadialKernelFactor& factor, const Field& u, double p);

// Throws InvalidArgument if sampling finds |F(r, r t)| > f(t).
HomogeneousBoundReport homogeneous_kernel_bound(const RadialKernelFactor& factor, const RadialMajorant& majorant,
                                                double p, const std::vector<Field>& probes);

// Smooth compactly supported probes on the grid: Gaussians of width 0.4..1.5
// at random centres, some with a random plane-wave phase.
std::vector<Field> bump_probes(const PlaneGrid& g, int count, std::uint64_t seed);

using AnalyticMap = std::function<cplx(cplx)>;

struct FourierDecayReport {
  double a = 0.0;
  double epsilon = 0.0;
  std::vector<double> x;              // |x| samples, log-spaced on [1, 1e3]
  std::vector<cplx> transform;        // int J0(|x| r) mu(r) r dr
  double exponent = 0.0;              // slope of log(|F| <x>^2) against log <log |x|>
  double weighted_sup = 0.0;          // sup |F| <x>^2 <log |x|>^{2 - eps}
  bool passed = false;                // exponent <= -1.5
  bool vanishes = false;              // transform identically zero
};

// int_0^{breaks.back()} J0(x r) mu(r) r dr, with mu smooth between the
// breakpoints. Throws QuadratureNonConverged if the embedded rules disagree.
cplx radial_hankel(const std::function<cplx(double)>& mu, const std::vector<double>& breaks, double x);

// mu(lambda) = A(1 / g_1(lambda)) chi_{<=a}(lambda).
FourierDecayReport fourier_decay_check(const AnalyticMap& map, double a, double epsilon, int samples = 61);

}  // namespace biscat
