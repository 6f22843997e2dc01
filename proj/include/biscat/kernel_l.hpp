#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "biscat/common.hpp"

namespace biscat {

// L(x, y) = int_0^{8a} dr int_0^{2a} drho
//     J0(r|x|) J0(rho|y|) chi_{<=4a}(r) chi_{<=a}(rho) r rho^2 / ((r^2 + rho^2)(r + rho))
// depends on (|x|, |y|) only.
enum class LPath {
  Naive,  // tensor composite Gauss-Legendre over the whole rectangle
  Parts,  // beyond rho = 1/|y| and r = 1/|x|, two exact integrations by parts
          // through (s J1(s))' = s J0(s) and J0' = -J1
};

struct KernelLValue {
  double value = 0.0;
  double error = 0.0;  // |difference of two embedded rules|
  double scale = 0.0;  // sum of |weight x integrand|
};

// Throws QuadratureNonConverged if the embedded rules disagree beyond
// 1e-9 (scale + |value|), OutOfDomain unless |x|, |y| > 0 and a > 0.
KernelLValue eval_kernel_l(double x_norm, double y_norm, double a, LPath path = LPath::Naive);
double eval_kernel_l(const std::array<double, 2>& x, const std::array<double, 2>& y, double a,
                     LPath path = LPath::Naive);

// Domain tag 1..4 of (|x|, |y|) for the split radius R.
int kernel_l_domain(double x_norm, double y_norm, double radius);

// |L| (|x|^2 + |y|^2) / <log(|x| / |y|)>
double normalized_l(double x_norm, double y_norm, double l_value);

struct LBoundSample {
  double x_norm = 0.0, y_norm = 0.0;
  int domain = 0;
  double value = 0.0;
  double normalized = 0.0;
};

struct LBoundReport {
  double a = 0.0;
  double domain_radius = 0.0;
  std::vector<double> sample_radii;                  // running radii, e.g. 25, 50, 100
  std::vector<double> running_sup;                   // sup over samples with |x|, |y| <= radius
  std::vector<std::array<double, 4>> domain_sup;     // per radius, per domain
  std::vector<double> growth;                        // running_sup[k+1] / running_sup[k] - 1
  std::vector<LBoundSample> samples;
  double d3_constant = 0.0;                          // sup over D3 of |L| |x|^2 / <log |x|>
  bool saturated = false;                            // every growth <= 5%
};

// Samples |x|, |y| log-uniformly: `per_domain` pairs in each domain for the
// first radius, then `per_domain` new pairs in each domain reaching into every
// enlargement. Domain radius defaults to 10 / a.
LBoundReport verify_l_bound(double a, const std::vector<double>& sample_radii, int per_domain, std::uint64_t seed,
                            double domain_radius = 0.0);

}  // namespace biscat
