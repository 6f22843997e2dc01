#pragma once

#include <string>
#include <vector>

namespace biscat {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=" or ">="
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// 200 random (lambda, r): |2 lambda^2 R - Gamma(lambda) + Gamma(i lambda)| / (1 + |Gamma(lambda)|).
CheckResult check_split_identity();
// Series vs integral H0^(1) over 0.3 <= |z| <= 3, arg z in [0, pi].
CheckResult check_hankel_dual_path();
// Log-log slope of |lambda^2 R(lambda, 1) - i/8| on {0.1, 0.05, 0.025, 0.0125}.
CheckResult check_threshold_leading_order();
// Slope of log |J0 - two-term asymptotic| on [10, 1000].
CheckResult check_bessel_asymptotics();

// Rank-two identity for well(1,1) and gaussian(2,1), default operator grid.
CheckResult check_rank_two();
// ||Q v|| / ||v|| and ||S0 x_j v|| / ||x_j v|| for well(1,1); measured is the
// worse of the two ratios against its own threshold.
CheckResult check_cancellation();
// Jensen-Nenciu and Feshbach against dense inverses.
CheckResult check_inversions();
// N4, B-remainder and D1-deviation slopes for well(0.5,1).
CheckResult check_asymptotic_orders();

// well(0.1,1) on the field grid (256, 20), three annular probes, 96 and 192
// lambda nodes, Born series for the high-energy part.
CheckResult check_wave_operator();

// Sweep with `per_domain` pairs per domain and radius (25, 50, 100) plus the
// by-parts cross-check on the first three pairs of each domain.
CheckResult check_kernel_l(int per_domain = 170);

// F_2 = pi^2 and the bound on 20 probes.
CheckResult check_appendix_bound();
// A(z) = z, a = 1, eps = 0.25.
CheckResult check_fourier_decay();

// b = 1/2 stable at every p; b = 0 unstable at 4/3 and 4, stable at 2.
CheckResult check_peral_separation();

// specfun, threshold, kernelL, appendix, waveop, peral or all (the first four).
// Throws InvalidArgument for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite);

// "PASS name: measured <= threshold (detail)"
std::string format_check(const CheckResult& r);

}  // namespace biscat
