// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include "biscat/threshold.hpp"
#include "biscat/verify.hpp"
#include "support/radial_oracle.hpp"

using namespace biscat;

namespace {

PotentialData well(double beta) { return load_potential("well:" + std::to_string(beta) + ",1", {40, 2.0}); }

int positive_count(const std::vector<double>& ev) {
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [](double e) { return e > 0.0; }));
}

// Classifier against the radial null-space oracle on a 12-point sweep of
// well(beta, 1) over [60, 160], which brackets the first zero crossing.
CheckResult check_classifier_oracle() {
  CheckResult r;
  r.name = "classifier vs null-space oracle";
  r.threshold = 0.05;
  r.relation = "<=";
  const auto crit = testing::critical_couplings(testing::mollified_well(1.0), 4, 400.0, 10.0, 120);
  if (crit.empty()) {
    r.detail = "oracle found no critical coupling";
    r.measured = INFINITY;
    return r;
  }
  double oracle_first = crit.front().beta;
  for (const auto& c : crit) oracle_first = std::min(oracle_first, c.beta);
  // Eigenvalues of S0 T0 S0 are -1 + beta kappa, so one factorisation gives beta_c.
  const auto ev = s0t0s0_spectrum(well(1.0));
  const double classifier_first = 1.0 / (1.0 + ev.back());
  r.measured = std::abs(classifier_first - oracle_first) / oracle_first;

  int compared = 0, disagree = 0;
  for (int k = 0; k < 12; ++k) {
    const double beta = 60.0 * std::pow(160.0 / 60.0, k / 11.0);
    bool near = false;
    for (const auto& c : crit) near = near || std::abs(beta - c.beta) <= 0.05 * c.beta;
    if (near) continue;
    ++compared;
    const auto p = well(beta);
    const bool counts = positive_count(s0t0s0_spectrum(p)) == testing::resonance_count(crit, beta);
    const bool regular = classify_zero_energy(p).verdict == Verdict::Regular;
    disagree += !(counts && regular);
  }
  std::ostringstream os;
  os << "beta_c classifier " << classifier_first << ", oracle " << oracle_first << "; " << compared - disagree << '/'
     << compared << " sweep points agree";
  r.detail = os.str();
  r.passed = r.measured <= r.threshold && disagree == 0 && compared > 0;
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> criteria{
      {"resolvent split identity", check_split_identity},
      {"hankel dual path", check_hankel_dual_path},
      {"threshold leading order", check_threshold_leading_order},
      {"rank-two identity", check_rank_two},
      {"cancellation", check_cancellation},
      {"inversions", check_inversions},
      {"asymptotic orders", check_asymptotic_orders},
      {"classifier vs null-space oracle", check_classifier_oracle},
      {"wave operator", check_wave_operator},
      {"bessel asymptotics", check_bessel_asymptotics},
      {"kernel L bound", [] { return check_kernel_l(); }},
      {"appendix bound", check_appendix_bound},
      {"peral separation", check_peral_separation},
      {"fourier decay", check_fourier_decay},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.name = name;
      r.detail = std::string("threw: ") + e.what();
      r.passed = false;
    }
    if (r.seconds == 0.0) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !r.passed;
    std::cout << format_check(r) << std::endl;
  }
  std::cout << criteria.size() - failed << '/' << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
