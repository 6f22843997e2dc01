#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "biscat/fourier.hpp"

namespace biscat {

// Empirical L^p stability scan. This is a surrogate: it tests whether the
// largest probe ratio ||T u||_p / ||u||_p stays within a factor `band` as the
// grid is refined. It does not prove boundedness.
struct LpScanConfig {
  std::vector<double> p_grid{4.0 / 3.0, 2.0, 4.0};
  std::vector<int> resolutions{64, 128, 256};
  double half_width = 12.0;
  std::uint64_t seed = 1;
  int probes = 64;
  double band = 2.0;
  std::string potential = "well:beta=0.1,r0=1";  // waveop, born1, omega; on the operator grid
};

struct LpScanReport {
  std::string op;
  std::vector<double> p_grid;
  std::vector<int> resolutions;
  std::uint64_t seed = 0;
  int probes = 0;
  std::vector<std::vector<double>> ratios;  // [p][resolution], max over probes
  std::vector<double> spread;               // max / min across resolutions, per p
  std::vector<bool> stable;                 // spread <= band
};

// Fills spread and stable from the ratio table.
void finalize_verdicts(LpScanReport& rep, double band);

// Defaults for the Peral symbol: half width 2, resolutions 32..2048.
LpScanConfig peral_defaults();

// Multiplier e^{i|D|} psi(|D|) |D|^{-b}, psi = chi_{>=1}.
Field apply_peral(const Field& u, double b);

// Probes per resolution: Gaussian bumps of width c h and of width c R / 16
// (c in {1.5, 2, 2.5, 3}), the same bumps pre-focused by e^{-i|D|}, and
// smooth random superpositions.
// Throws AliasedSpectrum if a probe carries more than 1e-6 of its L^2 mass
// above 0.9 Nyquist.
LpScanReport peral_scan(double b, const LpScanConfig& cfg = peral_defaults());

// Physical probes on g: annular Gaussians, modulated Gaussians and
// random-phase annular noise, all with spectrum in [0.2, 6]. The noise phases
// are keyed to the dual lattice, so every resolution with the same half width
// sees the same functions.
std::vector<TestFunction> scan_probes(const PlaneGrid& g, int count, std::uint64_t seed);
// Narrow annular Gaussians centred at 0.3 Nyquist with random shifts.
std::vector<TestFunction> scaled_probes(const PlaneGrid& g, int count, std::uint64_t seed);

using ScanOperator = std::function<Field(const TestFunction&)>;

// identity, ktilde1, ktilde2, waveop, born1, omega, resmult
std::vector<std::string> registered_operators();
// Throws UnknownOperator.
ScanOperator make_scan_operator(const std::string& name, const LpScanConfig& cfg);

// Cheap operators also see scaled_probes (probes / 8 of them); waveop, born1
// and omega see the physical family only.
LpScanReport lp_scan(const std::string& op, const LpScanConfig& cfg = {});

}  // namespace biscat
