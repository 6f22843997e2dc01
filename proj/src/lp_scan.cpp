#include "biscat/lp_scan.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "biscat/operators.hpp"
#include "biscat/waveop.hpp"

namespace biscat {

namespace {

std::mt19937_64 probe_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{seed, index, std::uint64_t{0x5eed}};
  return std::mt19937_64(seq);
}

// Stateless hash of a dual-lattice site, so phases agree across resolutions.
std::uint64_t site_hash(std::uint64_t seed, std::uint64_t probe, std::int64_t m1, std::int64_t m2) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull ^ (probe + 0x632BE59BD9B4E019ull);
  for (std::uint64_t v : {static_cast<std::uint64_t>(m1), static_cast<std::uint64_t>(m2)}) {
    z ^= v + 0x9E3779B97F4A7C15ull + (z << 6) + (z >> 2);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
  }
  return z;
}

cplx peral_symbol(double lambda, double b) {
  const double cut = chi_high(1.0, lambda);
  if (cut == 0.0) return 0.0;
  return std::exp(kI * lambda) * cut * std::pow(lambda, -b);
}

struct RatioRow {
  std::vector<double> ratio;  // per p
};

RatioRow ratios_for(const Field& in, const Field& out, const std::vector<double>& p_grid) {
  RatioRow row;
  for (double p : p_grid) row.ratio.push_back(lp_norm(out, p) / lp_norm(in, p));
  return row;
}

}  // namespace

void finalize_verdicts(LpScanReport& rep, double band) {
  rep.spread.assign(rep.p_grid.size(), 0.0);
  rep.stable.assign(rep.p_grid.size(), false);
  for (std::size_t i = 0; i < rep.p_grid.size(); ++i) {
    const auto& row = rep.ratios[i];
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    rep.spread[i] = *hi / *lo;
    rep.stable[i] = rep.spread[i] <= band;
  }
}

LpScanConfig peral_defaults() {
  LpScanConfig cfg;
  cfg.resolutions = {32, 128, 512, 2048};
  cfg.half_width = 2.0;
  return cfg;
}

Field apply_peral(const Field& u, double b) {
  return apply_radial(u, [b](double lambda) { return peral_symbol(lambda, b); });
}

LpScanReport peral_scan(double b, const LpScanConfig& cfg) {
  if (cfg.probes < 8) throw InvalidArgument("peral scan needs at least 8 probes");
  LpScanReport rep;
  rep.op = "peral:b=" + std::to_string(b);
  rep.p_grid = cfg.p_grid;
  rep.resolutions = cfg.resolutions;
  rep.seed = cfg.seed;
  rep.probes = cfg.probes;
  rep.ratios.assign(cfg.p_grid.size(), std::vector<double>(cfg.resolutions.size(), 0.0));

  // Bump / pre-focused ring pairs: half at widths c h, half at fixed widths
  // c R / 16, so every resolution also sees the coarse-scale pairs.
  const int smooth = cfg.probes / 4;
  const int pairs = (cfg.probes - smooth) / 2;
  const double factors[] = {1.5, 2.0, 2.5, 3.0};

  for (std::size_t r = 0; r < cfg.resolutions.size(); ++r) {
    const PlaneGrid g(cfg.resolutions[r], cfg.half_width);
    const int n = g.n();
    std::vector<cplx> phi(g.size()), unfocus(g.size()), focus(g.size());
    std::vector<char> high(g.size());
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2) {
        const std::size_t i = static_cast<std::size_t>(k1) * n + k2;
        const double lambda = std::hypot(g.frequency(k1), g.frequency(k2));
        phi[i] = peral_symbol(lambda, b);
        unfocus[i] = std::exp(-kI * lambda);
        focus[i] = phi[i] * unfocus[i];
        high[i] = lambda > 0.9 * g.nyquist();
      }
    auto times = [&](std::vector<cplx> spec, const std::vector<cplx>& symbol) {
      for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= symbol[i];
      return inverse_fourier_transform(g, spec);
    };

    std::vector<std::vector<double>> best(pairs + smooth);
    parallel_for(static_cast<std::size_t>(pairs + smooth), [&](std::size_t k) {
      auto rng = probe_rng(cfg.seed, k);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const bool pair = static_cast<int>(k) < pairs;
      Field u(g);
      if (pair) {
        const double unit_width = static_cast<int>(k) % 2 == 0 ? g.spacing() : cfg.half_width / 16.0;
        const double s = factors[(k / 2) % 4] * unit_width;
        const double c1 = 0.2 * (2.0 * unit(rng) - 1.0), c2 = 0.2 * (2.0 * unit(rng) - 1.0);
        u = Field::sample(g, [&](double x1, double x2) {
          const double d2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
          return cplx(std::exp(-d2 / (2.0 * s * s)));
        });
      } else {
        std::normal_distribution<double> gauss;
        for (int j = 0; j < 3; ++j) {
          const double s = (0.09 + 0.035 * unit(rng)) * cfg.half_width;
          const double c1 = 0.2 * cfg.half_width * (2.0 * unit(rng) - 1.0);
          const double c2 = 0.2 * cfg.half_width * (2.0 * unit(rng) - 1.0);
          const cplx amp(gauss(rng), gauss(rng));
          u += Field::sample(g, [&](double x1, double x2) {
            const double d2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
            return amp * std::exp(-d2 / (2.0 * s * s));
          });
        }
      }
      const std::vector<cplx> spec = fourier_transform(u);
      double total = 0.0, tail = 0.0;
      for (std::size_t i = 0; i < spec.size(); ++i) {
        total += std::norm(spec[i]);
        if (high[i]) tail += std::norm(spec[i]);
      }
      if (tail > 1e-6 * total)
        throw AliasedSpectrum("peral probe carries mass near Nyquist at N = " + std::to_string(n));
      std::vector<double> out = ratios_for(u, times(spec, phi), cfg.p_grid).ratio;
      if (pair) {
        const auto second = ratios_for(times(spec, unfocus), times(spec, focus), cfg.p_grid).ratio;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], second[i]);
      }
      best[k] = std::move(out);
    });
    for (std::size_t i = 0; i < cfg.p_grid.size(); ++i)
      for (const auto& row : best) rep.ratios[i][r] = std::max(rep.ratios[i][r], row[i]);
  }
  finalize_verdicts(rep, cfg.band);
  return rep;
}

std::vector<TestFunction> scan_probes(const PlaneGrid& g, int count, std::uint64_t seed) {
  std::vector<TestFunction> out;
  out.reserve(count);
  const int annular = 3 * count / 8, modulated = 3 * count / 8;
  const double reach = g.half_width() / 3.0;
  for (int k = 0; k < count; ++k) {
    auto rng = probe_rng(seed, k);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double s1 = reach * (2.0 * unit(rng) - 1.0), s2 = reach * (2.0 * unit(rng) - 1.0);
    if (k < annular) {
      const double width = 0.2 + 0.2 * unit(rng);
      out.push_back(annular_gaussian(g, 6.0 * width + 0.3 + 1.5 * unit(rng), width, s1, s2));
    } else if (k < annular + modulated) {
      // annulus |k| +- 6/s kept inside [0.2, 6]
      const double s = 2.2 + 0.8 * unit(rng);
      const double k_norm = 6.0 / s + 0.2 + (5.8 - 12.0 / s) * unit(rng), angle = 2.0 * kPi * unit(rng);
      out.push_back(modulated_gaussian(g, k_norm * std::cos(angle), k_norm * std::sin(angle), s1, s2, s));
    } else {
      const double dk = g.dual_spacing();
      const auto index = static_cast<std::uint64_t>(k);
      Field u = from_spectrum(g, [&](double x1, double x2) -> cplx {
        const double r = std::hypot(x1, x2);
        if (r <= 1.0 || r >= 3.0) return 0.0;
        const double env = std::pow(std::sin(0.5 * kPi * (r - 1.0)), 2);
        const auto m1 = static_cast<std::int64_t>(std::llround(x1 / dk));
        const auto m2 = static_cast<std::int64_t>(std::llround(x2 / dk));
        const double phase = 2.0 * kPi * static_cast<double>(site_hash(seed, index, m1, m2) >> 11) * 0x1.0p-53;
        return env * std::exp(kI * phase);
      });
      out.push_back(project_annulus(u, 0.9, 3.1));
    }
  }
  return out;
}

std::vector<TestFunction> scaled_probes(const PlaneGrid& g, int count, std::uint64_t seed) {
  std::vector<TestFunction> out;
  const double nyq = g.nyquist(), reach = g.half_width() / 4.0;
  for (int k = 0; k < count; ++k) {
    auto rng = probe_rng(seed ^ 0xA5A5A5A5ull, k);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    out.push_back(annular_gaussian(g, 0.3 * nyq, 0.03 * nyq, reach * (2.0 * unit(rng) - 1.0),
                                   reach * (2.0 * unit(rng) - 1.0)));
  }
  return out;
}

std::vector<std::string> registered_operators() {
  return {"identity", "ktilde1", "ktilde2", "waveop", "born1", "omega", "resmult"};
}

namespace {
bool is_expensive(const std::string& name) { return name == "waveop" || name == "born1" || name == "omega"; }
}  // namespace

ScanOperator make_scan_operator(const std::string& name, const LpScanConfig& cfg) {
  if (name == "identity") return [](const TestFunction& u) { return u.u; };
  if (name == "ktilde1") return [](const TestFunction& u) { return ktilde1(u); };
  if (name == "ktilde2") return [](const TestFunction& u) { return ktilde2(u); };
  if (name == "resmult") return [](const TestFunction& u) { return resolvent_multiplier({1.0, 0.0}, 1.0, u); };
  if (is_expensive(name)) {
    auto pot = std::make_shared<PotentialData>(load_potential(cfg.potential, operator_grid_default()));
    if (name == "waveop") return [pot](const TestFunction& u) { return apply_wave_operator(u, *pot); };
    if (name == "born1") return [pot](const TestFunction& u) { return born_term(1, u, *pot); };
    Vector a(static_cast<Eigen::Index>(pot->size()));
    for (std::size_t i = 0; i < pot->size(); ++i) a(static_cast<Eigen::Index>(i)) = pot->v[i] * pot->points[i][0];
    const auto f = std::make_shared<OmegaFunctional>(OmegaFunctional::constant(
        a * a.transpose() * pot->weight(), Multiplier::certified([](double l) { return cplx(1.0 / (1.0 + l * l)); })));
    return [pot, f](const TestFunction& u) { return omega_apply(*f, u, *pot); };
  }
  throw UnknownOperator("no operator registered as '" + name + "'");
}

LpScanReport lp_scan(const std::string& op, const LpScanConfig& cfg) {
  const auto names = registered_operators();
  if (std::find(names.begin(), names.end(), op) == names.end())
    throw UnknownOperator("no operator registered as '" + op + "'");
  if (cfg.probes < 1 || cfg.p_grid.empty() || cfg.resolutions.empty())
    throw InvalidArgument("lp scan needs probes, exponents and resolutions");
  LpScanReport rep;
  rep.op = op;
  rep.p_grid = cfg.p_grid;
  rep.resolutions = cfg.resolutions;
  rep.seed = cfg.seed;
  rep.probes = cfg.probes;
  rep.ratios.assign(cfg.p_grid.size(), std::vector<double>(cfg.resolutions.size(), 0.0));
  const ScanOperator apply = make_scan_operator(op, cfg);
  for (std::size_t r = 0; r < cfg.resolutions.size(); ++r) {
    const PlaneGrid g(cfg.resolutions[r], cfg.half_width);
    std::vector<TestFunction> probes = scan_probes(g, cfg.probes, cfg.seed);
    if (!is_expensive(op))
      for (auto& extra : scaled_probes(g, std::max(1, cfg.probes / 8), cfg.seed)) probes.push_back(std::move(extra));
    std::vector<std::vector<double>> rows(probes.size());
    parallel_for(probes.size(), [&](std::size_t k) {
      rows[k] = ratios_for(probes[k].u, apply(probes[k]), cfg.p_grid).ratio;
    });
    for (std::size_t i = 0; i < cfg.p_grid.size(); ++i)
      for (const auto& row : rows) rep.ratios[i][r] = std::max(rep.ratios[i][r], row[i]);
  }
  finalize_verdicts(rep, cfg.band);
  return rep;
}

}  // namespace biscat
