#include <cmath>
#include <random>

#include "biscat/fourier.hpp"
#include "doctest.h"

using namespace biscat;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

double max_abs(const Field& a) {
  double m = 0.0;
  for (const auto& v : a.data) m = std::max(m, std::abs(v));
  return m;
}

PlaneGrid small_grid() { return {128, 16.0}; }

}  // namespace

TEST_CASE("grid geometry") {
  const PlaneGrid g(256, 20.0);
  CHECK(g.spacing() == doctest::Approx(0.15625));
  CHECK(g.node(0) == -20.0);
  CHECK(g.frequency(1) == doctest::Approx(kPi / 20.0));
  CHECK(g.frequency(255) == doctest::Approx(-kPi / 20.0));
  CHECK(g.nyquist() == doctest::Approx(kPi / 0.15625));
  CHECK_THROWS_AS(PlaneGrid(255, 20.0), InvalidArgument);
}

TEST_CASE("identity multiplier round trip") {
  const auto f = annular_gaussian(small_grid(), 1.5, 0.2, 0.7, -0.3);
  const auto one = Multiplier::certified([](double) { return cplx(1.0); });
  CHECK(max_abs_diff(apply_multiplier(one, f).u, f.u) <= 1e-12 * max_abs(f.u));
  const Field back = inverse_fourier_transform(f.u.grid, fourier_transform(f.u));
  CHECK(max_abs_diff(back, f.u) <= 1e-12 * max_abs(f.u));
}

TEST_CASE("disjoint cutoffs annihilate") {
  const auto f = annular_gaussian(small_grid(), 1.0, 0.3);
  const double a = 1.0;
  const Multiplier hi{[a](double l) { return cplx(chi_high(a, l)); }, std::nullopt};
  const Multiplier lo{[a](double l) { return cplx(chi_low(0.25 * a, l)); }, std::nullopt};
  CHECK(max_abs(apply_multiplier(lo, apply_multiplier(hi, f)).u) <= 1e-10 * max_abs(f.u));
}

TEST_CASE("lambda^2 multiplier is minus the Laplacian") {
  const PlaneGrid g(256, 20.0);
  const auto f = annular_gaussian(g, 0.4, 0.05);
  const Multiplier sq{[](double l) { return cplx(l * l); }, std::nullopt};
  const Field spectral = apply_multiplier(sq, f).u;
  // Periodic five-point stencil.
  Field stencil(g);
  const int n = g.n();
  const double h2 = g.weight();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx c = f.u.at(i, j);
      const cplx s = f.u.at((i + 1) % n, j) + f.u.at((i + n - 1) % n, j) + f.u.at(i, (j + 1) % n) +
                     f.u.at(i, (j + n - 1) % n);
      stencil.at(i, j) = -(s - 4.0 * c) / h2;
    }
  CHECK(l2_norm(spectral - stencil) / l2_norm(spectral) <= 1e-3);
}

TEST_CASE("riesz transforms") {
  const auto f = annular_gaussian(small_grid(), 1.2, 0.2);
  const auto r11 = riesz_transform(1, riesz_transform(1, f));
  const auto r22 = riesz_transform(2, riesz_transform(2, f));
  CHECK(max_abs(r11.u + r22.u + f.u) <= 1e-10 * max_abs(f.u));
  const double n1 = l2_norm(riesz_transform(1, f).u), n2 = l2_norm(riesz_transform(2, f).u);
  // |xi_1|^2 + |xi_2|^2 = |xi|^2 on the symbol side.
  CHECK(n1 * n1 + n2 * n2 == doctest::Approx(l2_norm(f.u) * l2_norm(f.u)).epsilon(1e-10));
  CHECK(n1 == doctest::Approx(n2).epsilon(1e-6));
  // Radial u: R_1 u is odd in x_1.
  const Field r1 = riesz_transform(1, f).u;
  const int n = f.u.grid.n();
  double odd = 0.0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) odd = std::max(odd, std::abs(r1.at(i, j) + r1.at(n - i, j)));
  CHECK(odd <= 1e-10 * max_abs(r1));
}

TEST_CASE("composed riesz transforms are contractions") {
  const auto f = modulated_gaussian(small_grid(), 1.0, 0.5, 0.0, 0.0, 2.0);
  const auto g = riesz_transform(2, riesz_transform(1, f));
  CHECK(l2_norm(g.u) <= l2_norm(f.u));
}

TEST_CASE("spherical mean") {
  const PlaneGrid g(256, 20.0);
  const Field one = Field::sample(g, [](double, double) { return cplx(1.0); });
  CHECK(std::abs(spherical_mean(one, 3.0) - 1.0) < 1e-12);
  const Field x1 = Field::sample(g, [](double a, double) { return cplx(a); });
  CHECK(std::abs(spherical_mean(x1, 2.7)) < 1e-12);
  const Field gauss = Field::sample(g, [](double a, double b) { return cplx(std::exp(-(a * a + b * b))); });
  CHECK(std::abs(spherical_mean(gauss, 1.0) - std::exp(-1.0)) < 1e-6);
  CHECK_THROWS_AS(spherical_mean(gauss, 20.0 * std::sqrt(2.0) + 0.1), OutOfDomain);
  CHECK_THROWS_AS(spherical_mean(gauss, 1.0, 32), InvalidArgument);
}

TEST_CASE("fourier on the circle") {
  // The direct sum only sees the band if u has decayed well inside the box,
  // hence the wide grid here.
  const PlaneGrid wide(1024, 96.0);
  const auto band = annular_gaussian(wide, 1.5, 0.075);
  REQUIRE(band.lambda_min >= 1.0);
  REQUIRE(band.lambda_max <= 2.0);
  const auto full = fourier_transform(band.u);
  double peak = 0.0;
  for (const auto& v : full) peak = std::max(peak, std::abs(v));
  for (const auto& v : fourier_on_circle(band, 4.0)) CHECK(std::abs(v) <= 1e-8 * peak);

  const PlaneGrid g(256, 20.0);
  const auto near = annular_gaussian(g, 1.5, 0.3);

  const Field gauss = Field::sample(g, [](double a, double b) { return cplx(std::exp(-0.5 * (a * a + b * b))); });
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (const auto& v : fourier_on_circle(gauss, lambda)) CHECK(std::abs(v - std::exp(-0.5 * lambda * lambda)) < 1e-6);
  }

  const auto other = modulated_gaussian(g, 0.3, 1.1, 1.0, -2.0, 1.5);
  const cplx alpha(0.3, -1.2), beta(2.0, 0.5);
  const Field combo = alpha * near.u + beta * other.u;
  const auto lhs = fourier_on_circle(combo, 1.3, 64);
  const auto ua = fourier_on_circle(near.u, 1.3, 64), ub = fourier_on_circle(other.u, 1.3, 64);
  for (int k = 0; k < 64; ++k) CHECK(std::abs(lhs[k] - alpha * ua[k] - beta * ub[k]) < 1e-12 * (1.0 + std::abs(lhs[k])));
  CHECK_THROWS_AS(fourier_on_circle(gauss, g.nyquist() + 0.1), AliasedSpectrum);
}

TEST_CASE("circle values match the direct single-point transform") {
  const auto f = modulated_gaussian(small_grid(), 0.8, -0.4, 0.5, 0.5, 1.5);
  const auto vals = fourier_on_circle(f, 1.0, 8);
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * kPi * k / 8;
    CHECK(std::abs(vals[k] - fourier_at(f.u, std::cos(th), std::sin(th))) < 1e-12);
  }
}

TEST_CASE("parseval on grid") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = modulated_gaussian(small_grid(), 2.0 * u(rng), 2.0 * u(rng), 3.0 * u(rng), 3.0 * u(rng), 1.0 + std::abs(u(rng)));
    const double a = l2_norm(f.u);
    const double b = spectral_l2_norm(f.u.grid, fourier_transform(f.u));
    CHECK(std::abs(a * a - b * b) <= 1e-10 * a * a);
  }
}

TEST_CASE("multiplier composition") {
  const auto f = annular_gaussian(small_grid(), 1.0, 0.25, -1.0, 2.0);
  const Multiplier m1{[](double l) { return cplx(std::cos(l), l); }, std::nullopt};
  const Multiplier m2{[](double l) { return cplx(1.0 / (1.0 + l * l)); }, std::nullopt};
  const Multiplier both{[&](double l) { return m1.symbol(l) * m2.symbol(l); }, std::nullopt};
  const Field lhs = apply_multiplier(m1, apply_multiplier(m2, f)).u;
  const Field rhs = apply_multiplier(both, f).u;
  CHECK(max_abs_diff(lhs, rhs) <= 1e-13 * max_abs(f.u));
}

TEST_CASE("multipliers commute with translations") {
  const auto f = annular_gaussian(small_grid(), 1.0, 0.25);
  const Multiplier m{[](double l) { return cplx(l, 1.0 / (1.0 + l)); }, std::nullopt};
  const Field a = apply_multiplier(m, translate(f, 1.3, -0.7)).u;
  const Field b = translate(apply_multiplier(m, f), 1.3, -0.7).u;
  CHECK(max_abs_diff(a, b) <= 1e-12 * max_abs(a));
}

TEST_CASE("annulus projection certificate") {
  const auto f = modulated_gaussian(small_grid(), 1.0, 1.0, 0.0, 0.0, 2.0);
  CHECK(annulus_leakage(f) < 1e-10);
  CHECK_THROWS_AS(project_annulus(f.u, 0.5, small_grid().nyquist()), AliasedSpectrum);
  TestFunction bad = f;
  bad.lambda_max = small_grid().nyquist() + 1.0;
  CHECK_THROWS_AS(apply_multiplier(Multiplier{[](double) { return cplx(1.0); }, std::nullopt}, bad), AliasedSpectrum);
}

TEST_CASE("cutoffs") {
  CHECK(chi_low(0.5, 0.4) == 1.0);
  CHECK(chi_low(0.5, 1.0) == 0.0);
  CHECK(chi_low(0.5, 0.75) == doctest::Approx(0.5));
  for (double l = 0.0; l < 3.0; l += 0.01) CHECK(chi_low(0.7, l) + chi_high(0.7, l) == 1.0);
}

TEST_CASE("good multiplier certificate") {
  CHECK(gmu_check([](double) { return cplx(1.0); }).passed);
  const double a = 1.0;
  CHECK(gmu_check([a](double l) { return cplx(chi_high(a, l) / (l * l)); }).passed);
  CHECK(gmu_check([](double l) { return cplx(1.0 / (1.0 + l * l)); }).passed);
  const auto log_report = gmu_check([](double l) { return cplx(std::log(l)); });
  CHECK_FALSE(log_report.passed);
  CHECK_THROWS_AS(Multiplier::certified([](double l) { return cplx(std::log(l)); }), NotGMU);
  CHECK_FALSE(gmu_check([](double l) { return std::exp(kI * l); }).passed);
}
