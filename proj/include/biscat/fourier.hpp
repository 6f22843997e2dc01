#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "biscat/common.hpp"

namespace biscat {

// Uniform N x N grid on [-R, R)^2. Nodes x_i = -R + i h with h = 2R/N.
class PlaneGrid {
 public:
  PlaneGrid(int n, double half_width);

  static PlaneGrid field_default() { return {256, 20.0}; }

  int n() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  double weight() const { return spacing() * spacing(); }
  double node(int i) const { return -half_width_ + i * spacing(); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  double dual_spacing() const { return kPi / half_width_; }
  double nyquist() const { return kPi / spacing(); }
  // Signed frequency of FFT index k.
  double frequency(int k) const { return (k < n_ / 2 ? k : k - n_) * dual_spacing(); }

  bool operator==(const PlaneGrid& o) const { return n_ == o.n_ && half_width_ == o.half_width_; }

 private:
  int n_;
  double half_width_;
};

// Complex samples on a PlaneGrid, row-major in (i1, i2).
struct Field {
  PlaneGrid grid;
  std::vector<cplx> data;

  explicit Field(const PlaneGrid& g) : grid(g), data(g.size(), 0.0) {}
  Field(const PlaneGrid& g, std::vector<cplx> values);

  static Field sample(const PlaneGrid& g, const std::function<cplx(double, double)>& f);

  cplx& at(int i1, int i2) { return data[static_cast<std::size_t>(i1) * grid.n() + i2]; }
  cplx at(int i1, int i2) const { return data[static_cast<std::size_t>(i1) * grid.n() + i2]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);
Field conj(Field a);

// (h^2 sum |u|^p)^{1/p}
double lp_norm(const Field& u, double p);
inline double l2_norm(const Field& u) { return lp_norm(u, 2.0); }

// Unitary transform u^(xi) = (2 pi)^-1 h^2 sum u(x) e^{-i xi.x} on the dual grid.
std::vector<cplx> fourier_transform(const Field& u);
Field inverse_fourier_transform(const PlaneGrid& g, const std::vector<cplx>& spectrum);
// ((pi/R)^2 sum |u^|^2)^{1/2}
double spectral_l2_norm(const PlaneGrid& g, const std::vector<cplx>& spectrum);

// Field whose transform is the given function sampled on the dual grid.
Field from_spectrum(const PlaneGrid& g, const std::function<cplx(double, double)>& spectrum);

// Field with spectral support certified inside [lambda_min, lambda_max].
struct TestFunction {
  Field u;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Zeroes the transform outside the annulus. Throws AliasedSpectrum if the
// annulus reaches the Nyquist frequency.
TestFunction project_annulus(const Field& u, double lambda_min, double lambda_max);

// Transform proportional to exp(-(|xi| - center)^2 / (2 width^2)) e^{-i xi.shift},
// projected onto [center - 6 width, center + 6 width] (clamped at a small
// positive floor).
TestFunction annular_gaussian(const PlaneGrid& g, double center, double width, double shift1 = 0.0,
                              double shift2 = 0.0);

// e^{i k.x} e^{-|x - c|^2 / (2 s^2)} projected onto |k| +- 6/s.
TestFunction modulated_gaussian(const PlaneGrid& g, double k1, double k2, double c1, double c2, double s);

// Largest |u^| outside the annulus over max |u^|.
double annulus_leakage(const TestFunction& f);

// C^2 quintic ramp: chi_{<=a} = 1 on [0, a], 0 on [2a, inf).
double chi_low(double a, double lambda);
inline double chi_high(double a, double lambda) { return 1.0 - chi_low(a, lambda); }

using RadialSymbol = std::function<cplx(double)>;

struct GmuReport {
  bool passed = false;
  double reference = 0.0;   // max of |m|, |lambda m'|, |lambda^2 m''| on [0.1, 10]
  double worst = 0.0;       // largest such value on the full grid
  double worst_lambda = 0.0;
};

// Finite-difference check of |lambda^j m^(j)| <= C, j <= order, on a
// log-spaced grid over [1e-8, 1e8]. Fails when any value exceeds 4x the
// mid-range reference.
GmuReport gmu_check(const RadialSymbol& m, int order = 2);

struct Multiplier {
  RadialSymbol symbol;
  std::optional<int> gmu_order;

  // Runs gmu_check; throws NotGMU on failure.
  static Multiplier certified(RadialSymbol symbol, int order = 2);
};

Field apply_symbol(const Field& u, const std::function<cplx(double, double)>& symbol);
Field apply_radial(const Field& u, const RadialSymbol& symbol);

// m(|D|) u. Throws AliasedSpectrum if the annulus of u reaches Nyquist.
TestFunction apply_multiplier(const Multiplier& m, const TestFunction& u);

// Symbol i xi_j / |xi|, j in {1, 2}.
TestFunction riesz_transform(int axis, const TestFunction& u);

// u(x - shift) as the multiplier e^{-i xi.shift}.
TestFunction translate(const TestFunction& u, double shift1, double shift2);

// Spectral value at (xi1, xi2) summed directly over the grid.
cplx fourier_at(const Field& u, double xi1, double xi2);

// u^(lambda omega_k), omega_k = (cos 2 pi k/K, sin 2 pi k/K), direct sums.
std::vector<cplx> fourier_on_circle(const TestFunction& u, double lambda, int nodes = 256);
std::vector<cplx> fourier_on_circle(const Field& u, double lambda, int nodes = 256);

// (1/2pi) int u(rho omega) d omega, trapezoid in angle with 8-point tensor
// Lagrange interpolation in space. Points outside the box read as 0.
cplx spherical_mean(const Field& u, double rho, int nodes = 256);

// 8-point tensor Lagrange interpolation at an arbitrary point.
cplx interpolate(const Field& u, double x1, double x2);

}  // namespace biscat
