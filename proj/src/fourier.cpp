#include "biscat/fourier.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace biscat {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plans are created once per N (in-place, unaligned) and executed with the
// new-array interface, which is safe from several threads.
const PlanPair& plans(int n) {
  static std::mutex m;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch(static_cast<std::size_t>(n) * n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair p;
  p.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

void fft_inplace(std::vector<cplx>& data, int n, bool forward) {
  const PlanPair& p = plans(n);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(forward ? p.forward : p.backward, buf, buf);
}

double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

constexpr int kStencil = 8;

// Lagrange weights for nodes first..first+7 at fractional index t.
void lagrange_weights(double t, int first, double* w) {
  // prod_{b != a} (a - b) for a = 0..7
  static constexpr double kDen[kStencil] = {-5040.0, 720.0, -240.0, 144.0, -144.0, 240.0, -720.0, 5040.0};
  const double s = t - first;
  double prefix[kStencil + 1], suffix[kStencil + 1];
  prefix[0] = 1.0;
  suffix[kStencil] = 1.0;
  for (int a = 0; a < kStencil; ++a) prefix[a + 1] = prefix[a] * (s - a);
  for (int a = kStencil - 1; a >= 0; --a) suffix[a] = suffix[a + 1] * (s - a);
  for (int a = 0; a < kStencil; ++a) w[a] = prefix[a] * suffix[a + 1] / kDen[a];
}

}  // namespace

PlaneGrid::PlaneGrid(int n, double half_width) : n_(n), half_width_(half_width) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("grid size N must be even and >= 2");
  if (!(half_width > 0.0)) throw InvalidArgument("grid half-width must be positive");
}

Field::Field(const PlaneGrid& g, std::vector<cplx> values) : grid(g), data(std::move(values)) {
  if (data.size() != g.size()) throw GridMismatch("field data size does not match grid");
}

Field Field::sample(const PlaneGrid& g, const std::function<cplx(double, double)>& f) {
  Field out(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out.at(i, j) = f(g.node(i), g.node(j));
  return out;
}

Field& Field::operator+=(const Field& o) {
  if (!(grid == o.grid)) throw GridMismatch("field grids differ");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (!(grid == o.grid)) throw GridMismatch("field grids differ");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : data) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

Field conj(Field a) {
  for (auto& v : a.data) v = std::conj(v);
  return a;
}

double lp_norm(const Field& u, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& v : u.data) s += std::norm(v);
    return std::sqrt(s * u.grid.weight());
  }
  if (p == 4.0) {
    for (const auto& v : u.data) s += std::norm(v) * std::norm(v);
  } else if (p == 4.0 / 3.0) {
    for (const auto& v : u.data) {
      const double a = std::sqrt(std::norm(v));
      s += a * std::cbrt(a);
    }
  } else {
    for (const auto& v : u.data) s += std::pow(std::sqrt(std::norm(v)), p);
  }
  return std::pow(s * u.grid.weight(), 1.0 / p);
}

std::vector<cplx> fourier_transform(const Field& u) {
  const int n = u.grid.n();
  std::vector<cplx> out = u.data;
  fft_inplace(out, n, true);
  // e^{-i xi_k (-R)} = (-1)^k for both signed representatives since N is even.
  const double scale = u.grid.weight() / (2.0 * kPi);
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      const double sign = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
      out[static_cast<std::size_t>(k1) * n + k2] *= sign * scale;
    }
  return out;
}

Field inverse_fourier_transform(const PlaneGrid& g, const std::vector<cplx>& spectrum) {
  if (spectrum.size() != g.size()) throw GridMismatch("spectrum size does not match grid");
  const int n = g.n();
  std::vector<cplx> out = spectrum;
  const double scale = 2.0 * kPi / (g.weight() * double(n) * double(n));
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      const double sign = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
      out[static_cast<std::size_t>(k1) * n + k2] *= sign * scale;
    }
  fft_inplace(out, n, false);
  return Field(g, std::move(out));
}

double spectral_l2_norm(const PlaneGrid& g, const std::vector<cplx>& spectrum) {
  double s = 0.0;
  for (const auto& v : spectrum) s += std::norm(v);
  return std::sqrt(s) * g.dual_spacing();
}

Field from_spectrum(const PlaneGrid& g, const std::function<cplx(double, double)>& spectrum) {
  const int n = g.n();
  std::vector<cplx> s(g.size());
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) s[static_cast<std::size_t>(k1) * n + k2] = spectrum(g.frequency(k1), g.frequency(k2));
  return inverse_fourier_transform(g, s);
}

TestFunction project_annulus(const Field& u, double lambda_min, double lambda_max) {
  const PlaneGrid& g = u.grid;
  if (lambda_max >= g.nyquist())
    throw AliasedSpectrum("annulus top " + std::to_string(lambda_max) + " reaches Nyquist " +
                          std::to_string(g.nyquist()));
  if (!(lambda_min >= 0.0) || !(lambda_max > lambda_min)) throw InvalidArgument("annulus must satisfy 0 <= min < max");
  const int n = g.n();
  std::vector<cplx> s = fourier_transform(u);
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      const double r = std::hypot(g.frequency(k1), g.frequency(k2));
      if (r < lambda_min || r > lambda_max) s[static_cast<std::size_t>(k1) * n + k2] = 0.0;
    }
  return {inverse_fourier_transform(g, s), lambda_min, lambda_max};
}

TestFunction annular_gaussian(const PlaneGrid& g, double center, double width, double shift1, double shift2) {
  const double lo = std::max(center - 6.0 * width, 0.05 * center);
  const double hi = center + 6.0 * width;
  Field u = from_spectrum(g, [&](double x1, double x2) {
    const double r = std::hypot(x1, x2);
    const double d = (r - center) / width;
    return std::exp(-0.5 * d * d) * std::exp(-kI * (x1 * shift1 + x2 * shift2));
  });
  return project_annulus(u, lo, hi);
}

TestFunction modulated_gaussian(const PlaneGrid& g, double k1, double k2, double c1, double c2, double s) {
  const double k = std::hypot(k1, k2);
  const double lo = std::max(k - 6.0 / s, 0.05 * k);
  const double hi = k + 6.0 / s;
  Field u = Field::sample(g, [&](double x1, double x2) {
    const double d2 = (x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2);
    return std::exp(kI * (k1 * x1 + k2 * x2)) * std::exp(-0.5 * d2 / (s * s));
  });
  return project_annulus(u, lo, hi);
}

double annulus_leakage(const TestFunction& f) {
  const PlaneGrid& g = f.u.grid;
  const int n = g.n();
  const std::vector<cplx> s = fourier_transform(f.u);
  double inside = 0.0, outside = 0.0;
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2) {
      const double r = std::hypot(g.frequency(k1), g.frequency(k2));
      const double a = std::abs(s[static_cast<std::size_t>(k1) * n + k2]);
      if (r < f.lambda_min || r > f.lambda_max) outside = std::max(outside, a);
      else inside = std::max(inside, a);
    }
  return inside > 0.0 ? outside / inside : outside;
}

double chi_low(double a, double lambda) {
  if (lambda <= a) return 1.0;
  if (lambda >= 2.0 * a) return 0.0;
  return 1.0 - smoothstep5((lambda - a) / a);
}

GmuReport gmu_check(const RadialSymbol& m, int order) {
  constexpr int kPerDecade = 16;
  constexpr double kLogStep = 1e-3;
  auto scaled = [&](double lambda) {
    const double ep = std::exp(kLogStep);
    const cplx f0 = m(lambda), fp = m(lambda * ep), fm = m(lambda / ep);
    const cplx d1 = (fp - fm) / (2.0 * kLogStep);
    const cplx d2 = (fp - 2.0 * f0 + fm) / (kLogStep * kLogStep);
    double v = std::abs(f0);
    if (order >= 1) v = std::max(v, std::abs(d1));
    if (order >= 2) v = std::max(v, std::abs(d2 - d1));
    return v;
  };
  GmuReport rep;
  std::vector<double> grid;
  for (int i = -8 * kPerDecade; i <= 8 * kPerDecade; ++i) grid.push_back(std::pow(10.0, double(i) / kPerDecade));
  for (double l : grid)
    if (l >= 0.1 && l <= 10.0) rep.reference = std::max(rep.reference, scaled(l));
  for (double l : grid) {
    const double v = scaled(l);
    if (!std::isfinite(v) || v > rep.worst) {
      rep.worst = v;
      rep.worst_lambda = l;
      if (!std::isfinite(v)) break;
    }
  }
  rep.passed = std::isfinite(rep.worst) && rep.worst <= 4.0 * rep.reference;
  if (rep.reference == 0.0) rep.passed = rep.worst == 0.0;
  return rep;
}

Multiplier Multiplier::certified(RadialSymbol symbol, int order) {
  const GmuReport rep = gmu_check(symbol, order);
  if (!rep.passed)
    throw NotGMU("symbol derivative bound fails near lambda = " + std::to_string(rep.worst_lambda));
  return {std::move(symbol), order};
}

Field apply_symbol(const Field& u, const std::function<cplx(double, double)>& symbol) {
  const PlaneGrid& g = u.grid;
  const int n = g.n();
  std::vector<cplx> s = u.data;
  fft_inplace(s, n, true);
  const double inv = 1.0 / (double(n) * double(n));
  for (int k1 = 0; k1 < n; ++k1) {
    const double x1 = g.frequency(k1);
    for (int k2 = 0; k2 < n; ++k2) s[static_cast<std::size_t>(k1) * n + k2] *= symbol(x1, g.frequency(k2)) * inv;
  }
  fft_inplace(s, n, false);
  return Field(g, std::move(s));
}

Field apply_radial(const Field& u, const RadialSymbol& symbol) {
  return apply_symbol(u, [&](double x1, double x2) { return symbol(std::hypot(x1, x2)); });
}

TestFunction apply_multiplier(const Multiplier& m, const TestFunction& u) {
  if (u.lambda_max >= u.u.grid.nyquist()) throw AliasedSpectrum("annulus of u reaches Nyquist");
  return {apply_radial(u.u, m.symbol), u.lambda_min, u.lambda_max};
}

TestFunction riesz_transform(int axis, const TestFunction& u) {
  if (axis != 1 && axis != 2) throw InvalidArgument("Riesz axis must be 1 or 2");
  if (u.lambda_max >= u.u.grid.nyquist()) throw AliasedSpectrum("annulus of u reaches Nyquist");
  Field out = apply_symbol(u.u, [axis](double x1, double x2) -> cplx {
    const double r = std::hypot(x1, x2);
    if (r == 0.0) return 0.0;
    return kI * (axis == 1 ? x1 : x2) / r;
  });
  return {std::move(out), u.lambda_min, u.lambda_max};
}

TestFunction translate(const TestFunction& u, double shift1, double shift2) {
  Field out = apply_symbol(u.u, [&](double x1, double x2) { return std::exp(-kI * (x1 * shift1 + x2 * shift2)); });
  return {std::move(out), u.lambda_min, u.lambda_max};
}

cplx fourier_at(const Field& u, double xi1, double xi2) {
  const PlaneGrid& g = u.grid;
  const int n = g.n();
  std::vector<cplx> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = std::exp(-kI * xi1 * g.node(i));
    b[i] = std::exp(-kI * xi2 * g.node(i));
  }
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    cplx row = 0.0;
    for (int j = 0; j < n; ++j) row += u.at(i, j) * b[j];
    acc += a[i] * row;
  }
  return acc * g.weight() / (2.0 * kPi);
}

std::vector<cplx> fourier_on_circle(const Field& u, double lambda, int nodes) {
  const PlaneGrid& g = u.grid;
  if (lambda >= g.nyquist()) throw AliasedSpectrum("lambda reaches Nyquist");
  if (nodes < 1) throw InvalidArgument("need at least one angular node");
  const int n = g.n();
  using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> field(u.data.data(), n, n);
  Eigen::MatrixXcd first(n, nodes), second(n, nodes);
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * kPi * k / nodes;
    const double c = std::cos(th), s = std::sin(th);
    for (int i = 0; i < n; ++i) {
      first(i, k) = std::exp(-kI * (lambda * c * g.node(i)));
      second(i, k) = std::exp(-kI * (lambda * s * g.node(i)));
    }
  }
  const Eigen::MatrixXcd partial = field * second;
  std::vector<cplx> out(nodes);
  const double scale = g.weight() / (2.0 * kPi);
  for (int k = 0; k < nodes; ++k) out[k] = scale * (first.col(k).transpose() * partial.col(k)).value();
  return out;
}

std::vector<cplx> fourier_on_circle(const TestFunction& u, double lambda, int nodes) {
  return fourier_on_circle(u.u, lambda, nodes);
}

cplx interpolate(const Field& u, double x1, double x2) {
  const PlaneGrid& g = u.grid;
  const int n = g.n();
  const double t1 = (x1 + g.half_width()) / g.spacing();
  const double t2 = (x2 + g.half_width()) / g.spacing();
  const int f1 = static_cast<int>(std::floor(t1)) - kStencil / 2 + 1;
  const int f2 = static_cast<int>(std::floor(t2)) - kStencil / 2 + 1;
  double w1[kStencil], w2[kStencil];
  lagrange_weights(t1, f1, w1);
  lagrange_weights(t2, f2, w2);
  cplx acc = 0.0;
  if (f1 >= 0 && f2 >= 0 && f1 + kStencil <= n && f2 + kStencil <= n) {
    for (int a = 0; a < kStencil; ++a) {
      const cplx* row_data = &u.data[static_cast<std::size_t>(f1 + a) * n + f2];
      cplx row = 0.0;
      for (int b = 0; b < kStencil; ++b) row += w2[b] * row_data[b];
      acc += w1[a] * row;
    }
    return acc;
  }
  for (int a = 0; a < kStencil; ++a) {
    const int i = f1 + a;
    if (i < 0 || i >= n) continue;
    cplx row = 0.0;
    for (int b = 0; b < kStencil; ++b) {
      const int j = f2 + b;
      if (j < 0 || j >= n) continue;
      row += w2[b] * u.at(i, j);
    }
    acc += w1[a] * row;
  }
  return acc;
}

cplx spherical_mean(const Field& u, double rho, int nodes) {
  if (nodes < 64) throw InvalidArgument("spherical mean needs at least 64 angular nodes");
  if (rho < 0.0 || rho > u.grid.half_width() * std::sqrt(2.0))
    throw OutOfDomain("radius outside the grid box");
  if (rho == 0.0) return interpolate(u, 0.0, 0.0);
  cplx acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * kPi * k / nodes;
    acc += interpolate(u, rho * std::cos(th), rho * std::sin(th));
  }
  return acc / double(nodes);
}

}  // namespace biscat
