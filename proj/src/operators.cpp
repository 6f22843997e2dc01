#include "biscat/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "biscat/specfun.hpp"

namespace biscat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (trim(s.substr(used)) != "") throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

// Positional or key=value arguments mapped onto the parameter names of a family.
std::map<std::string, double> parse_args(const std::string& args, const std::vector<std::string>& names,
                                         std::size_t required) {
  std::map<std::string, double> out;
  std::stringstream ss(args);
  std::string tok;
  std::size_t pos = 0;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      const std::string key = trim(tok.substr(0, eq));
      if (std::find(names.begin(), names.end(), key) == names.end())
        throw InvalidArgument("unknown potential parameter '" + key + "'");
      out[key] = parse_number(tok.substr(eq + 1));
    } else {
      if (pos >= names.size()) throw InvalidArgument("too many potential parameters");
      out[names[pos]] = parse_number(tok);
    }
    ++pos;
  }
  for (std::size_t i = 0; i < required; ++i)
    if (!out.count(names[i])) throw InvalidArgument("missing potential parameter '" + names[i] + "'");
  return out;
}

double get(const std::map<std::string, double>& m, const std::string& k, double fallback) {
  auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

std::vector<double> read_csv_potential(const std::string& path, const PlaneGrid& g) {
  std::ifstream in(path);
  if (!in) throw Io("cannot open potential file '" + path + "'");
  std::vector<double> values(g.size(), 0.0);
  std::vector<char> seen(g.size(), 0);
  std::string line;
  std::size_t count = 0;
  const double h = g.spacing();
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ','))
      throw Io("potential CSV rows need x1,x2,V");
    double x1, x2, val;
    try {
      x1 = parse_number(trim(a));
      x2 = parse_number(trim(b));
      val = parse_number(trim(c));
    } catch (const InvalidArgument&) {
      if (count == 0) continue;  // header
      throw Io("malformed potential CSV row: " + line);
    }
    const double t1 = (x1 + g.half_width()) / h, t2 = (x2 + g.half_width()) / h;
    const long i1 = std::lround(t1), i2 = std::lround(t2);
    if (std::abs(t1 - i1) > 1e-6 || std::abs(t2 - i2) > 1e-6 || i1 < 0 || i2 < 0 || i1 >= g.n() || i2 >= g.n())
      throw GridMismatch("potential node (" + a + ", " + b + ") is not a grid node");
    const std::size_t idx = static_cast<std::size_t>(i1) * g.n() + i2;
    if (seen[idx]) throw GridMismatch("duplicate potential node (" + a + ", " + b + ")");
    seen[idx] = 1;
    values[idx] = val;
    ++count;
  }
  if (count != g.size())
    throw GridMismatch("potential file has " + std::to_string(count) + " nodes, grid has " + std::to_string(g.size()));
  return values;
}

DecayReport decay_report(const PlaneGrid& g, const std::vector<double>& values) {
  DecayReport d;
  const double w = g.weight();
  const double outer = 0.8 * g.half_width();
  double outer_moment = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const double V = std::abs(values[static_cast<std::size_t>(i) * g.n() + j]);
      if (V == 0.0) continue;
      const double r = std::hypot(g.node(i), g.node(j));
      const double jr = japanese(r);
      d.moment3 += std::pow(jr, 3.0) * V * w;
      const double m10 = std::pow(jr, 10.1) * V * w;
      d.moment10 += m10;
      if (r > outer) outer_moment += m10;
    }
  d.outer_fraction = d.moment10 > 0.0 ? outer_moment / d.moment10 : 0.0;
  d.decay_ok = d.outer_fraction <= 1e-3;
  // Unit discs centred on every other node.
  const int reach = static_cast<int>(std::ceil(1.0 / g.spacing()));
  for (int ci = 0; ci < g.n(); ci += 2)
    for (int cj = 0; cj < g.n(); cj += 2) {
      double s = 0.0;
      for (int a = std::max(0, ci - reach); a <= std::min(g.n() - 1, ci + reach); ++a)
        for (int b = std::max(0, cj - reach); b <= std::min(g.n() - 1, cj + reach); ++b) {
          const double dx = (a - ci) * g.spacing(), dy = (b - cj) * g.spacing();
          if (dx * dx + dy * dy > 1.0) continue;
          const double V = values[static_cast<std::size_t>(a) * g.n() + b];
          s += V * V * w;
        }
      d.lq_local_uniform = std::max(d.lq_local_uniform, std::sqrt(s));
    }
  return d;
}

// Lattice offsets of the support points in units of h.
struct LatticeIndex {
  std::vector<int> i1, i2;
  int span = 0;
};

LatticeIndex lattice(const PotentialData& p) {
  LatticeIndex L;
  const int n = p.grid.n();
  int lo1 = n, hi1 = 0, lo2 = n, hi2 = 0;
  for (std::size_t idx : p.support) {
    const int a = static_cast<int>(idx / n), b = static_cast<int>(idx % n);
    L.i1.push_back(a);
    L.i2.push_back(b);
    lo1 = std::min(lo1, a);
    hi1 = std::max(hi1, a);
    lo2 = std::min(lo2, b);
    hi2 = std::max(hi2, b);
  }
  L.span = std::max(hi1 - lo1, hi2 - lo2);
  return L;
}

Matrix kernel_matrix(const PotentialData& p, const std::function<cplx(double)>& kernel, bool sandwich) {
  const LatticeIndex L = lattice(p);
  const int span = L.span;
  const std::size_t top = static_cast<std::size_t>(2 * span * span + 1);
  std::vector<char> used(top, 0);
  for (int a = 0; a <= span; ++a)
    for (int b = a; b <= span; ++b) used[static_cast<std::size_t>(a * a + b * b)] = 1;
  std::vector<std::size_t> keys;
  for (std::size_t k = 0; k < top; ++k)
    if (used[k]) keys.push_back(k);
  std::vector<cplx> table(top, 0.0);
  const double h = p.grid.spacing();
  parallel_for(keys.size(), [&](std::size_t t) {
    const std::size_t k = keys[t];
    table[k] = kernel(h * std::sqrt(double(k)));
  });
  const Eigen::Index n = static_cast<Eigen::Index>(p.size());
  Matrix m(n, n);
  const double w = p.weight();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const int da = L.i1[i] - L.i1[j], db = L.i2[i] - L.i2[j];
      cplx val = table[static_cast<std::size_t>(da * da + db * db)] * w;
      if (sandwich) val *= p.v[i] * p.v[j];
      m(i, j) = val;
    }
  return m;
}

// e^{-x} Ei(x) for x > 0.
double exp_ei(double x) {
  if (x < 40.0) return std::exp(-x) * std::expint(x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= k / x;
    sum += term;
    if (term < 1e-17) break;
  }
  return sum / x;
}

// e^{x} E1(x) for x > 0.
double exp_e1(double x) {
  if (x < 40.0) return -std::exp(x) * std::expint(-x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -k / x;
    sum += term;
    if (std::abs(term) < 1e-17) break;
  }
  return sum / x;
}

// Average of log(x^2 + y^2) over the cell [-h/2, h/2]^2.
double cell_average_log(double h) { return std::log(0.5 * h * h) - 3.0 + 0.5 * kPi; }

std::mutex& fft1d_mutex() {
  static std::mutex m;
  return m;
}

// Linear convolution via a padded power-of-two FFT.
std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<cplx> fa(n, 0.0), fb(n, 0.0);
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fft1d_mutex());
    auto* buf = reinterpret_cast<fftw_complex*>(fa.data());
    fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(fa.data()), reinterpret_cast<fftw_complex*>(fa.data()));
  fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(fb.data()), reinterpret_cast<fftw_complex*>(fb.data()));
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i] / double(n);
  fftw_execute_dft(bwd, reinterpret_cast<fftw_complex*>(fa.data()), reinterpret_cast<fftw_complex*>(fa.data()));
  {
    std::lock_guard<std::mutex> lock(fft1d_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fa.resize(out_len);
  return fa;
}

// Output samples cover rho^2 up to 2 R^2 (the grid corners).
std::size_t output_length(const PlaneGrid& g) {
  const std::size_t half = static_cast<std::size_t>(g.n() / 2);
  return 2 * half * half + 1;
}

}  // namespace

double PotentialData::weighted_l1(double s) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double r = std::hypot(points[k][0], points[k][1]);
    acc += std::pow(japanese(r), s) * v[k] * v[k];
  }
  return acc * weight();
}

PotentialData make_potential(const PlaneGrid& grid, const std::vector<double>& values, const std::string& source,
                             double support_tol) {
  if (values.size() != grid.size()) throw GridMismatch("potential values do not match the grid");
  PotentialData p{grid, source, values, {}, {}, {}, {}, 0.0, {}};
  double vmax = 0.0;
  for (double x : values) vmax = std::max(vmax, std::abs(x));
  const double cut = support_tol * vmax;
  const int n = grid.n();
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double V = values[idx];
    if (!(std::abs(V) > cut) || V == 0.0) continue;
    p.support.push_back(idx);
    p.points.push_back({grid.node(static_cast<int>(idx / n)), grid.node(static_cast<int>(idx % n))});
    p.v.push_back(std::sqrt(std::abs(V)));
    p.sign.push_back(V < 0.0 ? -1.0 : 1.0);
    p.l1_norm += std::abs(V);
  }
  if (p.support.empty()) throw EmptySupport("potential '" + source + "' vanishes on the grid");
  p.l1_norm *= grid.weight();
  p.decay = decay_report(grid, values);
  return p;
}

PotentialData load_potential(const std::string& spec, const PlaneGrid& grid, double support_tol) {
  const auto colon = spec.find(':');
  const std::string kind = trim(spec.substr(0, colon));
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  std::vector<double> V(grid.size(), 0.0);
  auto fill = [&](const std::function<double(double, double)>& f) {
    for (int i = 0; i < grid.n(); ++i)
      for (int j = 0; j < grid.n(); ++j) V[static_cast<std::size_t>(i) * grid.n() + j] = f(grid.node(i), grid.node(j));
  };
  if (kind == "zero") {
    // falls through to EmptySupport
  } else if (kind == "gaussian") {
    const auto a = parse_args(args, {"beta", "sigma", "x0", "y0"}, 2);
    const double beta = a.at("beta"), sigma = a.at("sigma"), x0 = get(a, "x0", 0.0), y0 = get(a, "y0", 0.0);
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian width must be positive");
    fill([&](double x, double y) {
      const double d2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
      return -beta * std::exp(-d2 / (sigma * sigma));
    });
  } else if (kind == "well") {
    const auto a = parse_args(args, {"beta", "r0", "delta"}, 2);
    const double beta = a.at("beta"), r0 = a.at("r0"), delta = get(a, "delta", 0.1);
    if (!(r0 > 0.0) || !(delta > 0.0) || delta * delta >= 2.0 * r0 * r0)
      throw InvalidArgument("well needs r0 > 0 and 0 < delta < sqrt(2) r0");
    // Radius chosen so the mollified profile keeps the area pi r0^2.
    const double r_eff = std::sqrt(r0 * r0 - 0.5 * delta * delta);
    fill([&](double x, double y) { return -beta * 0.5 * std::erfc((std::hypot(x, y) - r_eff) / delta); });
  } else if (kind == "aniso") {
    const auto a = parse_args(args, {"beta", "sx", "sy", "theta"}, 3);
    const double beta = a.at("beta"), sx = a.at("sx"), sy = a.at("sy"), th = get(a, "theta", 0.0);
    if (!(sx > 0.0) || !(sy > 0.0)) throw InvalidArgument("aniso widths must be positive");
    const double c = std::cos(th), s = std::sin(th);
    fill([&](double x, double y) {
      const double u = c * x + s * y, w = -s * x + c * y;
      return -beta * std::exp(-(u * u) / (sx * sx) - (w * w) / (sy * sy));
    });
  } else {
    V = read_csv_potential(spec, grid);
  }
  return make_potential(grid, V, spec, support_tol);
}

DiscreteOperator DiscreteOperator::compose(const DiscreteOperator& right) const {
  if (matrix.cols() != right.matrix.rows()) throw GridMismatch("operator sizes do not compose");
  return {matrix * right.matrix, label + "*" + right.label, lambda ? lambda : right.lambda};
}

DiscreteOperator DiscreteOperator::adjoint() const { return {matrix.adjoint(), label + "^*", lambda}; }

Matrix sandwiched_kernel(const PotentialData& p, const std::function<cplx(double)>& kernel) {
  return kernel_matrix(p, kernel, true);
}

Matrix plain_kernel(const PotentialData& p, const std::function<cplx(double)>& kernel) {
  return kernel_matrix(p, kernel, false);
}

Matrix sign_matrix(const PotentialData& p) {
  Vector d(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) d(static_cast<Eigen::Index>(i)) = p.sign[i];
  return d.asDiagonal();
}

DiscreteOperator sandwiched_resolvent(double lambda, const PotentialData& p) {
  if (!(lambda > 0.0)) throw LambdaOutOfRange("sandwiched resolvent needs lambda > 0");
  Matrix m = sandwiched_kernel(p, [lambda](double r) { return specfun::biharm_resolvent_kernel(lambda, r); });
  return {std::move(m), "MvR0Mv", lambda};
}

double smallest_singular_value(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

double largest_singular_value(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

DiscreteOperator birman_schwinger(double lambda, const PotentialData& p, double inv_tol) {
  DiscreteOperator r = sandwiched_resolvent(lambda, p);
  r.matrix += sign_matrix(p);
  r.label = "M+";
  const double smin = smallest_singular_value(r.matrix);
  if (smin < inv_tol)
    throw SingularAtLambda("sigma_min(M+(" + std::to_string(lambda) + ")) = " + std::to_string(smin));
  return r;
}

std::vector<cplx> projection_from_circle(double lambda, const std::vector<cplx>& circle,
                                         const std::vector<Point>& points) {
  const int K = static_cast<int>(circle.size());
  std::vector<double> c(K), s(K);
  for (int k = 0; k < K; ++k) {
    const double th = 2.0 * kPi * k / K;
    c[k] = std::cos(th);
    s[k] = std::sin(th);
  }
  std::vector<cplx> out(points.size());
  const double scale = 1.0 / (lambda * lambda * K);
  for (std::size_t p = 0; p < points.size(); ++p) {
    cplx acc = 0.0;
    for (int k = 0; k < K; ++k) acc += std::exp(kI * (lambda * (points[p][0] * c[k] + points[p][1] * s[k]))) * circle[k];
    out[p] = acc * scale;
  }
  return out;
}

SpectralProjectionSample spectral_projection(double lambda, const TestFunction& u, const std::vector<Point>& points,
                                             int nodes) {
  if (!(lambda > 0.0)) throw LambdaOutOfRange("spectral projection needs lambda > 0");
  const auto circle = fourier_on_circle(u, lambda, nodes);
  return {lambda, nodes, projection_from_circle(lambda, circle, points)};
}

cplx RadialProfile::at_square(double r) const {
  if (r < 0.0 || values.empty()) return 0.0;
  const double t = r / dr;
  const std::size_t k = static_cast<std::size_t>(t);
  if (k + 1 >= values.size()) return k + 1 == values.size() && t == double(k) ? values.back() : cplx(0.0);
  const double f = t - double(k);
  return (1.0 - f) * values[k] + f * values[k + 1];
}

Field RadialProfile::to_field(const PlaneGrid& g) const {
  Field out(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const double r = g.node(i) * g.node(i) + g.node(j) * g.node(j);
      const std::size_t k = static_cast<std::size_t>(std::llround(r / dr));
      out.at(i, j) = k < values.size() ? values[k] : cplx(0.0);
    }
  return out;
}

RadialProfile spherical_mean_profile(const Field& u, int nodes) {
  const PlaneGrid& g = u.grid;
  const std::size_t half = static_cast<std::size_t>(g.n() / 2);
  const std::size_t count = half * half + 1;
  RadialProfile m{g.weight(), std::vector<cplx>(count)};
  parallel_for(count, [&](std::size_t k) { m.values[k] = spherical_mean(u, g.spacing() * std::sqrt(double(k)), nodes); });
  return m;
}

namespace {

RadialProfile ktilde1_from_mean(const PlaneGrid& g, const RadialProfile& m) {
  const std::size_t M = m.values.size(), J = output_length(g);
  const double dr = m.dr;
  const cplx m0 = m.values[0];
  std::vector<cplx> rem(M);
  for (std::size_t k = 0; k < M; ++k) rem[k] = m.values[k] - m0 * std::exp(-double(k) * dr);
  // PV int rem(r)/(r_j - r) dr by the alternating-node rule: sum over j - k odd of 2 rem_k/(j - k).
  std::vector<cplx> kern(M - 1 + J, 0.0);
  for (std::size_t t = 0; t < kern.size(); ++t) {
    const long d = static_cast<long>(t) - static_cast<long>(M - 1);
    if (d % 2 != 0) kern[t] = 2.0 / double(d);
  }
  const auto pv = convolve(rem, kern);
  RadialProfile out{dr, std::vector<cplx>(J)};
  const double origin_ei = kEulerGamma + cell_average_log(g.spacing());
  for (std::size_t j = 0; j < J; ++j) {
    const double r = double(j) * dr;
    const double analytic = j == 0 ? origin_ei : exp_ei(r);
    const cplx hilbert = pv[j + M - 1] + m0 * analytic;
    const cplx local = j < M ? m.values[j] : cplx(0.0);
    out.values[j] = -hilbert / (4.0 * kPi) + 0.25 * kI * local;
  }
  return out;
}

RadialProfile ktilde2_from_mean(const PlaneGrid& g, const RadialProfile& m) {
  const std::size_t M = m.values.size(), J = output_length(g);
  const double dr = m.dr;
  const cplx m0 = m.values[0];
  std::vector<cplx> rev(M);
  for (std::size_t k = 0; k < M; ++k) {
    const cplx rem = m.values[k] - m0 * std::exp(-double(k) * dr);
    rev[M - 1 - k] = (k + 1 == M) ? 0.5 * rem : rem;
  }
  std::vector<cplx> kern(J + M - 1, 0.0);
  for (std::size_t t = 1; t < kern.size(); ++t) kern[t] = 1.0 / double(t);
  const auto sum = convolve(rev, kern);
  RadialProfile out{dr, std::vector<cplx>(J)};
  const double origin_e1 = -kEulerGamma - cell_average_log(g.spacing());
  for (std::size_t j = 0; j < J; ++j) {
    const double r = double(j) * dr;
    const double analytic = j == 0 ? origin_e1 : exp_e1(r);
    out.values[j] = (sum[j + M - 1] + m0 * analytic) / (4.0 * kPi);
  }
  return out;
}

}  // namespace

RadialProfile ktilde1_profile(const TestFunction& u) {
  return ktilde1_from_mean(u.u.grid, spherical_mean_profile(u.u));
}

RadialProfile ktilde2_profile(const TestFunction& u) {
  return ktilde2_from_mean(u.u.grid, spherical_mean_profile(u.u));
}

Field ktilde1(const TestFunction& u) { return ktilde1_profile(u).to_field(u.u.grid); }

Field ktilde2(const TestFunction& u) { return ktilde2_profile(u).to_field(u.u.grid); }

Field k_operator(const RadialSymbol& kappa, const TestFunction& u) {
  const Multiplier m = Multiplier::certified(kappa);
  const TestFunction ku = apply_multiplier(m, u);
  const PlaneGrid& g = u.u.grid;
  const RadialProfile mean = spherical_mean_profile(ku.u);
  const RadialProfile k1 = ktilde1_from_mean(g, mean), k2 = ktilde2_from_mean(g, mean);
  RadialProfile half{k1.dr, std::vector<cplx>(k1.values.size())};
  for (std::size_t j = 0; j < half.values.size(); ++j) half.values[j] = 0.5 * (k1.values[j] - k2.values[j]);
  return half.to_field(g);
}

Field resolvent_multiplier(const Point& y, double a, const TestFunction& u) {
  const double dist = std::hypot(y[0], y[1]);
  if (dist == 0.0) throw ZeroOffset("resolvent multiplier needs y != 0");
  const PlaneGrid& g = u.u.grid;
  if (u.lambda_max >= g.nyquist()) throw AliasedSpectrum("annulus of u reaches Nyquist");
  const int n = g.n(), half = n / 2;
  const std::size_t top = static_cast<std::size_t>(2 * half * half + 1);
  std::vector<cplx> table(top, 0.0);
  std::vector<char> filled(top, 0);
  const double dxi = g.dual_spacing();
  for (int a1 = 0; a1 <= half; ++a1)
    for (int a2 = a1; a2 <= half; ++a2) filled[static_cast<std::size_t>(a1 * a1 + a2 * a2)] = 1;
  std::vector<std::size_t> keys;
  for (std::size_t k = 1; k < top; ++k)
    if (filled[k]) keys.push_back(k);
  parallel_for(keys.size(), [&](std::size_t t) {
    const std::size_t k = keys[t];
    const double xi = dxi * std::sqrt(double(k));
    const double cut = chi_high(a, xi);
    table[k] = cut == 0.0 ? cplx(0.0) : cut * specfun::biharm_resolvent_kernel(xi, dist);
  });
  return apply_symbol(u.u, [&](double x1, double x2) {
    const long k1 = std::lround(x1 / dxi), k2 = std::lround(x2 / dxi);
    return table[static_cast<std::size_t>(k1 * k1 + k2 * k2)];
  });
}

}  // namespace biscat
