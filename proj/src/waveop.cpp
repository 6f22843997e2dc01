#include "biscat/waveop.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

#include "biscat/specfun.hpp"

namespace biscat {

namespace {

// R(1, s) on s = j ds. R(lambda, r) = R(1, lambda r) / lambda^2.
constexpr double kUnitStep = 0.005;
// Radial profiles per support point, r = j dr.
constexpr double kProfileStep = 0.01;

std::shared_ptr<const std::vector<cplx>> unit_resolvent_table(double s_max) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<cplx>> table;
  std::lock_guard<std::mutex> lock(mu);
  const std::size_t need = static_cast<std::size_t>(std::ceil(s_max / kUnitStep)) + 8;
  if (table && table->size() >= need) return table;
  const std::size_t old = table ? table->size() : 0;
  auto next = std::make_shared<std::vector<cplx>>(std::max(need, 2 * old));
  if (table) std::copy(table->begin(), table->end(), next->begin());
  const std::size_t fresh = next->size() - old;
  parallel_for(fresh, [&](std::size_t i) {
    const std::size_t j = old + i;
    (*next)[j] = specfun::biharm_resolvent_kernel(1.0, j * kUnitStep);
  });
  table = std::move(next);
  return table;
}

// Cubic Lagrange interpolation of uniformly spaced samples at t = x / step.
inline cplx cubic(const cplx* data, std::size_t size, double t) {
  std::ptrdiff_t j = static_cast<std::ptrdiff_t>(t) - 1;
  j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(size) - 4);
  const double x = t - double(j);
  const double l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
  const double l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
  const double l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
  const double l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
  const cplx* d = data + j;
  return l0 * d[0] + l1 * d[1] + l2 * d[2] + l3 * d[3];
}

Vector to_vector(const std::vector<cplx>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector potential_values(const PotentialData& p) {
  Vector out(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(i)) = p.sign[i] * p.v[i] * p.v[i];
  return out;
}

Vector plain_v(const PotentialData& p) {
  Vector out(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(i)) = p.v[i];
  return out;
}

// Kernel matrix of R0^{+-}(lambda^4) with weights, plain values.
Matrix free_resolvent(double lambda, const PotentialData& p, WaveDirection dir) {
  Matrix r = plain_kernel(p, [lambda](double d) { return specfun::biharm_resolvent_kernel(lambda, d); });
  if (dir == WaveDirection::Plus) r = r.conjugate();
  return r;
}

// M^{+-}(lambda) with the sigma_min check.
Matrix birman_schwinger_dir(double lambda, const PotentialData& p, const WaveOperatorConfig& cfg) {
  Matrix m = birman_schwinger(lambda, p, cfg.inv_tol).matrix;
  if (cfg.direction == WaveDirection::Plus) m = m.conjugate();
  return m;
}

Vector qv_apply(double lambda, const Vector& f, const PotentialData& p, const WaveOperatorConfig& cfg) {
  const Vector v = plain_v(p);
  const Matrix m = birman_schwinger_dir(lambda, p, cfg);
  const Vector x = m.partialPivLu().solve(v.cwiseProduct(f));
  return v.cwiseProduct(x);
}

// (V R0)^{n-1} V f
Vector born_chain(int n, double lambda, const Vector& f, const PotentialData& p, WaveDirection dir) {
  const Vector V = potential_values(p);
  Vector g = V.cwiseProduct(f);
  if (n > 1) {
    const Matrix r = free_resolvent(lambda, p, dir);
    for (int k = 1; k < n; ++k) g = V.cwiseProduct(r * g);
  }
  return g;
}

// Free part and node operator for a mode.
struct Route {
  Field free_part;
  NodeOperator op;
};

Route make_route(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg) {
  const double a = cfg.split;
  switch (cfg.mode) {
    case WaveMode::FullInverse:
      return {u.u, [&p, cfg](double l, const Vector& f) { return qv_apply(l, f, p, cfg); }};
    case WaveMode::Born:
      if (cfg.born_order < 1) throw InvalidArgument("Born order must be at least 1");
      return {u.u, [&p, cfg](double l, const Vector& f) {
                Vector acc = Vector::Zero(f.size());
                double sign = 1.0;
                for (int n = 1; n <= cfg.born_order; ++n, sign = -sign)
                  acc += sign * born_chain(n, l, f, p, cfg.direction);
                return acc;
              }};
    case WaveMode::LowEnergy:
      return {apply_radial(u.u, [a](double l) -> cplx { return chi_low(a, l); }),
              [&p, cfg, a](double l, const Vector& f) -> Vector { return chi_low(a, l) * qv_apply(l, f, p, cfg); }};
    case WaveMode::HighEnergy:
      return {apply_radial(u.u, [a](double l) -> cplx { return chi_high(a, l); }),
              [&p, cfg, a](double l, const Vector& f) -> Vector { return chi_high(a, l) * qv_apply(l, f, p, cfg); }};
  }
  throw InvalidArgument("unknown wave mode");
}

std::vector<Point> grid_points(const PlaneGrid& g) {
  std::vector<Point> out(g.size());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) out[static_cast<std::size_t>(i) * g.n() + j] = {g.node(i), g.node(j)};
  return out;
}

std::vector<cplx> spectral_values(const Field& u, const std::vector<Point>& targets) {
  const PlaneGrid& g = u.grid;
  const int n = g.n();
  const std::vector<cplx> spec = fourier_transform(u);
  const double scale = (g.dual_spacing() * g.dual_spacing()) / (2.0 * kPi);
  std::vector<cplx> out(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) {
    const double x1 = targets[t][0], x2 = targets[t][1];
    std::vector<cplx> e2(n);
    for (int k = 0; k < n; ++k) e2[k] = std::exp(kI * (g.frequency(k) * x2));
    cplx acc = 0.0;
    for (int k1 = 0; k1 < n; ++k1) {
      cplx row = 0.0;
      const cplx* s = spec.data() + static_cast<std::size_t>(k1) * n;
      for (int k2 = 0; k2 < n; ++k2) row += s[k2] * e2[k2];
      acc += std::exp(kI * (g.frequency(k1) * x1)) * row;
    }
    out[t] = scale * acc;
  });
  return out;
}

}  // namespace

quad::Rule wave_lambda_rule(const TestFunction& u, const WaveOperatorConfig& cfg) {
  if (cfg.lambda_nodes < 1) throw InvalidArgument("need at least one lambda node");
  if (u.lambda_min < cfg.min_lambda)
    throw OutOfDomain("annulus starts at " + std::to_string(u.lambda_min) + ", below " +
                      std::to_string(cfg.min_lambda));
  if (u.lambda_max >= u.u.grid.nyquist()) throw AliasedSpectrum("annulus of u reaches Nyquist");
  const double margin = 0.05 * u.lambda_min;
  return quad::gauss_legendre(cfg.lambda_nodes, u.lambda_min - margin, u.lambda_max + margin);
}

std::vector<cplx> propagate_at(const TestFunction& u, const PotentialData& p, const NodeOperator& op,
                               const WaveOperatorConfig& cfg, const std::vector<Point>& targets) {
  if (p.size() == 0) return std::vector<cplx>(targets.size(), 0.0);
  const quad::Rule rule = wave_lambda_rule(u, cfg);
  const std::size_t nodes = rule.size(), ns = p.size();
  const double w_op = p.weight();

  // Source coefficients per node on the support.
  std::vector<Vector> source(nodes);
  parallel_for(nodes, [&](std::size_t k) {
    const double l = rule.nodes[k];
    const auto proj = spectral_projection(l, u, p.points, cfg.angular_nodes);
    source[k] = (rule.weights[k] * l * l * l * w_op) * op(l, to_vector(proj.values));
  });

  double r_max = 0.0;
  for (const auto& x : targets)
    for (const auto& y : p.points) r_max = std::max(r_max, std::hypot(x[0] - y[0], x[1] - y[1]));
  const double l_max = rule.nodes.back();
  const auto unit = unit_resolvent_table(l_max * (r_max + 4.0 * kProfileStep));
  const bool plus = cfg.direction == WaveDirection::Plus;

  // h_y(r) = sum_k c_k(y) R(lambda_k, r), fixed node order.
  const std::size_t m = static_cast<std::size_t>(std::ceil(r_max / kProfileStep)) + 5;
  std::vector<std::vector<cplx>> profile(ns, std::vector<cplx>(m, 0.0));
  parallel_for(ns, [&](std::size_t y) {
    auto& h = profile[y];
    for (std::size_t k = 0; k < nodes; ++k) {
      const double l = rule.nodes[k];
      cplx c = source[k](static_cast<Eigen::Index>(y)) / (l * l);
      if (c == cplx(0.0)) continue;
      for (std::size_t j = 0; j < m; ++j) {
        cplx val = cubic(unit->data(), unit->size(), l * j * kProfileStep / kUnitStep);
        h[j] += c * (plus ? std::conj(val) : val);
      }
    }
  });

  std::vector<cplx> out(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) {
    cplx acc = 0.0;
    for (std::size_t y = 0; y < ns; ++y) {
      const double r = std::hypot(targets[t][0] - p.points[y][0], targets[t][1] - p.points[y][1]);
      acc += cubic(profile[y].data(), m, r / kProfileStep);
    }
    out[t] = acc;
  });
  return out;
}

Field propagate(const TestFunction& u, const PotentialData& p, const NodeOperator& op, const WaveOperatorConfig& cfg) {
  return Field(u.u.grid, propagate_at(u, p, op, cfg, grid_points(u.u.grid)));
}

Field apply_wave_operator(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg) {
  Route route = make_route(u, p, cfg);
  return route.free_part - propagate(u, p, route.op, cfg);
}

std::vector<cplx> wave_operator_at(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg,
                                   const std::vector<Point>& targets) {
  Route route = make_route(u, p, cfg);
  std::vector<cplx> out = spectral_values(route.free_part, targets);
  const std::vector<cplx> scattered = propagate_at(u, p, route.op, cfg, targets);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= scattered[i];
  return out;
}

Field born_term(int n, const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg) {
  if (n < 1 || n > cfg.born_order) throw InvalidArgument("Born term order must lie in [1, n_max]");
  const double a = cfg.split;
  const WaveDirection dir = cfg.direction;
  return propagate(
      u, p, [&p, n, a, dir](double l, const Vector& f) -> Vector { return chi_high(a, l) * born_chain(n, l, f, p, dir); },
      cfg);
}

std::pair<Field, Field> low_high_split(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg) {
  WaveOperatorConfig low = cfg, high = cfg;
  low.mode = WaveMode::LowEnergy;
  high.mode = WaveMode::HighEnergy;
  return {apply_wave_operator(u, p, low), apply_wave_operator(u, p, high)};
}

cplx spectral_value(const Field& u, double x1, double x2) { return spectral_values(u, {{x1, x2}})[0]; }

double isometry_defect(const TestFunction& u, const Field& wu) {
  const double nu = l2_norm(u.u);
  if (nu == 0.0) throw InvalidArgument("isometry defect of the zero field");
  return std::abs(l2_norm(wu) - nu) / nu;
}

double intertwining_defect(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg,
                           const std::vector<Point>& centres) {
  const PlaneGrid& g = u.u.grid;
  const Field wu = apply_wave_operator(u, p, cfg);
  const TestFunction d4u{apply_radial(u.u, [](double l) -> cplx { return l * l * l * l; }), u.lambda_min,
                         u.lambda_max};
  const Field wd4u = apply_wave_operator(d4u, p, cfg);
  const std::vector<cplx> wu_support = wave_operator_at(u, p, cfg, p.points);
  const double norm_d4u = l2_norm(d4u.u);
  const double h2 = g.weight(), w_op = p.weight();

  double worst = 0.0;
  for (const auto& c : centres) {
    auto phi = [&c](double x1, double x2) {
      const double r2 = (x1 - c[0]) * (x1 - c[0]) + (x2 - c[1]) * (x2 - c[1]);
      return std::exp(-0.5 * r2);
    };
    cplx lhs = 0.0, rhs = 0.0;
    double phi_norm2 = 0.0;
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) {
        const double x1 = g.node(i), x2 = g.node(j);
        const double r2 = (x1 - c[0]) * (x1 - c[0]) + (x2 - c[1]) * (x2 - c[1]);
        const double f = phi(x1, x2);
        const double d4f = (r2 * r2 - 8.0 * r2 + 8.0) * f;
        lhs += wu.at(i, j) * d4f;
        rhs += wd4u.at(i, j) * f;
        phi_norm2 += f * f;
      }
    lhs *= h2;
    rhs *= h2;
    for (std::size_t y = 0; y < p.size(); ++y) {
      const double vy = p.sign[y] * p.v[y] * p.v[y];
      lhs += w_op * vy * wu_support[y] * phi(p.points[y][0], p.points[y][1]);
    }
    const double denom = norm_d4u * std::sqrt(h2 * phi_norm2);
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  return worst;
}

WaveMetrics wave_metrics(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg) {
  WaveMetrics m;
  WaveOperatorConfig full = cfg;
  full.mode = WaveMode::FullInverse;
  m.isometry_defect = isometry_defect(u, apply_wave_operator(u, p, full));
  m.intertwining_defect = intertwining_defect(u, p, full, {{0.0, 0.0}, {0.7, -0.4}, {2.0, 1.5}});
  double prev = 0.0;
  for (int n = 1; n <= cfg.born_order; ++n) {
    const double cur = l2_norm(born_term(n, u, p, cfg));
    if (n > 1) m.born_ratios.push_back(prev > 0.0 ? cur / prev : 0.0);
    prev = cur;
  }
  return m;
}

OmegaFunctional OmegaFunctional::constant(Matrix t, Multiplier mu) {
  return {[t = std::move(t)](double) { return t; }, std::move(mu)};
}

double kernel_l1_norm(const Matrix& t, const PotentialData& p) {
  if (!t.allFinite()) throw KernelNotIntegrable("kernel has non-finite entries");
  return t.cwiseAbs().sum() * p.weight();
}

Field omega_apply(const OmegaFunctional& f, const TestFunction& u, const PotentialData& p,
                  const WaveOperatorConfig& cfg) {
  if (!f.mu.gmu_order) throw NotGMU("multiplier kappa is not GMU-certified");
  const auto& kernel = f.kernel;
  const auto& kappa = f.mu.symbol;
  const Eigen::Index n = static_cast<Eigen::Index>(p.size());
  return propagate(
      u, p,
      [&kernel, &kappa, n](double l, const Vector& proj) -> Vector {
        const Matrix t = kernel(l);
        if (t.rows() != n || t.cols() != n) throw GridMismatch("kernel size does not match the support");
        if (!t.allFinite()) throw KernelNotIntegrable("kernel has non-finite entries");
        return (l * l * kappa(l)) * (t * proj);
      },
      cfg);
}

Field omega_apply_ibp(const std::function<Matrix(double)>& second_derivative, const Multiplier& mu,
                      const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg, int panels,
                      int tail_nodes) {
  if (panels < 1 || tail_nodes < 1) throw InvalidArgument("need at least one rho panel and tail node");
  std::vector<double> edges(panels + 1);
  for (int k = 0; k <= panels; ++k) edges[k] = u.lambda_min + (u.lambda_max - u.lambda_min) * k / panels;
  quad::Rule rho = quad::composite(edges, 8);
  const quad::Rule& tail = quad::gauss_laguerre(tail_nodes, 0.0);
  for (std::size_t k = 0; k < tail.size(); ++k) {
    rho.nodes.push_back(u.lambda_max + tail.nodes[k]);
    rho.weights.push_back(tail.weights[k] * std::exp(tail.nodes[k]));
  }
  Field out(u.u.grid);
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double r = rho.nodes[k];
    const TestFunction cut{apply_radial(u.u, [r](double l) -> cplx { return std::max(0.0, 1.0 - l / r); }),
                           u.lambda_min, u.lambda_max};
    const OmegaFunctional f = OmegaFunctional::constant(second_derivative(r), mu);
    out += cplx(rho.weights[k] * r) * omega_apply(f, cut, p, cfg);
  }
  return out;
}

double omega_bound_constant(const OmegaFunctional& f, const TestFunction& u, const PotentialData& p,
                            const WaveOperatorConfig& cfg) {
  const quad::Rule rule = wave_lambda_rule(u, cfg);
  double t_norm = 0.0;
  for (double l : rule.nodes) t_norm = std::max(t_norm, kernel_l1_norm(f.kernel(l), p));
  const double nu = l2_norm(u.u);
  if (t_norm == 0.0 || nu == 0.0) return 0.0;
  return l2_norm(omega_apply(f, u, p, cfg)) / (t_norm * nu);
}

}  // namespace biscat
