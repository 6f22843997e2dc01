#include "biscat/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "biscat/specfun.hpp"

namespace biscat {

namespace {

using RealMatrix = Eigen::MatrixXd;

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix diag(const Vector& d) { return d.asDiagonal(); }

Vector scaled_v(const PotentialData& p) {
  const double sw = std::sqrt(p.weight());
  Vector v(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = sw * p.v[i];
  return v;
}

Vector plain_v(const PotentialData& p) {
  Vector v(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = p.v[i];
  return v;
}

Vector sign_vector(const PotentialData& p) {
  Vector u(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) u(static_cast<Eigen::Index>(i)) = p.sign[i];
  return u;
}

// sigma_min / max(sigma_max, scale)
double reciprocal_condition(const Matrix& m, double scale = 0.0) {
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double top = std::max(s.size() ? s(0) : 0.0, scale);
  if (s.size() == 0 || top == 0.0) return 0.0;
  return s(s.size() - 1) / top;
}

Matrix checked_inverse(const Matrix& m, double tol, bool& ok, double scale = 0.0) {
  ok = reciprocal_condition(m, scale) > tol;
  return m.partialPivLu().inverse();
}

// Eigen-decomposition of the real symmetric compression E^T T0 E.
Eigen::SelfAdjointEigenSolver<RealMatrix> s0t0s0_eigen(const PotentialData& p, const ProjectionSet& proj,
                                                        const ExpansionKernels& k) {
  const Matrix t0 = t0_matrix(p, k);
  const RealMatrix e = proj.s0_basis.real();
  RealMatrix c = e.transpose() * t0.real() * e;
  c = 0.5 * (c + c.transpose());
  return Eigen::SelfAdjointEigenSolver<RealMatrix>(c);
}

// Discrete bi-Laplacian (5-point Laplacian applied twice) on nodes at least
// two steps from the boundary.
double bilaplacian_residual(const PotentialData& p, const std::vector<cplx>& phi) {
  const PlaneGrid& g = p.grid;
  const int n = g.n();
  const double h2 = g.weight();
  auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(i) * n + j]; };
  std::vector<cplx> lap(phi.size(), 0.0);
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j)
      lap[static_cast<std::size_t>(i) * n + j] =
          (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j)) / h2;
  double num = 0.0, den = 0.0;
  for (int i = 2; i + 2 < n; ++i)
    for (int j = 2; j + 2 < n; ++j) {
      const auto L = [&](int a, int b) { return lap[static_cast<std::size_t>(a) * n + b]; };
      const cplx bl = (L(i + 1, j) + L(i - 1, j) + L(i, j + 1) + L(i, j - 1) - 4.0 * L(i, j)) / h2;
      const cplx vphi = p.values[static_cast<std::size_t>(i) * n + j] * at(i, j);
      num += std::norm(bl + vphi);
      den += std::norm(vphi);
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace

Matrix ProjectionSet::P() const { return vt * vt.adjoint(); }
Matrix ProjectionSet::Q() const { return identity(size()) - P(); }
Matrix ProjectionSet::S0perp() const { return s0perp_basis * s0perp_basis.adjoint(); }
Matrix ProjectionSet::S0() const { return Q() - S0perp(); }

Vector ProjectionSet::apply_Q(const Vector& f) const { return f - vt * vt.dot(f); }

Vector ProjectionSet::apply_S0(const Vector& f) const {
  return apply_Q(f) - s0perp_basis * (s0perp_basis.adjoint() * f);
}

std::array<Vector, 3> moment_vectors(const PotentialData& p) {
  const Vector v = scaled_v(p);
  Vector x1 = v, x2 = v;
  for (std::size_t i = 0; i < p.size(); ++i) {
    x1(static_cast<Eigen::Index>(i)) *= p.points[i][0];
    x2(static_cast<Eigen::Index>(i)) *= p.points[i][1];
  }
  return {v, x1, x2};
}

ProjectionSet build_projections(const PotentialData& p) {
  if (p.size() < 8) throw DegenerateMoments("potential support has fewer than 8 nodes");
  const auto mv = moment_vectors(p);
  ProjectionSet s;
  s.vt = mv[0] / mv[0].norm();
  for (int j = 0; j < 2; ++j) {
    s.c[j] = s.vt.dot(mv[j + 1]).real() / mv[0].norm();
    s.phi[j] = mv[j + 1] - s.c[j] * mv[0];
    if (s.phi[j].norm() < 1e-12 * std::max(mv[j + 1].norm(), p.grid.half_width() * mv[0].norm()))
      throw DegenerateMoments("phi_" + std::to_string(j + 1) + " vanishes: support lies on a line");
  }
  const Eigen::Index n = s.size();
  Matrix m(n, 3);
  m << s.vt, s.phi[0], s.phi[1];
  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix r = qr.matrixQR().topRows(3).triangularView<Eigen::Upper>();
  if (std::abs(r(2, 2)) < 1e-12 * std::max(s.phi[0].norm(), s.phi[1].norm()))
    throw DegenerateMoments("phi_1 and phi_2 are linearly dependent");
  const Matrix full = qr.householderQ();
  s.s0perp_basis = full.middleCols(1, 2);
  s.s0_basis = full.rightCols(n - 3);
  s.q_basis = full.rightCols(n - 1);
  return s;
}

double rank_two_identity_residual(const PotentialData& p, const ProjectionSet& proj) {
  const Matrix g2 = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g2(r)); });
  const Matrix q = proj.Q();
  const Matrix lhs = q * g2 * q;
  const Matrix rhs = 0.5 * (proj.phi[0] * proj.phi[0].transpose() + proj.phi[1] * proj.phi[1].transpose());
  return (lhs - rhs).norm() / lhs.norm();
}

cplx scaling_constant(const PotentialData& p) { return 8.0 / (kI * p.l1_norm); }

ExpansionKernels expansion_kernels(const PotentialData& p) {
  ExpansionKernels k;
  k.g2 = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g2(r)); });
  k.g2l = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g2l(r)); });
  k.g4 = sandwiched_kernel(p, [](double r) { return specfun::tail_g4(r); });
  k.g6 = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g6(r)); });
  k.g6l = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g6l(r)); });
  return k;
}

Matrix t0_matrix(const PotentialData& p, const ExpansionKernels& k) { return sign_matrix(p) + k.g2l; }

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Regular: return "regular";
    case Verdict::Singular: return "singular";
    case Verdict::Borderline: return "borderline";
  }
  return "unknown";
}

std::vector<double> s0t0s0_spectrum(const PotentialData& p) {
  const auto proj = build_projections(p);
  ExpansionKernels k;
  k.g2l = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g2l(r)); });
  const auto es = s0t0s0_eigen(p, proj, k);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

ClassificationReport classify_zero_energy(const PotentialData& p, double tol, bool allow_borderline) {
  const auto proj = build_projections(p);
  ExpansionKernels k;
  k.g2l = sandwiched_kernel(p, [](double r) { return cplx(specfun::tail_g2l(r)); });
  const auto es = s0t0s0_eigen(p, proj, k);
  const Eigen::VectorXd ev = es.eigenvalues();
  Eigen::Index imin = 0;
  ev.cwiseAbs().minCoeff(&imin);
  ClassificationReport rep;
  rep.sigma_min = std::abs(ev(imin));
  rep.sigma_max = ev.cwiseAbs().maxCoeff();
  rep.ratio = rep.sigma_max > 0.0 ? rep.sigma_min / rep.sigma_max : 0.0;
  if (rep.ratio >= 0.1 * tol && rep.ratio <= 10.0 * tol) {
    rep.verdict = Verdict::Borderline;
    if (!allow_borderline)
      throw Borderline("sigma_min/sigma_max = " + std::to_string(rep.ratio) + " is within a decade of tol");
    return rep;
  }
  if (rep.ratio > tol) {
    rep.verdict = Verdict::Regular;
    return rep;
  }
  rep.verdict = Verdict::Singular;
  const Vector f = proj.s0_basis * es.eigenvectors().col(imin).cast<cplx>();
  rep.null_vector = f;
  // (M_U + G2l^{(v)}) f = (c0 + c1 x1 + c2 x2) v, least squares.
  const Vector tf = t0_matrix(p, k) * f;
  const auto mv = moment_vectors(p);
  Matrix basis(f.size(), 3);
  basis << mv[0], mv[1], mv[2];
  const Vector c = basis.colPivHouseholderQr().solve(tf);
  for (int j = 0; j < 3; ++j) rep.moments[j] = c(j);
  rep.moment_residual = (basis * c - tf).norm() / tf.norm();
  // Phi(f)(x) = int G2l(x - y) v(y) f(y) dy - (c0 + c1 x1 + c2 x2).
  const PlaneGrid& g = p.grid;
  const Vector vs = scaled_v(p);
  Vector vf = vs.cwiseProduct(f);  // v f w on support values
  rep.resonance.assign(g.size(), 0.0);
  parallel_for(g.size(), [&](std::size_t idx) {
    const double x1 = g.node(static_cast<int>(idx / g.n())), x2 = g.node(static_cast<int>(idx % g.n()));
    cplx acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
      acc += specfun::tail_g2l(std::hypot(x1 - p.points[j][0], x2 - p.points[j][1])) * vf(static_cast<Eigen::Index>(j));
    rep.resonance[idx] = acc - (c(0) + c(1) * x1 + c(2) * x2);
  });
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double x1 = g.node(static_cast<int>(idx / g.n())), x2 = g.node(static_cast<int>(idx % g.n()));
    rep.growth = std::max(rep.growth, std::abs(rep.resonance[idx]) / japanese(std::hypot(x1, x2)));
  }
  rep.bilaplacian_residual = bilaplacian_residual(p, rep.resonance);
  return rep;
}

Vector resonance_inverse(const PotentialData& p, const std::vector<cplx>& phi) {
  if (phi.size() != p.grid.size()) throw GridMismatch("resonance samples do not match the potential grid");
  const double sw = std::sqrt(p.weight());
  Vector out(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(i)) = sw * p.sign[i] * p.v[i] * phi[p.support[i]];
  return out;
}

ThresholdExpansion assemble_expansion(double lambda, const PotentialData& p, double a) {
  const auto proj = build_projections(p);
  return assemble_expansion(lambda, p, proj, expansion_kernels(p), a);
}

ThresholdExpansion assemble_expansion(double lambda, const PotentialData& p, const ProjectionSet& proj,
                                      const ExpansionKernels& k, double a) {
  if (!(lambda > 0.0 && lambda < a))
    throw LambdaOutOfRange("lambda = " + std::to_string(lambda) + " outside (0, " + std::to_string(a) + ")");
  {
    const auto es = s0t0s0_eigen(p, proj, k);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    const double ratio = ev.minCoeff() / ev.maxCoeff();
    if (ratio <= 10.0 * 1e-6) throw SingularPotential("S0 T0 S0 is (nearly) singular: ratio " + std::to_string(ratio));
  }
  ThresholdExpansion x;
  const double l2 = lambda * lambda, l4 = l2 * l2, l6 = l4 * l2;
  const Eigen::Index n = proj.size();
  x.lambda = lambda;
  x.cv = scaling_constant(p);
  x.g1 = specfun::g_n(1, cplx(lambda, 0.0));
  const cplx g3 = specfun::g_n(3, cplx(lambda, 0.0));
  x.P = proj.P();
  x.Q = proj.Q();
  const Matrix t0 = t0_matrix(p, k);
  x.t0_tilde = x.cv * t0;
  const Matrix g2t = x.cv * k.g2, g2lt = x.cv * k.g2l, g4t = x.cv * k.g4;
  x.a2 = l2 * x.g1 * g2t + l2 * x.t0_tilde;
  x.n2 = l2 * x.g1 * g2t + l2 * g2lt;
  x.n4_truncated = l4 * g4t + l6 * (g3 * x.cv * k.g6 + x.cv * k.g6l);
  const Matrix mplus = birman_schwinger(lambda, p, 0.0).matrix;
  x.m_tilde = x.cv * l2 * mplus;
  x.n4 = x.m_tilde - x.P - x.a2;
  x.truncation_residual = (x.n4 - x.n4_truncated).norm();

  const Vector ut = x.cv * sign_vector(p);
  x.f = (Vector::Ones(n) + l2 * ut).cwiseInverse();
  const Vector ut2f = ut.cwiseProduct(ut).cwiseProduct(x.f);
  const Vector ut3 = ut.cwiseProduct(ut).cwiseProduct(ut);
  x.h = ut - l2 * ut2f + l4 * ut3;
  x.t1 = x.t0_tilde - l2 * diag(ut2f) + l4 * diag(ut3);

  const Matrix inv_mq = (x.m_tilde + x.Q).partialPivLu().inverse();
  x.b = x.Q - x.Q * inv_mq * x.Q;
  x.a_q = x.Q * (x.g1 * g2t + x.t1) * x.Q;
  const Matrix um = diag(ut);
  x.f4 = -x.Q * (x.n2 * x.n2 + l2 * um * x.n2 + l2 * x.n2 * um - l4 * g4t) * x.Q;

  const Matrix& eperp = proj.s0perp_basis;
  const Matrix& e0 = proj.s0_basis;
  const Matrix a22 = e0.adjoint() * x.t1 * e0;
  bool ok = true;
  x.d1 = checked_inverse(a22, 1e-14, ok);
  if (!ok) throw SchurSingular("S0 T1 S0 is not invertible on S0 H");
  x.f2 = (eperp.adjoint() * g2t * eperp).inverse();
  const Matrix t1_pp = eperp.adjoint() * x.t1 * eperp;
  const Matrix t1_p0 = eperp.adjoint() * x.t1 * e0;
  const Matrix t1_0p = e0.adjoint() * x.t1 * eperp;
  x.f3 = t1_pp - t1_p0 * x.d1 * t1_0p;
  const Matrix i2 = identity(2);
  x.d = (1.0 / x.g1) * x.f2 * (i2 + (1.0 / x.g1) * x.f3 * x.f2).inverse();
  x.e = x.d1 * t1_0p;
  x.et = t1_p0 * x.d1;
  const Eigen::Index m = e0.cols();
  Matrix blocks(2 + m, 2 + m);
  blocks.topLeftCorner(2, 2) = x.d;
  blocks.topRightCorner(2, m) = -x.d * x.et;
  blocks.bottomLeftCorner(m, 2) = -x.e * x.d;
  blocks.bottomRightCorner(m, m) = x.e * x.d * x.et;
  Matrix basis(n, 2 + m);
  basis << eperp, e0;
  x.f_mat = basis * blocks * basis.adjoint();
  x.d1_full = e0 * x.d1 * e0.adjoint();
  return x;
}

Matrix projection_range(const Matrix& s) {
  const Matrix herm = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  Matrix e(s.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) e.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  return e;
}

Matrix compressed_inverse(const Matrix& a, const Matrix& basis) {
  const Matrix c = basis.adjoint() * a * basis;
  return basis * c.partialPivLu().inverse() * basis.adjoint();
}

Matrix jensen_nenciu_invert(const Matrix& a, const Matrix& s, double tol) {
  const Matrix as = a + s;
  if (reciprocal_condition(as) <= tol) throw InvalidArgument("A + S is not invertible");
  const Matrix x = as.partialPivLu().inverse();
  const Matrix b = s - s * x * s;
  const Matrix e = projection_range(s);
  bool ok = true;
  const Matrix bc_inv = checked_inverse(e.adjoint() * b * e, tol, ok, s.norm());
  if (!ok) throw BNotInvertible("B = S - S(A+S)^-1 S is not invertible on S H, so A is not invertible");
  const Matrix b_inv = e * bc_inv * e.adjoint();
  return x + x * s * b_inv * s * x;
}

Matrix feshbach_invert(const Matrix& a, const Matrix& x1, const Matrix& x2, double tol) {
  const Matrix a11 = x1.adjoint() * a * x1, a12 = x1.adjoint() * a * x2;
  const Matrix a21 = x2.adjoint() * a * x1, a22 = x2.adjoint() * a * x2;
  bool ok = true;
  const double scale = a.norm();
  const Matrix a22_inv = checked_inverse(a22, tol, ok, scale);
  if (!ok) throw SchurSingular("a22 is not invertible");
  const Matrix d = checked_inverse(a11 - a12 * a22_inv * a21, tol, ok, scale);
  if (!ok) throw SchurSingular("Schur complement a11 - a12 a22^-1 a21 is not invertible");
  const Eigen::Index k1 = x1.cols(), k2 = x2.cols();
  Matrix blocks(k1 + k2, k1 + k2);
  blocks.topLeftCorner(k1, k1) = d;
  blocks.topRightCorner(k1, k2) = -d * a12 * a22_inv;
  blocks.bottomLeftCorner(k2, k1) = -a22_inv * a21 * d;
  blocks.bottomRightCorner(k2, k2) = a22_inv * a21 * d * a12 * a22_inv + a22_inv;
  Matrix basis(a.rows(), k1 + k2);
  basis << x1, x2;
  return basis * blocks * basis.adjoint();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope fit needs two or more matching samples");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

D1Report d1_structure_check(const std::vector<double>& lambdas, const PotentialData& p) {
  const auto proj = build_projections(p);
  const auto k = expansion_kernels(p);
  const Matrix& e0 = proj.s0_basis;
  const Matrix d0_tilde = (e0.adjoint() * (scaling_constant(p) * t0_matrix(p, k)) * e0).inverse();
  D1Report rep;
  rep.lambdas = lambdas;
  rep.x_norms.resize(lambdas.size());
  rep.deviation.resize(lambdas.size());
  rep.identity_defect.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const auto x = assemble_expansion(lambdas[i], p, proj, k);
    const Matrix hinv = e0.adjoint() * diag(x.h.cwiseInverse()) * e0;
    rep.x_norms[i] = (x.d1 - hinv).norm();
    rep.deviation[i] = (x.d1 - d0_tilde).norm();
    const Matrix a22 = e0.adjoint() * x.t1 * e0;
    rep.identity_defect[i] = (x.d1 * a22 - identity(a22.rows())).norm();
  });
  const auto [lo, hi] = std::minmax_element(rep.x_norms.begin(), rep.x_norms.end());
  rep.x_ratio = *hi / *lo;
  rep.deviation_slope = loglog_slope(lambdas, rep.deviation);
  return rep;
}

OrderReport asymptotic_orders(const std::vector<double>& lambdas, const PotentialData& p) {
  const auto proj = build_projections(p);
  const auto k = expansion_kernels(p);
  OrderReport rep;
  rep.lambdas = lambdas;
  rep.n4_norms.resize(lambdas.size());
  rep.b_remainder.resize(lambdas.size());
  rep.truncation.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const auto x = assemble_expansion(lambdas[i], p, proj, k);
    const double l2 = lambdas[i] * lambdas[i];
    rep.n4_norms[i] = x.n4.norm();
    rep.b_remainder[i] = (x.b - l2 * x.a_q - x.f4).norm();
    rep.truncation[i] = x.truncation_residual;
  });
  rep.n4_slope = loglog_slope(lambdas, rep.n4_norms);
  rep.b_slope = loglog_slope(lambdas, rep.b_remainder);
  return rep;
}

DiscreteOperator qv_lambda(double lambda, const PotentialData& p, double inv_tol) {
  const auto m = birman_schwinger(lambda, p, inv_tol);
  const Matrix v = diag(plain_v(p));
  return {v * m.matrix.partialPivLu().inverse() * v, "Qv", lambda};
}

DiscreteOperator qv_lambda_scaled(double lambda, const PotentialData& p) {
  const cplx cv = scaling_constant(p);
  const Matrix mt = cv * lambda * lambda * birman_schwinger(lambda, p, 0.0).matrix;
  const Matrix v = diag(plain_v(p));
  return {cv * lambda * lambda * v * mt.partialPivLu().inverse() * v, "Qv", lambda};
}

}  // namespace biscat
