#include <cmath>
#include <random>

#include "biscat/specfun.hpp"
#include "biscat/threshold.hpp"
#include "doctest.h"
#include "support/radial_oracle.hpp"

using namespace biscat;

namespace {

PlaneGrid op_grid() { return operator_grid_default(); }
// Finer grid for the zero-energy classifier.
PlaneGrid fine_grid() { return {40, 2.0}; }

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::normal_distribution<double> d;
  Matrix a(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = cplx(d(rng), d(rng));
  return a;
}

Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ();
}

int positive_count(const std::vector<double>& ev) {
  int n = 0;
  for (double e : ev) n += e > 0.0;
  return n;
}

PotentialData well(double beta) {
  return load_potential("well:" + std::to_string(beta) + ",1", fine_grid());
}

// First coupling at which an eigenvalue of S0 T0 S0 crosses zero. The
// eigenvalues are -1 + beta kappa with kappa independent of beta.
double classifier_critical_coupling() {
  const auto ev = s0t0s0_spectrum(well(1.0));
  return 1.0 / (1.0 + ev.back());
}

}  // namespace

TEST_CASE("projection set invariants") {
  const auto p = load_potential("well:1,1", op_grid());
  const auto s = build_projections(p);
  CHECK(std::abs(s.c[0]) <= 1e-12);
  CHECK(std::abs(s.c[1]) <= 1e-12);
  const auto mv = moment_vectors(p);
  CHECK(s.apply_Q(mv[0]).norm() <= 1e-12 * mv[0].norm());
  for (int j = 1; j <= 2; ++j) CHECK(s.apply_S0(mv[j]).norm() <= 1e-10 * mv[j].norm());
  const Matrix P = s.P(), Q = s.Q(), S0 = s.S0();
  CHECK((P * P - P).norm() <= 1e-12);
  CHECK((Q * Q - Q).norm() <= 1e-12);
  CHECK((P * Q).norm() <= 1e-12);
  CHECK((S0 * S0 - S0).norm() <= 1e-12);
  CHECK((S0 - s.s0_basis * s.s0_basis.adjoint()).norm() <= 1e-12);
  CHECK(s.s0perp_basis.cols() == 2);
  CHECK(s.s0_basis.cols() == s.size() - 3);
}

TEST_CASE("moments of a shifted potential") {
  const auto p = load_potential("gaussian:1,1,1,0", op_grid());
  const auto s = build_projections(p);
  CHECK(s.c[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(s.c[1]) <= 1e-6);
}

TEST_CASE("degenerate supports") {
  const PlaneGrid g = op_grid();
  std::vector<double> line(g.size(), 0.0);
  for (int j = 5; j < 35; ++j) line[static_cast<std::size_t>(20) * g.n() + j] = -1.0;
  CHECK_THROWS_AS(build_projections(make_potential(g, line, "line")), DegenerateMoments);
  std::vector<double> dot(g.size(), 0.0);
  dot[static_cast<std::size_t>(20) * g.n() + 20] = -1.0;
  CHECK_THROWS_AS(build_projections(make_potential(g, dot, "point")), DegenerateMoments);
}

TEST_CASE("rank-two identity") {
  for (const char* spec : {"well:1,1", "gaussian:2,1"}) {
    const auto p = load_potential(spec, op_grid());
    CHECK(rank_two_identity_residual(p, build_projections(p)) <= 1e-10);
  }
}

TEST_CASE("Jensen-Nenciu inversion") {
  std::mt19937_64 rng(5);
  const Eigen::Index n = 40;
  const Matrix a = Matrix::Identity(n, n) * 6.0 + random_matrix(rng, n, n) * 0.5;
  const Matrix basis = random_unitary(rng, n).leftCols(5);
  const Matrix s = basis * basis.adjoint();
  const Matrix direct = a.inverse();
  CHECK((jensen_nenciu_invert(a, s) - direct).norm() <= 1e-10 * direct.norm());

  const Matrix id = Matrix::Identity(n, n);
  CHECK((jensen_nenciu_invert(id, s) - id).norm() <= 1e-12 * std::sqrt(double(n)));

  // A singular while A + S is invertible.
  Matrix sing = Matrix::Identity(n, n);
  sing(0, 0) = 0.0;
  Matrix e0 = Matrix::Zero(n, n);
  e0(0, 0) = 1.0;
  CHECK_THROWS_AS(jensen_nenciu_invert(sing, e0), BNotInvertible);

  // (M~+(lambda^4), Q) at lambda = 0.05.
  const auto p = load_potential("well:0.5,1", op_grid());
  const auto x = assemble_expansion(0.05, p);
  const Matrix m_inv = x.m_tilde.inverse();
  CHECK((jensen_nenciu_invert(x.m_tilde, x.Q) - m_inv).norm() <= 1e-8 * m_inv.norm());
}

TEST_CASE("Feshbach inversion") {
  std::mt19937_64 rng(8);
  const Eigen::Index n = 32;
  const Matrix u = random_unitary(rng, n);
  const Matrix a = Matrix::Identity(n, n) * 5.0 + random_matrix(rng, n, n) * 0.5;
  const Matrix inv = feshbach_invert(a, u.leftCols(2), u.rightCols(30));
  const Matrix direct = a.inverse();
  CHECK((inv - direct).norm() <= 1e-10 * direct.norm());

  // Block-diagonal case.
  Matrix blocks = Matrix::Zero(n, n);
  blocks.topLeftCorner(2, 2) = random_matrix(rng, 2, 2) + 3.0 * Matrix::Identity(2, 2);
  blocks.bottomRightCorner(30, 30) = random_matrix(rng, 30, 30) * 0.2 + 4.0 * Matrix::Identity(30, 30);
  const Matrix bd = u * blocks * u.adjoint();
  const Matrix bd_inv = feshbach_invert(bd, u.leftCols(2), u.rightCols(30));
  Matrix expected = Matrix::Zero(n, n);
  expected.topLeftCorner(2, 2) = blocks.topLeftCorner(2, 2).inverse();
  expected.bottomRightCorner(30, 30) = blocks.bottomRightCorner(30, 30).inverse();
  CHECK((bd_inv - u * expected * u.adjoint()).norm() <= 1e-12 * bd_inv.norm());

  Matrix c = Matrix::Identity(n, n);
  c(0, 0) = 0.0;
  CHECK_THROWS_AS(feshbach_invert(u * c * u.adjoint(), u.leftCols(1), u.rightCols(n - 1)), SchurSingular);

  // A_Q(lambda)^-1 = F_mat(lambda) + D1(lambda) on Q H.
  const auto p = load_potential("well:0.5,1", op_grid());
  const auto proj = build_projections(p);
  const auto x = assemble_expansion(0.05, p, proj, expansion_kernels(p));
  const Matrix direct_aq = compressed_inverse(x.a_q, proj.q_basis);
  CHECK(((x.f_mat + x.d1_full) - direct_aq).norm() <= 1e-8 * direct_aq.norm());
  const Matrix block = feshbach_invert(x.a_q, proj.s0perp_basis, proj.s0_basis);
  CHECK((block - direct_aq).norm() <= 1e-8 * direct_aq.norm());
}

TEST_CASE("expansion blocks at small lambda") {
  const auto p = load_potential("well:0.5,1", op_grid());
  const auto x = assemble_expansion(1e-8, p);
  const Vector ut = x.cv * Vector(sign_matrix(p).diagonal());
  CHECK((x.f - Vector::Ones(x.f.size())).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((x.h - ut).cwiseAbs().maxCoeff() <= 1e-12 * ut.cwiseAbs().maxCoeff());
  const auto y = assemble_expansion(0.05, p);
  CHECK((y.m_tilde - y.P - y.a2 - y.n4).norm() <= 1e-14 * y.m_tilde.norm());
  CHECK(y.truncation_residual <= 1e-6 * y.n4.norm());
  // F_mat has rank at most 4.
  Eigen::BDCSVD<Matrix> svd(y.f_mat);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 4; i < sv.size(); ++i) CHECK(sv(i) <= 1e-10 * sv(0));
  CHECK_THROWS_AS(assemble_expansion(0.2, p), LambdaOutOfRange);
  CHECK_THROWS_AS(assemble_expansion(0.0, p), LambdaOutOfRange);
}

TEST_CASE("asymptotic orders") {
  const auto p = load_potential("well:0.5,1", op_grid());
  const std::vector<double> lambdas = {0.08, 0.04, 0.02, 0.01};
  const auto rep = asymptotic_orders(lambdas, p);
  MESSAGE("N4 slope " << rep.n4_slope << ", B remainder slope " << rep.b_slope);
  CHECK(rep.n4_slope >= 3.7);
  CHECK(rep.b_slope >= 5.5);
  const auto d1 = d1_structure_check({0.08, 0.04, 0.02, 0.01}, p);
  CHECK(d1.x_ratio <= 10.0);
  CHECK(d1.deviation_slope >= 1.7);
  for (double e : d1.identity_defect) CHECK(e <= 1e-10);

  // F_mat = O(1 / log lambda)
  std::vector<double> scaled;
  for (double l : lambdas) scaled.push_back(assemble_expansion(l, p).f_mat.norm() * std::abs(std::log(l)));
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  CHECK(*hi / *lo <= 10.0);
}

TEST_CASE("Q_v routes agree") {
  const auto p = load_potential("well:0.5,1", op_grid());
  for (double l : {0.05, 0.5, 2.0}) {
    const Matrix a = qv_lambda(l, p).matrix, b = qv_lambda_scaled(l, p).matrix;
    CHECK((a - b).norm() <= 1e-10 * a.norm());
  }
  // Tiny V: Q_v = V - V R0 V + O(|V R0|^2 |V|).
  const auto tiny = load_potential("well:0.001,1", op_grid());
  const double lambda = 1.0;
  Vector vdiag(static_cast<Eigen::Index>(tiny.size()));
  for (std::size_t i = 0; i < tiny.size(); ++i) vdiag(static_cast<Eigen::Index>(i)) = tiny.sign[i] * tiny.v[i] * tiny.v[i];
  const Matrix V = vdiag.asDiagonal();
  const Matrix r0 = plain_kernel(tiny, [lambda](double r) { return specfun::biharm_resolvent_kernel(lambda, r); });
  const Matrix born = V - V * r0 * V;
  const Matrix qv = qv_lambda(lambda, tiny).matrix;
  const double bound = std::pow(largest_singular_value(V * r0), 2) * largest_singular_value(V);
  CHECK(largest_singular_value(qv - born) <= bound);
  const double sigma = smallest_singular_value(birman_schwinger(0.3, p).matrix);
  CHECK_THROWS_AS(qv_lambda(0.3, p, 2.0 * sigma), SingularAtLambda);
}

TEST_CASE("classifier: weak coupling is regular") {
  const auto rep = classify_zero_energy(well(1.0));
  CHECK(rep.verdict == Verdict::Regular);
  CHECK(rep.ratio > 1e-3);
}

TEST_CASE("classifier agrees with the radial null-space oracle") {
  const auto profile = testing::mollified_well(1.0);
  const auto crit = testing::critical_couplings(profile, 4, 400.0, 10.0, 120);
  REQUIRE(!crit.empty());
  double oracle_first = crit.front().beta;
  for (const auto& c : crit) oracle_first = std::min(oracle_first, c.beta);
  const double beta_c = classifier_critical_coupling();
  MESSAGE("critical coupling: classifier " << beta_c << ", oracle " << oracle_first);
  CHECK(std::abs(beta_c - oracle_first) <= 0.05 * oracle_first);
  for (int k = 0; k < 12; ++k) {
    const double beta = 60.0 * std::pow(160.0 / 60.0, k / 11.0);
    bool near = false;
    for (const auto& c : crit) near = near || std::abs(beta - c.beta) <= 0.05 * c.beta;
    if (near) continue;
    const auto ev = s0t0s0_spectrum(well(beta));
    CHECK(positive_count(ev) == testing::resonance_count(crit, beta));
    CHECK(classify_zero_energy(well(beta)).verdict == Verdict::Regular);
  }
}

TEST_CASE("singular coupling: resonance function and round trip") {
  const double beta_c = classifier_critical_coupling();
  const auto p = well(beta_c);
  CHECK_THROWS_AS(assemble_expansion(0.05, p), SingularPotential);
  const auto rep = classify_zero_energy(p);
  REQUIRE(rep.verdict == Verdict::Singular);
  CHECK(rep.moment_residual <= 1e-8);
  CHECK(std::isfinite(rep.growth));
  MESSAGE("bi-Laplacian residual " << rep.bilaplacian_residual << ", growth " << rep.growth);
  // Radial resonance: the linear moments vanish.
  CHECK(std::abs(rep.moments[1]) <= 1e-6 * std::abs(rep.moments[0]));
  CHECK(std::abs(rep.moments[2]) <= 1e-6 * std::abs(rep.moments[0]));
  const Vector back = resonance_inverse(p, rep.resonance);
  const double cosine = std::abs(back.dot(rep.null_vector)) / (back.norm() * rep.null_vector.norm());
  CHECK(cosine >= 0.99);

  CHECK_THROWS_AS(classify_zero_energy(well(beta_c * (1.0 + 1e-6))), Borderline);
  const auto border = classify_zero_energy(well(beta_c * (1.0 + 1e-6)), 1e-6, true);
  CHECK(border.verdict == Verdict::Borderline);
}
