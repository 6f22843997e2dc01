#pragma once

#include <optional>
#include <vector>

#include "biscat/operators.hpp"

namespace biscat {

// Matrices act on support values scaled by sqrt(w), so the L^2 inner product
// is the Euclidean one and operator matrices are the kernel matrices unchanged.

struct ProjectionSet {
  Vector vt;                 // v / ||v||
  std::array<Vector, 2> phi; // (x_j - c_j) v, before orthonormalization
  std::array<double, 2> c{}; // (vt, x_j vt)
  Matrix s0perp_basis;       // orthonormal basis of span{phi_1, phi_2}, n x 2
  Matrix s0_basis;           // orthonormal basis of S0 H, n x (n - 3)
  Matrix q_basis;            // [s0perp_basis, s0_basis]

  Eigen::Index size() const { return vt.size(); }
  Matrix P() const;
  Matrix Q() const;
  Matrix S0perp() const;
  Matrix S0() const;  // Q - S0perp
  Vector apply_Q(const Vector& f) const;
  Vector apply_S0(const Vector& f) const;
};

// Throws DegenerateMoments if ||phi_j|| < 1e-12 ||x_j v|| or the support has
// fewer than 8 nodes.
ProjectionSet build_projections(const PotentialData& p);

// Scaled moment vectors sqrt(w) x^alpha v for alpha = 0, e1, e2.
std::array<Vector, 3> moment_vectors(const PotentialData& p);

// || Q G2 Q - (1/2)(phi_1 x phi_1 + phi_2 x phi_2) ||_F / || Q G2 Q ||_F
double rank_two_identity_residual(const PotentialData& p, const ProjectionSet& proj);

// c_v = 8 / (i ||V||_1)
cplx scaling_constant(const PotentialData& p);

// G^{(v)} blocks of the small-lambda expansion of R.
struct ExpansionKernels {
  Matrix g2, g2l, g4, g6, g6l;
};
ExpansionKernels expansion_kernels(const PotentialData& p);

// T0 = M_U + G2l^{(v)}
Matrix t0_matrix(const PotentialData& p, const ExpansionKernels& k);

enum class Verdict { Regular, Singular, Borderline };
const char* verdict_name(Verdict v);

struct ClassificationReport {
  Verdict verdict = Verdict::Regular;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double ratio = 0.0;
  // Singular case only.
  Vector null_vector;                  // f in S0 H, scaled coordinates
  std::array<cplx, 3> moments{};       // (c0, c1, c2)
  double moment_residual = 0.0;        // relative least-squares residual
  std::vector<cplx> resonance;         // Phi(f) on the potential grid, row-major
  double growth = 0.0;                 // sup |Phi(f)| / <x>
  double bilaplacian_residual = 0.0;   // ||(D^4 + V) phi|| / ||V phi|| on interior nodes
};

// Regular iff sigma_min / sigma_max of S0 T0 S0 on S0 H exceeds tol. Inside
// [tol/10, 10 tol] throws Borderline unless allow_borderline is set.
ClassificationReport classify_zero_energy(const PotentialData& p, double tol = 1e-6, bool allow_borderline = false);

// Eigenvalues of S0 T0 S0 on S0 H (real symmetric up to round-off), ascending.
std::vector<double> s0t0s0_spectrum(const PotentialData& p);

// Phi^{-1} phi = M_U M_v phi, on support values (scaled).
Vector resonance_inverse(const PotentialData& p, const std::vector<cplx>& phi);

struct ThresholdExpansion {
  double lambda = 0.0;
  cplx cv;
  cplx g1;
  Matrix P, Q;
  Matrix t0_tilde;
  Matrix a2, n2, n4, n4_truncated;
  Matrix m_tilde;               // c_v lambda^2 M+(lambda^4), exact kernel
  double truncation_residual;   // ||M~ - P - A2 - N4_truncated||_F
  Vector f, h;                  // f(lambda, x), h(lambda, x) on the support
  Matrix t1;                    // T1(lambda)
  Matrix b;                     // Q - Q (M~ + Q)^-1 Q
  Matrix a_q;                   // Q (g1 G~2 + T1) Q
  Matrix f4;
  // Blocks in Q H = S0perp H + S0 H, expressed in the basis coordinates.
  Matrix d1, f2, f3, d, e, et;
  Matrix f_mat;                 // on Q H, full n x n
  Matrix d1_full;               // D1 extended by zero, full n x n
};

// Throws SingularPotential for a singular or borderline classifier verdict and
// LambdaOutOfRange unless 0 < lambda < a.
ThresholdExpansion assemble_expansion(double lambda, const PotentialData& p, double a = 0.1);
ThresholdExpansion assemble_expansion(double lambda, const PotentialData& p, const ProjectionSet& proj,
                                      const ExpansionKernels& k, double a = 0.1);

// A^{-1} = (A+S)^{-1} + (A+S)^{-1} S B^{-1} S (A+S)^{-1}, B = S - S (A+S)^{-1} S
// inverted on the range of the orthogonal projection S. Throws BNotInvertible.
Matrix jensen_nenciu_invert(const Matrix& a, const Matrix& s, double tol = 1e-12);

// Inverse of the compression of A to the span of [x1, x2] (orthonormal
// columns) by the block formula, returned as a full matrix. Throws
// SchurSingular.
Matrix feshbach_invert(const Matrix& a, const Matrix& x1, const Matrix& x2, double tol = 1e-12);

// Orthonormal basis of the range of an orthogonal projection.
Matrix projection_range(const Matrix& s);

// Inverse of E^H A E on span E, lifted back: E (E^H A E)^{-1} E^H.
Matrix compressed_inverse(const Matrix& a, const Matrix& basis);

struct D1Report {
  std::vector<double> lambdas;
  std::vector<double> x_norms;       // ||D1 - S0 M_{1/h} S0||_F
  std::vector<double> deviation;     // ||D1(lambda) - (S0 T~0 S0)^-1||_F
  std::vector<double> identity_defect;
  double x_ratio = 0.0;              // max/min of x_norms
  double deviation_slope = 0.0;
};
D1Report d1_structure_check(const std::vector<double>& lambdas, const PotentialData& p);

struct OrderReport {
  std::vector<double> lambdas;
  std::vector<double> n4_norms, b_remainder, truncation;
  double n4_slope = 0.0;
  double b_slope = 0.0;
};
OrderReport asymptotic_orders(const std::vector<double>& lambdas, const PotentialData& p);

// Q_v(lambda) = M_v M+(lambda^4)^-1 M_v
DiscreteOperator qv_lambda(double lambda, const PotentialData& p, double inv_tol = 1e-10);
// Same via c_v lambda^2 M_v M~+^-1 M_v
DiscreteOperator qv_lambda_scaled(double lambda, const PotentialData& p);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace biscat
