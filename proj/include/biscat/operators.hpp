#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "biscat/fourier.hpp"

namespace biscat {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Point = std::array<double, 2>;

struct DecayReport {
  double moment3 = 0.0;            // ||<x>^3 V||_1
  double moment10 = 0.0;           // ||<x>^{10.1} V||_1
  double outer_fraction = 0.0;     // share of the <x>^{10.1} moment on |x| > 0.8 R
  double lq_local_uniform = 0.0;   // sup over unit discs of ||V||_{L^2(disc)}
  bool decay_ok = false;           // outer_fraction <= 1e-3
};

// Potential sampled on a grid. Per-node arrays are restricted to the support
// {|V| > tol}; `support` holds the flat grid indices.
struct PotentialData {
  PlaneGrid grid;
  std::string source;
  std::vector<double> values;          // V on the full grid
  std::vector<std::size_t> support;
  std::vector<Point> points;           // support coordinates
  std::vector<double> v;               // |V|^{1/2}
  std::vector<double> sign;            // U = sign V, +1 where V = 0
  double l1_norm = 0.0;
  DecayReport decay;

  std::size_t size() const { return support.size(); }
  double weight() const { return grid.weight(); }
  // ||<x>^s V||_1
  double weighted_l1(double s) const;
};

// Builtin specs: "gaussian:beta,sigma[,x0,y0]", "well:beta,r0[,delta]",
// "aniso:beta,sx,sy[,theta]", "zero"; key=value pairs are accepted too
// ("well:beta=1,r0=1"). Anything else is read as a CSV file x1,x2,V.
PotentialData load_potential(const std::string& spec, const PlaneGrid& grid, double support_tol = 1e-12);
PotentialData make_potential(const PlaneGrid& grid, const std::vector<double>& values, const std::string& source,
                             double support_tol = 1e-12);

// Dense matrix on the support with quadrature weights folded in.
struct DiscreteOperator {
  Matrix matrix;
  std::string label;
  std::optional<double> lambda;

  Eigen::Index size() const { return matrix.rows(); }
  DiscreteOperator compose(const DiscreteOperator& right) const;
  DiscreteOperator adjoint() const;
  double hs_norm() const { return matrix.norm(); }
};

// Default operator grid: N_op = 40 over [-8, 8]^2.
inline PlaneGrid operator_grid_default() { return {40, 8.0}; }

// Matrix v_i k(|x_i - x_j|) v_j w. The kernel is evaluated once per distinct
// lattice distance.
Matrix sandwiched_kernel(const PotentialData& p, const std::function<cplx(double)>& kernel);

// Same without the v factors: k(|x_i - x_j|) w.
Matrix plain_kernel(const PotentialData& p, const std::function<cplx(double)>& kernel);

Matrix sign_matrix(const PotentialData& p);

// M_v R0(lambda^4) M_v
DiscreteOperator sandwiched_resolvent(double lambda, const PotentialData& p);

// M^+(lambda) = M_U + M_v R0(lambda^4) M_v. Throws SingularAtLambda when the
// smallest singular value is below inv_tol.
DiscreteOperator birman_schwinger(double lambda, const PotentialData& p, double inv_tol = 1e-10);

double smallest_singular_value(const Matrix& m);
double largest_singular_value(const Matrix& m);

struct SpectralProjectionSample {
  double lambda = 0.0;
  int nodes = 0;
  std::vector<cplx> values;
};

// Pi(lambda) u(x) = (2 pi lambda^2)^-1 int_S e^{i lambda x.omega} u^(lambda omega) d omega
SpectralProjectionSample spectral_projection(double lambda, const TestFunction& u, const std::vector<Point>& points,
                                             int nodes = 256);
// Same from precomputed circle values.
std::vector<cplx> projection_from_circle(double lambda, const std::vector<cplx>& circle,
                                         const std::vector<Point>& points);

// Radial function sampled at rho^2 = k dr, k = 0..size-1.
struct RadialProfile {
  double dr = 0.0;
  std::vector<cplx> values;
  cplx at_square(double r) const;  // linear interpolation in rho^2
  Field to_field(const PlaneGrid& g) const;
};

// m(r) = Mu(sqrt r) on r = k h^2 up to R^2.
RadialProfile spherical_mean_profile(const Field& u, int nodes = 256);

// Kt1 u(rho) = -(1/4 pi) PV int m(r)/(rho^2 - r) dr + (i/4) m(rho^2)
RadialProfile ktilde1_profile(const TestFunction& u);
// Kt2 u(rho) = (1/4 pi) int m(r)/(rho^2 + r) dr
RadialProfile ktilde2_profile(const TestFunction& u);
Field ktilde1(const TestFunction& u);
Field ktilde2(const TestFunction& u);

// Kt2 written as c int u(y)/(|x|^2 + |y|^2) dy.
inline constexpr double kKtilde2Constant = 1.0 / (4.0 * kPi * kPi);

// K mu(|D|) u with mu = lambda^2 kappa: (1/2)(Kt1 - Kt2) kappa(|D|) u.
// Throws NotGMU if kappa fails the certificate.
Field k_operator(const RadialSymbol& kappa, const TestFunction& u);

// R(|D|, |y|) chi_{>=a}(|D|) u. Throws ZeroOffset if y = 0.
Field resolvent_multiplier(const Point& y, double a, const TestFunction& u);

}  // namespace biscat
