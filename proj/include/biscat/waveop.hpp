#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "biscat/operators.hpp"
#include "biscat/quadrature.hpp"

namespace biscat {

enum class WaveMode { FullInverse, Born, LowEnergy, HighEnergy };

// Minus: W_- built from R0^+; Plus: W_+ built from R0^-.
enum class WaveDirection { Minus, Plus };

struct WaveOperatorConfig {
  int lambda_nodes = 96;      // Gauss-Legendre nodes over the annulus plus margin
  double split = 1.0;         // energy split a
  int born_order = 4;         // n_max, Born mode and born_term
  WaveMode mode = WaveMode::FullInverse;
  WaveDirection direction = WaveDirection::Minus;
  int angular_nodes = 256;    // circle nodes for Pi(lambda)
  double inv_tol = 1e-10;     // sigma_min floor for M+(lambda)
  double min_lambda = 0.2;    // lower end of the allowed annulus
};

// Gauss-Legendre rule over [lambda_min - d, lambda_max + d], d = 0.05 lambda_min.
// Throws OutOfDomain if lambda_min < cfg.min_lambda.
quad::Rule wave_lambda_rule(const TestFunction& u, const WaveOperatorConfig& cfg);

// Per-node support vector g(lambda) = T(lambda) Pi(lambda) u on the support of
// the potential (plain values, weights folded into T).
using NodeOperator = std::function<Vector(double lambda, const Vector& projected)>;

// int R0(lambda^4) g(lambda) lambda^3 dlambda on the grid of u, with g given
// per node. The R0 sum runs over the support of p only.
Field propagate(const TestFunction& u, const PotentialData& p, const NodeOperator& op, const WaveOperatorConfig& cfg);
// Same integral evaluated at arbitrary points.
std::vector<cplx> propagate_at(const TestFunction& u, const PotentialData& p, const NodeOperator& op,
                               const WaveOperatorConfig& cfg, const std::vector<Point>& targets);

// W_- u per cfg.mode:
//   FullInverse: u - int R0 Q_v Pi u lambda^3
//   Born:        Q_v replaced by sum_{n <= born_order} (-1)^{n-1} (V R0)^{n-1} V
//   LowEnergy:   W_- chi_{<=a}(|D|) u
//   HighEnergy:  W_- chi_{>=a}(|D|) u
// Throws SingularAtLambda if M+ is not invertible on a node.
Field apply_wave_operator(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg = {});

// Values of W_- u at arbitrary points (u by spectral evaluation).
std::vector<cplx> wave_operator_at(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg,
                                   const std::vector<Point>& targets);

// W_n chi_{>=a}(|D|) u = int R0 (V R0)^{n-1} V Pi u chi_{>=a} lambda^3, so that
// (W_- - 1) chi_{>=a} = sum_n (-1)^n W_n chi_{>=a}.
Field born_term(int n, const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg = {});

// (W_- chi_{<=a}(|D|) u, W_- chi_{>=a}(|D|) u)
std::pair<Field, Field> low_high_split(const TestFunction& u, const PotentialData& p,
                                       const WaveOperatorConfig& cfg = {});

// Exact value of the band-limited field u at a point (inverse DFT sum).
cplx spectral_value(const Field& u, double x1, double x2);

// | ||W u|| - ||u|| | / ||u||
double isometry_defect(const TestFunction& u, const Field& wu);

// Weak-form intertwining defect
//   max_phi |<W u, (D^4 + V) phi> - <W D^4 u, phi>| / (||D^4 u|| ||phi||)
// over Gaussian test functions exp(-|x - c|^2 / 2) centred at `centres`. V acts
// through the same support quadrature as the wave operator.
double intertwining_defect(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg,
                           const std::vector<Point>& centres);

struct WaveMetrics {
  double isometry_defect = 0.0;
  double intertwining_defect = 0.0;
  std::vector<double> born_ratios;  // ||W_{n+1}|| / ||W_n||, n = 1..born_order-1
};
WaveMetrics wave_metrics(const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg = {});

// Omega(T(lambda)) mu(|D|) u = int R0(lambda^4) T(lambda) Pi(lambda) u mu(lambda) lambda^3 dlambda
struct OmegaFunctional {
  std::function<Matrix(double)> kernel;  // T(lambda) on the support, weights folded in
  Multiplier mu;

  static OmegaFunctional constant(Matrix t, Multiplier mu);
};

// sum_ij |T_ij| w, i.e. the discrete int int |T(x, y)| dx dy. Throws
// KernelNotIntegrable on non-finite entries.
double kernel_l1_norm(const Matrix& t, const PotentialData& p);

// Throws NotGMU if mu is not certified, KernelNotIntegrable for a non-finite T.
Field omega_apply(const OmegaFunctional& f, const TestFunction& u, const PotentialData& p,
                  const WaveOperatorConfig& cfg = {});

// Same through T(lambda) = int (rho - lambda)_+ T''(rho) d rho:
//   int rho Omega(T''(rho)) mu(|D|) (1 - |D|/rho)_+ u d rho
// with (1 - |D|/rho)_+ applied as a Fourier multiplier. rho runs over the
// annulus (composite Gauss-Legendre, `panels` x 8 nodes) and above it by
// Gauss-Laguerre against e^{-rho}, so T'' should carry that decay.
Field omega_apply_ibp(const std::function<Matrix(double)>& second_derivative, const Multiplier& mu,
                      const TestFunction& u, const PotentialData& p, const WaveOperatorConfig& cfg = {},
                      int panels = 4, int tail_nodes = 16);

// ||Omega(T) mu(|D|) u|| / (sup_lambda ||T(lambda)||_{L^1} ||u||) over the rule nodes.
double omega_bound_constant(const OmegaFunctional& f, const TestFunction& u, const PotentialData& p,
                            const WaveOperatorConfig& cfg = {});

}  // namespace biscat
