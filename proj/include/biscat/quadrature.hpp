#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "biscat/common.hpp"

namespace biscat::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1], cached per n.
const Rule& gauss_legendre(int n);

// n-point Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

// n-point generalized Gauss-Laguerre rule for the weight t^alpha e^{-t} on
// (0, inf). Computed once per (n, alpha) via Golub-Welsch.
const Rule& gauss_laguerre(int n, double alpha);

// Composite Gauss-Legendre rule over consecutive panels [edges[k], edges[k+1]].
Rule composite(const std::vector<double>& edges, int nodes_per_panel);

// Panel edges graded geometrically toward `a`: a, a + (b-a) 2^-levels, ...,
// a + (b-a)/2, b.
std::vector<double> graded_edges(double a, double b, int levels);

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

namespace detail {
extern const double kKronrodNodes[8];
extern const double kKronrodWeights[8];
extern const double kGaussWeights[4];

template <class T>
inline double magnitude(const T& v) { return std::abs(v); }

template <class T, class F>
std::pair<T, T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    kronrod += (f1 + f2) * kKronrodWeights[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kGaussWeights[j / 2];
  }
  return {kronrod * h, gauss * h};
}
}  // namespace detail

// Adaptive Gauss-Kronrod (7/15) with a global interval queue. Stops when the
// summed error estimate drops below max(abs_tol, rel_tol * |value|).
template <class T, class F>
Result<T> integrate(F f, double a, double b, double abs_tol, double rel_tol,
                    int max_intervals = 2000) {
  struct Piece {
    double a, b;
    T value;
    double error;
  };
  std::vector<Piece> pieces;
  auto eval = [&](double lo, double hi) {
    auto [k, g] = detail::gk15<T>(f, lo, hi);
    return Piece{lo, hi, k, detail::magnitude(k - g)};
  };
  Result<T> out;
  pieces.push_back(eval(a, b));
  out.evaluations = 15;
  for (;;) {
    T total{};
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total += pieces[i].value;
      err += pieces[i].error;
      if (pieces[i].error > pieces[worst].error) worst = i;
    }
    out.value = total;
    out.error = err;
    if (err <= std::max(abs_tol, rel_tol * detail::magnitude(total))) {
      out.converged = true;
      return out;
    }
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      out.converged = false;
      return out;
    }
    Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    pieces[worst] = eval(p.a, mid);
    pieces.push_back(eval(mid, p.b));
    out.evaluations += 30;
  }
}

// Sum of adaptive integrals over consecutive panels; each panel receives a
// share of the absolute tolerance.
template <class T, class F>
Result<T> integrate_panels(F f, const std::vector<double>& edges, double abs_tol, double rel_tol,
                           int max_intervals_per_panel = 400) {
  Result<T> out;
  const double share = abs_tol / std::max<std::size_t>(1, edges.size() - 1);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    auto r = integrate<T>(f, edges[k], edges[k + 1], share, rel_tol, max_intervals_per_panel);
    out.value += r.value;
    out.error += r.error;
    out.converged = out.converged && r.converged;
    out.evaluations += r.evaluations;
  }
  return out;
}

}  // namespace biscat::quad
