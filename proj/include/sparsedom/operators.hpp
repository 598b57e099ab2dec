#pragma once

#include "sparsedom/dyadic.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sparsedom {

// Symbol a(x, xi) with its declared class parameters (m, rho, delta).
// Fast paths: `multiplier` alone means a = a(xi); `multiplier` + `modulation`
// means the product form sigma(x) a(xi). `general` forces full quadrature.
struct Symbol {
  int dim = 1;
  double m = 0.0;
  double rho = 1.0;
  double delta = 0.0;

  std::function<Complex(std::span<const double>)> multiplier;
  std::function<Complex(std::span<const double>)> modulation;
  std::function<Complex(std::span<const double>, std::span<const double>)> general;

  bool x_independent() const { return !modulation && !general; }
  Complex eval(std::span<const double> x, std::span<const double> xi) const;
};

// (1 + |xi|^2)^{m/2}
Symbol bessel_symbol(int dim, double m);

// e^{i |xi|^{1-rho}} chi(xi) |xi|^m with chi vanishing for |xi| <= 1/2 and
// equal to 1 for |xi| >= 1
Symbol oscillatory_symbol(int dim, double m, double rho, int smooth_order = 4);

// sigma(x) (1 + |xi|^2)^{m/2} with the periodic modulation
// sigma(x) = 1 + amplitude * prod_a |sin(pi x_a / (2 half_width))|^power,
// which is C^{power-1} and has a slowly decaying Fourier tail
Symbol modulated_symbol(int dim, double m, double amplitude, double half_width, int power = 5);

// a(x, D) f via the frequency-quadrature definition; x-independent and
// product-form symbols take the exact multiplier shortcut
GridFunction apply_pdo(const Symbol& a, const GridFunction& f);

// piece with symbol a(x, xi) phihat_j(xi)
GridFunction dyadic_piece(const Symbol& a, const LPFamily& lp, int j, const GridFunction& f);

// e^{i t |D|^{1-rho}} f, rho in [-1, 1)
GridFunction propagator(const GridFunction& f, double rho, double t);

// M_r f = sup over cubes of the lattice collection of <|f|^r>^{1/r}, r >= 1
GridFunction maximal(const GridFunction& f, const std::vector<DyadicLattice>& lats, double r);

// sup over cubes of |Q|^gamma <h>_{1,Q}, gamma in [0, 1); h >= 0
GridFunction fractional_maximal(const GridFunction& h, const std::vector<DyadicLattice>& lats,
                                double gamma);

// Fefferman-Stein: sup over cubes of <|g - <g>_{1,Q}|>_{1,Q}
GridFunction sharp_maximal(const GridFunction& g, const std::vector<DyadicLattice>& lats);

// M_{T,s} f = sup over cubes of |Q|^{-1/s} ||T(f 1_{(3Q)^c})||_{L^s(Q)}.
// Evaluated at every stride-th cell per axis and filled in by nearest sample;
// stride 1 is the exact full evaluation.
GridFunction grand_maximal(const PdoApply& T, const GridFunction& f,
                           const std::vector<DyadicLattice>& lats, double s, int stride = 4);

// estimated sup over sampled (x, xi) of
// (1+|xi|)^{-(m - rho |alpha| + delta |beta|)} |d_x^beta d_xi^alpha a(x, xi)|
// via nested centered differences; requires |alpha| + |beta| <= 4
double symbol_seminorm(const Symbol& a, const GridSpec& spec, const std::vector<int>& alpha,
                       const std::vector<int>& beta);

}  // namespace sparsedom
