#pragma once

#include "sparsedom/dyadic.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace sparsedom {

// Strictly positive weight on a space grid. Characteristics are taken over
// the 3^n shifted-lattice cube collection and memoized per (kind, exponent).
class Weight {
 public:
  explicit Weight(GridFunction w);

  const GridFunction& values() const { return w_; }
  const std::vector<DyadicLattice>& lattices() const { return lats_; }

  // sup_Q <w>_{1,Q} <w^{1-q'}>_{1,Q}^{q-1}, q > 1
  double ap(double q) const;
  // sup_Q <w>_{q,Q} / <w>_{1,Q}, q > 1
  double rh(double q) const;
  // Fujii-Wilson sup_Q w(Q)^{-1} int_Q M(w 1_Q)
  double ainfty() const;
  // largest delta in [1, delta_max] with sup_Q <w>_{delta,Q} <= 2 <w>_{1,Q};
  // delta_max itself when the bound never breaks inside the search range
  double sharp_rh(double delta_max = 64.0) const;

 private:
  double cached(char kind, double param, double (Weight::*fn)(double) const) const;
  double compute_ap(double q) const;
  double compute_rh(double q) const;
  double compute_ainfty(double) const;
  double compute_sharp_rh(double delta_max) const;

  GridFunction w_;
  std::vector<double> wv_;  // real values
  std::vector<DyadicLattice> lats_;
  mutable std::unique_ptr<std::mutex> mu_;
  mutable std::map<std::pair<char, double>, double> cache_;
};

double ap_characteristic(const Weight& w, double q);
double rh_characteristic(const Weight& w, double q);
double ainfty_characteristic(const Weight& w);
double sharp_rh_exponent(const Weight& w, double delta_max = 64.0);

// w(x) = (|x| + h)^s with h the grid spacing
Weight power_weight(const GridSpec& spec, double s);

}  // namespace sparsedom
