#pragma once

#include "sparsedom/sparse.hpp"
#include "sparsedom/weights.hpp"

#include <functional>
#include <vector>

namespace sparsedom {

// (int |f|^p w dx)^{1/p}; p = inf -> max |f|
double weighted_lp_norm(const GridFunction& f, const GridFunction& w, double p);

// Lambda_{S,r} f = sum_Q <f>_{r,Q} 1_Q
GridFunction sparse_op(const GridFunction& f, const DyadicLattice& lat, const SparseFamily& S,
                       double r);

// sum_Q |Q| <f>_{r,Q} <g>_{s,Q}
double sparse_form(const GridFunction& f, const GridFunction& g, const DyadicLattice& lat,
                   const SparseFamily& S, double r, double s);

// (sum_Q |Q| (<f>_{r,Q} <g>_{s,Q})^alpha)^{1/alpha}, alpha in (0, 1]
double sparse_form_alpha(const GridFunction& f, const GridFunction& g, const DyadicLattice& lat,
                         const SparseFamily& S, double r, double s, double alpha);

// sum_j sum_{Q in S_j} <f>_{2,Q} sum_{R in S_j, R inside Q} 1_R  (R = Q included)
GridFunction nested_sparse_op(const GridFunction& f, const std::vector<DyadicLattice>& lats,
                              const std::vector<SparseFamily>& families);

using CubeMap = std::function<Region(const Cube&)>;

// Lambda_{S,r,X} f = sum_Q <f>_{r,X(Q)} 1_Q; requires X(Q) to contain Q
GridFunction mapped_sparse_op(const GridFunction& f, const DyadicLattice& lat,
                              const SparseFamily& S, double r, const CubeMap& X);

// exponents for the weighted sparse-form bound: 1 <= r < q <= p < s
struct FormExponents {
  double r = 1.0;
  double q = 2.0;
  double p = 2.0;
  double s = 4.0;
};

struct WeightedRhs {
  double value = 0;   // (ap * rh)^delta * f_norm * g_norm
  double delta = 0;   // max{1/(q-r), p(s-1)/(q(s-p))}
  double ap = 0;      // [w^q]_{A_{q/r}}
  double rh = 0;      // [w^q]_{RH_{(p/q)(s/p)'}}
  double alpha = 0;   // 1/alpha = 1/p' + 1/q
  double f_norm = 0;  // ||f||_{L^q(w^q)}
  double g_norm = 0;  // ||g||_{L^{p'}(w^{-p'})}
};

WeightedRhs weighted_rhs(const GridFunction& f, const GridFunction& g, const Weight& w,
                         const FormExponents& e);

// (sum_j 2^{j kappa sigma} ||phi_j * f||_{L^p(w)}^sigma)^{1/sigma}; sigma = inf -> sup_j
double besov_norm(const GridFunction& f, const LPFamily& lp, double kappa, double p, double sigma,
                  const GridFunction& w);

}  // namespace sparsedom
