#include "sparsedom/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsedom {

double weighted_lp_norm(const GridFunction& f, const GridFunction& w, double p) {
  if (!(f.spec == w.spec)) throw std::invalid_argument("weighted_lp_norm: spec mismatch");
  if (!(p > 0.0)) throw std::invalid_argument("weighted_lp_norm: requires p > 0");
  if (std::isinf(p)) return f.values.abs().maxCoeff();
  double acc = 0;
  for (std::int64_t c = 0; c < f.spec.size(); ++c)
    acc += std::pow(std::abs(f.values[c]), p) * w.values[c].real();
  return std::pow(acc * f.spec.cell_weight(), 1.0 / p);
}

namespace {

void check_family(const GridFunction& f, const DyadicLattice& lat, const SparseFamily& S) {
  if (!(f.spec == lat.spec)) throw std::invalid_argument("sparse_op: lattice/grid spec mismatch");
  if (S.lattice != lat.id) throw std::invalid_argument("sparse_op: family belongs to another lattice");
}

}  // namespace

GridFunction sparse_op(const GridFunction& f, const DyadicLattice& lat, const SparseFamily& S,
                       double r) {
  check_family(f, lat, S);
  if (!(r > 0.0)) throw std::invalid_argument("sparse_op: requires r > 0");
  GridFunction out(f.spec);
  for (const SparseEntry& e : S.entries) {
    const Region rq = lat.region(e.cube);
    const double avg = region_average(f, rq, r);
    for_each_region_cell(f.spec, rq, [&](std::int64_t c) { out.values[c] += avg; });
  }
  return out;
}

double sparse_form_alpha(const GridFunction& f, const GridFunction& g, const DyadicLattice& lat,
                         const SparseFamily& S, double r, double s, double alpha) {
  check_family(f, lat, S);
  if (!(g.spec == f.spec)) throw std::invalid_argument("sparse_form: f/g spec mismatch");
  if (!(r > 0.0) || !(s > 0.0)) throw std::invalid_argument("sparse_form: requires r, s > 0");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("sparse_form: requires alpha in (0, 1]");
  double acc = 0;
  for (const SparseEntry& e : S.entries) {
    const Region rq = lat.region(e.cube);
    const double term =
        lat.measure(e.cube) * (alpha == 1.0
                                   ? region_average(f, rq, r) * region_average(g, rq, s)
                                   : std::pow(region_average(f, rq, r) * region_average(g, rq, s),
                                              alpha));
    acc += term;
  }
  return alpha == 1.0 ? acc : std::pow(acc, 1.0 / alpha);
}

double sparse_form(const GridFunction& f, const GridFunction& g, const DyadicLattice& lat,
                   const SparseFamily& S, double r, double s) {
  return sparse_form_alpha(f, g, lat, S, r, s, 1.0);
}

GridFunction nested_sparse_op(const GridFunction& f, const std::vector<DyadicLattice>& lats,
                              const std::vector<SparseFamily>& families) {
  GridFunction out(f.spec);
  for (const SparseFamily& S : families) {
    const DyadicLattice* lat = nullptr;
    for (const DyadicLattice& l : lats)
      if (l.id == S.lattice) lat = &l;
    if (!lat) throw std::invalid_argument("nested_sparse_op: family lattice not in collection");
    if (!(lat->spec == f.spec))
      throw std::invalid_argument("nested_sparse_op: lattice/grid spec mismatch");
    for (const SparseEntry& eq : S.entries) {
      const double avg = region_average(f, lat->region(eq.cube), 2.0);
      for (const SparseEntry& er : S.entries) {
        if (!lat->contains(eq.cube, er.cube)) continue;
        for_each_region_cell(f.spec, lat->region(er.cube),
                             [&](std::int64_t c) { out.values[c] += avg; });
      }
    }
  }
  return out;
}

GridFunction mapped_sparse_op(const GridFunction& f, const DyadicLattice& lat,
                              const SparseFamily& S, double r, const CubeMap& X) {
  check_family(f, lat, S);
  if (!(r > 0.0)) throw std::invalid_argument("mapped_sparse_op: requires r > 0");
  GridFunction out(f.spec);
  for (const SparseEntry& e : S.entries) {
    const Region rq = lat.region(e.cube);
    const Region rx = X(e.cube);
    if (!region_contains(f.spec, rx, rq))
      throw std::invalid_argument("mapped_sparse_op: X(Q) does not contain Q");
    const double avg = region_average(f, rx, r);
    for_each_region_cell(f.spec, rq, [&](std::int64_t c) { out.values[c] += avg; });
  }
  return out;
}

WeightedRhs weighted_rhs(const GridFunction& f, const GridFunction& g, const Weight& w,
                         const FormExponents& e) {
  if (!(e.r >= 1.0)) throw std::invalid_argument("weighted_rhs: requires r >= 1");
  if (!(e.r < e.q)) throw std::invalid_argument("weighted_rhs: requires r < q");
  if (!(e.q <= e.p)) throw std::invalid_argument("weighted_rhs: requires q <= p");
  if (!(e.p < e.s) || std::isinf(e.s))
    throw std::invalid_argument("weighted_rhs: requires p < s < inf");
  if (!(f.spec == w.values().spec) || !(g.spec == w.values().spec))
    throw std::invalid_argument("weighted_rhs: spec mismatch");

  WeightedRhs out;
  out.alpha = 1.0 / (1.0 - 1.0 / e.p + 1.0 / e.q);
  out.delta = std::max(1.0 / (e.q - e.r), e.p * (e.s - 1.0) / (e.q * (e.s - e.p)));

  const GridSpec& spec = w.values().spec;
  GridFunction wq(spec), wfq(spec), wgp(spec);
  const double pprime = e.p / (e.p - 1.0);
  for (std::int64_t c = 0; c < spec.size(); ++c) {
    const double v = w.values().values[c].real();
    wq.values[c] = Complex(std::pow(v, e.q), 0.0);
    wgp.values[c] = Complex(std::pow(v, -pprime), 0.0);
  }
  Weight wq_weight(wq);
  out.ap = wq_weight.ap(e.q / e.r);
  out.rh = wq_weight.rh(e.p * e.s / (e.q * (e.s - e.p)));
  out.f_norm = weighted_lp_norm(f, wq, e.q);
  out.g_norm = weighted_lp_norm(g, wgp, pprime);
  out.value = std::pow(out.ap * out.rh, out.delta) * out.f_norm * out.g_norm;
  return out;
}

double besov_norm(const GridFunction& f, const LPFamily& lp, double kappa, double p, double sigma,
                  const GridFunction& w) {
  if (!(f.spec == w.spec)) throw std::invalid_argument("besov_norm: spec mismatch");
  if (!(lp.freq_spec == f.spec.dual()))
    throw std::invalid_argument("besov_norm: band family built for another grid");
  if (!(sigma > 0.0)) throw std::invalid_argument("besov_norm: requires sigma > 0");
  if (std::isinf(sigma)) {
    double sup = 0;
    for (int j = 0; j <= lp.top_band; ++j)
      sup = std::max(sup,
                     std::pow(2.0, j * kappa) * weighted_lp_norm(band_project(lp, j, f), w, p));
    return sup;
  }
  double acc = 0;
  for (int j = 0; j <= lp.top_band; ++j)
    acc += std::pow(2.0, j * kappa * sigma) *
           std::pow(weighted_lp_norm(band_project(lp, j, f), w, p), sigma);
  return std::pow(acc, 1.0 / sigma);
}

}  // namespace sparsedom
