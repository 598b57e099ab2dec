#include "sparsedom/weights.hpp"

#include "sparsedom/prefix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsedom {

namespace {

// visit every cube of every lattice/level
template <typename Fn>
void for_each_cube(const std::vector<DyadicLattice>& lats, Fn&& fn) {
  for (const DyadicLattice& lat : lats) {
    for (int level = 0; level <= lat.max_level(); ++level) {
      const int n = lat.spec.dim;
      const std::int64_t per_axis = std::int64_t(1) << level;
      int ai[16] = {0};
      while (true) {
        const Cube q = lat.cube_at(level, ai);
        fn(lat, q, lat.region(q));
        int a = n - 1;
        while (a >= 0 && ++ai[a] == per_axis) ai[a--] = 0;
        if (a < 0) break;
      }
    }
  }
}

struct MaskedSource {
  const std::vector<double>& vals;
  const std::vector<std::uint8_t>& mask;
  double operator[](std::int64_t c) const { return mask[c] ? vals[c] : 0.0; }
};

}  // namespace

Weight::Weight(GridFunction w)
    : w_(std::move(w)), mu_(std::make_unique<std::mutex>()) {
  if (w_.spec.domain != Domain::space)
    throw std::invalid_argument("Weight: values must live in space");
  const double scale = w_.values.abs().maxCoeff();
  wv_.resize(w_.spec.size());
  for (std::int64_t c = 0; c < w_.spec.size(); ++c) {
    if (std::abs(w_.values[c].imag()) > 1e-12 * (1.0 + scale))
      throw std::invalid_argument("Weight: values must be real");
    if (!(w_.values[c].real() > 0.0))
      throw std::invalid_argument("Weight: values must be strictly positive");
    wv_[c] = w_.values[c].real();
  }
  lats_ = shifted_lattices(w_.spec);
}

double Weight::cached(char kind, double param, double (Weight::*fn)(double) const) const {
  const std::pair<char, double> key{kind, param};
  {
    std::lock_guard<std::mutex> lock(*mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double v = (this->*fn)(param);
  std::lock_guard<std::mutex> lock(*mu_);
  return cache_.emplace(key, v).first->second;
}

double Weight::ap(double q) const {
  if (!(q > 1.0)) throw std::invalid_argument("ap: requires q > 1");
  return cached('a', q, &Weight::compute_ap);
}

double Weight::rh(double q) const {
  if (!(q > 1.0)) throw std::invalid_argument("rh: requires q > 1");
  return cached('r', q, &Weight::compute_rh);
}

double Weight::ainfty() const { return cached('i', 0.0, &Weight::compute_ainfty); }

double Weight::sharp_rh(double delta_max) const {
  if (!(delta_max > 1.0)) throw std::invalid_argument("sharp_rh: requires delta_max > 1");
  return cached('s', delta_max, &Weight::compute_sharp_rh);
}

double Weight::compute_ap(double q) const {
  const GridSpec& spec = w_.spec;
  std::vector<double> dual(spec.size());
  const double e = -1.0 / (q - 1.0);  // 1 - q'
  for (std::int64_t c = 0; c < spec.size(); ++c) dual[c] = std::pow(wv_[c], e);
  PrefixTable<double> tw(spec, wv_), td(spec, dual);
  double sup = 0;
  for_each_cube(lats_, [&](const DyadicLattice& lat, const Cube& q_, const Region& rq) {
    const double cells = double(lat.cell_count(q_));
    const double v = (tw.region_sum(rq) / cells) * std::pow(td.region_sum(rq) / cells, q - 1.0);
    sup = std::max(sup, v);
  });
  return sup;
}

double Weight::compute_rh(double q) const {
  const GridSpec& spec = w_.spec;
  std::vector<double> pw(spec.size());
  for (std::int64_t c = 0; c < spec.size(); ++c) pw[c] = std::pow(wv_[c], q);
  PrefixTable<double> tw(spec, wv_), tq(spec, pw);
  double sup = 0;
  for_each_cube(lats_, [&](const DyadicLattice& lat, const Cube& q_, const Region& rq) {
    const double cells = double(lat.cell_count(q_));
    const double v = std::pow(tq.region_sum(rq) / cells, 1.0 / q) / (tw.region_sum(rq) / cells);
    sup = std::max(sup, v);
  });
  return sup;
}

double Weight::compute_ainfty(double) const {
  const GridSpec& spec = w_.spec;
  PrefixTable<double> tw(spec, wv_);
  std::vector<std::uint8_t> mask(spec.size(), 0);
  double sup = 0;
  for_each_cube(lats_, [&](const DyadicLattice& lat, const Cube& q, const Region& rq) {
    for_each_region_cell(spec, rq, [&](std::int64_t c) { mask[c] = 1; });
    PrefixTable<double> tm(spec, MaskedSource{wv_, mask});
    double num = 0;
    for_each_region_cell(spec, rq, [&](std::int64_t c) {
      double best = 0;
      for (const DyadicLattice& l2 : lats_) {
        for (int lvl = 0; lvl <= l2.max_level(); ++lvl) {
          const Cube home = l2.cell_home(c, lvl);
          const double avg = tm.region_sum(l2.region(home)) / double(l2.cell_count(home));
          best = std::max(best, avg);
        }
      }
      num += best;
    });
    for_each_region_cell(spec, rq, [&](std::int64_t c) { mask[c] = 0; });
    sup = std::max(sup, num / tw.region_sum(rq));
  });
  return sup;
}

double Weight::compute_sharp_rh(double delta_max) const {
  const GridSpec& spec = w_.spec;
  PrefixTable<double> tw(spec, wv_);
  std::vector<double> pw(spec.size());
  auto ratio = [&](double d) {
    for (std::int64_t c = 0; c < spec.size(); ++c) pw[c] = std::pow(wv_[c], d);
    PrefixTable<double> td(spec, pw);
    double sup = 0;
    for_each_cube(lats_, [&](const DyadicLattice& lat, const Cube& q, const Region& rq) {
      const double cells = double(lat.cell_count(q));
      const double v = std::pow(td.region_sum(rq) / cells, 1.0 / d) / (tw.region_sum(rq) / cells);
      sup = std::max(sup, v);
    });
    return sup;
  };
  if (ratio(delta_max) <= 2.0) return delta_max;
  double lo = 1.0, hi = delta_max;
  for (int it = 0; it < 60 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) <= 2.0 ? lo : hi) = mid;
  }
  return lo;
}

double ap_characteristic(const Weight& w, double q) { return w.ap(q); }
double rh_characteristic(const Weight& w, double q) { return w.rh(q); }
double ainfty_characteristic(const Weight& w) { return w.ainfty(); }
double sharp_rh_exponent(const Weight& w, double delta_max) { return w.sharp_rh(delta_max); }

Weight power_weight(const GridSpec& spec, double s) {
  GridFunction w(spec);
  const double h = spec.spacing();
  double x[16];
  for (std::int64_t c = 0; c < spec.size(); ++c) {
    w.point(c, x);
    double r2 = 0;
    for (int a = 0; a < spec.dim; ++a) r2 += x[a] * x[a];
    w.values[c] = Complex(std::pow(std::sqrt(r2) + h, s), 0.0);
  }
  return Weight(std::move(w));
}

}  // namespace sparsedom
