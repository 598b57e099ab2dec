#include "sparsedom/operators.hpp"

#include "sparsedom/prefix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparsedom {

namespace {

double sq_norm(std::span<const double> v) {
  double s = 0;
  for (double c : v) s += c * c;
  return s;
}

void check_space_input(const Symbol& a, const GridFunction& f) {
  if (f.spec.domain != Domain::space) throw std::invalid_argument("apply_pdo: f must live in space");
  if (a.dim != f.spec.dim) throw std::invalid_argument("apply_pdo: symbol/grid dimension mismatch");
  if (!a.multiplier && !a.general) throw std::invalid_argument("symbol has no evaluator");
}

}  // namespace

Complex Symbol::eval(std::span<const double> x, std::span<const double> xi) const {
  if (general) return general(x, xi);
  if (!multiplier) throw std::invalid_argument("symbol has no evaluator");
  Complex v = multiplier(xi);
  if (modulation) v *= modulation(x);
  return v;
}

Symbol bessel_symbol(int dim, double m) {
  Symbol a;
  a.dim = dim;
  a.m = m;
  a.rho = 1.0;
  a.multiplier = [m](std::span<const double> xi) {
    return Complex(std::pow(1.0 + sq_norm(xi), 0.5 * m), 0.0);
  };
  return a;
}

Symbol oscillatory_symbol(int dim, double m, double rho, int smooth_order) {
  Symbol a;
  a.dim = dim;
  a.m = m;
  a.rho = rho;
  a.multiplier = [m, rho, smooth_order](std::span<const double> xi) {
    const double r = std::sqrt(sq_norm(xi));
    const double chi = 1.0 - plateau_bump(2.0 * r, smooth_order);
    if (chi == 0.0) return Complex(0.0, 0.0);
    return std::polar(chi * std::pow(r, m), std::pow(r, 1.0 - rho));
  };
  return a;
}

Symbol modulated_symbol(int dim, double m, double amplitude, double half_width, int power) {
  Symbol a;
  a.dim = dim;
  a.m = m;
  a.rho = 1.0;
  a.multiplier = [m](std::span<const double> xi) {
    return Complex(std::pow(1.0 + sq_norm(xi), 0.5 * m), 0.0);
  };
  a.modulation = [amplitude, half_width, power](std::span<const double> x) {
    double s = 1.0;
    for (double c : x)
      s *= std::pow(std::abs(std::sin(kPi * c / (2.0 * half_width))), double(power));
    return Complex(1.0 + amplitude * s, 0.0);
  };
  return a;
}

GridFunction apply_pdo(const Symbol& a, const GridFunction& f) {
  check_space_input(a, f);
  const int n = f.spec.dim;
  GridFunction fh = forward_transform(f);

  if (!a.general) {
    int ai[16];
    double xi[16];
    for (std::int64_t k = 0; k < fh.spec.size(); ++k) {
      fh.spec.unflatten(k, ai);
      for (int d = 0; d < n; ++d) xi[d] = fh.spec.axis_coord(ai[d]);
      fh.values[k] *= a.multiplier(std::span<const double>(xi, n));
    }
    GridFunction out = inverse_transform(fh);
    if (a.modulation) {
      double x[16];
      for (std::int64_t j = 0; j < out.spec.size(); ++j) {
        out.point(j, x);
        out.values[j] *= a.modulation(std::span<const double>(x, n));
      }
    }
    return out;
  }

  // full quadrature over the frequency grid
  const std::int64_t total = fh.spec.size();
  std::vector<double> xis(static_cast<std::size_t>(total) * n);
  int ai[16];
  for (std::int64_t k = 0; k < total; ++k) {
    fh.spec.unflatten(k, ai);
    for (int d = 0; d < n; ++d) xis[k * n + d] = fh.spec.axis_coord(ai[d]);
  }
  GridFunction out(f.spec);
  const double w = fh.spec.cell_weight();
  double x[16];
  for (std::int64_t j = 0; j < f.spec.size(); ++j) {
    f.point(j, x);
    Complex acc(0.0, 0.0);
    for (std::int64_t k = 0; k < total; ++k) {
      const double* xi = &xis[k * n];
      double phase = 0;
      for (int d = 0; d < n; ++d) phase += x[d] * xi[d];
      acc += a.general(std::span<const double>(x, n), std::span<const double>(xi, n)) *
             fh.values[k] * std::polar(1.0, phase);
    }
    out.values[j] = w * acc;
  }
  return out;
}

GridFunction dyadic_piece(const Symbol& a, const LPFamily& lp, int j, const GridFunction& f) {
  if (j < 0 || j > lp.top_band) throw std::invalid_argument("dyadic_piece: band out of range");
  return apply_pdo(a, band_project(lp, j, f));
}

GridFunction propagator(const GridFunction& f, double rho, double t) {
  if (!(rho >= -1.0 && rho < 1.0)) throw std::invalid_argument("propagator: rho outside [-1, 1)");
  if (f.spec.domain != Domain::space)
    throw std::invalid_argument("propagator: f must live in space");
  const int n = f.spec.dim;
  const double e = 0.5 * (1.0 - rho);
  GridFunction fh = forward_transform(f);
  int ai[16];
  for (std::int64_t k = 0; k < fh.spec.size(); ++k) {
    fh.spec.unflatten(k, ai);
    double r2 = 0;
    for (int d = 0; d < n; ++d) {
      const double c = fh.spec.axis_coord(ai[d]);
      r2 += c * c;
    }
    fh.values[k] *= std::polar(1.0, t * std::pow(r2, e));
  }
  return inverse_transform(fh);
}

namespace {

// visit every cube of every lattice/level; fn(lat, cube, region, cells)
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

void check_lattice_collection(const GridFunction& f, const std::vector<DyadicLattice>& lats) {
  if (lats.empty()) throw std::invalid_argument("maximal: empty lattice collection");
  for (const DyadicLattice& lat : lats)
    if (!(lat.spec == f.spec)) throw std::invalid_argument("maximal: lattice/grid spec mismatch");
}

}  // namespace

GridFunction maximal(const GridFunction& f, const std::vector<DyadicLattice>& lats, double r) {
  check_lattice_collection(f, lats);
  if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("maximal: requires 1 <= r < inf");
  const GridSpec& spec = f.spec;
  std::vector<double> pw(spec.size());
  for (std::int64_t c = 0; c < spec.size(); ++c) pw[c] = std::pow(std::abs(f.values[c]), r);
  PrefixTable<double> tab(spec, pw);

  RArray out = RArray::Zero(spec.size());
  for_each_cube(lats, [&](const DyadicLattice& lat, const Cube& q, const Region& rq) {
    const double avg = std::pow(tab.region_sum(rq) / double(lat.cell_count(q)), 1.0 / r);
    for_each_region_cell(spec, rq, [&](std::int64_t c) { out[c] = std::max(out[c], avg); });
  });
  GridFunction g(spec);
  g.values = out.cast<Complex>();
  return g;
}

GridFunction fractional_maximal(const GridFunction& h, const std::vector<DyadicLattice>& lats,
                                double gamma) {
  check_lattice_collection(h, lats);
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("fractional_maximal: gamma outside [0, 1)");
  const double scale = h.values.abs().maxCoeff();
  for (std::int64_t c = 0; c < h.spec.size(); ++c)
    if (std::abs(h.values[c].imag()) > 1e-12 * (1.0 + scale) ||
        h.values[c].real() < -1e-12 * (1.0 + scale))
      throw std::invalid_argument("fractional_maximal: h must be nonnegative");

  const GridSpec& spec = h.spec;
  std::vector<double> vals(spec.size());
  for (std::int64_t c = 0; c < spec.size(); ++c) vals[c] = std::abs(h.values[c]);
  PrefixTable<double> tab(spec, vals);

  RArray out = RArray::Zero(spec.size());
  for_each_cube(lats, [&](const DyadicLattice& lat, const Cube& q, const Region& rq) {
    const double v =
        std::pow(lat.measure(q), gamma) * (tab.region_sum(rq) / double(lat.cell_count(q)));
    for_each_region_cell(spec, rq, [&](std::int64_t c) { out[c] = std::max(out[c], v); });
  });
  GridFunction g(spec);
  g.values = out.cast<Complex>();
  return g;
}

GridFunction sharp_maximal(const GridFunction& g, const std::vector<DyadicLattice>& lats) {
  check_lattice_collection(g, lats);
  const GridSpec& spec = g.spec;
  PrefixTable<Complex> tab(spec, g.values);

  RArray out = RArray::Zero(spec.size());
  for_each_cube(lats, [&](const DyadicLattice& lat, const Cube& q, const Region& rq) {
    const double cells = double(lat.cell_count(q));
    const Complex mean = tab.region_sum(rq) / cells;
    double acc = 0;
    for_each_region_cell(spec, rq, [&](std::int64_t c) { acc += std::abs(g.values[c] - mean); });
    const double dev = acc / cells;
    for_each_region_cell(spec, rq, [&](std::int64_t c) { out[c] = std::max(out[c], dev); });
  });
  GridFunction res(spec);
  res.values = out.cast<Complex>();
  return res;
}

namespace {

bool interval_has_base(int start, int len, int N, int stride) {
  if (len >= stride) return true;
  for (int m = 0; m < N; m += stride) {
    int d = m - start;
    if (d < 0) d += N;
    if (d < len) return true;
  }
  return false;
}

}  // namespace

GridFunction grand_maximal(const PdoApply& T, const GridFunction& f,
                           const std::vector<DyadicLattice>& lats, double s, int stride) {
  check_lattice_collection(f, lats);
  if (!(s >= 1.0)) throw std::invalid_argument("grand_maximal: requires s >= 1");
  if (stride < 1) throw std::invalid_argument("grand_maximal: stride must be positive");
  const GridSpec& spec = f.spec;
  const int n = spec.dim;
  stride = std::min(stride, spec.cells);

  RArray out = RArray::Zero(spec.size());
  int ai[16];
  for_each_cube(lats, [&](const DyadicLattice& lat, const Cube& q, const Region& rq) {
    for (int a = 0; a < n; ++a)
      if (!interval_has_base(rq.start[a], rq.len[a], spec.cells, stride)) return;
    GridFunction far = masked(f, dilate(spec, rq, 3.0), true);
    GridFunction tf = T(far);
    if (!(tf.spec == spec)) throw std::runtime_error("grand_maximal: operator changed the grid");
    const double u = region_average(tf, rq, s);
    for_each_region_cell(spec, rq, [&](std::int64_t c) {
      spec.unflatten(c, ai);
      for (int a = 0; a < n; ++a)
        if (ai[a] % stride != 0) return;
      out[c] = std::max(out[c], u);
    });
  });

  GridFunction res(spec);
  if (stride == 1) {
    res.values = out.cast<Complex>();
    return res;
  }
  int bi[16];
  for (std::int64_t c = 0; c < spec.size(); ++c) {
    spec.unflatten(c, ai);
    for (int a = 0; a < n; ++a) bi[a] = ((ai[a] + stride / 2) / stride * stride) % spec.cells;
    res.values[c] = out[spec.flatten(bi)];
  }
  return res;
}

namespace {

Complex nested_difference(const Symbol& a, double* x, double* xi, int* alpha, int* beta, int n) {
  for (int ax = 0; ax < n; ++ax) {
    if (alpha[ax] > 0) {
      const double h = 0.005 * (1.0 + std::sqrt(sq_norm(std::span<const double>(xi, n))));
      --alpha[ax];
      xi[ax] += h;
      const Complex hi = nested_difference(a, x, xi, alpha, beta, n);
      xi[ax] -= 2.0 * h;
      const Complex lo = nested_difference(a, x, xi, alpha, beta, n);
      xi[ax] += h;
      ++alpha[ax];
      return (hi - lo) / (2.0 * h);
    }
  }
  for (int ax = 0; ax < n; ++ax) {
    if (beta[ax] > 0) {
      const double h = 0.005 * (1.0 + std::sqrt(sq_norm(std::span<const double>(x, n))));
      --beta[ax];
      x[ax] += h;
      const Complex hi = nested_difference(a, x, xi, alpha, beta, n);
      x[ax] -= 2.0 * h;
      const Complex lo = nested_difference(a, x, xi, alpha, beta, n);
      x[ax] += h;
      ++beta[ax];
      return (hi - lo) / (2.0 * h);
    }
  }
  return a.eval(std::span<const double>(x, n), std::span<const double>(xi, n));
}

}  // namespace

double symbol_seminorm(const Symbol& a, const GridSpec& spec, const std::vector<int>& alpha,
                       const std::vector<int>& beta) {
  const int n = a.dim;
  if (int(alpha.size()) != n || int(beta.size()) != n)
    throw std::invalid_argument("symbol_seminorm: multi-index size mismatch");
  int ta = 0, tb = 0;
  for (int v : alpha) {
    if (v < 0) throw std::invalid_argument("symbol_seminorm: negative multi-index");
    ta += v;
  }
  for (int v : beta) {
    if (v < 0) throw std::invalid_argument("symbol_seminorm: negative multi-index");
    tb += v;
  }
  if (ta + tb > 4) throw std::invalid_argument("symbol_seminorm: stencil order above 4");

  const int nx = std::min(9, spec.cells);
  const int nk = std::min(17, spec.cells);
  const double L = spec.half_width;
  const double nyq = spec.nyquist();
  const double expo = a.m - a.rho * ta + a.delta * tb;

  std::vector<double> xg(nx), kg(nk);
  for (int i = 0; i < nx; ++i) xg[i] = -L + (2.0 * L * i) / nx;
  for (int i = 0; i < nk; ++i) kg[i] = -nyq + (2.0 * nyq * i) / nk;

  double sup = 0;
  double x[16], xi[16];
  int al[16], be[16];
  int ix[16] = {0}, ik[16] = {0};
  while (true) {
    for (int d = 0; d < n; ++d) x[d] = xg[ix[d]];
    while (true) {
      for (int d = 0; d < n; ++d) xi[d] = kg[ik[d]];
      for (int d = 0; d < n; ++d) {
        al[d] = alpha[d];
        be[d] = beta[d];
      }
      const Complex dv = nested_difference(a, x, xi, al, be, n);
      const double norm = std::pow(1.0 + std::sqrt(sq_norm(std::span<const double>(xi, n))), expo);
      sup = std::max(sup, std::abs(dv) / norm);
      int d = n - 1;
      while (d >= 0 && ++ik[d] == nk) ik[d--] = 0;
      if (d < 0) break;
    }
    int d = n - 1;
    while (d >= 0 && ++ix[d] == nx) ix[d--] = 0;
    if (d < 0) break;
  }
  return sup;
}

}  // namespace sparsedom
