#include "sparsedom/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsedom {

namespace {

int wrap(int p, int n) {
  p %= n;
  return p < 0 ? p + n : p;
}

std::int64_t pack_axis_indices(int level, int dim, const int* axis_idx) {
  std::int64_t packed = 0;
  for (int a = dim - 1; a >= 0; --a) packed = (packed << level) | axis_idx[a];
  return packed;
}

}  // namespace

std::int64_t DyadicLattice::cell_count(const Cube& q) const {
  std::int64_t c = 1;
  for (int a = 0; a < spec.dim; ++a) c *= side_cells(q.level);
  return c;
}

int DyadicLattice::axis_index(const Cube& q, int axis) const {
  if (q.level == 0) return 0;
  const std::int64_t mask = (std::int64_t(1) << q.level) - 1;
  return static_cast<int>((q.index >> (axis * q.level)) & mask);
}

Cube DyadicLattice::cube_at(int level, const int* axis_idx) const {
  return Cube{id, level, pack_axis_indices(level, spec.dim, axis_idx)};
}

Region DyadicLattice::region(const Cube& q) const {
  Region r;
  r.dim = spec.dim;
  r.start.resize(spec.dim);
  r.len.assign(spec.dim, side_cells(q.level));
  for (int a = 0; a < spec.dim; ++a)
    r.start[a] = wrap(shift[a] + axis_index(q, a) * side_cells(q.level), spec.cells);
  return r;
}

std::vector<Cube> DyadicLattice::children(const Cube& q) const {
  if (q.level >= max_level())
    throw std::invalid_argument("children: cube already at cell resolution");
  std::vector<Cube> out;
  out.reserve(std::int64_t(1) << spec.dim);
  int base[16], child[16];
  for (int a = 0; a < spec.dim; ++a) base[a] = axis_index(q, a) * 2;
  const int combos = 1 << spec.dim;
  for (int s = 0; s < combos; ++s) {
    for (int a = 0; a < spec.dim; ++a) child[a] = base[a] + ((s >> a) & 1);
    out.push_back(cube_at(q.level + 1, child));
  }
  return out;
}

Cube DyadicLattice::parent(const Cube& q) const {
  if (q.level == 0) throw std::invalid_argument("parent: root has no parent");
  int idx[16];
  for (int a = 0; a < spec.dim; ++a) idx[a] = axis_index(q, a) >> 1;
  return cube_at(q.level - 1, idx);
}

bool DyadicLattice::contains(const Cube& outer, const Cube& inner) const {
  if (outer.lattice != inner.lattice)
    throw std::invalid_argument("contains: cubes from different lattices");
  if (outer.level > inner.level) return false;
  const int drop = inner.level - outer.level;
  for (int a = 0; a < spec.dim; ++a)
    if ((axis_index(inner, a) >> drop) != axis_index(outer, a)) return false;
  return true;
}

Cube DyadicLattice::cell_home(std::int64_t cell, int level) const {
  int ai[16], idx[16];
  spec.unflatten(cell, ai);
  const int side = side_cells(level);
  for (int a = 0; a < spec.dim; ++a) idx[a] = wrap(ai[a] - shift[a], spec.cells) / side;
  return cube_at(level, idx);
}

std::vector<DyadicLattice> shifted_lattices(const GridSpec& spec) {
  if (spec.domain != Domain::space)
    throw std::invalid_argument("shifted_lattices: expected a space-domain grid");
  const int N = spec.cells;
  const int third[3] = {0, static_cast<int>(std::lround(N / 3.0)),
                        static_cast<int>(std::lround(2.0 * N / 3.0))};
  int combos = 1;
  for (int a = 0; a < spec.dim; ++a) combos *= 3;
  std::vector<DyadicLattice> out;
  out.reserve(combos);
  for (int c = 0; c < combos; ++c) {
    DyadicLattice lat;
    lat.spec = spec;
    lat.id = c;
    lat.shift.resize(spec.dim);
    int rem = c;
    for (int a = 0; a < spec.dim; ++a) {
      lat.shift[a] = third[rem % 3];
      rem /= 3;
    }
    out.push_back(std::move(lat));
  }
  return out;
}

Region dilate(const GridSpec& spec, const Region& q, double factor) {
  if (factor < 1.0) throw std::invalid_argument("dilate: factor must be >= 1");
  const int N = spec.cells;
  Region r;
  r.dim = q.dim;
  r.start.resize(q.dim);
  r.len.resize(q.dim);
  for (int a = 0; a < q.dim; ++a) {
    const double center = q.start[a] + 0.5 * q.len[a];
    const double half = 0.5 * factor * q.len[a];
    const std::int64_t lo = static_cast<std::int64_t>(std::floor(center - half));
    const std::int64_t hi = static_cast<std::int64_t>(std::ceil(center + half));
    if (hi - lo >= N) {
      r.start[a] = 0;
      r.len[a] = N;
    } else {
      r.start[a] = wrap(static_cast<int>(lo % N), N);
      r.len[a] = static_cast<int>(hi - lo);
    }
  }
  return r;
}

Region rho_cube(const GridSpec& spec, const Region& q, double rho) {
  if (!q.square()) throw std::invalid_argument("rho_cube: region is not a cube");
  const double h = spec.spacing();
  const double side = q.len[0] * h;
  if (side >= 1.0)
    throw std::domain_error("rho_cube: side " + std::to_string(side) +
                            " >= 1, the rho-cube regime needs l(Q) < 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho_cube: rho must be in (0, 1]");
  const double target = std::pow(side, rho);  // physical side of Q^rho
  const int N = spec.cells;
  Region r;
  r.dim = q.dim;
  r.start.resize(q.dim);
  r.len.resize(q.dim);
  for (int a = 0; a < q.dim; ++a) {
    const double center = q.start[a] + 0.5 * q.len[a];
    const double half = 0.5 * target / h;
    const std::int64_t lo = static_cast<std::int64_t>(std::floor(center - half));
    const std::int64_t hi = static_cast<std::int64_t>(std::ceil(center + half));
    if (hi - lo >= N) {
      r.start[a] = 0;
      r.len[a] = N;
    } else {
      r.start[a] = wrap(static_cast<int>(lo % N), N);
      r.len[a] = static_cast<int>(hi - lo);
    }
  }
  return r;
}

Cube three_lattice_cover(const std::vector<DyadicLattice>& lattices, const Region& p) {
  if (lattices.empty()) throw std::invalid_argument("three_lattice_cover: no lattices");
  const GridSpec& spec = lattices.front().spec;
  const int N = spec.cells;
  if (!p.square()) throw std::invalid_argument("three_lattice_cover: region is not a cube");
  const int l = p.len[0];
  if (3 * l > N) return lattices.front().root();

  int side = 1, side_log = 0;
  while (side < l) {
    side <<= 1;
    ++side_log;
  }
  for (; side <= N; side <<= 1, ++side_log) {
    const int level = spec.levels() - side_log;
    for (const DyadicLattice& lat : lattices) {
      bool fits = true;
      int idx[16];
      for (int a = 0; a < spec.dim && fits; ++a) {
        const int t = (p.start[a] - lat.shift[a] + N) % N;
        if (t % side + p.len[a] > side) fits = false;
        idx[a] = t / side;
      }
      if (fits) return lat.cube_at(level, idx);
    }
  }
  return lattices.front().root();
}

namespace {

double carleson_sup(const std::vector<std::int64_t>& counts,
                    const std::vector<std::vector<int>>& inside) {
  // exact sup of fraction sums: compare num1/den1 vs num2/den2 by cross products
  __int128 best_num = 0, best_den = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    __int128 num = 0;
    for (int j : inside[i]) num += counts[j];
    const __int128 den = counts[i];
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
    }
  }
  return static_cast<double>(best_num) / static_cast<double>(best_den);
}

}  // namespace

double carleson_constant(const DyadicLattice& lat, const std::vector<Cube>& family) {
  for (const Cube& q : family)
    if (q.lattice != lat.id)
      throw std::invalid_argument("carleson_constant: family mixes lattices");
  const std::size_t m = family.size();
  std::vector<std::int64_t> counts(m);
  for (std::size_t i = 0; i < m; ++i) counts[i] = lat.cell_count(family[i]);
  std::vector<std::vector<int>> inside(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (lat.contains(family[i], family[j])) inside[i].push_back(static_cast<int>(j));
  return carleson_sup(counts, inside);
}

double carleson_constant(const GridSpec& spec, const std::vector<Region>& family) {
  const std::size_t m = family.size();
  std::vector<std::int64_t> counts(m);
  for (std::size_t i = 0; i < m; ++i) counts[i] = family[i].cell_count();
  std::vector<std::vector<int>> inside(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (region_contains(spec, family[i], family[j])) inside[i].push_back(static_cast<int>(j));
  return carleson_sup(counts, inside);
}

bool region_contains(const GridSpec& spec, const Region& outer, const Region& inner) {
  const int N = spec.cells;
  for (int a = 0; a < spec.dim; ++a) {
    if (inner.len[a] > outer.len[a]) return false;
    if (outer.len[a] == N) continue;
    const int rel = wrap(inner.start[a] - outer.start[a], N);
    if (rel + inner.len[a] > outer.len[a]) return false;
  }
  return true;
}

double region_measure(const GridSpec& spec, const Region& r) {
  return r.cell_count() * spec.cell_weight();
}

std::vector<std::int64_t> region_cells(const GridSpec& spec, const Region& r) {
  std::vector<std::int64_t> out;
  out.reserve(r.cell_count());
  for_each_region_cell(spec, r, [&](std::int64_t c) { out.push_back(c); });
  return out;
}

double region_average(const GridFunction& f, const Region& r, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for_each_region_cell(f.spec, r, [&](std::int64_t c) { m = std::max(m, std::abs(f.values[c])); });
    return m;
  }
  if (!(p > 0)) throw std::invalid_argument("region_average: p must be positive or inf");
  double acc = 0.0;
  for_each_region_cell(f.spec, r, [&](std::int64_t c) { acc += std::pow(std::abs(f.values[c]), p); });
  return std::pow(acc / static_cast<double>(r.cell_count()), 1.0 / p);
}

GridFunction masked(const GridFunction& f, const Region& r, bool complement) {
  GridFunction out(f.spec);
  if (!complement) {
    for_each_region_cell(f.spec, r, [&](std::int64_t c) { out.values[c] = f.values[c]; });
  } else {
    out.values = f.values;
    for_each_region_cell(f.spec, r, [&](std::int64_t c) { out.values[c] = Complex(0, 0); });
  }
  return out;
}

}  // namespace sparsedom
