#pragma once

#include "sparsedom/grid.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sparsedom {

// Cell-aligned box, possibly wrapping around the periodic boundary.
struct Region {
  int dim = 1;
  std::vector<int> start;  // first cell per axis, in [0, N)
  std::vector<int> len;    // extent per axis, in [1, N]

  std::int64_t cell_count() const {
    std::int64_t c = 1;
    for (int l : len) c *= l;
    return c;
  }
  bool square() const {
    for (int l : len)
      if (l != len[0]) return false;
    return true;
  }
};

// Dyadic cube identified inside one shifted lattice; per-axis indices are
// packed into `index`, `level` bits per axis, axis 0 in the low bits.
struct Cube {
  int lattice = 0;
  int level = 0;
  std::int64_t index = 0;

  bool operator==(const Cube& o) const {
    return lattice == o.lattice && level == o.level && index == o.index;
  }
};

struct CubeHash {
  std::size_t operator()(const Cube& c) const {
    std::uint64_t h = static_cast<std::uint64_t>(c.index) * 0x9e3779b97f4a7c15ULL;
    h ^= (static_cast<std::uint64_t>(c.level) << 40) ^ static_cast<std::uint64_t>(c.lattice);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

// One periodic dyadic tree: the standard tree cyclically translated by
// `shift` cells per axis. Levels run 0 (whole box) .. log2(N) (single cells).
struct DyadicLattice {
  GridSpec spec;
  int id = 0;
  std::vector<int> shift;

  int max_level() const { return spec.levels(); }
  int side_cells(int level) const { return spec.cells >> level; }
  double side_length(const Cube& q) const { return side_cells(q.level) * spec.spacing(); }
  std::int64_t cell_count(const Cube& q) const;
  double measure(const Cube& q) const { return cell_count(q) * spec.cell_weight(); }

  Cube root() const { return Cube{id, 0, 0}; }
  int axis_index(const Cube& q, int axis) const;
  Cube cube_at(int level, const int* axis_idx) const;
  Region region(const Cube& q) const;
  std::vector<Cube> children(const Cube& q) const;
  Cube parent(const Cube& q) const;
  bool contains(const Cube& outer, const Cube& inner) const;
  // the level-`level` cube whose cells include grid cell `cell`
  Cube cell_home(std::int64_t cell, int level) const;
};

// The 3^n one-third shifted lattices; lattice 0 is unshifted.
std::vector<DyadicLattice> shifted_lattices(const GridSpec& spec);

// Concentric dilation, rounded outward, saturated at the box.
Region dilate(const GridSpec& spec, const Region& q, double factor);

// Concentric cube of side l(Q)^rho (physical units); requires l(Q) < 1.
Region rho_cube(const GridSpec& spec, const Region& q, double rho);

// Smallest cube R in one of the shifted lattices with R >= P; side ratio <= 6
// whenever side(P) <= N/3, otherwise the root of lattice 0 is returned.
Cube three_lattice_cover(const std::vector<DyadicLattice>& lattices, const Region& p);

// sup over Q in family of sum_{P in family, P subset Q} |P| / |Q|,
// evaluated in exact integer arithmetic on cell counts.
double carleson_constant(const DyadicLattice& lat, const std::vector<Cube>& family);
double carleson_constant(const GridSpec& spec, const std::vector<Region>& family);

bool region_contains(const GridSpec& spec, const Region& outer, const Region& inner);
double region_measure(const GridSpec& spec, const Region& r);
std::vector<std::int64_t> region_cells(const GridSpec& spec, const Region& r);

// (|R|^{-1} int_R |f|^p)^{1/p}; p = inf -> max over R
double region_average(const GridFunction& f, const Region& r, double p);

// f * 1_R, or f * 1_{R^c} when complement is set
GridFunction masked(const GridFunction& f, const Region& r, bool complement = false);

// odometer walk over the (possibly wrapped) region, visiting flat cell indices
template <typename Fn>
void for_each_region_cell(const GridSpec& spec, const Region& r, Fn&& fn) {
  const int n = spec.dim;
  const int N = spec.cells;
  int ofs[16] = {0};
  while (true) {
    std::int64_t idx = 0;
    for (int a = 0; a < n; ++a) {
      int p = r.start[a] + ofs[a];
      if (p >= N) p -= N;
      idx = idx * N + p;
    }
    fn(idx);
    int a = n - 1;
    while (a >= 0 && ++ofs[a] == r.len[a]) ofs[a--] = 0;
    if (a < 0) break;
  }
}

}  // namespace sparsedom
