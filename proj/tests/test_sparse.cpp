#include "doctest.h"

#include "sparsedom/forms.hpp"
#include "sparsedom/rng.hpp"
#include "sparsedom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

using namespace sparsedom;

namespace {

GridFunction random_real(const GridSpec& spec, std::uint64_t seed, double offset = 0.0) {
  Rng rng(seed);
  GridFunction f(spec);
  for (std::int64_t i = 0; i < spec.size(); ++i)
    f.values[i] = Complex(offset + rng.normal(), 0.0);
  return f;
}

// minimal range over subsets of the region keeping more than (1-lambda)|Q|
// cells: sort and slide a window
double oscillation_oracle(const GridFunction& f, const GridSpec& spec, const Region& q,
                          double lambda) {
  std::vector<double> v;
  for (std::int64_t c : region_cells(spec, q)) v.push_back(f.values[c].real());
  std::sort(v.begin(), v.end());
  const std::int64_t total = static_cast<std::int64_t>(v.size());
  std::int64_t keep = static_cast<std::int64_t>(std::floor((1.0 - lambda) * total)) + 1;
  keep = std::min(keep, total);
  double best = v.back() - v.front();
  for (std::int64_t i = 0; i + keep <= total; ++i)
    best = std::min(best, v[i + keep - 1] - v[i]);
  return best;
}

}  // namespace

TEST_CASE("local oscillation equals the sorted-window oracle") {
  const GridSpec spec(1, 64, 4.0);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const GridFunction f = random_real(spec, seed);
    for (const Region q : {Region{1, {0}, {64}}, Region{1, {50}, {20}}, Region{1, {5}, {8}}}) {
      for (double lambda : {0.5, 0.25, 0.125, 0.03125}) {
        CHECK(local_oscillation(f, q, lambda) ==
              doctest::Approx(oscillation_oracle(f, spec, q, lambda)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("oscillation decomposition dominates pointwise with a half-sparse family") {
  const GridSpec spec(1, 1024, 8.0);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
    const GridFunction f = random_real(spec, seed, seed == 12 ? 3.0 : 0.0);
    const LNDecomposition ln = lerner_nazarov_decompose(f, lat, 0.125);
    CHECK(ln.certificate.pass);
    CHECK(ln.certificate.eta == doctest::Approx(0.5));
    CHECK(ln.certificate.min_ratio >= 0.5 - 1e-12);

    GridFunction painted(spec);
    for (const SparseEntry& e : ln.family.entries) {
      CHECK(e.coeff >= 0.0);
      for_each_region_cell(spec, lat.region(e.cube),
                           [&](std::int64_t c) { painted.values[c] += e.coeff; });
    }
    double worst = -1e300;
    for (std::int64_t i = 0; i < spec.size(); ++i)
      worst = std::max(worst, std::abs(f.values[i]) - painted.values[i].real());
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("eta-sparseness verification rejects a saturated family") {
  const GridSpec spec(1, 16, 4.0);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  const Cube root = lat.root();
  std::vector<Cube> fam = {root};
  for (const Cube& c : lat.children(root)) fam.push_back(c);

  const SparseCertificate good = verify_eta_sparse(lat, {root, lat.children(root)[0]}, 0.5);
  CHECK(good.pass);
  const SparseCertificate bad = verify_eta_sparse(lat, fam, 0.5);
  CHECK_FALSE(bad.pass);
  CHECK(bad.min_ratio == doctest::Approx(0.0));
}

TEST_CASE("stopping family from a level-gap predicate") {
  const GridSpec spec(1, 16, 4.0);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  const StopPredicate two_levels = [](const Cube& u, const Cube& r) {
    return r.level - u.level <= 1;
  };
  const std::vector<Cube> fam = stopping_family(lat, lat.root(), two_levels);
  // members sit exactly two levels below their anchor: levels 2 and 4
  std::size_t at2 = 0, at4 = 0;
  for (const Cube& q : fam) {
    CHECK((q.level == 2 || q.level == 4));
    if (q.level == 2) ++at2;
    if (q.level == 4) ++at4;
  }
  CHECK(at2 == 4);
  CHECK(at4 == 16);
  CHECK(fam.size() == 20);
}

TEST_CASE("stopping family under the sqrt(2) average rule finds a spike") {
  const GridSpec spec(1, 16, 4.0);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  GridFunction f(spec);
  for (std::int64_t i = 0; i < spec.size(); ++i) f.values[i] = Complex(1.0, 0.0);
  f.values[5] = Complex(100.0, 0.0);
  const StopPredicate pred = [&](const Cube& u, const Cube& r) {
    return region_average(f, lat.region(r), 2.0) <=
           std::sqrt(2.0) * region_average(f, lat.region(u), 2.0);
  };
  const std::vector<Cube> fam = stopping_family(lat, lat.root(), pred);
  CHECK_FALSE(fam.empty());
  // every member must actually break the bound against its nearest anchor
  for (const Cube& q : fam) {
    const std::vector<std::int64_t> cells = region_cells(spec, lat.region(q));
    CHECK(std::find(cells.begin(), cells.end(), 5) != cells.end());
  }
}

TEST_CASE("augmentation keeps anchors, dedups, and reports packing") {
  const GridSpec spec(1, 16, 4.0);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  const Cube root = lat.root();
  const Cube left = lat.children(root)[0];

  const AugmentResult ok = augment(lat, {root, left}, [&](const Cube& q) {
    return std::vector<Cube>{q};
  });
  CHECK(ok.hypothesis_ok);
  CHECK(ok.violations.empty());
  std::set<std::int64_t> keys;
  bool saw_root = false, saw_left = false;
  for (const SparseEntry& e : ok.family.entries) {
    CHECK(e.coeff == 1.0);
    keys.insert((static_cast<std::int64_t>(e.cube.level) << 32) | e.cube.index);
    if (e.cube == root) saw_root = true;
    if (e.cube == left) saw_left = true;
  }
  CHECK(saw_root);
  CHECK(saw_left);
  CHECK(keys.size() == ok.family.entries.size());

  // stopping children covering the whole anchor break the packing hypothesis
  const AugmentResult bad = augment(lat, {root}, [&](const Cube& q) {
    std::vector<Cube> fam = {q};
    if (q == root)
      for (const Cube& c : lat.children(root)) fam.push_back(c);
    return fam;
  });
  CHECK_FALSE(bad.hypothesis_ok);
  REQUIRE_FALSE(bad.violations.empty());
  CHECK(bad.violations[0].anchor == root);
  CHECK(bad.violations[0].packed_fraction == doctest::Approx(1.0));
}

TEST_CASE("Calderon-Zygmund selection invariants on random masks") {
  Rng rng(99);
  auto run = [&](const GridSpec& spec, int trials) {
    const DyadicLattice lat = shifted_lattices(spec)[0];
    const Cube root = lat.root();
    const double tau = std::ldexp(1.0, -spec.dim - 1);
    const std::int64_t budget =
        static_cast<std::int64_t>(std::floor(tau * static_cast<double>(spec.size())));
    for (int t = 0; t < trials; ++t) {
      std::vector<std::uint8_t> mask(spec.size(), 0);
      std::int64_t placed = 0;
      while (placed < budget) {
        const std::int64_t c = rng.uniform_int(0, spec.size() - 1);
        if (!mask[c]) {
          mask[c] = 1;
          ++placed;
        }
      }
      const std::vector<Cube> sel = cz_decompose(lat, mask, root);
      auto density = [&](const Cube& q) {
        std::int64_t hit = 0;
        for_each_region_cell(spec, lat.region(q), [&](std::int64_t c) { hit += mask[c]; });
        return static_cast<double>(hit) / static_cast<double>(lat.cell_count(q));
      };
      std::vector<std::uint8_t> covered(spec.size(), 0);
      for (const Cube& p : sel) {
        CHECK(density(p) > tau);
        Cube up = p;
        while (up.level > 0) {
          up = lat.parent(up);
          CHECK(density(up) <= tau);
        }
        for_each_region_cell(spec, lat.region(p), [&](std::int64_t c) {
          CHECK(covered[c] == 0);  // disjointness
          covered[c] = 1;
        });
      }
      for (std::int64_t c = 0; c < spec.size(); ++c)
        if (mask[c]) CHECK(covered[c] == 1);  // selection carries the whole set
    }
  };
  run(GridSpec(1, 256, 4.0), 40);
  run(GridSpec(2, 16, 4.0), 40);
}

TEST_CASE("form-certified family construction") {
  const GridSpec spec(1, 256, 4.0);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  GridFunction g(spec);
  g.values.setConstant(Complex(1.0, 0.0));
  const PdoApply identity = [](const GridFunction& u) { return u; };

  for (std::uint64_t seed : {5ULL, 6ULL}) {
    const GridFunction f = random_real(spec, seed);
    const BuildResult b = build_sparse_form_family(identity, f, g, lat, lat.root(), {});
    CHECK(b.certified);
    CHECK(b.lhs <= b.rhs + 1e-9 * (1.0 + b.lhs + b.rhs));
    CHECK(b.constant == doctest::Approx(2.0 * b.lambda));
    CHECK(b.carleson <= 2.0 + 1e-12);
    CHECK(b.max_depth <= spec.levels());
    REQUIRE_FALSE(b.family.entries.empty());
    CHECK(b.family.entries[0].cube == lat.root());
    const SparseCertificate cert = verify_eta_sparse(lat, b.family.cubes(), 0.5);
    CHECK(cert.pass);
  }
}
