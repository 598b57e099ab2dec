#include "doctest.h"

#include "sparsedom/grid.hpp"
#include "sparsedom/rng.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

using namespace sparsedom;

namespace {

GridFunction random_field(const GridSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  GridFunction f(spec);
  for (std::int64_t i = 0; i < spec.size(); ++i) f.values[i] = Complex(rng.normal(), rng.normal());
  return f;
}

}  // namespace

TEST_CASE("grid spec geometry") {
  const GridSpec spec(2, 16, 8.0);
  CHECK(spec.spacing() == doctest::Approx(1.0));
  CHECK(spec.freq_step() == doctest::Approx(kPi / 8.0));
  CHECK(spec.nyquist() == doctest::Approx(kPi));
  CHECK(spec.size() == 256);
  CHECK(spec.levels() == 4);
  CHECK(spec.cell_weight() == doctest::Approx(1.0));
  CHECK(spec.dual().cell_weight() == doctest::Approx(1.0 / 256.0));
  CHECK(spec.dual().dual() == spec);

  CHECK(spec.axis_coord(0) == doctest::Approx(-8.0));
  CHECK(spec.axis_coord(8) == doctest::Approx(0.0));
  CHECK(spec.signed_index(15) == -1);
  CHECK(spec.dual().axis_coord(15) == doctest::Approx(-kPi / 8.0));

  // axis 0 is most significant
  int idx[2] = {3, 5};
  CHECK(spec.flatten(idx) == 3 * 16 + 5);
  int back[2];
  spec.unflatten(3 * 16 + 5, back);
  CHECK(back[0] == 3);
  CHECK(back[1] == 5);

  CHECK_THROWS_AS(GridSpec(1, 12, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(0, 16, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1, 16, 0.0), std::invalid_argument);
}

TEST_CASE("transform round trip and Plancherel") {
  for (const GridSpec spec : {GridSpec(1, 512, 16.0), GridSpec(2, 64, 4.0)}) {
    const GridFunction f = random_field(spec, 11);
    const GridFunction fh = forward_transform(f);
    const GridFunction back = inverse_transform(fh);
    double sup = 0;
    for (std::int64_t i = 0; i < spec.size(); ++i)
      sup = std::max(sup, std::abs(back.values[i] - f.values[i]));
    CHECK(sup < 1e-12 * f.lp_norm(std::numeric_limits<double>::infinity()));

    const double a = f.lp_norm(2.0);
    const double b = fh.lp_norm(2.0);
    CHECK(std::abs(a - b) <= 1e-10 * a);
  }
}

TEST_CASE("sampled Gaussian matches its continuum transform") {
  const GridSpec spec(1, 512, 16.0);
  GridFunction f(spec);
  double x;
  for (std::int64_t i = 0; i < spec.size(); ++i) {
    f.point(i, &x);
    f.values[i] = Complex(std::exp(-0.5 * x * x), 0.0);
  }
  const GridFunction fh = forward_transform(f);
  double xi, sup = 0;
  for (std::int64_t k = 0; k < spec.size(); ++k) {
    fh.point(k, &xi);
    const double expect = std::sqrt(2.0 * kPi) * std::exp(-0.5 * xi * xi);
    sup = std::max(sup, std::abs(fh.values[k] - Complex(expect, 0.0)));
  }
  CHECK(sup < 1e-8);
}

TEST_CASE("point mass transforms to a unimodular function") {
  const GridSpec spec(1, 64, 8.0);
  GridFunction f(spec);
  f.values[5] = Complex(1.0 / spec.spacing(), 0.0);
  const GridFunction fh = forward_transform(f);
  for (std::int64_t k = 0; k < spec.size(); ++k)
    CHECK(std::abs(fh.values[k]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plateau profile shape") {
  for (int k : {0, 2, 4}) {
    CHECK(plateau_bump(0.0, k) == 1.0);
    CHECK(plateau_bump(1.0, k) == 1.0);
    CHECK(plateau_bump(2.0, k) == 0.0);
    CHECK(plateau_bump(3.0, k) == 0.0);
    double prev = 1.0;
    for (double r = 1.0; r <= 2.0; r += 1.0 / 64) {
      const double v = plateau_bump(r, k);
      CHECK(v <= prev + 1e-15);
      CHECK(v >= 0.0);
      prev = v;
    }
  }
  CHECK(plateau_bump(1.0 + 1e-9, 4) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(plateau_bump(2.0 - 1e-3, 4) < 1e-10);  // C^4 contact at the outer edge
}

TEST_CASE("Littlewood-Paley profiles partition the covered ball") {
  const GridSpec spec(1, 256, 16.0);  // Nyquist = 8 pi ~ 25.1
  const LPFamily lp = littlewood_paley_family(spec, 4);
  CHECK(lp.top_band == 3);
  CHECK(static_cast<int>(lp.profiles.size()) == lp.bands());

  const GridSpec fs = spec.dual();
  const double top = std::ldexp(1.0, lp.top_band);
  double xi;
  GridFunction probe(fs);
  for (std::int64_t k = 0; k < fs.size(); ++k) {
    probe.point(k, &xi);
    double total = 0;
    for (int j = 0; j <= lp.top_band; ++j) total += lp.profiles[j][k];
    if (std::abs(xi) <= top) CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(total <= 1.0 + 1e-12);
  }

  // band support: zero outside [2^{j-1}, 2^{j+1}], exact 1 at 2^j
  for (int j = 1; j <= lp.top_band; ++j) {
    for (std::int64_t k = 0; k < fs.size(); ++k) {
      probe.point(k, &xi);
      const double r = std::abs(xi);
      if (r < std::ldexp(1.0, j - 1) || r > std::ldexp(1.0, j + 1))
        CHECK(lp.profiles[j][k] == 0.0);
      if (r == std::ldexp(1.0, j)) CHECK(lp.profiles[j][k] == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("band projections reconstruct band-limited data") {
  const GridSpec spec(1, 256, 16.0);
  const LPFamily lp = littlewood_paley_family(spec, 4);
  const double top = std::ldexp(1.0, lp.top_band);

  GridFunction fh(spec.dual());
  Rng rng(7);
  double xi;
  for (std::int64_t k = 0; k < fh.spec.size(); ++k) {
    fh.point(k, &xi);
    if (std::abs(xi) <= top) fh.values[k] = Complex(rng.normal(), rng.normal());
  }
  const GridFunction f = inverse_transform(fh);

  GridFunction sum(spec);
  for (int j = 0; j <= lp.top_band; ++j) sum.values += band_project(lp, j, f).values;
  double sup = 0;
  for (std::int64_t i = 0; i < spec.size(); ++i)
    sup = std::max(sup, std::abs(sum.values[i] - f.values[i]));
  CHECK(sup < 1e-10 * f.lp_norm(std::numeric_limits<double>::infinity()));
}

TEST_CASE("band family needs headroom under the Nyquist radius") {
  const GridSpec tiny(1, 8, 16.0);  // Nyquist = pi/4
  CHECK_THROWS_AS(littlewood_paley_family(tiny, 4), std::invalid_argument);
}

TEST_CASE("lp_norm limits") {
  const GridSpec spec(1, 16, 8.0);
  GridFunction f(spec);
  f.values[3] = Complex(-3.0, 4.0);
  CHECK(f.lp_norm(std::numeric_limits<double>::infinity()) == doctest::Approx(5.0));
  CHECK(f.lp_norm(2.0) == doctest::Approx(5.0 * std::sqrt(spec.spacing())));
  CHECK(f.lp_norm(1.0) == doctest::Approx(5.0 * spec.spacing()));
  CHECK_THROWS_AS(f.lp_norm(0.0), std::invalid_argument);
}
