#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace sparsedom {

using Complex = std::complex<double>;
using CArray = Eigen::ArrayXcd;
using RArray = Eigen::ArrayXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

enum class Domain { space, frequency };

// Uniform periodic grid on [-L, L)^n with N cells per axis.
// The frequency grid holds the dual lattice (multiples of pi/L, FFT order)
// and carries cell weight (2L)^{-n}, which makes Plancherel exact.
struct GridSpec {
  int dim = 1;
  int cells = 0;          // N per axis, power of two
  double half_width = 0;  // L
  Domain domain = Domain::space;

  GridSpec() = default;
  GridSpec(int dim_, int cells_, double half_width_, Domain domain_ = Domain::space);

  double spacing() const { return 2.0 * half_width / cells; }
  double freq_step() const { return kPi / half_width; }
  double nyquist() const { return kPi * cells / (2.0 * half_width); }
  double cell_weight() const;
  std::int64_t size() const;
  int levels() const;  // log2(cells)

  // coordinate of axis index i: space -L + i*h; frequency signed multiple of pi/L
  double axis_coord(int i) const;
  int signed_index(int i) const { return i < cells / 2 ? i : i - cells; }

  void unflatten(std::int64_t idx, int* out) const;
  std::int64_t flatten(const int* axis_idx) const;

  GridSpec dual() const;

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && cells == o.cells && half_width == o.half_width && domain == o.domain;
  }
};

struct GridFunction {
  GridSpec spec;
  CArray values;

  GridFunction() = default;
  explicit GridFunction(const GridSpec& s) : spec(s), values(CArray::Zero(s.size())) {}
  GridFunction(const GridSpec& s, CArray v) : spec(s), values(std::move(v)) {}

  // (sum |f|^p * w)^{1/p}; p = inf -> max |f|
  double lp_norm(double p) const;

  // coordinates of flat index split per axis
  void point(std::int64_t idx, double* out) const;
};

GridFunction forward_transform(const GridFunction& f);
GridFunction inverse_transform(const GridFunction& f_hat);

// any operator acting on grid functions over a fixed spec
using PdoApply = std::function<GridFunction(const GridFunction&)>;

// C^k plateau profile: 1 on [0, 1], polynomial smoothstep down to 0 at 2, 0 beyond.
double plateau_bump(double r, int smooth_order);

// Littlewood-Paley profiles on the frequency grid: psi_hat_0 covers |xi| <= 2,
// band j >= 1 is supported in 2^{j-1} <= |xi| <= 2^{j+1}; their sum telescopes
// to 1 for |xi| <= 2^J exactly.
struct LPFamily {
  GridSpec freq_spec;
  int top_band = 0;  // J
  int smooth_order = 4;
  std::vector<RArray> profiles;  // size J+1

  int bands() const { return top_band + 1; }
};

LPFamily littlewood_paley_family(const GridSpec& space_spec, int smooth_order = 4);

GridFunction band_project(const LPFamily& lp, int j, const GridFunction& f);

}  // namespace sparsedom
