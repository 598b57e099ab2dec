#include "sparsedom/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsedom {

namespace {

bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

GridSpec::GridSpec(int dim_, int cells_, double half_width_, Domain domain_)
    : dim(dim_), cells(cells_), half_width(half_width_), domain(domain_) {
  if (dim < 1 || dim > 16)
    throw std::invalid_argument("GridSpec: dim must be in [1, 16]");
  if (!power_of_two(cells) || cells < 8)
    throw std::invalid_argument("GridSpec: cells must be a power of two >= 8, got " +
                                std::to_string(cells));
  if (!(half_width > 0)) throw std::invalid_argument("GridSpec: half_width must be positive");
}

double GridSpec::cell_weight() const {
  const double w = domain == Domain::space ? spacing() : 1.0 / (2.0 * half_width);
  return std::pow(w, dim);
}

std::int64_t GridSpec::size() const {
  std::int64_t s = 1;
  for (int a = 0; a < dim; ++a) s *= cells;
  return s;
}

int GridSpec::levels() const {
  int k = 0;
  while ((1 << k) < cells) ++k;
  return k;
}

double GridSpec::axis_coord(int i) const {
  if (domain == Domain::space) return -half_width + i * spacing();
  return signed_index(i) * freq_step();
}

void GridSpec::unflatten(std::int64_t idx, int* out) const {
  for (int a = dim - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % cells);
    idx /= cells;
  }
}

std::int64_t GridSpec::flatten(const int* axis_idx) const {
  std::int64_t idx = 0;
  for (int a = 0; a < dim; ++a) idx = idx * cells + axis_idx[a];
  return idx;
}

GridSpec GridSpec::dual() const {
  GridSpec d = *this;
  d.domain = domain == Domain::space ? Domain::frequency : Domain::space;
  return d;
}

double GridFunction::lp_norm(double p) const {
  if (values.size() == 0) return 0.0;
  if (std::isinf(p)) return values.abs().maxCoeff();
  if (!(p > 0)) throw std::invalid_argument("lp_norm: p must be positive or inf");
  const double s = values.abs().pow(p).sum() * spec.cell_weight();
  return std::pow(s, 1.0 / p);
}

void GridFunction::point(std::int64_t idx, double* out) const {
  int ai[16];
  spec.unflatten(idx, ai);
  for (int a = 0; a < spec.dim; ++a) out[a] = spec.axis_coord(ai[a]);
}

namespace {

// One FFT pass along `axis`. The sign flip (-1)^k per axis index converts the
// DFT anchored at cell 0 into the transform anchored at x = -L (and back).
void transform_axis(CArray& data, int cells, std::int64_t stride, bool forward) {
  Eigen::FFT<double> fft;
  std::vector<Complex> line(cells), out(cells);
  const std::int64_t block = stride * cells;
  const std::int64_t nblocks = data.size() / block;
  for (std::int64_t hi = 0; hi < nblocks; ++hi) {
    for (std::int64_t lo = 0; lo < stride; ++lo) {
      const std::int64_t base = hi * block + lo;
      if (forward) {
        for (int k = 0; k < cells; ++k) line[k] = data[base + k * stride];
        fft.fwd(out, line);
        for (int k = 0; k < cells; ++k) data[base + k * stride] = (k & 1) ? -out[k] : out[k];
      } else {
        for (int k = 0; k < cells; ++k) {
          const Complex v = data[base + k * stride];
          line[k] = (k & 1) ? -v : v;
        }
        fft.inv(out, line);
        for (int k = 0; k < cells; ++k) data[base + k * stride] = out[k];
      }
    }
  }
}

void transform_all_axes(CArray& data, const GridSpec& spec, bool forward) {
  std::int64_t stride = 1;
  for (int axis = spec.dim - 1; axis >= 0; --axis) {
    transform_axis(data, spec.cells, stride, forward);
    stride *= spec.cells;
  }
}

}  // namespace

GridFunction forward_transform(const GridFunction& f) {
  if (f.spec.domain != Domain::space)
    throw std::invalid_argument("forward_transform: input must live on the space grid");
  GridFunction out(f.spec.dual(), f.values);
  transform_all_axes(out.values, out.spec, true);
  out.values *= std::pow(f.spec.spacing(), f.spec.dim);
  return out;
}

GridFunction inverse_transform(const GridFunction& f_hat) {
  if (f_hat.spec.domain != Domain::frequency)
    throw std::invalid_argument("inverse_transform: input must live on the frequency grid");
  GridFunction out(f_hat.spec.dual(), f_hat.values);
  transform_all_axes(out.values, out.spec, false);
  out.values /= std::pow(out.spec.spacing(), out.spec.dim);
  return out;
}

double plateau_bump(double r, int smooth_order) {
  if (smooth_order < 0) throw std::invalid_argument("plateau_bump: smooth_order must be >= 0");
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  // descending C^k smoothstep: 1 - normalized \int_0^t u^k (1-u)^k du
  const int k = smooth_order;
  double num = 0.0, den = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= k; ++i) {
    const double term = binom / (k + i + 1);
    const double sign = (i & 1) ? -1.0 : 1.0;
    num += sign * term * std::pow(t, k + i + 1);
    den += sign * term;
    binom = binom * (k - i) / (i + 1);
  }
  return 1.0 - num / den;
}

LPFamily littlewood_paley_family(const GridSpec& space_spec, int smooth_order) {
  const GridSpec freq = space_spec.domain == Domain::space ? space_spec.dual() : space_spec;
  const double nyq = freq.nyquist();
  if (nyq < 4.0)
    throw std::invalid_argument("littlewood_paley_family: Nyquist radius " +
                                std::to_string(nyq) + " < 4, no dyadic band fits");
  int top = 1;
  while (std::ldexp(1.0, top + 2) <= nyq) ++top;  // largest J with 2^{J+1} <= nyquist

  LPFamily lp;
  lp.freq_spec = freq;
  lp.top_band = top;
  lp.smooth_order = smooth_order;
  lp.profiles.assign(top + 1, RArray::Zero(freq.size()));

  const std::int64_t total = freq.size();
  int ai[16];
  for (std::int64_t idx = 0; idx < total; ++idx) {
    freq.unflatten(idx, ai);
    double r2 = 0.0;
    for (int a = 0; a < freq.dim; ++a) {
      const double c = freq.signed_index(ai[a]) * freq.freq_step();
      r2 += c * c;
    }
    const double r = std::sqrt(r2);
    double prev = plateau_bump(r, smooth_order);
    lp.profiles[0][idx] = prev;
    for (int j = 1; j <= top; ++j) {
      const double cur = plateau_bump(std::ldexp(r, -j), smooth_order);
      lp.profiles[j][idx] = cur - prev;
      prev = cur;
    }
  }
  return lp;
}

GridFunction band_project(const LPFamily& lp, int j, const GridFunction& f) {
  if (j < 0 || j > lp.top_band) throw std::invalid_argument("band_project: band index out of range");
  if (f.spec.domain != Domain::space)
    throw std::invalid_argument("band_project: input must live on the space grid");
  GridFunction fh = forward_transform(f);
  const RArray& prof = lp.profiles[j];
  for (std::int64_t i = 0; i < fh.values.size(); ++i) fh.values[i] *= prof[i];
  return inverse_transform(fh);
}

}  // namespace sparsedom
