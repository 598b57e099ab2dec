#pragma once

#include "sparsedom/dyadic.hpp"

#include <cstdint>
#include <vector>

namespace sparsedom {

// n-D summed-area table over the periodic grid; wrapped regions are split
// into unwrapped boxes per axis, so any region sum costs O(4^n) lookups.
template <typename T>
class PrefixTable {
 public:
  PrefixTable() = default;

  template <typename Source>
  PrefixTable(const GridSpec& spec, const Source& vals) : spec_(spec) {
    const int n = spec.dim;
    const int N = spec.cells;
    side_ = N + 1;
    std::int64_t total = 1;
    for (int a = 0; a < n; ++a) total *= side_;
    table_.assign(total, T(0));

    int ai[16];
    for (std::int64_t c = 0; c < spec.size(); ++c) {
      spec.unflatten(c, ai);
      std::int64_t t = 0;
      for (int a = 0; a < n; ++a) t = t * side_ + (ai[a] + 1);
      table_[t] = static_cast<T>(vals[c]);
    }
    // running sums along each axis
    std::int64_t stride = 1;
    for (int axis = n - 1; axis >= 0; --axis) {
      const std::int64_t block = stride * side_;
      for (std::int64_t hi = 0; hi < total / block; ++hi)
        for (std::int64_t lo = 0; lo < stride; ++lo) {
          const std::int64_t base = hi * block + lo;
          for (int k = 1; k < side_; ++k)
            table_[base + k * stride] += table_[base + (k - 1) * stride];
        }
      stride *= side_;
    }
  }

  // half-open unwrapped box [lo, hi)
  T box_sum(const int* lo, const int* hi) const {
    const int n = spec_.dim;
    T acc = T(0);
    const int corners = 1 << n;
    for (int s = 0; s < corners; ++s) {
      std::int64_t t = 0;
      int ones = 0;
      for (int a = 0; a < n; ++a) {
        const bool high = (s >> a) & 1;
        ones += high;
        t = t * side_ + (high ? hi[a] : lo[a]);
      }
      const bool neg = ((n - ones) & 1) != 0;
      acc += neg ? -table_[t] : table_[t];
    }
    return acc;
  }

  T region_sum(const Region& r) const {
    const int n = spec_.dim;
    const int N = spec_.cells;
    // per-axis split into at most two unwrapped intervals
    int lo[2][16], hi[2][16], parts[16];
    for (int a = 0; a < n; ++a) {
      if (r.len[a] == N) {
        parts[a] = 1;
        lo[0][a] = 0;
        hi[0][a] = N;
      } else if (r.start[a] + r.len[a] <= N) {
        parts[a] = 1;
        lo[0][a] = r.start[a];
        hi[0][a] = r.start[a] + r.len[a];
      } else {
        parts[a] = 2;
        lo[0][a] = r.start[a];
        hi[0][a] = N;
        lo[1][a] = 0;
        hi[1][a] = r.start[a] + r.len[a] - N;
      }
    }
    T acc = T(0);
    int pick[16] = {0};
    while (true) {
      int blo[16], bhi[16];
      for (int a = 0; a < n; ++a) {
        blo[a] = lo[pick[a]][a];
        bhi[a] = hi[pick[a]][a];
      }
      acc += box_sum(blo, bhi);
      int a = n - 1;
      while (a >= 0 && ++pick[a] == parts[a]) pick[a--] = 0;
      if (a < 0) break;
    }
    return acc;
  }

 private:
  GridSpec spec_;
  int side_ = 0;
  std::vector<T> table_;
};

}  // namespace sparsedom
