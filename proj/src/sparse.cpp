#include "sparsedom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sparsedom {

namespace {

std::vector<double> region_reals(const RArray& vals, const GridSpec& spec, const Region& r) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r.cell_count()));
  for_each_region_cell(spec, r, [&](std::int64_t c) { out.push_back(vals[c]); });
  return out;
}

// smallest admissible subset size: strictly more than (1 - lambda) m cells
std::int64_t window_width(std::int64_t m, double lambda) {
  const std::int64_t w =
      static_cast<std::int64_t>(std::floor((1.0 - lambda) * static_cast<double>(m) + 1e-9)) + 1;
  return std::min(w, m);
}

struct OscPick {
  double osc = 0.0;
  double value = 0.0;
};

// Minimal range over sorted windows of the admissible width; among the
// optimal windows, picks the sample closest to `target`.
OscPick oscillation_pick(std::vector<double>& v, double lambda, double target) {
  const std::int64_t m = static_cast<std::int64_t>(v.size());
  const std::int64_t w = window_width(m, lambda);
  std::sort(v.begin(), v.end());
  OscPick pick;
  pick.osc = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i + w <= m; ++i) pick.osc = std::min(pick.osc, v[i + w - 1] - v[i]);
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i + w <= m; ++i) {
    if (v[i + w - 1] - v[i] != pick.osc) continue;
    const auto lo = v.begin() + i, hi = v.begin() + i + w;
    const auto it = std::lower_bound(lo, hi, target);
    if (it != hi && std::abs(*it - target) < best) {
      best = std::abs(*it - target);
      pick.value = *it;
    }
    if (it != lo && std::abs(*(it - 1) - target) < best) {
      best = std::abs(*(it - 1) - target);
      pick.value = *(it - 1);
    }
  }
  return pick;
}

std::int64_t count_masked(const DyadicLattice& lat, const std::vector<std::uint8_t>& mask,
                          const Cube& q) {
  std::int64_t cnt = 0;
  for_each_region_cell(lat.spec, lat.region(q), [&](std::int64_t c) { cnt += mask[c]; });
  return cnt;
}

// maximal subcubes of `cand` (cand itself allowed) whose masked-cell fraction
// strictly exceeds tau
void select_above(const DyadicLattice& lat, const std::vector<std::uint8_t>& mask,
                  const Cube& cand, double tau, std::vector<Cube>& out) {
  const std::int64_t cnt = count_masked(lat, mask, cand);
  if (cnt == 0) return;
  if (static_cast<double>(cnt) > tau * static_cast<double>(lat.cell_count(cand))) {
    out.push_back(cand);
    return;
  }
  for (const Cube& ch : lat.children(cand)) select_above(lat, mask, ch, tau, out);
}

std::vector<Cube> maximal_cubes(const DyadicLattice& lat, std::vector<Cube> cubes) {
  std::sort(cubes.begin(), cubes.end(), [](const Cube& a, const Cube& b) {
    return a.level != b.level ? a.level < b.level : a.index < b.index;
  });
  std::vector<Cube> out;
  for (const Cube& c : cubes) {
    bool covered = false;
    for (const Cube& top : out)
      if (lat.contains(top, c)) {
        covered = true;
        break;
      }
    if (!covered) out.push_back(c);
  }
  return out;
}

}  // namespace

SparseCertificate verify_eta_sparse(const DyadicLattice& lat, const std::vector<Cube>& family,
                                    double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("verify_eta_sparse: eta must be in (0, 1]");
  SparseCertificate cert;
  cert.eta = eta;
  cert.cubes = family;
  if (family.empty()) {
    cert.pass = true;
    cert.min_ratio = 1.0;
    cert.detail = "empty family";
    return cert;
  }
  for (const Cube& q : family)
    if (q.lattice != lat.id)
      throw std::invalid_argument("verify_eta_sparse: family mixes lattices");

  // paint cells with the deepest family cube containing them;
  // the leftover of each cube is its exceptional set
  std::vector<std::size_t> order(family.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return family[a].level != family[b].level ? family[a].level < family[b].level : a < b;
  });
  std::vector<std::int32_t> owner(static_cast<std::size_t>(lat.spec.size()), -1);
  for (std::size_t i : order)
    for_each_region_cell(lat.spec, lat.region(family[i]),
                         [&](std::int64_t c) { owner[c] = static_cast<std::int32_t>(i); });

  cert.exceptional.assign(family.size(), {});
  for (std::int64_t c = 0; c < lat.spec.size(); ++c)
    if (owner[c] >= 0) cert.exceptional[owner[c]].push_back(c);

  cert.min_ratio = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double ratio = static_cast<double>(cert.exceptional[i].size()) /
                         static_cast<double>(lat.cell_count(family[i]));
    if (ratio < cert.min_ratio) {
      cert.min_ratio = ratio;
      worst = i;
    }
  }
  cert.pass = cert.min_ratio >= eta;
  std::ostringstream os;
  os << family.size() << " cubes, min |E_Q|/|Q| = " << cert.min_ratio << " at level "
     << family[worst].level << (cert.pass ? " (>= " : " (< ") << eta << ")";
  cert.detail = os.str();
  return cert;
}

double local_oscillation(const GridFunction& f, const Region& q, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("local_oscillation: lambda must be in (0, 1)");
  const RArray re = f.values.real();
  std::vector<double> v = region_reals(re, f.spec, q);
  const std::int64_t m = static_cast<std::int64_t>(v.size());
  const std::int64_t w = window_width(m, lambda);
  std::sort(v.begin(), v.end());
  double osc = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i + w <= m; ++i) osc = std::min(osc, v[i + w - 1] - v[i]);
  return osc;
}

namespace {

struct LNWorker {
  const DyadicLattice& lat;
  const RArray& vals;
  double lambda;
  std::vector<std::uint8_t> mask;
  std::vector<SparseEntry> entries;
  int doublings = 0;

  LNWorker(const DyadicLattice& l, const RArray& v, double lam)
      : lat(l), vals(v), lambda(lam), mask(static_cast<std::size_t>(l.spec.size()), 0) {}

  std::int64_t packed_cells(const std::vector<Cube>& cs) const {
    std::int64_t t = 0;
    for (const Cube& c : cs) t += lat.cell_count(c);
    return t;
  }

  void process(const Cube& q, double parent_median, bool root) {
    const Region rq = lat.region(q);
    std::vector<double> local = region_reals(vals, lat.spec, rq);
    const OscPick pick = oscillation_pick(local, lambda, parent_median);
    entries.push_back({q, root ? pick.osc + std::abs(pick.value) : pick.osc});

    std::int64_t ecnt = 0;
    for_each_region_cell(lat.spec, rq, [&](std::int64_t c) {
      const bool e = std::abs(vals[c] - pick.value) > pick.osc;
      mask[c] = e ? 1 : 0;
      ecnt += e;
    });
    if (ecnt == 0) return;

    // stopping cubes: maximal children where the deviating cells have
    // density above lambda; one threshold doubling keeps them below half
    std::vector<Cube> kids;
    for (const Cube& ch : lat.children(q)) select_above(lat, mask, ch, lambda, kids);
    if (2 * packed_cells(kids) >= lat.cell_count(q)) {
      kids.clear();
      for (const Cube& ch : lat.children(q)) select_above(lat, mask, ch, 2.0 * lambda, kids);
      ++doublings;
      if (2 * packed_cells(kids) >= lat.cell_count(q))
        throw std::runtime_error(
            "lerner_nazarov_decompose: stopping cubes still pack half the cube after refinement");
    }
    for (const Cube& p : kids) process(p, pick.value, false);
  }
};

}  // namespace

LNDecomposition lerner_nazarov_decompose(const GridFunction& f, const DyadicLattice& lat,
                                         double lambda) {
  if (!(f.spec == lat.spec))
    throw std::invalid_argument("lerner_nazarov_decompose: grid mismatch");
  const int n = lat.spec.dim;
  if (!(lambda > 0.0 && lambda <= std::ldexp(1.0, -n - 2)))
    throw std::invalid_argument("lerner_nazarov_decompose: lambda must be in (0, 2^{-n-2}]");
  const double scale = f.values.abs().maxCoeff();
  if (f.values.imag().abs().maxCoeff() > 1e-12 * (1.0 + scale))
    throw std::invalid_argument("lerner_nazarov_decompose: function must be real-valued");

  const RArray re = f.values.real();
  LNWorker worker(lat, re, lambda);
  worker.process(lat.root(), 0.0, true);

  LNDecomposition out;
  out.family.lattice = lat.id;
  out.family.entries = std::move(worker.entries);
  out.lambda = lambda;
  out.selection_doublings = worker.doublings;

  RArray dom = RArray::Zero(lat.spec.size());
  for (const SparseEntry& e : out.family.entries)
    for_each_region_cell(lat.spec, lat.region(e.cube),
                         [&](std::int64_t c) { dom[c] += e.coeff; });
  const double tol = 1e-12 * (1.0 + scale);
  for (std::int64_t c = 0; c < lat.spec.size(); ++c)
    if (std::abs(re[c]) > dom[c] + tol) {
      std::ostringstream os;
      os << "lerner_nazarov_decompose: domination fails at cell " << c << ": |f| = "
         << std::abs(re[c]) << " > " << dom[c];
      throw std::runtime_error(os.str());
    }

  out.certificate = verify_eta_sparse(lat, out.family.cubes(), 0.5);
  if (!out.certificate.pass)
    throw std::runtime_error("lerner_nazarov_decompose: half-sparseness certificate failed: " +
                             out.certificate.detail);
  return out;
}

namespace {

void one_step_descend(const DyadicLattice& lat, const Cube& anchor, const Cube& cur,
                      const StopPredicate& pred, std::vector<Cube>& out) {
  if (cur.level >= lat.max_level()) return;
  for (const Cube& ch : lat.children(cur)) {
    if (!pred(anchor, ch))
      out.push_back(ch);
    else
      one_step_descend(lat, anchor, ch, pred, out);
  }
}

}  // namespace

std::vector<Cube> stopping_family(const DyadicLattice& lat, const Cube& root,
                                  const StopPredicate& pred) {
  if (root.lattice != lat.id)
    throw std::invalid_argument("stopping_family: root from another lattice");
  std::vector<Cube> family;
  std::vector<Cube> anchors{root};
  for (std::size_t head = 0; head < anchors.size(); ++head) {
    const Cube anchor = anchors[head];
    std::vector<Cube> step;
    one_step_descend(lat, anchor, anchor, pred, step);
    for (const Cube& c : step) {
      family.push_back(c);
      anchors.push_back(c);
    }
  }
  return family;
}

AugmentResult augment(const DyadicLattice& lat, const std::vector<Cube>& s,
                      const std::function<std::vector<Cube>(const Cube&)>& stop_family) {
  AugmentResult res;
  res.family.lattice = lat.id;
  std::unordered_set<Cube, CubeHash> seen;
  for (const Cube& q : s) {
    const std::vector<Cube> fam = stop_family(q);
    bool has_anchor = false;
    for (const Cube& c : fam) {
      if (c == q) has_anchor = true;
      if (!lat.contains(q, c))
        throw std::invalid_argument("augment: stop family member escapes its anchor");
    }
    if (!has_anchor) throw std::invalid_argument("augment: stop family must contain its anchor");

    std::vector<Cube> proper;
    for (const Cube& c : fam)
      if (!(c == q)) proper.push_back(c);
    std::vector<Cube> tops = maximal_cubes(lat, proper);
    std::int64_t packed = 0;
    for (const Cube& c : tops) packed += lat.cell_count(c);
    if (2 * packed > lat.cell_count(q)) {
      res.hypothesis_ok = false;
      res.violations.push_back(
          {q, std::move(tops),
           static_cast<double>(packed) / static_cast<double>(lat.cell_count(q))});
    }
    for (const Cube& c : fam)
      if (seen.insert(c).second) res.family.entries.push_back({c, 1.0});
  }
  return res;
}

std::vector<Cube> cz_decompose(const DyadicLattice& lat, const std::vector<std::uint8_t>& mask,
                               const Cube& q) {
  if (static_cast<std::int64_t>(mask.size()) != lat.spec.size())
    throw std::invalid_argument("cz_decompose: mask size does not match the grid");
  if (q.lattice != lat.id) throw std::invalid_argument("cz_decompose: cube from another lattice");
  const int n = lat.spec.dim;
  const std::int64_t cnt = count_masked(lat, mask, q);
  const std::int64_t cells = lat.cell_count(q);
  if ((cnt << (n + 1)) > cells) {
    std::ostringstream os;
    os << "cz_decompose: |E cap Q| = " << cnt << " exceeds 2^{-n-1}|Q| = "
       << std::ldexp(static_cast<double>(cells), -(n + 1));
    throw std::domain_error(os.str());
  }
  if (cnt == 0) return {};
  const double tau = std::ldexp(1.0, -n - 1);
  std::vector<Cube> out;
  for (const Cube& ch : lat.children(q)) select_above(lat, mask, ch, tau, out);
  return out;
}

namespace {

struct Retry {};

struct BuildNode {
  std::vector<double> t_abs;  // |T(f 1_{3Q})| over Q's cells, region order
  std::vector<double> grand;  // in-cube grand maximal over Q's cells
  double avg_f3 = 0.0;        // <f>_{r, 3Q}
  double avg_f = 0.0;         // <f>_{r, Q}
  double avg_g = 0.0;         // <g>_{s', Q}
};

struct BuildWorker {
  const PdoApply& T;
  const GridFunction& f;
  const GridFunction& g;
  const DyadicLattice& lat;
  const BuildOptions& opt;
  double sprime;
  double lambda = 0.0;

  std::unordered_map<Cube, BuildNode, CubeHash> cache;
  std::vector<std::uint8_t> mask;
  std::vector<double> grand_scratch;
  std::vector<SparseEntry> entries;
  std::vector<double> avg_f3, avg_f, avg_g;  // parallel to entries
  double bound_sum = 0.0;  // sum |Q|^{1/alpha} <f>_{r,3Q} <g>_{s',Q}
  int max_depth = 0;

  BuildWorker(const PdoApply& t, const GridFunction& ff, const GridFunction& gg,
              const DyadicLattice& l, const BuildOptions& o)
      : T(t),
        f(ff),
        g(gg),
        lat(l),
        opt(o),
        sprime(o.s / (o.s - 1.0)),
        mask(static_cast<std::size_t>(l.spec.size()), 0),
        grand_scratch(static_cast<std::size_t>(l.spec.size()), 0.0) {}

  // per-cube data independent of the threshold multiplier, cached so that
  // restarts only redo the selection
  const BuildNode& node(const Cube& q) {
    const auto it = cache.find(q);
    if (it != cache.end()) return it->second;

    BuildNode nd;
    const Region rq = lat.region(q);
    const Region r3q = dilate(lat.spec, rq, 3.0);
    const GridFunction fq = masked(f, r3q);
    const GridFunction tf = T(fq);
    if (tf.values.size() != f.values.size())
      throw std::runtime_error("build_sparse_form_family: operator changed the grid size");
    nd.t_abs.reserve(static_cast<std::size_t>(lat.cell_count(q)));
    for_each_region_cell(lat.spec, rq,
                         [&](std::int64_t c) { nd.t_abs.push_back(std::abs(tf.values[c])); });
    nd.avg_f3 = region_average(f, r3q, opt.r);
    nd.avg_f = region_average(f, rq, opt.r);
    nd.avg_g = region_average(g, rq, sprime);

    // grand maximal restricted to dyadic R inside Q:
    // max over R containing x of the s-average over R of T(f 1_{3Q minus 3R})
    for_each_region_cell(lat.spec, rq, [&](std::int64_t c) { grand_scratch[c] = 0.0; });
    const int n = lat.spec.dim;
    for (int lvl = q.level; lvl <= lat.max_level(); ++lvl) {
      const int sub = 1 << (lvl - q.level);
      int base[16];
      for (int a = 0; a < n; ++a) base[a] = lat.axis_index(q, a) << (lvl - q.level);
      int ofs[16] = {0};
      while (true) {
        int idx[16];
        for (int a = 0; a < n; ++a) idx[a] = base[a] + ofs[a];
        const Cube r = lat.cube_at(lvl, idx);
        const Region rr = lat.region(r);
        GridFunction rest = fq;
        for_each_region_cell(lat.spec, dilate(lat.spec, rr, 3.0),
                             [&](std::int64_t c) { rest.values[c] = Complex(0, 0); });
        const GridFunction tr = T(rest);
        const double u = region_average(tr, rr, opt.s);
        for_each_region_cell(lat.spec, rr, [&](std::int64_t c) {
          grand_scratch[c] = std::max(grand_scratch[c], u);
        });
        int a = n - 1;
        while (a >= 0 && ++ofs[a] == sub) ofs[a--] = 0;
        if (a < 0) break;
      }
    }
    nd.grand.reserve(static_cast<std::size_t>(lat.cell_count(q)));
    for_each_region_cell(lat.spec, rq,
                         [&](std::int64_t c) { nd.grand.push_back(grand_scratch[c]); });
    return cache.emplace(q, std::move(nd)).first->second;
  }

  void process(const Cube& q, int depth) {
    max_depth = std::max(max_depth, depth);
    const BuildNode& nd = node(q);
    const double meas = lat.measure(q);
    const double contrib = std::pow(meas, 1.0 / opt.alpha) * nd.avg_f3 * nd.avg_g;
    entries.push_back({q, contrib});
    avg_f3.push_back(nd.avg_f3);
    avg_f.push_back(nd.avg_f);
    avg_g.push_back(nd.avg_g);
    bound_sum += contrib;

    const double t_q = lambda * std::pow(meas, 1.0 / opt.alpha - 1.0) * nd.avg_f3;
    const Region rq = lat.region(q);
    std::int64_t ecnt = 0;
    std::size_t k = 0;
    for_each_region_cell(lat.spec, rq, [&](std::int64_t c) {
      const bool e = nd.t_abs[k] > t_q || nd.grand[k] > t_q;
      ++k;
      mask[c] = e ? 1 : 0;
      ecnt += e;
    });
    if (ecnt == 0) return;

    const int n = lat.spec.dim;
    const std::int64_t cells = lat.cell_count(q);
    if ((ecnt << (n + 1)) > cells) throw Retry{};
    std::vector<Cube> kids;
    const double tau = std::ldexp(1.0, -n - 1);
    for (const Cube& ch : lat.children(q)) select_above(lat, mask, ch, tau, kids);
    std::int64_t packed = 0;
    for (const Cube& p : kids) packed += lat.cell_count(p);
    if (2 * packed >= cells) throw Retry{};
    for (const Cube& p : kids) process(p, depth + 1);
  }
};

}  // namespace

BuildResult build_sparse_form_family(const PdoApply& T, const GridFunction& f,
                                     const GridFunction& g, const DyadicLattice& lat,
                                     const Cube& q0, const BuildOptions& opt) {
  if (!(f.spec == lat.spec) || !(g.spec == lat.spec))
    throw std::invalid_argument("build_sparse_form_family: grid mismatch");
  if (q0.lattice != lat.id)
    throw std::invalid_argument("build_sparse_form_family: cube from another lattice");
  if (!(opt.r > 0.0)) throw std::invalid_argument("build_sparse_form_family: r must be positive");
  if (!(opt.s > 1.0)) throw std::invalid_argument("build_sparse_form_family: s must exceed 1");
  if (!(opt.alpha > 0.0 && opt.alpha <= 1.0))
    throw std::invalid_argument("build_sparse_form_family: alpha must be in (0, 1]");
  if (!(opt.lambda0 > 0.0))
    throw std::invalid_argument("build_sparse_form_family: lambda0 must be positive");

  BuildWorker worker(T, f, g, lat, opt);
  double lambda = opt.lambda0;
  int restarts = 0;
  for (;; ++restarts) {
    worker.entries.clear();
    worker.avg_f3.clear();
    worker.avg_f.clear();
    worker.avg_g.clear();
    worker.bound_sum = 0.0;
    worker.max_depth = 0;
    worker.lambda = lambda;
    try {
      worker.process(q0, 0);
      break;
    } catch (const Retry&) {
      if (restarts >= opt.max_restarts)
        throw std::runtime_error(
            "build_sparse_form_family: no admissible threshold within the restart budget");
      lambda *= 2.0;
    }
  }

  BuildResult res;
  res.family.lattice = lat.id;
  res.family.entries = worker.entries;
  res.lambda = lambda;
  res.constant = 2.0 * lambda;
  res.restarts = restarts;
  res.max_depth = worker.max_depth;

  const Region rq0 = lat.region(q0);
  const GridFunction tf0 = T(masked(f, dilate(lat.spec, rq0, 3.0)));
  Complex acc(0.0, 0.0);
  for_each_region_cell(lat.spec, rq0,
                       [&](std::int64_t c) { acc += tf0.values[c] * std::conj(g.values[c]); });
  res.lhs = std::abs(acc) * lat.spec.cell_weight();

  double mapped = 0.0, plain = 0.0;
  for (std::size_t i = 0; i < worker.entries.size(); ++i) {
    const double meas = lat.measure(worker.entries[i].cube);
    mapped += meas * std::pow(worker.avg_f3[i] * worker.avg_g[i], opt.alpha);
    plain += meas * std::pow(worker.avg_f[i] * worker.avg_g[i], opt.alpha);
  }
  res.rhs = res.constant * std::pow(mapped, 1.0 / opt.alpha);
  res.plain_form = std::pow(plain, 1.0 / opt.alpha);
  res.carleson = carleson_constant(lat, res.family.cubes());
  res.certified =
      res.lhs <= res.constant * worker.bound_sum + 1e-9 * (1.0 + res.lhs + res.rhs);
  return res;
}

}  // namespace sparsedom
