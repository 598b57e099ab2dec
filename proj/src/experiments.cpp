#include "sparsedom/experiments.hpp"

#include "sparsedom/forms.hpp"
#include "sparsedom/operators.hpp"
#include "sparsedom/report.hpp"
#include "sparsedom/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace sparsedom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// config: flat JSON, unknown keys rejected, defaults documented in configs/

class Config {
 public:
  explicit Config(const std::string& path) {
    if (path.empty()) {
      j_ = nlohmann::json::object();
      return;
    }
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    j_ = nlohmann::json::parse(is);
    if (!j_.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
  }

  double num(const std::string& key, double dflt) {
    seen_.insert(key);
    if (!j_.contains(key)) return dflt;
    const auto& v = j_.at(key);
    if (!v.is_number())
      throw std::invalid_argument("config: key '" + key + "' must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int dflt) {
    const double v = num(key, dflt);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return i;
  }

  std::uint64_t useed(const std::string& key, std::uint64_t dflt) {
    seen_.insert(key);
    if (!j_.contains(key)) return dflt;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<double>() < 0)
      throw std::invalid_argument("config: key '" + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> list(const std::string& key, std::vector<double> dflt) {
    seen_.insert(key);
    if (!j_.contains(key)) return dflt;
    const auto& v = j_.at(key);
    if (!v.is_array())
      throw std::invalid_argument("config: key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number())
        throw std::invalid_argument("config: key '" + key + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    if (out.empty()) throw std::invalid_argument("config: key '" + key + "' must not be empty");
    return out;
  }

  void done(const std::string& experiment) const {
    for (const auto& item : j_.items()) {
      if (seen_.count(item.key())) continue;
      std::string known;
      for (const std::string& k : seen_) known += (known.empty() ? "" : ", ") + k;
      throw std::invalid_argument("config: unknown key '" + item.key() + "' for " + experiment +
                                  "; known keys: " + known);
    }
  }

 private:
  nlohmann::json j_;
  std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------
// shared helpers

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int k = std::min(threads, n);
  if (k <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex emu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (int t = 0; t < k; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(emu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

GridFunction ones_like(const GridSpec& spec) {
  GridFunction g(spec);
  g.values.setConstant(Complex(1.0, 0.0));
  return g;
}

GridFunction real_part(const GridFunction& f) {
  GridFunction g(f.spec);
  for (std::int64_t i = 0; i < f.spec.size(); ++i) g.values[i] = Complex(f.values[i].real(), 0.0);
  return g;
}

// C^4 bump of radius 2*width at `center` (same coordinate on every axis),
// measured in the periodic distance
GridFunction bump_function(const GridSpec& spec, double center, double width) {
  GridFunction f(spec);
  const std::int64_t sz = spec.size();
  std::vector<double> x(spec.dim);
  for (std::int64_t i = 0; i < sz; ++i) {
    f.point(i, x.data());
    double r2 = 0;
    for (int a = 0; a < spec.dim; ++a) {
      const double d = std::remainder(x[a] - center, 2.0 * spec.half_width);
      r2 += d * d;
    }
    f.values[i] = Complex(plateau_bump(std::sqrt(r2) / width, 4), 0.0);
  }
  return f;
}

// Band-limited Gaussian field fixed as a continuum function: one coefficient
// per integer frequency with |xi| <= max_freq, drawn in a resolution
// independent order, so refining the grid resamples the same function.
GridFunction random_band_limited(const GridSpec& spec, Rng& rng, double max_freq) {
  const GridSpec fs = spec.dual();
  const double step = fs.freq_step();
  const int K = static_cast<int>(std::floor(max_freq / step));
  if (2 * K + 1 > spec.cells)
    throw std::invalid_argument("random_band_limited: max_freq beyond the grid");
  GridFunction fh(fs);
  const int n = spec.dim;
  std::vector<int> k(n, -K);
  while (true) {
    const Complex c(rng.normal(), rng.normal());
    double xi2 = 0;
    for (int a = 0; a < n; ++a) xi2 += (k[a] * step) * (k[a] * step);
    if (xi2 <= max_freq * max_freq) {
      std::int64_t flat = 0;
      for (int a = 0; a < n; ++a) {
        const int idx = k[a] >= 0 ? k[a] : k[a] + spec.cells;
        flat = flat * spec.cells + idx;
      }
      fh.values[flat] = c;
    }
    int a = n - 1;
    while (a >= 0 && ++k[a] > K) k[a--] = -K;
    if (a < 0) break;
  }
  GridFunction f = real_part(inverse_transform(fh));
  const double nrm = f.lp_norm(2.0);
  if (nrm > 0) f.values /= nrm;
  return f;
}

GridFunction partial_telescope(const LPFamily& lp, int cap, const GridFunction& f) {
  GridFunction out(f.spec);
  for (int j = 0; j <= cap; ++j) out.values += band_project(lp, j, f).values;
  return out;
}

// max over cells of |num| / den; +inf when den vanishes where num does not
double sup_pointwise_ratio(const GridFunction& num, const GridFunction& den) {
  double best = 0;
  for (std::int64_t i = 0; i < num.spec.size(); ++i) {
    const double v = std::abs(num.values[i]);
    if (v == 0.0) continue;
    const double d = den.values[i].real();
    if (!(d > 0.0)) return kInf;
    best = std::max(best, v / d);
  }
  return best;
}

ReportRow stability_row(const std::string& id, const std::string& tag, double base,
                        double doubled, double factor) {
  ReportRow row;
  row.experiment = id;
  row.param_json = ParamJson().add("case", tag + "_stability").add("factor", factor).str();
  row.lhs = doubled;
  row.rhs = base;
  row.ratio = base > 0 ? doubled / base : kInf;
  row.pass = base > 0 && doubled > 0 && row.ratio <= factor && row.ratio >= 1.0 / factor;
  return row;
}

Symbol cutoff_bessel_symbol(int dim, double m, int smooth_order) {
  Symbol a;
  a.dim = dim;
  a.m = m;
  a.rho = 1.0;
  a.delta = 0.0;
  a.multiplier = [m, smooth_order](std::span<const double> xi) {
    double r2 = 0;
    for (double v : xi) r2 += v * v;
    const double chi = 1.0 - plateau_bump(2.0 * std::sqrt(r2), smooth_order);
    if (chi == 0.0) return Complex(0.0, 0.0);
    return Complex(chi * std::pow(1.0 + r2, 0.5 * m), 0.0);
  };
  return a;
}

// ---------------------------------------------------------------------------
// E1: pointwise domination of a(x,D)f by nested sparse operators.
// Per frequency band, a sparse family is produced by the certified form
// recursion for the band piece, then augmented through the sqrt(2)
// L^2-average stopping rule; the nested operator over all bands is compared
// pointwise against |a(D)f|. A secondary check rebuilds the two-regime
// dilated/contracted RHS from the oscillation decomposition of the output.

struct E1Outcome {
  double main_sup = 0;
  double lemma_sup = 0;
  bool coherent = true;
  double carleson = 0;
  double lambda = 0;
};

std::vector<ReportRow> run_e1(Config& cfg, const RunOptions& opt) {
  const int dim = cfg.integer("dim", 1);
  const int cells = cfg.integer("cells", 1024);
  const double L = cfg.num("half_width", 4.0);
  const double rho = cfg.num("rho", 0.5);
  const int cap = cfg.integer("band_cap", 5);
  const int n_random = cfg.integer("random_suite", 1);
  const double lambda0 = cfg.num("lambda0", 1.0);
  const int smooth = cfg.integer("smooth_order", 4);
  const int diag_terms = cfg.integer("diagnostic_terms", 8);
  const double factor = cfg.num("stability_factor", 2.0);
  const std::uint64_t cfg_seed = cfg.useed("seed", 2026);
  const std::uint64_t seed = opt.seed_from_cli ? opt.seed : cfg_seed;
  cfg.done("E1");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("E1: rho must lie in (0, 1)");

  const double m = -dim * (1.0 - rho) / 2.0;
  const double thr = std::pow(3.0, -2.0 * dim / (1.0 - rho));
  const double eps = std::floor(dim / 2.0) - dim / 2.0 + 1.0;
  const Symbol a = cutoff_bessel_symbol(dim, m, smooth);

  std::vector<std::string> labels;
  auto run_at = [&](int N) {
    const GridSpec spec(dim, N, L);
    const std::vector<DyadicLattice> lats = shifted_lattices(spec);
    const DyadicLattice& lat = lats[0];
    const LPFamily lp = littlewood_paley_family(spec, smooth);
    if (cap > lp.top_band) throw std::invalid_argument("E1: band_cap beyond the grid bands");

    Rng rng(seed);
    std::vector<GridFunction> suite;
    labels.clear();
    suite.push_back(partial_telescope(lp, cap, bump_function(spec, 0.0, L / 8.0)));
    labels.push_back("bump_wide");
    suite.push_back(partial_telescope(lp, cap, bump_function(spec, L / 2.0, L / 32.0)));
    labels.push_back("bump_narrow");
    for (int i = 0; i < n_random; ++i) {
      suite.push_back(
          partial_telescope(lp, cap, random_band_limited(spec, rng, std::ldexp(0.75, cap + 1))));
      labels.push_back("random" + std::to_string(i));
    }
    for (GridFunction& f : suite) f = real_part(f);

    std::vector<E1Outcome> out(suite.size());
    parallel_for(static_cast<int>(suite.size()), opt.threads, [&](int fi) {
      const GridFunction& f = suite[fi];
      E1Outcome& oc = out[fi];

      auto avg_cache = std::make_shared<std::unordered_map<Cube, double, CubeHash>>();
      const StopPredicate pred = [&f, &lat, avg_cache](const Cube& u, const Cube& r) {
        auto avg = [&](const Cube& c) {
          auto it = avg_cache->find(c);
          if (it != avg_cache->end()) return it->second;
          const double v = region_average(f, lat.region(c), 2.0);
          return avg_cache->emplace(c, v).first->second;
        };
        return avg(r) <= std::sqrt(2.0) * avg(u);
      };
      const auto stop_fn = [&](const Cube& q) {
        std::vector<Cube> fam = stopping_family(lat, q, pred);
        fam.push_back(q);
        return fam;
      };

      BuildOptions bopt;
      bopt.lambda0 = lambda0;
      const GridFunction g1 = ones_like(spec);
      std::vector<SparseFamily> fams;
      for (int j = 0; j <= cap; ++j) {
        const PdoApply tj = [&a, &lp, j](const GridFunction& u) {
          return dyadic_piece(a, lp, j, u);
        };
        const BuildResult b = build_sparse_form_family(tj, f, g1, lat, lat.root(), bopt);
        const AugmentResult ar = augment(lat, b.family.cubes(), stop_fn);
        oc.coherent = oc.coherent && b.certified && ar.hypothesis_ok;
        oc.lambda = std::max(oc.lambda, b.lambda);
        oc.carleson = std::max(oc.carleson, carleson_constant(lat, ar.family.cubes()));
        fams.push_back(ar.family);
      }

      const GridFunction tf = apply_pdo(a, f);
      const GridFunction nested = nested_sparse_op(f, lats, fams);
      oc.main_sup = sup_pointwise_ratio(tf, nested);

      // two-regime RHS from the oscillation decomposition of the output
      const LNDecomposition ln =
          lerner_nazarov_decompose(real_part(tf), lat, std::ldexp(1.0, -dim - 2));
      GridFunction rhs2(spec);
      for (const Cube& q : ln.family.cubes()) {
        const Region rq = lat.region(q);
        const bool small = lat.measure(q) < thr;
        const Region base = small ? rho_cube(spec, rq, rho) : rq;
        for (int k = 0; k < diag_terms; ++k) {
          const Region blown = dilate(spec, base, std::ldexp(1.0, k + 1));
          const double avg = region_average(f, blown, 2.0);
          const double w = std::pow(2.0, -eps * k) * avg;
          for_each_region_cell(spec, rq, [&](std::int64_t c) { rhs2.values[c] += w; });
          if (blown.cell_count() >= spec.size()) break;
        }
      }
      oc.lemma_sup = sup_pointwise_ratio(tf, rhs2);
    });
    return out;
  };

  const std::vector<E1Outcome> base = run_at(cells);
  const std::vector<E1Outcome> fine = run_at(2 * cells);

  std::vector<ReportRow> rows;
  double sup_main[2] = {0, 0}, sup_lemma[2] = {0, 0};
  for (int res = 0; res < 2; ++res) {
    const std::vector<E1Outcome>& out = res ? fine : base;
    const int N = res ? 2 * cells : cells;
    for (std::size_t i = 0; i < out.size(); ++i) {
      ReportRow row;
      row.experiment = "E1";
      row.param_json = ParamJson()
                           .add("case", "domination")
                           .add("cells", N)
                           .add("f", labels[i])
                           .add("carleson", out[i].carleson)
                           .add("lambda", out[i].lambda)
                           .str();
      row.lhs = out[i].main_sup;
      row.rhs = 1.0;
      row.ratio = out[i].main_sup;
      row.pass = out[i].coherent && std::isfinite(out[i].main_sup);
      rows.push_back(row);

      ReportRow drow;
      drow.experiment = "E1";
      drow.param_json =
          ParamJson().add("case", "two_regime").add("cells", N).add("f", labels[i]).str();
      drow.lhs = out[i].lemma_sup;
      drow.rhs = 1.0;
      drow.ratio = out[i].lemma_sup;
      drow.pass = std::isfinite(out[i].lemma_sup);
      rows.push_back(drow);

      sup_main[res] = std::max(sup_main[res], out[i].main_sup);
      sup_lemma[res] = std::max(sup_lemma[res], out[i].lemma_sup);
    }
  }
  rows.push_back(stability_row("E1", "domination", sup_main[0], sup_main[1], factor));
  rows.push_back(stability_row("E1", "two_regime", sup_lemma[0], sup_lemma[1], factor));
  return rows;
}

// ---------------------------------------------------------------------------
// E2: weighted L^p control of a(x,D)f by the A_infty characteristic times
// the L^2 maximal function, over symbol presets, power weights and small p;
// plus the same control for the 3Q-mapped sparse operator.

std::vector<ReportRow> run_e2(Config& cfg, const RunOptions& opt) {
  const int dim = cfg.integer("dim", 1);
  const int cells = cfg.integer("cells", 1024);
  const double L = cfg.num("half_width", 16.0);
  const double rho = cfg.num("rho", 0.5);
  const std::vector<double> p_values = cfg.list("p_values", {0.5, 1.0, 2.0, 3.0});
  const std::vector<double> weight_powers = cfg.list("weight_powers", {0.0, 0.3, -0.3});
  const int n_random = cfg.integer("random_suite", 2);
  const double amplitude = cfg.num("modulation_amplitude", 0.75);
  const double max_freq = cfg.num("suite_max_freq", 16.0);
  const double factor = cfg.num("stability_factor", 2.0);
  const std::uint64_t cfg_seed = cfg.useed("seed", 2026);
  const std::uint64_t seed = opt.seed_from_cli ? opt.seed : cfg_seed;
  cfg.done("E2");

  const double m = -dim * (1.0 - rho) / 2.0;
  const std::vector<std::string> sym_names = {"bessel", "oscillatory", "modulated"};

  struct Sup {
    std::unordered_map<std::string, double> by_case;
  };
  Sup sup[2];
  std::vector<ReportRow> rows;

  for (int res = 0; res < 2; ++res) {
    const int N = res ? 2 * cells : cells;
    const GridSpec spec(dim, N, L);
    const std::vector<DyadicLattice> lats = shifted_lattices(spec);
    const std::vector<Symbol> symbols = {bessel_symbol(dim, m), oscillatory_symbol(dim, m, rho),
                                         modulated_symbol(dim, m, amplitude, L)};

    Rng rng(seed);
    std::vector<GridFunction> suite;
    suite.push_back(bump_function(spec, 0.0, L / 16.0));
    suite.push_back(bump_function(spec, L / 2.0, L / 64.0));
    for (int i = 0; i < n_random; ++i) suite.push_back(random_band_limited(spec, rng, max_freq));

    std::vector<GridFunction> m2(suite.size());
    parallel_for(static_cast<int>(suite.size()), opt.threads,
                 [&](int i) { m2[i] = maximal(suite[i], lats, 2.0); });
    std::vector<std::vector<GridFunction>> tf(symbols.size());
    for (std::size_t s = 0; s < symbols.size(); ++s) {
      tf[s].resize(suite.size());
      parallel_for(static_cast<int>(suite.size()), opt.threads,
                   [&](int i) { tf[s][i] = apply_pdo(symbols[s], suite[i]); });
    }
    const LNDecomposition ln =
        lerner_nazarov_decompose(suite.back(), lats[0], std::ldexp(1.0, -dim - 2));
    const CubeMap tripled = [&lats](const Cube& q) {
      return dilate(lats[0].spec, lats[0].region(q), 3.0);
    };
    std::vector<GridFunction> mapped(suite.size());
    parallel_for(static_cast<int>(suite.size()), opt.threads, [&](int i) {
      mapped[i] = mapped_sparse_op(suite[i], lats[0], ln.family, 2.0, tripled);
    });

    for (double wp : weight_powers) {
      const Weight w = power_weight(spec, wp);
      const double ainf = w.ainfty();
      const GridFunction& wv = w.values();
      for (double p : p_values) {
        auto sup_case = [&](const std::vector<GridFunction>& num, const std::string& tag) {
          double best = 0;
          for (std::size_t i = 0; i < suite.size(); ++i) {
            const double den = ainf * weighted_lp_norm(m2[i], wv, p);
            const double v = den > 0 ? weighted_lp_norm(num[i], wv, p) / den : kInf;
            best = std::max(best, v);
          }
          ReportRow row;
          row.experiment = "E2";
          row.param_json = ParamJson()
                               .add("case", tag)
                               .add("cells", N)
                               .add("weight_power", wp)
                               .add("p", p)
                               .add("ainfty", ainf)
                               .str();
          row.lhs = best;
          row.rhs = 1.0;
          row.ratio = best;
          row.pass = std::isfinite(best);
          rows.push_back(row);
          double& agg = sup[res].by_case[tag];
          agg = std::max(agg, best);
        };
        for (std::size_t s = 0; s < symbols.size(); ++s) sup_case(tf[s], sym_names[s]);
        sup_case(mapped, "mapped");
      }
    }
  }

  for (const std::string& tag : {std::string("bessel"), std::string("oscillatory"),
                                 std::string("modulated"), std::string("mapped")})
    rows.push_back(stability_row("E2", tag, sup[0].by_case[tag], sup[1].by_case[tag], factor));
  return rows;
}

// ---------------------------------------------------------------------------
// E3: dispersive kernel decay. K_{j,t}(w) = int e^{i w xi + i t |xi|^{1-rho}}
// psihat_j(xi) dxi is synthesized on the frequency grid and inverted; the
// sup over w is fitted against t (one band) and against the band (fixed t).

struct E3Case {
  std::string name;
  int dim;
  int cells;
  double half_width;
  double rho;
};

GridFunction dispersive_kernel(const GridSpec& spec, const LPFamily& lp, int j, double rho,
                               double t) {
  const GridSpec fs = spec.dual();
  GridFunction symb(fs);
  const std::int64_t sz = fs.size();
  std::vector<double> xi(fs.dim);
  for (std::int64_t i = 0; i < sz; ++i) {
    const double prof = lp.profiles[j][i];
    if (prof == 0.0) continue;
    symb.point(i, xi.data());
    double r2 = 0;
    for (double v : xi) r2 += v * v;
    const double phase = t * std::pow(r2, 0.5 * (1.0 - rho));
    symb.values[i] = std::polar(prof, phase);
  }
  GridFunction k = inverse_transform(symb);
  k.values *= std::pow(2.0 * kPi, spec.dim);
  return k;
}

std::vector<ReportRow> run_e3(Config& cfg, const RunOptions& opt) {
  const std::vector<double> t_values = cfg.list("t_values", {4.0, 8.0, 16.0, 32.0, 64.0});
  const int fit_band = cfg.integer("fit_band", 1);
  const std::vector<double> growth_bands = cfg.list("growth_bands", {1.0, 2.0, 3.0});
  const double growth_t = cfg.num("growth_t", 8.0);
  const double decay_tol = cfg.num("decay_tol", 0.15);
  const double growth_tol = cfg.num("growth_tol", 0.2);
  E3Case cases[2] = {
      {"schrodinger_1d", cfg.integer("a_dim", 1), cfg.integer("a_cells", 16384),
       cfg.num("a_half_width", 1024.0), cfg.num("a_rho", -1.0)},
      {"wave_2d", cfg.integer("b_dim", 2), cfg.integer("b_cells", 2048),
       cfg.num("b_half_width", 128.0), cfg.num("b_rho", 0.0)},
  };
  cfg.done("E3");

  std::vector<ReportRow> rows;
  std::vector<PlotSeries> plot;
  for (const E3Case& c : cases) {
    const GridSpec spec(c.dim, c.cells, c.half_width);
    const LPFamily lp = littlewood_paley_family(spec, 4);
    const int top_needed =
        std::max(fit_band, static_cast<int>(*std::max_element(growth_bands.begin(),
                                                              growth_bands.end())));
    if (top_needed > lp.top_band)
      throw std::invalid_argument("E3: requested band beyond the grid bands");
    const double decay_expect = c.rho != 0.0 ? -c.dim / 2.0 : -(c.dim - 1) / 2.0;
    const double growth_expect =
        c.rho != 0.0 ? c.dim * (1.0 + c.rho) / 2.0 : (c.dim + 1) / 2.0;

    std::vector<double> sup_t(t_values.size());
    parallel_for(static_cast<int>(t_values.size()), opt.threads, [&](int i) {
      sup_t[i] = dispersive_kernel(spec, lp, fit_band, c.rho, t_values[i]).lp_norm(kInf);
    });
    for (std::size_t i = 0; i < t_values.size(); ++i) {
      ReportRow row;
      row.experiment = "E3";
      row.param_json = ParamJson()
                           .add("case", c.name + "_decay")
                           .add("band", fit_band)
                           .add("t", t_values[i])
                           .str();
      row.lhs = sup_t[i];
      row.rhs = std::pow(t_values[i], decay_expect);
      row.ratio = row.lhs / row.rhs;
      row.pass = true;
      rows.push_back(row);
    }
    const SlopeFit dfit = slope_fit(t_values, sup_t);
    {
      ReportRow row;
      row.experiment = "E3";
      row.param_json =
          ParamJson().add("case", c.name + "_decay_slope").add("tol", decay_tol).str();
      row.lhs = dfit.slope;
      row.rhs = decay_expect;
      row.slope = dfit.slope;
      row.std_err = dfit.std_err;
      row.pass = std::abs(dfit.slope - decay_expect) <= decay_tol;
      rows.push_back(row);
    }
    plot.push_back({c.name + "_decay", t_values, sup_t});

    std::vector<double> band_x(growth_bands.size()), sup_j(growth_bands.size());
    parallel_for(static_cast<int>(growth_bands.size()), opt.threads, [&](int i) {
      const int j = static_cast<int>(growth_bands[i]);
      band_x[i] = std::ldexp(1.0, j);
      sup_j[i] = dispersive_kernel(spec, lp, j, c.rho, growth_t).lp_norm(kInf);
    });
    for (std::size_t i = 0; i < growth_bands.size(); ++i) {
      ReportRow row;
      row.experiment = "E3";
      row.param_json = ParamJson()
                           .add("case", c.name + "_band")
                           .add("band", static_cast<int>(growth_bands[i]))
                           .add("t", growth_t)
                           .str();
      row.lhs = sup_j[i];
      row.rhs = std::pow(band_x[i], growth_expect);
      row.ratio = row.lhs / row.rhs;
      row.pass = true;
      rows.push_back(row);
    }
    const SlopeFit gfit = slope_fit(band_x, sup_j);
    {
      ReportRow row;
      row.experiment = "E3";
      row.param_json =
          ParamJson().add("case", c.name + "_band_slope").add("tol", growth_tol).str();
      row.lhs = gfit.slope;
      row.rhs = growth_expect;
      row.slope = gfit.slope;
      row.std_err = gfit.std_err;
      row.pass = std::abs(gfit.slope - growth_expect) <= growth_tol;
      rows.push_back(row);
    }
    plot.push_back({c.name + "_band", band_x, sup_j});
  }
  if (opt.plot)
    write_svg(opt.out_dir + "/e3_decay.svg", "dispersive kernel sup vs t and band", plot);
  return rows;
}

// ---------------------------------------------------------------------------
// E4: sharpness sweep for the oscillating multiplier e^{i|xi|^{1-rho}}|xi|^m
// against annular data concentrated at |xi| ~ R. The pairing kills the
// oscillation exactly, so it grows like R^{m+n}; the weighted norm product
// follows its own explicit exponent, and the pairing/product ratio switches
// from bounded to divergent as m crosses the critical value.

std::vector<ReportRow> run_e4(Config& cfg, const RunOptions& opt) {
  const int dim = cfg.integer("dim", 1);
  const int cells = cfg.integer("cells", 1024);
  const double L = cfg.num("half_width", 8.0);
  const double rho = cfg.num("rho", 0.5);
  const double q = cfg.num("q", 2.0);
  const double p = cfg.num("p", 2.0);
  const double s_w = cfg.num("weight_exponent", -0.25);
  const double m_slope = cfg.num("m", 0.0);
  const std::vector<double> r_values = cfg.list("r_values", {8.0, 16.0, 32.0, 64.0});
  const double pairing_tol = cfg.num("pairing_tol", 0.1);
  const double norm_tol = cfg.num("norm_tol", 0.15);
  const double growth_min = cfg.num("growth_min", 1.2);
  const double critical_factor = cfg.num("critical_factor", 1.5);
  const int smooth = cfg.integer("smooth_order", 4);
  cfg.done("E4");

  const double n = dim;
  const GridSpec spec(dim, cells, L);
  const GridSpec fs = spec.dual();
  if (2.0 * r_values.back() > fs.nyquist())
    throw std::invalid_argument("E4: largest R needs 2R within the Nyquist frequency");
  const double pprime = p / (p - 1.0);
  const double m_critical =
      -n * (1.0 - rho) * (0.5 - 1.0 / p) - rho * n * (1.0 / q - 1.0 / p) + s_w * (1.0 - rho);
  const double m_super = m_critical + 0.25;
  const double pair_expect = m_slope + n;
  const double norm_expect =
      n * (1.0 + rho) / 2.0 - rho * n / q - rho * s_w + n / p + s_w;

  const GridFunction wq = power_weight(spec, q * s_w).values();
  const GridFunction wg = power_weight(spec, -pprime * s_w).values();

  struct Point {
    double pairing_slope_m = 0, pairing_crit = 0, pairing_super = 0, norm_product = 0;
  };
  std::vector<Point> pts(r_values.size());
  parallel_for(static_cast<int>(r_values.size()), opt.threads, [&](int i) {
    const double R = r_values[i];
    GridFunction fh(fs), gh(fs);
    std::vector<double> xi(dim);
    for (std::int64_t k = 0; k < fs.size(); ++k) {
      fh.point(k, xi.data());
      double r2 = 0;
      for (double v : xi) r2 += v * v;
      const double r = std::sqrt(r2);
      const double t = r / R;
      const double phi = plateau_bump(t, smooth) * (1.0 - plateau_bump(4.0 * t, smooth));
      if (phi == 0.0) continue;
      gh.values[k] = Complex(phi, 0.0);
      fh.values[k] = std::polar(phi, -std::pow(r, 1.0 - rho));
    }
    auto pairing = [&](double m) {
      Complex acc(0.0, 0.0);
      for (std::int64_t k = 0; k < fs.size(); ++k) {
        if (gh.values[k] == Complex(0.0, 0.0) && fh.values[k] == Complex(0.0, 0.0)) continue;
        fh.point(k, xi.data());
        double r2 = 0;
        for (double v : xi) r2 += v * v;
        const double r = std::sqrt(r2);
        const Complex a = std::polar(std::pow(r, m), std::pow(r, 1.0 - rho));
        acc += a * fh.values[k] * std::conj(gh.values[k]);
      }
      return std::abs(acc) * fs.cell_weight();
    };
    Point& pt = pts[i];
    pt.pairing_slope_m = pairing(m_slope);
    pt.pairing_crit = pairing(m_critical);
    pt.pairing_super = pairing(m_super);
    const GridFunction f = inverse_transform(fh);
    const GridFunction g = inverse_transform(gh);
    pt.norm_product = weighted_lp_norm(f, wq, q) * weighted_lp_norm(g, wg, pprime);
  });

  std::vector<ReportRow> rows;
  std::vector<double> pairing_vals, norm_vals, crit_ratio, super_ratio;
  for (std::size_t i = 0; i < r_values.size(); ++i) {
    pairing_vals.push_back(pts[i].pairing_slope_m);
    norm_vals.push_back(pts[i].norm_product);
    crit_ratio.push_back(pts[i].pairing_crit / pts[i].norm_product);
    super_ratio.push_back(pts[i].pairing_super / pts[i].norm_product);
    ReportRow prow;
    prow.experiment = "E4";
    prow.param_json =
        ParamJson().add("case", "pairing").add("R", r_values[i]).add("m", m_slope).str();
    prow.lhs = pts[i].pairing_slope_m;
    prow.rhs = std::pow(r_values[i], pair_expect);
    prow.ratio = prow.lhs / prow.rhs;
    prow.pass = true;
    rows.push_back(prow);
    ReportRow nrow;
    nrow.experiment = "E4";
    nrow.param_json = ParamJson()
                          .add("case", "norm_product")
                          .add("R", r_values[i])
                          .add("weight_exponent", s_w)
                          .str();
    nrow.lhs = pts[i].norm_product;
    nrow.rhs = std::pow(r_values[i], norm_expect);
    nrow.ratio = nrow.lhs / nrow.rhs;
    nrow.pass = true;
    rows.push_back(nrow);
    ReportRow crow;
    crow.experiment = "E4";
    crow.param_json = ParamJson()
                          .add("case", "critical_ratio")
                          .add("R", r_values[i])
                          .add("m", m_critical)
                          .str();
    crow.lhs = pts[i].pairing_crit;
    crow.rhs = pts[i].norm_product;
    crow.ratio = crit_ratio.back();
    crow.pass = true;
    rows.push_back(crow);
  }

  const SlopeFit pfit = slope_fit(r_values, pairing_vals);
  {
    ReportRow row;
    row.experiment = "E4";
    row.param_json = ParamJson().add("case", "pairing_slope").add("tol", pairing_tol).str();
    row.lhs = pfit.slope;
    row.rhs = pair_expect;
    row.ratio = pfit.slope / pair_expect;
    row.slope = pfit.slope;
    row.std_err = pfit.std_err;
    row.pass = std::abs(pfit.slope - pair_expect) <= pairing_tol;
    rows.push_back(row);
  }
  const SlopeFit nfit = slope_fit(r_values, norm_vals);
  {
    ReportRow row;
    row.experiment = "E4";
    row.param_json = ParamJson().add("case", "norm_slope").add("tol", norm_tol).str();
    row.lhs = nfit.slope;
    row.rhs = norm_expect;
    row.ratio = nfit.slope / norm_expect;
    row.slope = nfit.slope;
    row.std_err = nfit.std_err;
    row.pass = std::abs(nfit.slope - norm_expect) <= norm_tol;
    rows.push_back(row);
  }
  {
    ReportRow row;
    row.experiment = "E4";
    row.param_json = ParamJson()
                         .add("case", "supercritical_growth")
                         .add("m", m_super)
                         .add("growth_min", growth_min)
                         .str();
    row.lhs = super_ratio.back();
    row.rhs = super_ratio.front();
    row.ratio = row.lhs / row.rhs;
    row.pass = row.ratio >= growth_min;
    rows.push_back(row);
  }
  {
    ReportRow row;
    row.experiment = "E4";
    row.param_json = ParamJson()
                         .add("case", "critical_bounded")
                         .add("m", m_critical)
                         .add("factor", critical_factor)
                         .str();
    row.lhs = crit_ratio.back();
    row.rhs = crit_ratio.front();
    row.ratio = row.lhs / row.rhs;
    row.pass = row.ratio <= critical_factor;
    rows.push_back(row);
  }
  if (opt.plot)
    write_svg(opt.out_dir + "/e4_sharpness.svg", "pairing and norm product vs R",
              {{"pairing", r_values, pairing_vals}, {"norm_product", r_values, norm_vals}});
  return rows;
}

// ---------------------------------------------------------------------------
// E5: divergence of the escaping-dilate family. For f = 1 outside 3Q the
// operator sum over {3^k Q} evaluated on Q is a sum of exact cell-count
// ratios, and it grows linearly in the escape depth.

std::vector<ReportRow> run_e5(Config& cfg, const RunOptions&) {
  const int cells = cfg.integer("cells", 16384);
  const double L = cfg.num("half_width", 16.0);
  const std::vector<double> depths = cfg.list("depths", {3, 4, 5, 6, 7, 8});
  const double bound_coeff = cfg.num("bound_coeff", 0.6);
  cfg.done("E5");

  const GridSpec spec(1, cells, L);
  const DyadicLattice lat = shifted_lattices(spec)[0];
  std::vector<ReportRow> rows;
  for (double dd : depths) {
    const int d = static_cast<int>(dd);
    if (d < 1 || static_cast<double>(d) != dd)
      throw std::invalid_argument("E5: depths must be positive integers");
    std::int64_t pow3 = 1;
    for (int k = 0; k < d; ++k) pow3 *= 3;
    int side = 1;
    while (2 * side * pow3 <= cells) side *= 2;
    if (side * pow3 > cells)
      throw std::invalid_argument("E5: depth " + std::to_string(d) + " needs a larger grid");
    const int level = spec.levels() - static_cast<int>(std::log2(side));
    const Cube q = lat.cell_home(cells / 2, level);
    const Region rq = lat.region(q);

    double value = 0;
    const std::int64_t c1 = dilate(spec, rq, 3.0).cell_count();
    double factor = 3.0;
    int terms = 0;
    while (true) {
      const Region rk = dilate(spec, rq, factor);
      const std::int64_t ck = rk.cell_count();
      value += static_cast<double>(ck - c1) / static_cast<double>(ck);
      ++terms;
      if (ck >= cells) break;
      factor *= 3.0;
    }

    ReportRow row;
    row.experiment = "E5";
    row.param_json = ParamJson()
                         .add("case", "escape")
                         .add("depth", d)
                         .add("side_cells", side)
                         .add("terms", terms)
                         .str();
    row.lhs = value;
    row.rhs = bound_coeff * (d - 1);
    row.ratio = row.rhs > 0 ? row.lhs / row.rhs : 0.0;
    row.pass = row.lhs >= row.rhs;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// E6: weighted Besov bounds. (a) fixed-time operator norm estimates across
// symbol presets at the shifted regularity; (b) the half-wave/Schrodinger
// propagator's norm decay in t at the smoothing-shifted regularity.

std::vector<ReportRow> run_e6(Config& cfg, const RunOptions& opt) {
  const int dim = cfg.integer("dim", 1);
  const double factor = cfg.num("stability_factor", 2.0);
  const std::uint64_t cfg_seed = cfg.useed("seed", 2026);
  const std::uint64_t seed = opt.seed_from_cli ? opt.seed : cfg_seed;

  const int a_cells = cfg.integer("a_cells", 512);
  const double a_L = cfg.num("a_half_width", 16.0);
  const double a_q = cfg.num("a_q", 4.0);
  const double a_p = cfg.num("a_p", 4.0);
  const double a_s = cfg.num("a_s", 8.0);
  const double a_rho = cfg.num("a_rho", 0.5);
  const double a_m = cfg.num("a_m", -0.25);
  const double a_kappa = cfg.num("a_kappa", 0.3);
  const double a_sigma = cfg.num("a_sigma", 2.0);
  const double a_wp = cfg.num("a_weight_power", 0.1);
  const int a_random = cfg.integer("a_random_suite", 3);
  const double a_max_freq = cfg.num("a_max_freq", 8.0);

  const int b_cells = cfg.integer("b_cells", 8192);
  const double b_L = cfg.num("b_half_width", 512.0);
  const double b_q = cfg.num("b_q", 4.0 / 3.0);
  const double b_p = cfg.num("b_p", 4.0);
  const double b_r = cfg.num("b_r", 1.2);
  const double b_rho = cfg.num("b_rho", -1.0);
  const double b_kappa = cfg.num("b_kappa", 0.3);
  const double b_sigma = cfg.num("b_sigma", 2.0);
  const double b_wp = cfg.num("b_weight_power", 0.03);
  const std::vector<double> b_t = cfg.list("b_t_values", {2.0, 4.0, 8.0, 16.0, 32.0});
  const double b_max_freq = cfg.num("b_max_freq", 4.0);
  const int b_random = cfg.integer("b_random_suite", 3);
  const double slope_tol = cfg.num("slope_tol", 0.25);
  cfg.done("E6");

  if (!(a_q > 2.0 && a_q <= a_p && a_s > a_p))
    throw std::invalid_argument("E6: fixed-time case needs 2 < q <= p < s");
  if (!(b_r >= 1.0 && b_r < b_q && b_q <= 2.0 && 2.0 <= b_p &&
        b_p <= b_q / (b_q - 1.0) + 1e-9))
    throw std::invalid_argument("E6: propagator case needs 1 <= r < q <= 2 <= p <= q'");
  if (1.0 / b_r - 0.5 > 1.0 / b_q - 1.0 / b_p + 1e-12)
    throw std::invalid_argument("E6: propagator case needs 1/r - 1/2 <= 1/q - 1/p");

  const double n = dim;
  const double a_shift =
      a_m + n * (1.0 - a_rho) * (0.5 - 1.0 / a_s) + a_rho * n * (1.0 / a_q - 1.0 / a_p);
  const double b_shift = n * (1.0 - b_rho) * (1.0 / b_r - 0.5) + b_rho * n * (1.0 / b_q - 1.0 / b_p);
  const double b_decay = -n * ((1.0 / b_q - 1.0 / b_p) - (1.0 / b_r - 0.5));

  std::vector<ReportRow> rows;

  // (a) fixed-time symbol presets
  const std::vector<std::string> sym_names = {"oscillatory", "bessel", "modulated"};
  double a_sup[2][3] = {{0, 0, 0}, {0, 0, 0}};
  for (int res = 0; res < 2; ++res) {
    const int N = res ? 2 * a_cells : a_cells;
    const GridSpec spec(dim, N, a_L);
    const LPFamily lp = littlewood_paley_family(spec, 4);
    const std::vector<Symbol> symbols = {oscillatory_symbol(dim, a_m, a_rho),
                                         bessel_symbol(dim, a_m),
                                         modulated_symbol(dim, a_m, 0.5, a_L)};
    const GridFunction wq = power_weight(spec, a_q * a_wp).values();
    const GridFunction wp = power_weight(spec, a_p * a_wp).values();

    Rng rng(seed);
    std::vector<GridFunction> suite;
    suite.push_back(partial_telescope(lp, 2, bump_function(spec, 0.0, a_L / 8.0)));
    for (int i = 0; i < a_random; ++i)
      suite.push_back(random_band_limited(spec, rng, a_max_freq));

    for (std::size_t s = 0; s < symbols.size(); ++s) {
      std::vector<double> ratios(suite.size());
      parallel_for(static_cast<int>(suite.size()), opt.threads, [&](int i) {
        const GridFunction tf = apply_pdo(symbols[s], suite[i]);
        const double num = besov_norm(tf, lp, a_kappa, a_p, a_sigma, wp);
        const double den = besov_norm(suite[i], lp, a_kappa + a_shift, a_q, a_sigma, wq);
        ratios[i] = den > 0 ? num / den : kInf;
      });
      const double sup = *std::max_element(ratios.begin(), ratios.end());
      a_sup[res][s] = sup;
      ReportRow row;
      row.experiment = "E6";
      row.param_json = ParamJson()
                           .add("case", "besov_" + sym_names[s])
                           .add("cells", N)
                           .add("regularity_shift", a_shift)
                           .str();
      row.lhs = sup;
      row.rhs = 1.0;
      row.ratio = sup;
      row.pass = std::isfinite(sup);
      rows.push_back(row);
    }
  }
  for (int s = 0; s < 3; ++s)
    rows.push_back(
        stability_row("E6", "besov_" + sym_names[s], a_sup[0][s], a_sup[1][s], factor));

  // (b) propagator decay
  std::vector<double> b_sup[2];
  for (int res = 0; res < 2; ++res) {
    const int N = res ? 2 * b_cells : b_cells;
    const GridSpec spec(dim, N, b_L);
    const LPFamily lp = littlewood_paley_family(spec, 4);
    const GridFunction wq = power_weight(spec, b_q * b_wp).values();
    const GridFunction wp = power_weight(spec, b_p * b_wp).values();

    Rng rng(seed);
    // the box is periodic, so data touching the flat band never disperses;
    // restrict the suite to one moving band to expose the time decay
    std::vector<GridFunction> suite;
    suite.push_back(band_project(lp, 1, bump_function(spec, 0.0, b_L / 16.0)));
    for (int i = 0; i < b_random; ++i)
      suite.push_back(band_project(lp, 1, random_band_limited(spec, rng, b_max_freq)));
    std::vector<double> dens(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i)
      dens[i] = besov_norm(suite[i], lp, b_kappa, b_q, b_sigma, wq);

    b_sup[res].resize(b_t.size());
    parallel_for(static_cast<int>(b_t.size()), opt.threads, [&](int ti) {
      double sup = 0;
      for (std::size_t i = 0; i < suite.size(); ++i) {
        const GridFunction ut = propagator(suite[i], b_rho, b_t[ti]);
        const double num = besov_norm(ut, lp, b_kappa + b_shift, b_p, b_sigma, wp);
        sup = std::max(sup, dens[i] > 0 ? num / dens[i] : kInf);
      }
      b_sup[res][ti] = sup;
    });
    for (std::size_t ti = 0; ti < b_t.size(); ++ti) {
      ReportRow row;
      row.experiment = "E6";
      row.param_json = ParamJson()
                           .add("case", "propagator_decay")
                           .add("cells", N)
                           .add("t", b_t[ti])
                           .add("regularity_shift", b_shift)
                           .str();
      row.lhs = b_sup[res][ti];
      row.rhs = std::pow(b_t[ti], b_decay);
      row.ratio = row.lhs / row.rhs;
      row.pass = std::isfinite(row.lhs);
      rows.push_back(row);
    }
  }
  const SlopeFit bfit = slope_fit(b_t, b_sup[0]);
  {
    ReportRow row;
    row.experiment = "E6";
    row.param_json =
        ParamJson().add("case", "propagator_slope").add("tol", slope_tol).str();
    row.lhs = bfit.slope;
    row.rhs = b_decay;
    row.slope = bfit.slope;
    row.std_err = bfit.std_err;
    row.pass = bfit.slope <= b_decay + slope_tol;
    rows.push_back(row);
  }
  {
    const double s0 = *std::max_element(b_sup[0].begin(), b_sup[0].end());
    const double s1 = *std::max_element(b_sup[1].begin(), b_sup[1].end());
    rows.push_back(stability_row("E6", "propagator", s0, s1, factor));
  }
  if (opt.plot)
    write_svg(opt.out_dir + "/e6_decay.svg", "propagator Besov norm ratio vs t",
              {{"ratio", b_t, b_sup[0]}});
  return rows;
}

// ---------------------------------------------------------------------------
// E7: the alpha-power sparse form against the weighted characteristic bound,
// over two exponent sets, power weights, and oscillation-built families.

std::vector<ReportRow> run_e7(Config& cfg, const RunOptions& opt) {
  const int dim = cfg.integer("dim", 1);
  const int cells = cfg.integer("cells", 512);
  const double L = cfg.num("half_width", 16.0);
  const std::vector<double> set_a = cfg.list("set_a", {1.0, 2.0, 2.0, 4.0});
  const std::vector<double> set_b = cfg.list("set_b", {1.0, 2.0, 3.0, 6.0});
  const std::vector<double> weight_powers = cfg.list("weight_powers", {0.2, 0.0, -0.1});
  const int n_families = cfg.integer("families", 3);
  const int n_pairs = cfg.integer("pairs", 2);
  const double max_freq = cfg.num("suite_max_freq", 8.0);
  const double factor = cfg.num("stability_factor", 2.0);
  const std::uint64_t cfg_seed = cfg.useed("seed", 2026);
  const std::uint64_t seed = opt.seed_from_cli ? opt.seed : cfg_seed;
  cfg.done("E7");

  std::vector<FormExponents> sets;
  for (const std::vector<double>* v : {&set_a, &set_b}) {
    if (v->size() != 4)
      throw std::invalid_argument("E7: exponent sets are arrays [r, q, p, s]");
    FormExponents e{(*v)[0], (*v)[1], (*v)[2], (*v)[3]};
    if (!(e.r >= 1.0 && e.r < e.q && e.q <= e.p && e.p < e.s))
      throw std::invalid_argument("E7: exponent sets need 1 <= r < q <= p < s");
    sets.push_back(e);
  }

  std::vector<ReportRow> rows;
  double sup_set[2][2] = {{0, 0}, {0, 0}};
  for (int res = 0; res < 2; ++res) {
    const int N = res ? 2 * cells : cells;
    const GridSpec spec(dim, N, L);
    const DyadicLattice lat = shifted_lattices(spec)[0];

    Rng rng(seed);
    std::vector<SparseFamily> fams;
    for (int i = 0; i < n_families; ++i) {
      const GridFunction u = random_band_limited(spec, rng, max_freq);
      fams.push_back(lerner_nazarov_decompose(u, lat, std::ldexp(1.0, -dim - 2)).family);
    }
    std::vector<GridFunction> fg;
    for (int i = 0; i < 2 * n_pairs; ++i) fg.push_back(random_band_limited(spec, rng, max_freq));

    struct Item {
      int set, wi, fam, pair;
    };
    std::vector<Item> items;
    for (int si = 0; si < 2; ++si)
      for (std::size_t wi = 0; wi < weight_powers.size(); ++wi)
        for (int fi = 0; fi < n_families; ++fi)
          for (int pi = 0; pi < n_pairs; ++pi)
            items.push_back({si, static_cast<int>(wi), fi, pi});

    std::vector<Weight> weights;
    weights.reserve(weight_powers.size());
    for (double wpw : weight_powers) weights.push_back(power_weight(spec, wpw));

    std::vector<ReportRow> sub(items.size());
    parallel_for(static_cast<int>(items.size()), opt.threads, [&](int ii) {
      const Item& it = items[ii];
      const FormExponents& e = sets[it.set];
      const GridFunction& f = fg[2 * it.pair];
      const GridFunction& g = fg[2 * it.pair + 1];
      const WeightedRhs wr = weighted_rhs(f, g, weights[it.wi], e);
      const double sprime = e.s / (e.s - 1.0);
      const double lhs = sparse_form_alpha(f, g, lat, fams[it.fam], e.r, sprime, wr.alpha);
      ReportRow row;
      row.experiment = "E7";
      row.param_json = ParamJson()
                           .add("case", std::string("form_") + (it.set == 0 ? "a" : "b"))
                           .add("cells", N)
                           .add("weight_power", weight_powers[it.wi])
                           .add("family", it.fam)
                           .add("pair", it.pair)
                           .add("delta", wr.delta)
                           .str();
      row.lhs = lhs;
      row.rhs = wr.value;
      row.ratio = wr.value > 0 ? lhs / wr.value : kInf;
      row.pass = std::isfinite(row.ratio);
      sub[ii] = row;
    });
    for (std::size_t ii = 0; ii < items.size(); ++ii) {
      rows.push_back(sub[ii]);
      double& agg = sup_set[res][items[ii].set];
      agg = std::max(agg, sub[ii].ratio);
    }
  }
  rows.push_back(stability_row("E7", "form_a", sup_set[0][0], sup_set[1][0], factor));
  rows.push_back(stability_row("E7", "form_b", sup_set[0][1], sup_set[1][1], factor));
  return rows;
}

// ---------------------------------------------------------------------------
// E8: band-to-band coupling of a smoothly modulated symbol. The L^2 norm of
// project_k . a(x,D) . project_j decays in |j-k| at the rate set by the
// modulation's Fourier tail; the fitted log2 slope must clear -2.

std::vector<ReportRow> run_e8(Config& cfg, const RunOptions& opt) {
  const int dim = cfg.integer("dim", 1);
  const int cells = cfg.integer("cells", 1024);
  const double L = cfg.num("half_width", 16.0);
  const double amplitude = cfg.num("modulation_amplitude", 0.5);
  const int power = cfg.integer("modulation_power", 5);
  const double m = cfg.num("m", 0.0);
  const int max_offset = cfg.integer("max_offset", 5);
  const int samples = cfg.integer("samples", 2);
  const double slope_bound = cfg.num("slope_bound", -2.0);
  const std::uint64_t cfg_seed = cfg.useed("seed", 2026);
  const std::uint64_t seed = opt.seed_from_cli ? opt.seed : cfg_seed;
  cfg.done("E8");

  const GridSpec spec(dim, cells, L);
  const LPFamily lp = littlewood_paley_family(spec, 4);
  if (max_offset > lp.top_band)
    throw std::invalid_argument("E8: max_offset beyond the grid bands");
  const Symbol a = modulated_symbol(dim, m, amplitude, L, power);

  Rng rng(seed);
  std::vector<std::vector<GridFunction>> data(lp.bands());
  for (int j = 0; j <= lp.top_band; ++j)
    for (int s = 0; s < samples; ++s)
      data[j].push_back(band_project(lp, j, random_band_limited(spec, rng, spec.nyquist() * 0.8)));

  // norms[j][k]: max over samples of ||project_k T project_j f|| / ||project_j f||
  std::vector<std::vector<double>> norms(lp.bands(), std::vector<double>(lp.bands(), 0.0));
  parallel_for(lp.bands(), opt.threads, [&](int j) {
    for (int s = 0; s < samples; ++s) {
      const GridFunction& u = data[j][s];
      const double un = u.lp_norm(2.0);
      if (!(un > 0)) continue;
      const GridFunction tu = apply_pdo(a, u);
      for (int k = 0; k <= lp.top_band; ++k) {
        if (std::abs(j - k) > max_offset) continue;
        norms[j][k] = std::max(norms[j][k], band_project(lp, k, tu).lp_norm(2.0) / un);
      }
    }
  });

  std::vector<ReportRow> rows;
  std::vector<double> off_x, off_y;
  for (int d = 0; d <= max_offset; ++d) {
    double best = 0;
    for (int j = 0; j <= lp.top_band; ++j)
      for (int k = 0; k <= lp.top_band; ++k)
        if (std::abs(j - k) == d) best = std::max(best, norms[j][k]);
    ReportRow row;
    row.experiment = "E8";
    row.param_json = ParamJson().add("case", "off_diagonal").add("offset", d).str();
    row.lhs = best;
    row.rhs = std::pow(2.0, slope_bound * d);
    row.ratio = row.rhs > 0 ? row.lhs / row.rhs : 0.0;
    row.pass = true;
    rows.push_back(row);
    if (d >= 1) {
      off_x.push_back(std::ldexp(1.0, d));
      off_y.push_back(best);
    }
  }
  const SlopeFit fit = slope_fit(off_x, off_y);
  {
    ReportRow row;
    row.experiment = "E8";
    row.param_json =
        ParamJson().add("case", "off_diagonal_slope").add("bound", slope_bound).str();
    row.lhs = fit.slope;
    row.rhs = slope_bound;
    row.slope = fit.slope;
    row.std_err = fit.std_err;
    row.pass = fit.slope <= slope_bound;
    rows.push_back(row);
  }
  if (opt.plot)
    write_svg(opt.out_dir + "/e8_offdiag.svg", "band coupling vs 2^offset",
              {{"coupling", off_x, off_y}});
  return rows;
}

}  // namespace

int run_experiment(const RunOptions& opt) {
  using Runner = std::vector<ReportRow> (*)(Config&, const RunOptions&);
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"E1", run_e1}, {"E2", run_e2}, {"E3", run_e3}, {"E4", run_e4},
      {"E5", run_e5}, {"E6", run_e6}, {"E7", run_e7}, {"E8", run_e8},
  };
  const auto it =
      std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == opt.experiment; });
  if (it == table.end()) {
    std::string valid;
    for (const auto& e : table) valid += (valid.empty() ? "" : ", ") + e.first;
    throw std::invalid_argument("unknown experiment '" + opt.experiment +
                                "'; valid ids: " + valid);
  }
  std::filesystem::create_directories(opt.out_dir);
  Config cfg(opt.config_path);
  const std::vector<ReportRow> rows = it->second(cfg, opt);
  write_csv(opt.out_dir + "/report.csv", rows);
  write_summary(opt.out_dir + "/summary.json", opt.experiment, rows);
  for (const ReportRow& row : rows)
    if (!row.pass) return 1;
  return 0;
}

}  // namespace sparsedom
