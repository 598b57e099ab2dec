#pragma once

#include "sparsedom/dyadic.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sparsedom {

struct SparseEntry {
  Cube cube;
  double coeff = 0.0;
};

struct SparseFamily {
  int lattice = 0;
  std::vector<SparseEntry> entries;

  std::vector<Cube> cubes() const {
    std::vector<Cube> out;
    out.reserve(entries.size());
    for (const SparseEntry& e : entries) out.push_back(e.cube);
    return out;
  }
};

// eta-sparseness witness: E_Q = Q minus the maximal proper family subcubes;
// the sets are pairwise disjoint, each carrying at least eta of its cube.
struct SparseCertificate {
  bool pass = false;
  double eta = 0.0;
  double min_ratio = 0.0;
  std::vector<Cube> cubes;
  std::vector<std::vector<std::int64_t>> exceptional;
  std::string detail;
};

SparseCertificate verify_eta_sparse(const DyadicLattice& lat, const std::vector<Cube>& family,
                                    double eta);

// omega_lambda(f; Q): minimal value range over subsets of Q holding more than
// (1-lambda)|Q| of the cells. f must be real-valued on Q.
double local_oscillation(const GridFunction& f, const Region& q, double lambda);

struct LNDecomposition {
  SparseFamily family;  // coeff = oscillation; root coeff adds |pseudomedian|
  SparseCertificate certificate;
  double lambda = 0.0;
  int selection_doublings = 0;  // local refinements of the selection threshold
};

// Pointwise sparse domination |f| <= sum c_Q 1_Q with an eta = 1/2 family.
// Both post-conditions are re-verified on the result; violations throw.
LNDecomposition lerner_nazarov_decompose(const GridFunction& f, const DyadicLattice& lat,
                                         double lambda);

// pred(anchor, inner) is the stopping predicate; pred(Q, Q) is true by axiom.
using StopPredicate = std::function<bool(const Cube&, const Cube&)>;

// All cubes reachable from `root` by chains of one-step descents: V is one
// step from U when pred(U, V) fails while pred(U, R) holds for every
// intermediate R. Excludes the root itself.
std::vector<Cube> stopping_family(const DyadicLattice& lat, const Cube& root,
                                  const StopPredicate& pred);

struct AugmentResult {
  SparseFamily family;
  bool hypothesis_ok = true;
  struct Violation {
    Cube anchor;
    std::vector<Cube> children;
    double packed_fraction = 0.0;
  };
  std::vector<Violation> violations;
};

// Union of per-anchor stopping families, with members already claimed by a
// strictly larger anchor dropped. stop_family(Q) must contain Q itself.
AugmentResult augment(const DyadicLattice& lat, const std::vector<Cube>& s,
                      const std::function<std::vector<Cube>(const Cube&)>& stop_family);

// Maximal dyadic descendants of Q with |P cap E| > 2^{-n-1} |P|; requires
// |E cap Q| <= 2^{-n-1} |Q|. The selected cubes carry all of E cap Q.
std::vector<Cube> cz_decompose(const DyadicLattice& lat, const std::vector<std::uint8_t>& mask,
                               const Cube& q);

struct BuildOptions {
  double r = 2.0;
  double s = 2.0;      // grand-maximal exponent; the form pairs g at s' = s/(s-1)
  double alpha = 1.0;  // power of the form, in (0, 1]
  double lambda0 = 1.0;
  int max_restarts = 48;
};

struct BuildResult {
  SparseFamily family;
  double lambda = 0.0;    // final threshold multiplier
  double constant = 0.0;  // certificate constant C = 2 * lambda
  double lhs = 0.0;       // |int_Q0 T(f 1_{3Q0}) g|
  double rhs = 0.0;       // C * alpha-power form with f averaged over 3P
  double plain_form = 0.0;  // same form with f averaged over P (diagnostic)
  double carleson = 0.0;    // exact packing constant of the family
  int restarts = 0;
  int max_depth = 0;
  bool certified = false;
};

// Exceptional-set recursion: at each node the set where |T(f 1_{3Q})| or the
// in-cube grand maximal exceeds lambda |Q|^{1/alpha - 1} <f>_{r,3Q} is carved
// out by Calderon-Zygmund selection; lambda doubles until every node packs
// its children below half measure and the certificate inequality holds.
BuildResult build_sparse_form_family(const PdoApply& T, const GridFunction& f,
                                     const GridFunction& g, const DyadicLattice& lat,
                                     const Cube& q0, const BuildOptions& opt);

}  // namespace sparsedom
