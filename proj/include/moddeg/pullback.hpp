#pragma once

#include <memory>
#include <string>
#include <vector>

#include "moddeg/keel.hpp"

#include "json.hpp"

/*
 * Exact pullback operators on H^{1,1}(X^N) and H^{2,2}(X^3) for the maps
 * f_rho = g_rho ∘ s: the relabeling automorphism g_rho permutes stratum
 * classes, the squaring map s acts diagonally on the distinguished degree-1
 * basis (2 on ramified divisors, 1 otherwise) and by a fixed 16x16 integer
 * matrix in degree 2 at n=6. Matrices act on coordinate column vectors, so
 * (g ∘ s)* = M(s*) · M(g*).
 */

namespace moddeg::pullback {

using combinat::Permutation;

enum class MapKind { GRho, SMap, FRho };

struct PullbackMatrix {
  MapKind kind = MapKind::FRho;
  keel::Basis basis;
  RatMatrix mat;

  int n() const { return basis.n(); }
  int k() const { return basis.k(); }
  int dim() const { return mat.rows(); }
};

// Column j is the coordinate vector of the permuted j-th basis stratum.
PullbackMatrix g_pullback(const Permutation& rho, const keel::Basis& basis);

// diag(2,...,2,1,...,1) with 2^{n-2}-n+1 leading 2s; requires the B1 basis.
PullbackMatrix s_pullback_H11(const keel::Basis& basis);

// The fixed matrix on the Z_1..Z_16 basis: 4 on the first 11 diagonal
// entries, 2 on the next four, 1 at (16,16), and ones at (14,16), (15,16).
PullbackMatrix s_pullback_H22_X3(const keel::Basis& basis);

// Topological degree 2^{n-3}.
long top_degree(int n);

// Immutable bundle for one (n, k) with everything the sweeps need:
// the keel context plus the coordinates of every stratum class in the
// default basis, so that g* columns are table lookups.
class DegreeContext {
 public:
  static std::shared_ptr<const DegreeContext> create(int n, int k,
                                                     const std::string& cache_dir = "",
                                                     const keel::Limits& limits = {});

  int n() const { return ctx_->n(); }
  int k() const { return ctx_->k(); }
  int dim() const { return ctx_->dim(); }
  const keel::Context& keel() const { return *ctx_; }
  const keel::Basis& basis() const { return ctx_->basis(); }
  const RatMatrix& s_matrix() const { return s_.mat; }

  RatMatrix g_matrix(const Permutation& rho) const;
  RatMatrix f_matrix(const Permutation& rho) const;  // M(s*) · M(g*)

 private:
  DegreeContext() = default;
  std::shared_ptr<const keel::Context> ctx_;
  PullbackMatrix s_;
  std::vector<std::vector<Rat>> stratum_coords_;  // basis coords per stratum
  std::vector<int> s_diag_;                       // k=1 fast path, else empty
};

// Validates (k=1, 5<=n<=9) or (k=2, n=6); throws UnsupportedDegree otherwise.
PullbackMatrix f_pullback(const Permutation& rho, const DegreeContext& ctx);
PullbackMatrix f_pullback(const Permutation& rho, int n, int k);

nlohmann::json matrix_json(const PullbackMatrix& m);

}  // namespace moddeg::pullback
