#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "moddeg/combinat.hpp"
#include "moddeg/ratlin.hpp"

#include "json.hpp"

/*
 * The Keel presentation of H^*(M̄_{0,n};C) in degrees 1 and 2:
 * linear relations indexed by 4-point subsets, vanishing products of
 * incompatible divisors, and self-intersections rewritten through the
 * linear relations. The quotient is computed by exact rational
 * echelonization over the free span of boundary strata.
 */

namespace moddeg::keel {

using combinat::BoundaryDivisor;
using combinat::Stratum;

// Immutable index of the codimension-k stratum enumeration for one n.
// Strata are addressed by their position in the global enumeration.
class StratumTable {
 public:
  StratumTable(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  int count() const { return static_cast<int>(strata_.size()); }
  const std::vector<Stratum>& strata() const { return strata_; }
  const Stratum& at(int idx) const { return strata_[idx]; }
  int index(const Stratum& z) const;  // throws if not a valid stratum
  const combinat::DivisorTable& divisors() const { return *divtable_; }

 private:
  int n_, k_;
  std::shared_ptr<const combinat::DivisorTable> divtable_;
  std::vector<Stratum> strata_;
  std::map<std::vector<int>, int> index_;  // divisor-index lists -> position
};

// Exact-rational class in the free span of codimension-k strata.
// Zero coefficients are never stored.
struct ClassVector {
  int n = 0;
  int k = 0;
  std::map<int, Rat> coords;  // stratum index -> coefficient

  void add(int idx, const Rat& c);
  static ClassVector unit(int n, int k, int idx);
};

struct Limits {
  // degree-2 elimination refuses to start above this many stratum columns;
  // the default covers n <= 8.
  int max_strata = 2000;
};

// Reduced row echelon form of the relation span, with pivot bookkeeping.
// rank + corank == number of strata; corank == dim H^{k,k}.
class RelationSpace {
 public:
  using SparseRow = std::vector<std::pair<int, Rat>>;

  int n() const { return n_; }
  int k() const { return k_; }
  int num_strata() const { return num_strata_; }
  int rank() const { return static_cast<int>(pivot_cols_.size()); }
  int corank() const { return num_strata_ - rank(); }
  const std::vector<int>& pivot_cols() const { return pivot_cols_; }
  const std::vector<int>& free_cols() const { return free_cols_; }
  // RREF row with the given pivot column (support: pivot + free columns only)
  const SparseRow& row_for_pivot(int col) const;

  // Coordinates of a class on the free columns after eliminating all
  // pivot columns; this is the image in the quotient, expressed in the
  // residual basis of free-stratum classes.
  std::vector<Rat> residual(const ClassVector& v) const;

  nlohmann::json to_json(const StratumTable& table) const;
  static RelationSpace from_json(const nlohmann::json& j, const StratumTable& table);

 private:
  friend class EchelonBuilder;
  int n_ = 0, k_ = 0, num_strata_ = 0;
  std::vector<int> pivot_cols_;          // ascending
  std::vector<int> free_cols_;           // ascending
  std::vector<int> pivot_pos_;           // column -> index into rows_, or -1
  std::vector<int> free_pos_;            // column -> position among free cols, or -1
  std::vector<SparseRow> rows_;          // aligned with pivot_cols_
};

// Relations on divisor classes: for each 4-point subset, two of the three
// pairwise equalities between partition sums (the third is dependent).
RelationSpace degree1_relations(int n);

// [D]^2 expanded into codimension-2 stratum classes using the canonical
// quadruple (two smallest labels of the representative, two smallest of
// its complement).
ClassVector square_reduce(const StratumTable& codim2, const BoundaryDivisor& d);

// Degree-2 relation span: every degree-1 relation multiplied by every
// divisor class, expanded through compatibility and square reduction.
RelationSpace degree2_relations(int n, const Limits& limits = {});

enum class BasisTag { B1, B2X3, Auto };

// Ordered basis of the quotient together with a cached exact solver for
// coordinates. Immutable and cheap to copy.
class Basis {
 public:
  BasisTag tag() const { return tag_; }
  int n() const;
  int k() const;
  int size() const { return static_cast<int>(strata_idx_.size()); }
  const std::vector<int>& stratum_indices() const { return strata_idx_; }
  const Stratum& stratum(int j) const;
  const StratumTable& table() const { return *table_; }
  const RelationSpace& relations() const { return *relations_; }

  // Coordinates of v in this basis; exact. Throws InconsistentClass only
  // on internal inconsistency (impossible for valid inputs).
  std::vector<Rat> reduce(const ClassVector& v) const;

  friend Basis make_basis(BasisTag, std::vector<int>,
                          std::shared_ptr<const StratumTable>,
                          std::shared_ptr<const RelationSpace>);

 private:
  BasisTag tag_ = BasisTag::Auto;
  std::vector<int> strata_idx_;
  std::shared_ptr<const StratumTable> table_;
  std::shared_ptr<const RelationSpace> relations_;
  std::shared_ptr<const RatMatrix> inv_;  // inverse of residual-coordinate matrix
};

// Basis of free-column stratum classes (always valid).
Basis basis_auto(std::shared_ptr<const StratumTable> table,
                 std::shared_ptr<const RelationSpace> relations);

// The distinguished H^{1,1} basis: {p1,p3} first, then all |S| > 2 with
// p2 not in S, ramified block (p1 in S) before the unramified block,
// each block in the global divisor order. length = 2^{n-1} - C(n,2) - 1.
Basis basis_B1(std::shared_ptr<const StratumTable> table,
               std::shared_ptr<const RelationSpace> relations);

// The 16-element H^{2,2} basis of the three-fold (n = 6), in the fixed
// published order Z_1..Z_16.
Basis basis_B2_X3(std::shared_ptr<const StratumTable> table,
                  std::shared_ptr<const RelationSpace> relations);

std::vector<Rat> reduce_to_basis(const ClassVector& v, const Basis& b);

// Number of ramified entries leading the B1 ordering: 2^{n-2} - n + 1.
int b1_ramified_count(int n);
// Full B1 length: 2^{n-1} - C(n,2) - 1.
int b1_length(int n);

// Bundled immutable context for one (n, k): enumeration, relation space,
// default basis (B1 for k=1 at n>=5, B2X3 at (6,2), Auto otherwise).
// Safe for unrestricted concurrent reads.
class Context {
 public:
  static std::shared_ptr<const Context> build(int n, int k, const Limits& limits = {});
  // Build with a JSON cache directory: load "keel-n{n}-k{k}.v1.json" when
  // present, compute and write it otherwise.
  static std::shared_ptr<const Context> build_cached(int n, int k, const std::string& cache_dir,
                                                     const Limits& limits = {});

  int n() const { return table_->n(); }
  int k() const { return table_->k(); }
  int dim() const { return relations_->corank(); }
  const StratumTable& table() const { return *table_; }
  std::shared_ptr<const StratumTable> table_ptr() const { return table_; }
  const RelationSpace& relations() const { return *relations_; }
  std::shared_ptr<const RelationSpace> relations_ptr() const { return relations_; }
  const Basis& basis() const { return basis_; }

  nlohmann::json to_json() const;

 private:
  Context() = default;
  std::shared_ptr<const StratumTable> table_;
  std::shared_ptr<const RelationSpace> relations_;
  Basis basis_;
};

}  // namespace moddeg::keel
