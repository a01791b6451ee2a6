#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

/*
 * Combinatorics of the boundary of the moduli space of n marked rational
 * curves: point subsets, boundary divisors D^S (unordered stable partitions
 * {S, S^c}), codimension-k boundary strata (pairwise-compatible divisor
 * families), and the relabeling action of permutations.
 *
 * Conventions fixed here and relied on everywhere else:
 *   - points are labeled 1..n and stored as bitmasks, bit (i-1) <-> p_i;
 *   - the canonical side of a divisor is the side NOT containing p_2;
 *   - divisors are globally ordered by (|rep|, rep-as-integer) ascending;
 *   - a stratum keeps its divisors strictly increasing in that order.
 */

namespace moddeg::combinat {

using Mask = std::uint32_t;

constexpr int kMinPoints = 4;
constexpr int kMaxPoints = 16;  // subsets must fit one machine word

constexpr Mask full_mask(int n) { return (Mask{1} << n) - 1; }
constexpr Mask label_bit(int label) { return Mask{1} << (label - 1); }

struct PointSubset {
  int n = 0;
  Mask mask = 0;

  int size() const { return std::popcount(mask); }
  bool contains(int label) const { return (mask & label_bit(label)) != 0; }
  std::vector<int> labels() const;
  auto operator<=>(const PointSubset&) const = default;

  static PointSubset of(int n, std::initializer_list<int> labels);
};

struct BoundaryDivisor {
  int n = 0;
  Mask rep = 0;  // canonical side; never contains label 2

  int size() const { return std::popcount(rep); }
  PointSubset subset() const { return PointSubset{n, rep}; }
  // |S ∩ {p1,p2}| == 1; since rep avoids p2 this is just "p1 in rep".
  bool ramified() const { return (rep & label_bit(1)) != 0; }
  std::string to_string() const;  // e.g. "{1,3}"

  friend bool operator==(const BoundaryDivisor&, const BoundaryDivisor&) = default;
  friend bool operator<(const BoundaryDivisor& a, const BoundaryDivisor& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.rep < b.rep;
  }
};

struct Stratum {
  std::vector<BoundaryDivisor> divisors;  // strictly increasing, pairwise compatible

  int codim() const { return static_cast<int>(divisors.size()); }
  int ambient() const { return divisors.empty() ? 0 : divisors.front().n; }
  std::string to_string() const;

  friend bool operator==(const Stratum&, const Stratum&) = default;
  friend bool operator<(const Stratum& a, const Stratum& b) {
    return a.divisors < b.divisors;
  }
};

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);  // images[i-1] = rho(p_i)

  static Permutation identity(int n);
  // Disjoint-cycle notation on 1-based labels, e.g. "(1 3)(2 4 5)".
  // Omitted labels are fixed; whitespace-insensitive; "" and "()" are the
  // identity. Throws ParseError with the offending token and position.
  static Permutation from_cycles(const std::string& text, int n);

  int n() const { return static_cast<int>(images_.size()); }
  int apply(int label) const { return images_[label - 1]; }
  bool is_identity() const;

  Permutation inverse() const;
  Mask apply_to_mask(Mask m) const;  // {rho(x) : x in m}

  std::string cycles() const;  // canonical disjoint-cycle string, "()" for id

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

// (rho ∘ sigma)(i) = rho(sigma(i))
Permutation compose(const Permutation& rho, const Permutation& sigma);

// Representative of {S, S^c} not containing p_2. Throws StabilityError
// unless 2 <= |S| <= n-2.
BoundaryDivisor canonicalize_divisor(const PointSubset& s);

// Keel relation (3): true iff one of S⊆T, T⊆S, S⊆T^c, T^c⊆S holds for
// representatives; false means the classes multiply to zero.
bool compatible(const BoundaryDivisor& d, const BoundaryDivisor& e);

// All boundary divisors of the n-pointed space in the global ordering;
// there are 2^{n-1} - n - 1 of them.
std::vector<BoundaryDivisor> enumerate_divisors(int n);

// All codimension-k strata (size-k pairwise-compatible divisor families),
// lexicographically ordered by the global divisor ordering. 1 <= k <= n-3.
std::vector<Stratum> enumerate_strata(int n, int k);

// Pullback action of the relabeling automorphism: each side S becomes
// rho^{-1}(S), re-canonicalized and re-sorted.
BoundaryDivisor apply_permutation(const Permutation& rho, const BoundaryDivisor& d);
Stratum apply_permutation(const Permutation& rho, const Stratum& z);

// Immutable per-n index of the divisor enumeration.
class DivisorTable {
 public:
  explicit DivisorTable(int n);

  int n() const { return n_; }
  int count() const { return static_cast<int>(divisors_.size()); }
  const std::vector<BoundaryDivisor>& divisors() const { return divisors_; }
  const BoundaryDivisor& at(int idx) const { return divisors_[idx]; }
  int index(const BoundaryDivisor& d) const { return by_mask_[d.rep]; }
  bool compatible_idx(int i, int j) const { return compat_[i][j]; }

 private:
  int n_;
  std::vector<BoundaryDivisor> divisors_;
  std::vector<int> by_mask_;            // rep mask -> index
  std::vector<std::vector<bool>> compat_;
};

}  // namespace moddeg::combinat
