#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <algorithm>
#include <set>
#include <vector>

#include "moddeg/combinat.hpp"
#include "moddeg/ratlin.hpp"
#include "moddeg/spectral.hpp"

namespace oracles {

// ---------------------------------------------------------------------
// Trivalent trees with n labeled leaves, generated by inserting leaf i
// into every edge of every tree on i-1 leaves. Each tree is produced
// exactly once (removing the top leaf inverts the construction), so the
// multiset of results is the set of zero-dimensional boundary strata.
// Each internal edge cuts the leaves into a stable bipartition; the
// stratum is the family of those bipartitions.
// ---------------------------------------------------------------------

struct LeafTree {
  // adjacency over nodes; leaves are nodes 0..n-1 (labels 1..n),
  // internal nodes follow
  std::vector<std::vector<int>> adj;
  int n_leaves = 0;

  static LeafTree initial() {
    // leaves 0,1,2 joined at internal node 3
    LeafTree t;
    t.n_leaves = 3;
    t.adj = {{3}, {3}, {3}, {0, 1, 2}};
    return t;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < static_cast<int>(adj.size()); ++u)
      for (int v : adj[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  // subdivide (u,v) with a new internal node and hang a new leaf off it;
  // the new leaf takes index n_leaves, internal nodes shift up by one
  LeafTree insert_leaf(int u, int v) const {
    LeafTree s;
    s.n_leaves = n_leaves + 1;
    auto remap = [&](int x) { return x < n_leaves ? x : x + 1; };
    s.adj.assign(adj.size() + 2, {});
    for (int a = 0; a < static_cast<int>(adj.size()); ++a)
      for (int b : adj[a]) s.adj[remap(a)].push_back(remap(b));
    const int leaf = n_leaves;
    const int mid = static_cast<int>(s.adj.size()) - 1;
    const int ru = remap(u), rv = remap(v);
    auto detach = [&](int a, int b) {
      auto& va = s.adj[a];
      va.erase(std::find(va.begin(), va.end(), b));
    };
    detach(ru, rv);
    detach(rv, ru);
    s.adj[ru].push_back(mid);
    s.adj[rv].push_back(mid);
    s.adj[mid] = {ru, rv, leaf};
    s.adj[leaf] = {mid};
    return s;
  }

  // leaves on the far side of edge (u,v), seen from u
  moddeg::combinat::Mask leaves_beyond(int u, int v) const {
    moddeg::combinat::Mask mask = 0;
    std::vector<int> stack = {v};
    std::vector<bool> seen(adj.size(), false);
    seen[u] = seen[v] = true;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (x < n_leaves) mask |= moddeg::combinat::Mask{1} << x;
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
    }
    return mask;
  }
};

inline void all_trivalent_trees(int n, std::vector<LeafTree>& out) {
  out.clear();
  std::vector<LeafTree> cur = {LeafTree::initial()};
  for (int leaves = 4; leaves <= n; ++leaves) {
    std::vector<LeafTree> next;
    for (const auto& t : cur)
      for (const auto& [u, v] : t.edges()) next.push_back(t.insert_leaf(u, v));
    cur = std::move(next);
  }
  out = std::move(cur);
}

// The set of top-codimension strata induced by trivalent trees, as sorted
// divisor-list keys.
inline std::set<std::vector<moddeg::combinat::BoundaryDivisor>> tree_strata(int n) {
  using namespace moddeg::combinat;
  std::vector<LeafTree> trees;
  all_trivalent_trees(n, trees);
  std::set<std::vector<BoundaryDivisor>> out;
  for (const auto& t : trees) {
    std::vector<BoundaryDivisor> divs;
    for (const auto& [u, v] : t.edges()) {
      if (u < t.n_leaves || v < t.n_leaves) continue;  // leaf edges are unstable
      divs.push_back(canonicalize_divisor(PointSubset{n, t.leaves_beyond(u, v)}));
    }
    std::sort(divs.begin(), divs.end());
    out.insert(divs);
  }
  return out;
}

inline long double_factorial(int m) {
  long r = 1;
  for (int i = m; i > 1; i -= 2) r *= i;
  return r;
}

// ---------------------------------------------------------------------
// Faddeev–LeVerrier characteristic polynomial over exact rationals:
// an independent O(d^4) oracle for the modular implementation.
// ---------------------------------------------------------------------
inline moddeg::spectral::IntPolynomial charpoly_faddeev(const moddeg::RatMatrix& a) {
  using moddeg::Rat;
  using moddeg::RatMatrix;
  const int d = a.rows();
  RatMatrix m = RatMatrix::identity(d);  // M_1 = I
  std::vector<Rat> c(d + 1);
  c[0] = 1;
  RatMatrix am(d, d);
  for (int kk = 1; kk <= d; ++kk) {
    am = a * m;
    Rat tr = 0;
    for (int i = 0; i < d; ++i) tr += am.at(i, i);
    c[kk] = -tr / kk;
    m = am;
    for (int i = 0; i < d; ++i) m.at(i, i) += c[kk];
  }
  std::vector<mpz_class> desc(d + 1);
  for (int i = 0; i <= d; ++i) {
    if (c[i].get_den() != 1) throw std::runtime_error("faddeev oracle: non-integer coefficient");
    desc[i] = c[i].get_num();
  }
  return moddeg::spectral::IntPolynomial::from_coeffs(std::move(desc));
}

// Naive dense RREF rank over exact rationals, for small relation matrices.
inline int dense_rank(std::vector<std::vector<moddeg::Rat>> rows) {
  using moddeg::Rat;
  if (rows.empty()) return 0;
  const int m = static_cast<int>(rows[0].size());
  int rank = 0;
  for (int col = 0; col < m && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (sgn(rows[r][col]) != 0) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    const Rat lead = rows[rank][col];
    for (int j = col; j < m; ++j) rows[rank][j] /= lead;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || sgn(rows[r][col]) == 0) continue;
      const Rat f = rows[r][col];
      for (int j = col; j < m; ++j) rows[r][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace oracles
