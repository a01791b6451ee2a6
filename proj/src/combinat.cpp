#include "moddeg/combinat.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "moddeg/errors.hpp"

namespace moddeg::combinat {

namespace {

void check_n(int n) {
  if (n < kMinPoints || n > kMaxPoints)
    throw UnsupportedDegree("point count n=" + std::to_string(n) + " outside [" +
                            std::to_string(kMinPoints) + "," + std::to_string(kMaxPoints) + "]");
}

}  // namespace

std::vector<int> PointSubset::labels() const {
  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

PointSubset PointSubset::of(int n, std::initializer_list<int> labels) {
  check_n(n);
  Mask m = 0;
  for (int l : labels) {
    if (l < 1 || l > n) throw Error("label " + std::to_string(l) + " out of 1.." + std::to_string(n));
    m |= label_bit(l);
  }
  return PointSubset{n, m};
}

std::string BoundaryDivisor::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int l : subset().labels()) {
    if (!first) os << ',';
    os << l;
    first = false;
  }
  os << '}';
  return os.str();
}

std::string Stratum::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& d : divisors) {
    if (!first) os << "∩";
    os << "D" << d.to_string();
    first = false;
  }
  return os.str();
}

BoundaryDivisor canonicalize_divisor(const PointSubset& s) {
  check_n(s.n);
  if ((s.mask & ~full_mask(s.n)) != 0)
    throw Error("subset mask has labels beyond n");
  const int sz = s.size();
  if (sz < 2 || sz > s.n - 2)
    throw StabilityError("subset " + BoundaryDivisor{s.n, s.mask}.to_string() +
                         " violates |S|,|S^c| >= 2 at n=" + std::to_string(s.n));
  Mask rep = s.contains(2) ? (full_mask(s.n) & ~s.mask) : s.mask;
  return BoundaryDivisor{s.n, rep};
}

bool compatible(const BoundaryDivisor& d, const BoundaryDivisor& e) {
  const Mask s = d.rep, t = e.rep;
  const Mask full = full_mask(d.n);
  return (s & ~t) == 0 ||         // S ⊆ T
         (t & ~s) == 0 ||         // T ⊆ S
         (s & t) == 0 ||          // S ⊆ T^c
         (s | t) == full;         // T^c ⊆ S
}

std::vector<BoundaryDivisor> enumerate_divisors(int n) {
  check_n(n);
  std::vector<BoundaryDivisor> out;
  out.reserve((std::size_t{1} << (n - 1)) - n - 1);
  for (Mask m = 0; m <= full_mask(n); ++m) {
    if (m & label_bit(2)) continue;
    const int sz = std::popcount(m);
    if (sz < 2 || sz > n - 2) continue;
    out.push_back(BoundaryDivisor{n, m});
  }
  std::sort(out.begin(), out.end());
  return out;
}

DivisorTable::DivisorTable(int n) : n_(n), divisors_(enumerate_divisors(n)) {
  by_mask_.assign(std::size_t{1} << n, -1);
  for (int i = 0; i < count(); ++i) by_mask_[divisors_[i].rep] = i;
  compat_.assign(count(), std::vector<bool>(count(), false));
  for (int i = 0; i < count(); ++i)
    for (int j = 0; j < count(); ++j)
      compat_[i][j] = compatible(divisors_[i], divisors_[j]);
}

std::vector<Stratum> enumerate_strata(int n, int k) {
  check_n(n);
  if (k < 1 || k > n - 3)
    throw UnsupportedDegree("codimension k=" + std::to_string(k) + " outside 1.." +
                            std::to_string(n - 3) + " at n=" + std::to_string(n));
  DivisorTable table(n);
  const int m = table.count();
  std::vector<Stratum> out;
  std::vector<int> chosen;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(chosen.size()) == k) {
      Stratum z;
      z.divisors.reserve(k);
      for (int idx : chosen) z.divisors.push_back(table.at(idx));
      out.push_back(std::move(z));
      return;
    }
    const int need = k - static_cast<int>(chosen.size());
    for (int i = next; i + need <= m; ++i) {
      bool ok = true;
      for (int idx : chosen)
        if (!table.compatible_idx(idx, i)) { ok = false; break; }
      if (ok) {
        chosen.push_back(i);
        self(self, i + 1);
        chosen.pop_back();
      }
    }
  };
  rec(rec, 0);
  return out;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int n = static_cast<int>(images_.size());
  check_n(n);
  std::vector<bool> seen(n + 1, false);
  for (int v : images_) {
    if (v < 1 || v > n || seen[v]) throw Error("images are not a bijection of 1..n");
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  check_n(n);
  std::vector<int> im(n);
  std::iota(im.begin(), im.end(), 1);
  return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
  for (int i = 1; i <= n(); ++i)
    if (apply(i) != i) return false;
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<int> im(images_.size());
  for (int i = 1; i <= n(); ++i) im[apply(i) - 1] = i;
  return Permutation(std::move(im));
}

Mask Permutation::apply_to_mask(Mask m) const {
  Mask out = 0;
  while (m) {
    const int bit = std::countr_zero(m);
    m &= m - 1;
    out |= label_bit(apply(bit + 1));
  }
  return out;
}

Permutation compose(const Permutation& rho, const Permutation& sigma) {
  if (rho.n() != sigma.n()) throw Error("composing permutations of different n");
  std::vector<int> im(rho.n());
  for (int i = 1; i <= rho.n(); ++i) im[i - 1] = rho.apply(sigma.apply(i));
  return Permutation(std::move(im));
}

Permutation Permutation::from_cycles(const std::string& text, int n) {
  check_n(n);
  std::vector<int> im(n);
  std::iota(im.begin(), im.end(), 1);
  std::vector<bool> used(n + 1, false);

  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& what) {
    throw ParseError("cycle notation: " + what + " at position " + std::to_string(pos) +
                     " in \"" + text + "\"");
  };

  skip_ws();
  while (pos < text.size()) {
    if (text[pos] != '(') fail(std::string("expected '(' but found '") + text[pos] + "'");
    ++pos;
    std::vector<int> cycle;
    for (;;) {
      skip_ws();
      if (pos >= text.size()) fail("unterminated cycle");
      if (text[pos] == ')') { ++pos; break; }
      if (text[pos] == ',') { ++pos; continue; }
      if (!std::isdigit(static_cast<unsigned char>(text[pos])))
        fail(std::string("unexpected token '") + text[pos] + "'");
      int v = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos] - '0');
        ++pos;
      }
      if (v < 1 || v > n) fail("label " + std::to_string(v) + " outside 1.." + std::to_string(n));
      if (used[v]) fail("label " + std::to_string(v) + " repeated");
      used[v] = true;
      cycle.push_back(v);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i)
      im[cycle[i] - 1] = cycle[(i + 1) % cycle.size()];
    skip_ws();
  }
  return Permutation(std::move(im));
}

std::string Permutation::cycles() const {
  std::ostringstream os;
  std::vector<bool> seen(n() + 1, false);
  bool any = false;
  for (int i = 1; i <= n(); ++i) {
    if (seen[i] || apply(i) == i) continue;
    any = true;
    os << '(';
    int j = i;
    bool first = true;
    do {
      if (!first) os << ' ';
      os << j;
      seen[j] = true;
      j = apply(j);
      first = false;
    } while (j != i);
    os << ')';
  }
  return any ? os.str() : "()";
}

BoundaryDivisor apply_permutation(const Permutation& rho, const BoundaryDivisor& d) {
  if (rho.n() != d.n) throw Error("permutation and divisor have different n");
  const Permutation inv = rho.inverse();
  return canonicalize_divisor(PointSubset{d.n, inv.apply_to_mask(d.rep)});
}

Stratum apply_permutation(const Permutation& rho, const Stratum& z) {
  if (z.divisors.empty()) return z;
  if (rho.n() != z.ambient()) throw Error("permutation and stratum have different n");
  const Permutation inv = rho.inverse();
  Stratum out;
  out.divisors.reserve(z.divisors.size());
  for (const auto& d : z.divisors)
    out.divisors.push_back(canonicalize_divisor(PointSubset{d.n, inv.apply_to_mask(d.rep)}));
  std::sort(out.divisors.begin(), out.divisors.end());
  // relabeling preserves distinctness and compatibility
  return out;
}

}  // namespace moddeg::combinat
