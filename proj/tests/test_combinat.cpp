#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "moddeg/combinat.hpp"
#include "moddeg/errors.hpp"
#include "oracles.hpp"

using namespace moddeg;
using namespace moddeg::combinat;

TEST_CASE("canonicalize picks the side without p2") {
  // n=6, {1,2,6} -> {3,4,5}
  auto d = canonicalize_divisor(PointSubset::of(6, {1, 2, 6}));
  CHECK(d.subset().labels() == std::vector<int>{3, 4, 5});
  // n=6, {1,3} stays
  auto e = canonicalize_divisor(PointSubset::of(6, {1, 3}));
  CHECK(e.subset().labels() == std::vector<int>{1, 3});
}

TEST_CASE("canonicalize rejects unstable subsets") {
  CHECK_THROWS_AS(canonicalize_divisor(PointSubset::of(5, {2})), StabilityError);
  CHECK_THROWS_AS(canonicalize_divisor(PointSubset::of(5, {1, 3, 4, 5})), StabilityError);
}

TEST_CASE("canonicalize is idempotent over the full enumeration") {
  for (int n = 5; n <= 8; ++n) {
    for (const auto& d : enumerate_divisors(n)) {
      CHECK(canonicalize_divisor(d.subset()) == d);
    }
  }
}

TEST_CASE("compatibility examples") {
  auto d34 = canonicalize_divisor(PointSubset::of(6, {3, 4}));
  auto d345 = canonicalize_divisor(PointSubset::of(6, {3, 4, 5}));
  auto d45 = canonicalize_divisor(PointSubset::of(6, {4, 5}));
  auto d13 = canonicalize_divisor(PointSubset::of(6, {1, 3}));
  CHECK(compatible(d34, d345));
  CHECK_FALSE(compatible(d34, d45));  // none of the four inclusions holds
  CHECK(compatible(d13, d13));
}

TEST_CASE("compatibility agrees with a four-condition check on raw sides") {
  // brute force over both representatives of both divisors
  for (int n : {5, 6, 7}) {
    const auto divs = enumerate_divisors(n);
    for (const auto& d : divs) {
      for (const auto& e : divs) {
        bool expected = false;
        const Mask full = full_mask(n);
        for (Mask s : {d.rep, Mask(full & ~d.rep)})
          for (Mask t : {e.rep, Mask(full & ~e.rep)})
            if ((s & ~t) == 0) expected = true;
        CHECK(compatible(d, e) == expected);
      }
    }
  }
}

TEST_CASE("compatible is symmetric and reflexive") {
  for (int n = 5; n <= 8; ++n) {
    const auto divs = enumerate_divisors(n);
    for (std::size_t i = 0; i < divs.size(); ++i) {
      CHECK(compatible(divs[i], divs[i]));
      for (std::size_t j = i + 1; j < divs.size(); ++j)
        CHECK(compatible(divs[i], divs[j]) == compatible(divs[j], divs[i]));
    }
  }
}

TEST_CASE("divisor counts match 2^{n-1} - n - 1") {
  CHECK(enumerate_divisors(5).size() == 10);
  CHECK(enumerate_divisors(6).size() == 25);
  CHECK(enumerate_divisors(7).size() == 56);
  CHECK(enumerate_divisors(8).size() == 119);
  CHECK(enumerate_divisors(9).size() == 246);
  for (int n = 5; n <= 9; ++n)
    CHECK(static_cast<long>(enumerate_divisors(n).size()) == (1L << (n - 1)) - n - 1);
}

TEST_CASE("divisor enumeration is sorted, unique and never contains p2") {
  for (int n = 5; n <= 8; ++n) {
    const auto divs = enumerate_divisors(n);
    for (std::size_t i = 0; i < divs.size(); ++i) {
      CHECK_FALSE(divs[i].subset().contains(2));
      if (i) CHECK(divs[i - 1] < divs[i]);
    }
  }
}

TEST_CASE("strata counts") {
  CHECK(enumerate_strata(6, 1).size() == 25);
  CHECK(enumerate_strata(6, 2).size() == 105);
  CHECK(enumerate_strata(7, 2).size() == 490);
  CHECK(enumerate_strata(7, 3).size() == 1260);
  CHECK(enumerate_strata(8, 2).size() == 1918);
}

TEST_CASE("top-codimension strata match the trivalent-tree oracle") {
  for (int n : {5, 6, 7}) {
    const auto strata = enumerate_strata(n, n - 3);
    CHECK(static_cast<long>(strata.size()) == oracles::double_factorial(2 * n - 5));
    std::set<std::vector<BoundaryDivisor>> got;
    for (const auto& z : strata) got.insert(z.divisors);
    CHECK(got == oracles::tree_strata(n));
  }
}

TEST_CASE("strata are lexicographically sorted families of compatible divisors") {
  const auto strata = enumerate_strata(6, 2);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const auto& z = strata[i];
    REQUIRE(z.divisors.size() == 2);
    CHECK(z.divisors[0] < z.divisors[1]);
    CHECK(compatible(z.divisors[0], z.divisors[1]));
    if (i) CHECK(strata[i - 1] < strata[i]);
  }
}

TEST_CASE("permutation parsing and printing") {
  auto rho = Permutation::from_cycles("(1 3)(2 4 5)", 5);
  CHECK(rho.apply(1) == 3);
  CHECK(rho.apply(3) == 1);
  CHECK(rho.apply(2) == 4);
  CHECK(rho.apply(4) == 5);
  CHECK(rho.apply(5) == 2);
  CHECK(rho.cycles() == "(1 3)(2 4 5)");

  CHECK(Permutation::from_cycles("", 6).is_identity());
  CHECK(Permutation::from_cycles("()", 6).is_identity());
  CHECK(Permutation::from_cycles("( 1  3 ) ( 2 4 5 )", 5) == rho);
  CHECK(Permutation::from_cycles("(6 7)", 7).cycles() == "(6 7)");

  CHECK_THROWS_AS(Permutation::from_cycles("(1 3", 5), ParseError);
  CHECK_THROWS_AS(Permutation::from_cycles("(1 9)", 5), ParseError);
  CHECK_THROWS_AS(Permutation::from_cycles("(1 2)(2 3)", 5), ParseError);
  CHECK_THROWS_AS(Permutation::from_cycles("1 2 3", 5), ParseError);
}

TEST_CASE("compose and inverse") {
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> a(6), b(6);
    std::iota(a.begin(), a.end(), 1);
    std::iota(b.begin(), b.end(), 1);
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    Permutation rho(a), sigma(b);
    CHECK(compose(rho, rho.inverse()).is_identity());
    CHECK(compose(rho.inverse(), rho).is_identity());
    const auto rs = compose(rho, sigma);
    for (int i = 1; i <= 6; ++i) CHECK(rs.apply(i) == rho.apply(sigma.apply(i)));
  }
}

TEST_CASE("permutation action on strata") {
  // identity fixes everything
  const auto strata = enumerate_strata(6, 2);
  const auto id = Permutation::identity(6);
  for (const auto& z : strata) CHECK(apply_permutation(id, z) == z);

  // (1 3) fixes D^{1,3}
  auto d13 = canonicalize_divisor(PointSubset::of(6, {1, 3}));
  Stratum z13{{d13}};
  CHECK(apply_permutation(Permutation::from_cycles("(1 3)", 6), z13) == z13);

  // rho = (3 4 5): rho^{-1} maps 3->5, 4->3, so {3,4} -> {5,3}
  auto rho = Permutation::from_cycles("(3 4 5)", 6);
  Stratum z34{{canonicalize_divisor(PointSubset::of(6, {3, 4}))}};
  Stratum expect{{canonicalize_divisor(PointSubset::of(6, {3, 5}))}};
  CHECK(apply_permutation(rho, z34) == expect);
}

TEST_CASE("contravariance of the stratum action") {
  std::mt19937 rng(7);
  const auto strata = enumerate_strata(6, 2);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<int> a(6), b(6);
    std::iota(a.begin(), a.end(), 1);
    std::iota(b.begin(), b.end(), 1);
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    Permutation rho(a), sigma(b);
    const auto rs = compose(rho, sigma);
    for (const auto& z : strata)
      CHECK(apply_permutation(rs, z) == apply_permutation(sigma, apply_permutation(rho, z)));
  }
}

TEST_CASE("permuted strata remain valid (sorted, compatible)") {
  const auto strata = enumerate_strata(6, 2);
  const auto rho = Permutation::from_cycles("(1 2 3 4 5 6)", 6);
  for (const auto& z : strata) {
    const auto w = apply_permutation(rho, z);
    REQUIRE(w.divisors.size() == 2);
    CHECK(w.divisors[0] < w.divisors[1]);
    CHECK(compatible(w.divisors[0], w.divisors[1]));
  }
}
