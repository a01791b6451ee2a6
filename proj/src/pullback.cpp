#include "moddeg/pullback.hpp"

#include <algorithm>

#include "moddeg/errors.hpp"

namespace moddeg::pullback {

using combinat::Stratum;
using keel::ClassVector;

namespace {

void check_supported(int n, int k) {
  const bool ok = (k == 1 && n >= 5 && n <= 9) || (k == 2 && n == 6);
  if (!ok)
    throw UnsupportedDegree("pullback pipeline supports (k=1, 5<=n<=9) and (k=2, n=6); got n=" +
                            std::to_string(n) + ", k=" + std::to_string(k));
}

Stratum permute_stratum(const Permutation& inv, const Stratum& z) {
  Stratum out;
  out.divisors.reserve(z.divisors.size());
  for (const auto& d : z.divisors)
    out.divisors.push_back(combinat::canonicalize_divisor(
        combinat::PointSubset{d.n, inv.apply_to_mask(d.rep)}));
  std::sort(out.divisors.begin(), out.divisors.end());
  return out;
}

}  // namespace

PullbackMatrix g_pullback(const Permutation& rho, const keel::Basis& basis) {
  if (rho.n() != basis.n()) throw Error("permutation n differs from basis n");
  const int d = basis.size();
  const Permutation inv = rho.inverse();
  RatMatrix m(d, d);
  for (int j = 0; j < d; ++j) {
    const Stratum image = permute_stratum(inv, basis.stratum(j));
    const auto col =
        basis.reduce(ClassVector::unit(basis.n(), basis.k(), basis.table().index(image)));
    for (int i = 0; i < d; ++i) m.at(i, j) = col[i];
  }
  return PullbackMatrix{MapKind::GRho, basis, std::move(m)};
}

PullbackMatrix s_pullback_H11(const keel::Basis& basis) {
  if (basis.tag() != keel::BasisTag::B1)
    throw UnsupportedDegree("diagonal degree-1 squaring pullback requires the B1 basis");
  const int d = basis.size();
  const int ram = keel::b1_ramified_count(basis.n());
  RatMatrix m(d, d);
  for (int j = 0; j < d; ++j) {
    const bool is_ram = basis.stratum(j).divisors[0].ramified();
    if (is_ram != (j < ram))
      throw InconsistentClass("B1 ramified block out of place at position " + std::to_string(j));
    m.at(j, j) = is_ram ? 2 : 1;
  }
  return PullbackMatrix{MapKind::SMap, basis, std::move(m)};
}

PullbackMatrix s_pullback_H22_X3(const keel::Basis& basis) {
  if (basis.tag() != keel::BasisTag::B2X3)
    throw UnsupportedDegree("the degree-2 squaring pullback is fixed on the Z_1..Z_16 basis");
  RatMatrix m(16, 16);
  for (int i = 0; i < 11; ++i) m.at(i, i) = 4;
  for (int i = 11; i < 15; ++i) m.at(i, i) = 2;
  m.at(15, 15) = 1;
  m.at(13, 15) = 1;  // s*[Z_16] = [Z_16] + [Z_14] + [Z_15]
  m.at(14, 15) = 1;
  return PullbackMatrix{MapKind::SMap, basis, std::move(m)};
}

long top_degree(int n) {
  if (n < combinat::kMinPoints || n > combinat::kMaxPoints)
    throw UnsupportedDegree("top degree defined for 4 <= n <= 16");
  return 1L << (n - 3);
}

std::shared_ptr<const DegreeContext> DegreeContext::create(int n, int k,
                                                           const std::string& cache_dir,
                                                           const keel::Limits& limits) {
  check_supported(n, k);
  auto out = std::shared_ptr<DegreeContext>(new DegreeContext());
  out->ctx_ = keel::Context::build_cached(n, k, cache_dir, limits);
  const keel::Basis& basis = out->ctx_->basis();
  out->s_ = (k == 1) ? s_pullback_H11(basis) : s_pullback_H22_X3(basis);
  if (k == 1) {
    out->s_diag_.resize(basis.size());
    for (int i = 0; i < basis.size(); ++i) out->s_diag_[i] = (i < keel::b1_ramified_count(n)) ? 2 : 1;
  }
  const int count = out->ctx_->table().count();
  out->stratum_coords_.reserve(count);
  for (int t = 0; t < count; ++t)
    out->stratum_coords_.push_back(basis.reduce(ClassVector::unit(n, k, t)));
  return out;
}

RatMatrix DegreeContext::g_matrix(const Permutation& rho) const {
  const keel::Basis& basis = ctx_->basis();
  if (rho.n() != basis.n()) throw Error("permutation n differs from context n");
  const int d = basis.size();
  const Permutation inv = rho.inverse();
  RatMatrix m(d, d);
  for (int j = 0; j < d; ++j) {
    const Stratum image = permute_stratum(inv, basis.stratum(j));
    const auto& col = stratum_coords_[ctx_->table().index(image)];
    for (int i = 0; i < d; ++i) m.at(i, j) = col[i];
  }
  return m;
}

RatMatrix DegreeContext::f_matrix(const Permutation& rho) const {
  RatMatrix g = g_matrix(rho);
  if (!s_diag_.empty()) {
    // s* is diagonal in B1: scale rows
    for (int i = 0; i < g.rows(); ++i) {
      if (s_diag_[i] == 1) continue;
      for (int j = 0; j < g.cols(); ++j)
        if (sgn(g.at(i, j)) != 0) g.at(i, j) *= s_diag_[i];
    }
    return g;
  }
  return s_.mat * g;
}

PullbackMatrix f_pullback(const Permutation& rho, const DegreeContext& ctx) {
  return PullbackMatrix{MapKind::FRho, ctx.basis(), ctx.f_matrix(rho)};
}

PullbackMatrix f_pullback(const Permutation& rho, int n, int k) {
  auto ctx = DegreeContext::create(n, k);
  return f_pullback(rho, *ctx);
}

nlohmann::json matrix_json(const PullbackMatrix& m) {
  nlohmann::json j;
  j["n"] = m.n();
  j["k"] = m.k();
  switch (m.kind) {
    case MapKind::GRho: j["map"] = "g"; break;
    case MapKind::SMap: j["map"] = "s"; break;
    case MapKind::FRho: j["map"] = "f"; break;
  }
  nlohmann::json basis = nlohmann::json::array();
  for (int i = 0; i < m.basis.size(); ++i) {
    nlohmann::json desc = nlohmann::json::array();
    for (const auto& d : m.basis.stratum(i).divisors) desc.push_back(d.subset().labels());
    basis.push_back(std::move(desc));
  }
  j["basis"] = std::move(basis);
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.mat.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int jj = 0; jj < m.mat.cols(); ++jj) row.push_back(m.mat.entry_string(i, jj));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace moddeg::pullback
