#include "moddeg/keel.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "moddeg/errors.hpp"

namespace moddeg::keel {

using combinat::DivisorTable;
using combinat::Mask;
using combinat::PointSubset;
using combinat::full_mask;
using combinat::label_bit;

// ---------------------------------------------------------------- strata

StratumTable::StratumTable(int n, int k)
    : n_(n), k_(k), divtable_(std::make_shared<DivisorTable>(n)) {
  strata_ = combinat::enumerate_strata(n, k);
  std::vector<int> key;
  for (int i = 0; i < count(); ++i) {
    key.clear();
    for (const auto& d : strata_[i].divisors) key.push_back(divtable_->index(d));
    index_.emplace(key, i);
  }
}

int StratumTable::index(const Stratum& z) const {
  std::vector<int> key;
  key.reserve(z.divisors.size());
  for (const auto& d : z.divisors) key.push_back(divtable_->index(d));
  auto it = index_.find(key);
  if (it == index_.end())
    throw Error("stratum " + z.to_string() + " not in the codim-" + std::to_string(k_) +
                " enumeration at n=" + std::to_string(n_));
  return it->second;
}

void ClassVector::add(int idx, const Rat& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = coords.emplace(idx, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) coords.erase(it);
  }
}

ClassVector ClassVector::unit(int n, int k, int idx) {
  ClassVector v{n, k, {}};
  v.coords.emplace(idx, 1);
  return v;
}

// ------------------------------------------------------------- echelon

// Incremental exact echelonization with a dense scratch row. Rows are
// inserted in generation order; the pivot of a row is its leading column
// after reduction, which makes the pivot set deterministic. A final
// back-substitution pass produces the RREF.
class EchelonBuilder {
 public:
  explicit EchelonBuilder(int num_cols) : m_(num_cols), dense_(num_cols) {}

  void insert(const RelationSpace::SparseRow& row) {
    for (auto& [c, q] : row) dense_[c] += q;
    for (int col = 0; col < m_; ++col) {
      if (sgn(dense_[col]) == 0) continue;
      auto it = pivot_row_.find(col);
      if (it == pivot_row_.end()) {
        // new pivot: normalize and store the tail
        RelationSpace::SparseRow stored;
        const Rat lead = dense_[col];
        for (int j = col; j < m_; ++j) {
          if (sgn(dense_[j]) != 0) {
            stored.emplace_back(j, dense_[j] / lead);
            dense_[j] = 0;
          }
        }
        pivot_row_.emplace(col, std::move(stored));
        return;
      }
      const Rat f = dense_[col];
      for (const auto& [j, q] : it->second) dense_[j] -= f * q;
    }
    // row reduced to zero
  }

  RelationSpace finish(int n, int k) {
    // back-substitute: eliminate later pivots from each row, descending
    for (auto it = pivot_row_.rbegin(); it != pivot_row_.rend(); ++it) {
      RelationSpace::SparseRow& row = it->second;
      for (auto& [c, q] : row) dense_[c] = q;
      bool changed = false;
      for (const auto& [c, q] : row) {
        if (c == it->first || sgn(dense_[c]) == 0) continue;
        auto p = pivot_row_.find(c);
        if (p == pivot_row_.end()) continue;
        changed = true;
        const Rat f = dense_[c];
        for (const auto& [j, qq] : p->second) dense_[j] -= f * qq;
      }
      if (changed) {
        RelationSpace::SparseRow reduced;
        for (int j = it->first; j < m_; ++j) {
          if (sgn(dense_[j]) != 0) {
            reduced.emplace_back(j, dense_[j]);
            dense_[j] = 0;
          }
        }
        row = std::move(reduced);
      } else {
        for (const auto& [c, q] : row) dense_[c] = 0;
      }
    }

    RelationSpace out;
    out.n_ = n;
    out.k_ = k;
    out.num_strata_ = m_;
    out.pivot_pos_.assign(m_, -1);
    out.free_pos_.assign(m_, -1);
    for (auto& [col, row] : pivot_row_) {
      out.pivot_pos_[col] = static_cast<int>(out.rows_.size());
      out.pivot_cols_.push_back(col);
      out.rows_.push_back(std::move(row));
    }
    for (int c = 0; c < m_; ++c)
      if (out.pivot_pos_[c] < 0) {
        out.free_pos_[c] = static_cast<int>(out.free_cols_.size());
        out.free_cols_.push_back(c);
      }
    return out;
  }

 private:
  int m_;
  std::vector<Rat> dense_;
  std::map<int, RelationSpace::SparseRow> pivot_row_;
};

const RelationSpace::SparseRow& RelationSpace::row_for_pivot(int col) const {
  return rows_[pivot_pos_[col]];
}

std::vector<Rat> RelationSpace::residual(const ClassVector& v) const {
  if (v.n != n_ || v.k != k_) throw Error("class vector (n,k) mismatch");
  std::vector<Rat> out(free_cols_.size());
  // RREF rows touch only their pivot and free columns, so one pass suffices.
  for (const auto& [col, q] : v.coords) {
    if (pivot_pos_[col] >= 0) {
      for (const auto& [j, qq] : rows_[pivot_pos_[col]]) {
        if (j == col) continue;
        out[free_pos_[j]] -= q * qq;
      }
    } else {
      out[free_pos_[col]] += q;
    }
  }
  return out;
}

// ------------------------------------------------- relation generation

namespace {

// Sum over divisors {x1,x2}cupU with {y1,y2} on the other side, signed.
void add_partition_sum(const DivisorTable& dt, int x1, int x2, int y1, int y2, int sign,
                       std::map<int, Rat>& acc) {
  const int n = dt.n();
  const Mask fixed = label_bit(x1) | label_bit(x2);
  const Mask banned = label_bit(y1) | label_bit(y2);
  Mask rest = full_mask(n) & ~(fixed | banned);
  // iterate all subsets of `rest`
  Mask u = 0;
  for (;;) {
    const Mask s = fixed | u;
    const BoundaryDivisor d = combinat::canonicalize_divisor(PointSubset{n, s});
    auto [it, inserted] = acc.emplace(dt.index(d), sign);
    if (!inserted) {
      it->second += sign;
      if (sgn(it->second) == 0) acc.erase(it);
    }
    if (u == rest) break;
    u = (u - rest) & rest;  // next subset
  }
}

RelationSpace::SparseRow to_sparse(const std::map<int, Rat>& acc) {
  RelationSpace::SparseRow row;
  row.reserve(acc.size());
  for (const auto& [c, q] : acc) row.emplace_back(c, q);
  return row;
}

// The two generating relations attached to one 4-point subset a<b<c<d:
//   sum(ab|cd) - sum(ac|bd)   and   sum(ab|cd) - sum(ad|bc).
std::vector<RelationSpace::SparseRow> quadruple_relations(const DivisorTable& dt, int a, int b,
                                                          int c, int d) {
  std::vector<RelationSpace::SparseRow> out;
  {
    std::map<int, Rat> acc;
    add_partition_sum(dt, a, b, c, d, +1, acc);
    add_partition_sum(dt, a, c, b, d, -1, acc);
    out.push_back(to_sparse(acc));
  }
  {
    std::map<int, Rat> acc;
    add_partition_sum(dt, a, b, c, d, +1, acc);
    add_partition_sum(dt, a, d, b, c, -1, acc);
    out.push_back(to_sparse(acc));
  }
  return out;
}

template <typename Fn>
void for_each_quadruple(int n, Fn&& fn) {
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d) fn(a, b, c, d);
}

}  // namespace

RelationSpace degree1_relations(int n) {
  DivisorTable dt(n);
  EchelonBuilder builder(dt.count());
  for_each_quadruple(n, [&](int a, int b, int c, int d) {
    for (auto& row : quadruple_relations(dt, a, b, c, d)) builder.insert(row);
  });
  return builder.finish(n, 1);
}

ClassVector square_reduce(const StratumTable& codim2, const BoundaryDivisor& d) {
  if (codim2.k() != 2 || codim2.n() != d.n) throw Error("square_reduce needs the codim-2 table");
  const int n = d.n;
  const auto in_rep = PointSubset{n, d.rep}.labels();
  const auto out_rep = PointSubset{n, Mask(full_mask(n) & ~d.rep)}.labels();
  const int i = in_rep[0], j = in_rep[1];   // two smallest inside
  const int k = out_rep[0], l = out_rep[1];  // two smallest outside

  ClassVector v{n, 2, {}};
  auto accumulate = [&](int x1, int x2, int y1, int y2, int sign) {
    const Mask fixed = label_bit(x1) | label_bit(x2);
    const Mask banned = label_bit(y1) | label_bit(y2);
    const Mask rest = full_mask(n) & ~(fixed | banned);
    Mask u = 0;
    for (;;) {
      const BoundaryDivisor e = combinat::canonicalize_divisor(PointSubset{n, Mask(fixed | u)});
      if (e != d && combinat::compatible(e, d)) {
        Stratum z;
        z.divisors = {d, e};
        if (e < d) std::swap(z.divisors[0], z.divisors[1]);
        v.add(codim2.index(z), sign);
      }
      if (u == rest) break;
      u = (u - rest) & rest;
    }
  };
  // [D]^2 = sum_{ik|jl} [D^S][D] - sum_{ij|kl, S != rep(D)} [D^S][D]
  accumulate(i, k, j, l, +1);
  accumulate(i, j, k, l, -1);
  return v;
}

RelationSpace degree2_relations(int n, const Limits& limits) {
  if (n < 5) throw UnsupportedDegree("degree-2 relations need n >= 5");
  StratumTable codim2(n, 2);
  if (codim2.count() > limits.max_strata)
    throw ResourceError("codim-2 strata count " + std::to_string(codim2.count()) +
                        " exceeds the configured ceiling " + std::to_string(limits.max_strata));
  const DivisorTable& dt = codim2.divisors();

  // cache of square reductions, one per divisor
  std::vector<ClassVector> squares;
  squares.reserve(dt.count());
  for (int t = 0; t < dt.count(); ++t) squares.push_back(square_reduce(codim2, dt.at(t)));

  EchelonBuilder builder(codim2.count());
  std::map<int, Rat> acc;
  for_each_quadruple(n, [&](int a, int b, int c, int d) {
    for (auto& rel : quadruple_relations(dt, a, b, c, d)) {
      for (int t = 0; t < dt.count(); ++t) {
        const BoundaryDivisor& dT = dt.at(t);
        acc.clear();
        auto put = [&](int idx, const Rat& q) {
          auto [it, inserted] = acc.emplace(idx, q);
          if (!inserted) {
            it->second += q;
            if (sgn(it->second) == 0) acc.erase(it);
          }
        };
        for (const auto& [sidx, coeff] : rel) {
          if (sidx == t) {
            for (const auto& [zidx, sq] : squares[t].coords) put(zidx, coeff * sq);
          } else if (dt.compatible_idx(sidx, t)) {
            const BoundaryDivisor& dS = dt.at(sidx);
            Stratum z;
            z.divisors = {dS, dT};
            if (dT < dS) std::swap(z.divisors[0], z.divisors[1]);
            put(codim2.index(z), coeff);
          }
          // incompatible products vanish
        }
        if (!acc.empty()) builder.insert(to_sparse(acc));
      }
    }
  });
  return builder.finish(n, 2);
}

// --------------------------------------------------------------- bases

Basis make_basis(BasisTag tag, std::vector<int> strata_idx,
                 std::shared_ptr<const StratumTable> table,
                 std::shared_ptr<const RelationSpace> relations) {
  const int d = relations->corank();
  if (static_cast<int>(strata_idx.size()) != d)
    throw InconsistentClass("basis size " + std::to_string(strata_idx.size()) +
                            " differs from quotient dimension " + std::to_string(d));
  RatMatrix m(d, d);
  for (int j = 0; j < d; ++j) {
    const auto col = relations->residual(ClassVector::unit(table->n(), table->k(), strata_idx[j]));
    for (int i = 0; i < d; ++i) m.at(i, j) = col[i];
  }
  Basis b;
  b.tag_ = tag;
  b.strata_idx_ = std::move(strata_idx);
  b.table_ = std::move(table);
  b.relations_ = std::move(relations);
  try {
    b.inv_ = std::make_shared<const RatMatrix>(m.inverse());
  } catch (const InconsistentClass&) {
    throw InconsistentClass("proposed basis is dependent modulo the relation space");
  }
  return b;
}

int Basis::n() const { return table_->n(); }
int Basis::k() const { return table_->k(); }
const Stratum& Basis::stratum(int j) const { return table_->at(strata_idx_[j]); }

std::vector<Rat> Basis::reduce(const ClassVector& v) const {
  return *inv_ * relations_->residual(v);
}

std::vector<Rat> reduce_to_basis(const ClassVector& v, const Basis& b) { return b.reduce(v); }

Basis basis_auto(std::shared_ptr<const StratumTable> table,
                 std::shared_ptr<const RelationSpace> relations) {
  return make_basis(BasisTag::Auto, relations->free_cols(), std::move(table), std::move(relations));
}

int b1_ramified_count(int n) { return (1 << (n - 2)) - n + 1; }
int b1_length(int n) { return (1 << (n - 1)) - n * (n - 1) / 2 - 1; }

Basis basis_B1(std::shared_ptr<const StratumTable> table,
               std::shared_ptr<const RelationSpace> relations) {
  const int n = table->n();
  if (table->k() != 1) throw UnsupportedDegree("B1 is a degree-1 basis");
  if (n < 5) throw UnsupportedDegree("B1 needs n >= 5");
  const DivisorTable& dt = table->divisors();

  std::vector<int> ramified, unramified;
  ramified.push_back(dt.index(combinat::canonicalize_divisor(PointSubset::of(n, {1, 3}))));
  for (int i = 0; i < dt.count(); ++i) {
    const BoundaryDivisor& d = dt.at(i);
    if (d.size() <= 2) continue;  // only {p1,p3} enters from size 2
    (d.ramified() ? ramified : unramified).push_back(i);
  }
  if (static_cast<int>(ramified.size()) != b1_ramified_count(n))
    throw InconsistentClass("B1 ramified block has unexpected size");
  std::vector<int> idx = std::move(ramified);
  idx.insert(idx.end(), unramified.begin(), unramified.end());
  if (static_cast<int>(idx.size()) != b1_length(n))
    throw InconsistentClass("B1 has unexpected length");
  return make_basis(BasisTag::B1, std::move(idx), std::move(table), std::move(relations));
}

Basis basis_B2_X3(std::shared_ptr<const StratumTable> table,
                  std::shared_ptr<const RelationSpace> relations) {
  if (table->n() != 6 || table->k() != 2)
    throw UnsupportedDegree("the fixed H^{2,2} basis lives at n=6, k=2");
  // index sets S_1..S_18 of the published ordering
  static const std::vector<std::vector<int>> kSets = {
      {1, 3, 4, 5}, {1, 3, 4, 6}, {1, 3, 5, 6}, {1, 4, 5, 6}, {1, 3},    {1, 3, 4},
      {1, 3, 5},    {1, 3, 6},    {1, 4, 5},    {1, 4, 6},    {1, 5, 6}, {1, 2},
      {1, 2, 3},    {1, 2, 4},    {1, 2, 5},    {1, 2, 6},    {1, 4},    {3, 4}};
  static const std::vector<std::pair<int, int>> kPairs = {
      {1, 5},  {1, 7},  {1, 9},  {2, 5},  {2, 6},  {2, 8},  {2, 10}, {3, 5},
      {3, 11}, {4, 17}, {5, 7},  {1, 16}, {2, 15}, {3, 14}, {4, 13}, {12, 18}};
  std::vector<int> idx;
  idx.reserve(kPairs.size());
  for (const auto& [a, b] : kPairs) {
    Mask ma = 0, mb = 0;
    for (int l : kSets[a - 1]) ma |= label_bit(l);
    for (int l : kSets[b - 1]) mb |= label_bit(l);
    Stratum z;
    z.divisors = {combinat::canonicalize_divisor(PointSubset{6, ma}),
                  combinat::canonicalize_divisor(PointSubset{6, mb})};
    if (z.divisors[1] < z.divisors[0]) std::swap(z.divisors[0], z.divisors[1]);
    idx.push_back(table->index(z));
  }
  return make_basis(BasisTag::B2X3, std::move(idx), std::move(table), std::move(relations));
}

// -------------------------------------------------------- serialization

namespace {

nlohmann::json stratum_descriptor(const Stratum& z) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : z.divisors) out.push_back(d.subset().labels());
  return out;
}

constexpr int kCacheVersion = 1;

}  // namespace

nlohmann::json RelationSpace::to_json(const StratumTable& table) const {
  nlohmann::json j;
  j["version"] = kCacheVersion;
  j["n"] = n_;
  j["k"] = k_;
  nlohmann::json strata = nlohmann::json::array();
  for (const auto& z : table.strata()) strata.push_back(stratum_descriptor(z));
  j["strata"] = std::move(strata);
  j["pivot_cols"] = pivot_cols_;
  nlohmann::json rows = nlohmann::json::array();
  for (int p = 0; p < rank(); ++p) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& [c, q] : rows_[p]) {
      row.push_back(nlohmann::json::array(
          {c, q.get_num().get_str(), q.get_den().get_str()}));
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

RelationSpace RelationSpace::from_json(const nlohmann::json& j, const StratumTable& table) {
  if (!j.contains("version") || j["version"].get<int>() != kCacheVersion)
    throw ParseError("relation cache: unsupported version");
  if (j["n"].get<int>() != table.n() || j["k"].get<int>() != table.k())
    throw ParseError("relation cache: (n,k) mismatch");
  const auto& strata = j["strata"];
  if (static_cast<int>(strata.size()) != table.count())
    throw ParseError("relation cache: strata ordering mismatch");
  for (int i = 0; i < table.count(); ++i)
    if (strata[i] != stratum_descriptor(table.at(i)))
      throw ParseError("relation cache: stratum " + std::to_string(i) + " differs");

  RelationSpace out;
  out.n_ = table.n();
  out.k_ = table.k();
  out.num_strata_ = table.count();
  out.pivot_cols_ = j["pivot_cols"].get<std::vector<int>>();
  out.pivot_pos_.assign(out.num_strata_, -1);
  out.free_pos_.assign(out.num_strata_, -1);
  for (std::size_t p = 0; p < out.pivot_cols_.size(); ++p)
    out.pivot_pos_[out.pivot_cols_[p]] = static_cast<int>(p);
  for (int c = 0; c < out.num_strata_; ++c)
    if (out.pivot_pos_[c] < 0) {
      out.free_pos_[c] = static_cast<int>(out.free_cols_.size());
      out.free_cols_.push_back(c);
    }
  for (const auto& row : j["rows"]) {
    SparseRow r;
    for (const auto& e : row) {
      mpz_class num(e[1].get<std::string>()), den(e[2].get<std::string>());
      Rat q(num, den);
      q.canonicalize();
      r.emplace_back(e[0].get<int>(), q);
    }
    out.rows_.push_back(std::move(r));
  }
  if (out.rows_.size() != out.pivot_cols_.size())
    throw ParseError("relation cache: row/pivot count mismatch");
  return out;
}

// -------------------------------------------------------------- context

std::shared_ptr<const Context> Context::build(int n, int k, const Limits& limits) {
  auto ctx = std::shared_ptr<Context>(new Context());
  ctx->table_ = std::make_shared<const StratumTable>(n, k);
  if (k == 1) {
    ctx->relations_ = std::make_shared<const RelationSpace>(degree1_relations(n));
    ctx->basis_ = (n >= 5) ? basis_B1(ctx->table_, ctx->relations_)
                           : basis_auto(ctx->table_, ctx->relations_);
  } else if (k == 2) {
    ctx->relations_ = std::make_shared<const RelationSpace>(degree2_relations(n, limits));
    ctx->basis_ = (n == 6) ? basis_B2_X3(ctx->table_, ctx->relations_)
                           : basis_auto(ctx->table_, ctx->relations_);
  } else {
    throw UnsupportedDegree("relation spaces are built for k in {1,2} only");
  }
  return ctx;
}

nlohmann::json Context::to_json() const { return relations_->to_json(*table_); }

std::shared_ptr<const Context> Context::build_cached(int n, int k, const std::string& cache_dir,
                                                     const Limits& limits) {
  if (k != 1 && k != 2) throw UnsupportedDegree("relation spaces are built for k in {1,2} only");
  if (cache_dir.empty()) return build(n, k, limits);
  namespace fs = std::filesystem;
  const fs::path path = fs::path(cache_dir) /
                        ("keel-n" + std::to_string(n) + "-k" + std::to_string(k) + ".v1.json");
  if (fs::exists(path)) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    auto ctx = std::shared_ptr<Context>(new Context());
    ctx->table_ = std::make_shared<const StratumTable>(n, k);
    ctx->relations_ =
        std::make_shared<const RelationSpace>(RelationSpace::from_json(j, *ctx->table_));
    if (k == 1)
      ctx->basis_ = (n >= 5) ? basis_B1(ctx->table_, ctx->relations_)
                             : basis_auto(ctx->table_, ctx->relations_);
    else
      ctx->basis_ = (n == 6 && k == 2) ? basis_B2_X3(ctx->table_, ctx->relations_)
                                       : basis_auto(ctx->table_, ctx->relations_);
    return ctx;
  }
  auto ctx = build(n, k, limits);
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << ctx->to_json().dump(1) << "\n";
  return ctx;
}

}  // namespace moddeg::keel
