#include "moddeg/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "moddeg/errors.hpp"
#include "moddeg/embedded_tables.hpp"

namespace moddeg::verify {

using combinat::Permutation;
using spectral::IntPolynomial;

// ------------------------------------------------------------- fixtures

namespace {

std::map<int, int> parse_int_map(const nlohmann::json& j) {
  std::map<int, int> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[std::stoi(it.key())] = it.value().get<int>();
  return out;
}

std::map<int, long> parse_long_map(const nlohmann::json& j) {
  std::map<int, long> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[std::stoi(it.key())] = it.value().get<long>();
  return out;
}

LambdaEntry parse_entry(const nlohmann::json& j) {
  LambdaEntry e;
  e.approx = j.at("approx").get<double>();
  e.min_poly = IntPolynomial::parse(j.at("min_poly").get<std::string>());
  if (j.contains("note")) e.note = j["note"].get<std::string>();
  return e;
}

}  // namespace

std::vector<const TableRecord*> TableSet::table(const std::string& table_id) const {
  std::vector<const TableRecord*> out;
  for (const auto& r : records)
    if (r.table_id == table_id) out.push_back(&r);
  return out;
}

std::vector<double> TableSet::known_values(int n, int k) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.n != n) continue;
    auto it = r.by_k.find(k);
    if (it != r.by_k.end()) out.push_back(it->second.approx);
  }
  return out;
}

TableSet parse_tables(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("reference tables: ") + e.what());
  }
  TableSet out;
  out.version = j.at("version").get<int>();
  for (auto& [table_id, tj] : j.at("tables").items()) {
    const int n = tj.at("n").get<int>();
    out.total_maps[table_id] = tj.at("total_maps").get<long>();
    for (const auto& row : tj.at("rows")) {
      TableRecord rec;
      rec.id = row.at("id").get<std::string>();
      rec.table_id = table_id;
      rec.n = n;
      rec.cycles = row.at("cycles").get<std::string>();
      if (row.contains("lambda1")) rec.by_k[1] = parse_entry(row["lambda1"]);
      if (row.contains("lambda2")) rec.by_k[2] = parse_entry(row["lambda2"]);
      out.records.push_back(std::move(rec));
    }
  }
  out.dims_k1 = parse_int_map(j.at("cohomology_dims").at("k1"));
  out.dims_k2 = parse_int_map(j.at("cohomology_dims").at("k2"));
  out.divisor_counts = parse_long_map(j.at("divisor_counts"));
  out.strata_counts_k2 = parse_long_map(j.at("strata_counts_k2"));
  out.strata_counts_k3 = parse_long_map(j.at("strata_counts_k3"));
  out.top_strata_counts = parse_long_map(j.at("top_strata_counts"));
  for (const auto& a : j.at("anomalies")) out.anomaly_notes.push_back(a.at("note").get<std::string>());

  // self-consistency of the embedded data
  for (const auto& rec : out.records) {
    Permutation::from_cycles(rec.cycles, rec.n);  // must parse
    for (const auto& [k, entry] : rec.by_k) {
      const double root = spectral::max_root_modulus(entry.min_poly);
      if (std::abs(root - entry.approx) > kMatchTol)
        throw Error("reference record " + rec.id + " (k=" + std::to_string(k) +
                    "): dominant root " + std::to_string(root) +
                    " does not match quoted value " + std::to_string(entry.approx));
    }
  }
  return out;
}

TableSet load_builtin() { return parse_tables(detail::kEmbeddedTables); }

TableSet load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open reference tables: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tables(buf.str());
}

// ------------------------------------------------------------ iteration

std::vector<Permutation> all_permutations(int n) {
  std::vector<int> im(n);
  std::iota(im.begin(), im.end(), 1);
  std::vector<Permutation> out;
  do {
    out.push_back(Permutation(im));
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

std::vector<Permutation> cyclic_permutations(int n) {
  // n-cycles (1 a2 ... an), ordered lexicographically by (a2,...,an)
  std::vector<int> tail(n - 1);
  std::iota(tail.begin(), tail.end(), 2);
  std::vector<Permutation> out;
  do {
    std::vector<int> im(n);
    int prev = 1;
    for (int v : tail) {
      im[prev - 1] = v;
      prev = v;
    }
    im[prev - 1] = 1;
    out.push_back(Permutation(std::move(im)));
  } while (std::next_permutation(tail.begin(), tail.end()));
  return out;
}

namespace {

template <typename Fn>
void parallel_for(long count, int jobs, Fn&& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 1 || count < 2) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex err_mutex;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!failed.exchange(true)) first_error = e.what();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) throw Error("parallel sweep worker failed: " + first_error);
}

}  // namespace

// ---------------------------------------------------------- verify_table

TableReport verify_table(const std::string& table_id, const TableSet& tables, int jobs,
                         const std::string& cache_dir) {
  const auto records = tables.table(table_id);
  if (records.empty()) throw Error("unknown table id: " + table_id);
  const int n = records.front()->n;

  // contexts for every degree the table quotes
  std::map<int, std::shared_ptr<const pullback::DegreeContext>> ctx;
  for (const auto* rec : records)
    for (const auto& [k, entry] : rec->by_k)
      if (!ctx.count(k)) ctx[k] = pullback::DegreeContext::create(n, k, cache_dir);

  struct Job {
    const TableRecord* rec;
    int k;
  };
  std::vector<Job> todo;
  for (const auto* rec : records)
    for (const auto& [k, entry] : rec->by_k) todo.push_back({rec, k});

  std::vector<RowCheck> rows(todo.size());
  parallel_for(static_cast<long>(todo.size()), jobs, [&](long i) {
    const auto& [rec, k] = todo[i];
    const LambdaEntry& entry = rec->by_k.at(k);
    const Permutation rho = Permutation::from_cycles(rec->cycles, n);
    const RatMatrix f = ctx.at(k)->f_matrix(rho);
    spectral::SpectralResult res = spectral::spectral_radius(f);
    RowCheck row;
    row.record_id = rec->id;
    row.n = n;
    row.k = k;
    row.cycles = rec->cycles;
    row.computed_radius = res.spectral_radius;
    row.quoted_radius = entry.approx;
    row.min_poly_divides = spectral::divides(entry.min_poly, res.char_poly);
    row.radius_matches = std::abs(res.spectral_radius - entry.approx) <= kMatchTol;
    row.computed_char_poly = std::move(res.char_poly);
    rows[i] = std::move(row);
  });

  TableReport report;
  report.table_id = table_id;
  report.rows = std::move(rows);
  return report;
}

bool TableReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const RowCheck& r) { return r.pass(); });
}

nlohmann::json TableReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["id"] = r.record_id;
    j["n"] = r.n;
    j["k"] = r.k;
    j["perm"] = r.cycles;
    j["char_poly"] = r.computed_char_poly.to_csv();
    j["spectral_radius"] = r.computed_radius;
    j["quoted"] = r.quoted_radius;
    j["min_poly_divides"] = r.min_poly_divides;
    j["radius_matches"] = r.radius_matches;
    j["pass"] = r.pass();
    rows_json.push_back(std::move(j));
  }
  return nlohmann::json{{"table", table_id}, {"all_pass", all_pass()}, {"rows", rows_json}};
}

std::string TableReport::to_text() const {
  std::ostringstream os;
  os << "table " << table_id << "\n";
  for (const auto& r : rows) {
    os << "  " << (r.pass() ? "pass" : "FAIL") << "  k=" << r.k << "  " << std::setw(24)
       << std::left << r.cycles << "  lambda=" << std::setprecision(9) << std::fixed
       << r.computed_radius << "  (quoted " << r.quoted_radius << ")"
       << (r.min_poly_divides ? "" : "  [min poly does not divide]")
       << (r.radius_matches ? "" : "  [radius mismatch]") << "\n";
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
  }
  os << (all_pass() ? "all rows pass" : "FAILURES present") << "\n";
  return os.str();
}

// ---------------------------------------------------------------- sweep

void SweepReport::require_matched() const {
  if (all_matched()) return;
  std::ostringstream os;
  os << "sweep (n=" << n << ", k=" << k << ") found unmatched degrees for:";
  for (const auto& c : unmatched_cycles) os << " " << c;
  throw UnmatchedDegree(os.str());
}

SweepReport sweep(const SweepOptions& opts, const TableSet& tables) {
  const bool supported = (opts.k == 1 && opts.n >= 5 && opts.n <= 8) || (opts.k == 2 && opts.n == 6);
  if (!supported)
    throw UnsupportedDegree("sweep supports k=1 at 5<=n<=8 and k=2 at n=6; got n=" +
                            std::to_string(opts.n) + ", k=" + std::to_string(opts.k));
  auto ctx = pullback::DegreeContext::create(opts.n, opts.k, opts.cache_dir);
  const std::vector<Permutation> perms = (opts.scope == Scope::All)
                                             ? all_permutations(opts.n)
                                             : cyclic_permutations(opts.n);
  const double trivial = static_cast<double>(1 << opts.k);

  struct Cell {
    IntPolynomial cp;
    double radius = 0.0;
  };
  std::vector<Cell> cells(perms.size());
  parallel_for(static_cast<long>(perms.size()), opts.jobs, [&](long i) {
    spectral::SpectralResult res = spectral::spectral_radius(ctx->f_matrix(perms[i]));
    cells[i] = Cell{std::move(res.char_poly), res.spectral_radius};
  });

  // deterministic aggregation in iteration order
  SweepReport report;
  report.n = opts.n;
  report.k = opts.k;
  report.scope = opts.scope;
  report.total = static_cast<long>(perms.size());
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    const std::string key = cells[i].cp.to_csv();
    auto it = group_of.find(key);
    if (it == group_of.end()) {
      SweepGroup g;
      g.char_poly = cells[i].cp;
      g.radius = cells[i].radius;
      g.count = 1;
      g.first_cycles = perms[i].cycles();
      g.match = MatchKind::None;
      if (std::abs(g.radius - trivial) <= kMatchTol) {
        g.match = MatchKind::Trivial;
      } else {
        for (const auto& rec : tables.records) {
          if (rec.n != opts.n) continue;
          auto kt = rec.by_k.find(opts.k);
          if (kt == rec.by_k.end()) continue;
          if (std::abs(g.radius - kt->second.approx) <= kMatchTol) {
            g.match = MatchKind::Table;
            g.record_id = rec.id;
            break;
          }
        }
      }
      group_of.emplace(key, report.groups.size());
      if (g.match == MatchKind::None) report.unmatched_cycles.push_back(g.first_cycles);
      report.groups.push_back(std::move(g));
    } else {
      ++report.groups[it->second].count;
    }
  }
  return report;
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json groups_json = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json j;
    j["char_poly"] = g.char_poly.to_csv();
    j["spectral_radius"] = g.radius;
    j["count"] = g.count;
    j["first_perm"] = g.first_cycles;
    j["match"] = g.match == MatchKind::Trivial ? "trivial"
                 : g.match == MatchKind::Table ? "table"
                                               : "none";
    if (!g.record_id.empty()) j["record"] = g.record_id;
    groups_json.push_back(std::move(j));
  }
  return nlohmann::json{{"n", n},
                        {"k", k},
                        {"scope", scope == Scope::All ? "all" : "cyclic"},
                        {"total", total},
                        {"all_matched", all_matched()},
                        {"groups", groups_json},
                        {"unmatched", unmatched_cycles}};
}

std::string SweepReport::to_text() const {
  std::ostringstream os;
  os << "sweep n=" << n << " k=" << k << " scope=" << (scope == Scope::All ? "all" : "cyclic")
     << " total=" << total << "\n";
  os << std::left << std::setw(8) << "count" << std::setw(14) << "lambda_" + std::to_string(k)
     << std::setw(10) << "match" << "char poly (first example " << "perm)\n";
  for (const auto& g : groups) {
    std::ostringstream lam;
    lam << std::setprecision(9) << g.radius;
    os << std::left << std::setw(8) << g.count << std::setw(14) << lam.str() << std::setw(10)
       << (g.match == MatchKind::Trivial ? "trivial"
           : g.match == MatchKind::Table ? g.record_id
                                         : "NONE")
       << g.char_poly.pretty() << "   " << g.first_cycles << "\n";
  }
  os << (all_matched() ? "all degrees matched" : "UNMATCHED degrees present") << "\n";
  return os.str();
}

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os << "count,radius,match,record,first_perm,char_poly\n";
  for (const auto& g : groups) {
    os << g.count << "," << std::setprecision(10) << g.radius << ","
       << (g.match == MatchKind::Trivial ? "trivial"
           : g.match == MatchKind::Table ? "table"
                                         : "none")
       << "," << g.record_id << ",\"" << g.first_cycles << "\",\"" << g.char_poly.to_csv()
       << "\"\n";
  }
  return os.str();
}

}  // namespace moddeg::verify
