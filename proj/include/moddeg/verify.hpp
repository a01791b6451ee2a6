#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moddeg/pullback.hpp"
#include "moddeg/spectral.hpp"

#include "json.hpp"

/*
 * Reproduction harness: embedded reference tables of dynamical degrees,
 * per-row verification (minimal-polynomial divisibility plus a 1e-6
 * radius match), and full sweeps over permutation sets asserting that
 * every computed degree is either trivial (2^k) or tabulated.
 */

namespace moddeg::verify {

constexpr double kMatchTol = 1e-6;

struct LambdaEntry {
  double approx = 0.0;
  spectral::IntPolynomial min_poly;
  std::string note;  // optional data-correction annotation
};

struct TableRecord {
  std::string id;        // e.g. "T_N3:4"
  std::string table_id;  // T1, T_N3, T_N4, T_N5
  int n = 0;
  std::string cycles;
  std::map<int, LambdaEntry> by_k;  // k -> entry
};

struct TableSet {
  int version = 0;
  std::vector<TableRecord> records;
  std::map<std::string, long> total_maps;              // table id -> |S_n| covered
  std::map<int, int> dims_k1, dims_k2;                 // n -> dim H^{k,k}
  std::map<int, long> divisor_counts;                  // n -> codim-1 strata
  std::map<int, long> strata_counts_k2, strata_counts_k3;
  std::map<int, long> top_strata_counts;               // n -> (2n-5)!!
  std::vector<std::string> anomaly_notes;

  std::vector<const TableRecord*> table(const std::string& table_id) const;
  // Tabulated degree values for one (n, k).
  std::vector<double> known_values(int n, int k) const;
};

// Parse + self-consistency: every min_poly's dominant root must match the
// quoted approximation within 1e-6. Throws ParseError / Error.
TableSet parse_tables(const std::string& json_text);
TableSet load_builtin();
TableSet load_file(const std::string& path);

struct RowCheck {
  std::string record_id;
  int n = 0, k = 0;
  std::string cycles;
  spectral::IntPolynomial computed_char_poly;
  double computed_radius = 0.0;
  double quoted_radius = 0.0;
  bool min_poly_divides = false;
  bool radius_matches = false;
  bool pass() const { return min_poly_divides && radius_matches; }
};

struct TableReport {
  std::string table_id;
  std::vector<RowCheck> rows;
  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

TableReport verify_table(const std::string& table_id, const TableSet& tables, int jobs = 0,
                         const std::string& cache_dir = "");

enum class Scope { All, Cyclic };

struct SweepOptions {
  int n = 6;
  int k = 1;
  Scope scope = Scope::All;
  int jobs = 0;  // 0 = hardware concurrency
  std::string cache_dir;
};

enum class MatchKind { Trivial, Table, None };

// One char-poly class of the sweep, in first-appearance order.
struct SweepGroup {
  spectral::IntPolynomial char_poly;
  double radius = 0.0;
  long count = 0;
  std::string first_cycles;
  MatchKind match = MatchKind::None;
  std::string record_id;  // set when match == Table
};

struct SweepReport {
  int n = 0, k = 0;
  Scope scope = Scope::All;
  long total = 0;
  std::vector<SweepGroup> groups;
  std::vector<std::string> unmatched_cycles;

  bool all_matched() const { return unmatched_cycles.empty(); }
  void require_matched() const;  // throws UnmatchedDegree
  nlohmann::json to_json() const;
  std::string to_text() const;
  std::string to_csv() const;
};

SweepReport sweep(const SweepOptions& opts, const TableSet& tables);

// Deterministic permutation sets used by the sweeps.
std::vector<combinat::Permutation> all_permutations(int n);
std::vector<combinat::Permutation> cyclic_permutations(int n);

}  // namespace moddeg::verify
