#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "moddeg/errors.hpp"
#include "moddeg/keel.hpp"
#include "moddeg/pullback.hpp"
#include "moddeg/spectral.hpp"
#include "moddeg/verify.hpp"

using namespace moddeg;

namespace {

struct Common {
  int n = 6;
  int k = 1;
  std::string format = "text";
  std::string out_path;
  std::string cache_dir;
  std::string fixtures_path;
  int jobs = 0;
  long mem_limit_mb = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_nk = true) {
  if (with_nk) {
    cmd->add_option("--n", c.n, "number of marked points")->envname("MODDEG_N");
    cmd->add_option("--k", c.k, "cohomology degree k")->envname("MODDEG_K");
  }
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->envname("MODDEG_FORMAT");
  cmd->add_option("--out", c.out_path, "write output to this path")->envname("MODDEG_OUT");
  cmd->add_option("--cache", c.cache_dir, "cache directory for relation spaces")
      ->envname("MODDEG_CACHE");
  cmd->add_option("--fixtures", c.fixtures_path, "override the built-in reference tables")
      ->envname("MODDEG_FIXTURES");
  cmd->add_option("--jobs", c.jobs, "worker threads (0 = all cores)")->envname("MODDEG_JOBS");
  cmd->add_option("--mem-limit", c.mem_limit_mb, "memory ceiling in MB for eliminations")
      ->envname("MODDEG_MEM_LIMIT");
}

keel::Limits limits_from(const Common& c) {
  keel::Limits lim;
  if (c.mem_limit_mb > 0) {
    const double bytes = static_cast<double>(c.mem_limit_mb) * (1 << 20);
    lim.max_strata = std::max(256, static_cast<int>(std::sqrt(bytes / 11.0)));
  }
  return lim;
}

verify::TableSet load_tables(const Common& c) {
  return c.fixtures_path.empty() ? verify::load_builtin() : verify::load_file(c.fixtures_path);
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream out(c.out_path);
    if (!out) throw Error("cannot write " + c.out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
  }
}

int run_dims(const Common& c) {
  const auto strata = combinat::enumerate_strata(c.n, c.k);
  auto ctx = keel::Context::build(c.n, c.k, limits_from(c));
  std::ostringstream note;
  if (c.n == 5) {
    const auto tables = load_tables(c);
    for (const auto& a : tables.anomaly_notes) note << "anomaly: " << a << "\n";
  }
  if (c.format == "json") {
    nlohmann::json j{{"n", c.n},
                     {"k", c.k},
                     {"dim", ctx->dim()},
                     {"strata", strata.size()},
                     {"rank", ctx->relations().rank()}};
    if (!note.str().empty()) j["anomaly"] = note.str();
    emit(c, j.dump(2));
  } else {
    std::ostringstream os;
    os << "n=" << c.n << " k=" << c.k << "\n"
       << "dim H^{" << c.k << "," << c.k << "} = " << ctx->dim() << "\n"
       << "codim-" << c.k << " strata  = " << strata.size() << "\n"
       << "relation rank  = " << ctx->relations().rank() << "\n"
       << note.str();
    emit(c, os.str());
  }
  return 0;
}

int run_basis(const Common& c) {
  auto ctx = keel::Context::build(c.n, c.k, limits_from(c));
  const keel::Basis& b = ctx->basis();
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < b.size(); ++i) {
      nlohmann::json desc = nlohmann::json::array();
      for (const auto& d : b.stratum(i).divisors) desc.push_back(d.subset().labels());
      arr.push_back(std::move(desc));
    }
    emit(c, nlohmann::json{{"n", c.n}, {"k", c.k}, {"size", b.size()}, {"basis", arr}}.dump(2));
  } else {
    std::ostringstream os;
    os << "basis for H^{" << c.k << "," << c.k << "}, n=" << c.n << ", size " << b.size() << "\n";
    for (int i = 0; i < b.size(); ++i)
      os << "  [" << (i + 1) << "] " << b.stratum(i).to_string() << "\n";
    emit(c, os.str());
  }
  return 0;
}

int run_pullback(const Common& c, const std::string& map, const std::string& perm) {
  auto ctx = pullback::DegreeContext::create(c.n, c.k, c.cache_dir, limits_from(c));
  pullback::PullbackMatrix m;
  if (map == "s") {
    m = (c.k == 1) ? pullback::s_pullback_H11(ctx->basis()) : pullback::s_pullback_H22_X3(ctx->basis());
  } else {
    const auto rho = combinat::Permutation::from_cycles(perm, c.n);
    m = (map == "g") ? pullback::g_pullback(rho, ctx->basis()) : pullback::f_pullback(rho, *ctx);
  }
  if (c.format == "text") {
    std::ostringstream os;
    os << "M(" << map << "*)  n=" << c.n << " k=" << c.k << "  dim " << m.dim() << "\n";
    for (int i = 0; i < m.mat.rows(); ++i) {
      for (int j = 0; j < m.mat.cols(); ++j) os << m.mat.entry_string(i, j) << (j + 1 < m.mat.cols() ? " " : "");
      os << "\n";
    }
    emit(c, os.str());
  } else {
    emit(c, pullback::matrix_json(m).dump(2));
  }
  return 0;
}

int run_dyndeg(const Common& c, const std::string& perm) {
  auto ctx = pullback::DegreeContext::create(c.n, c.k, c.cache_dir, limits_from(c));
  const auto rho = combinat::Permutation::from_cycles(perm, c.n);
  const spectral::SpectralResult res = spectral::spectral_radius(ctx->f_matrix(rho));
  if (c.format == "json") {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& z : res.char_poly.coeffs) coeffs.push_back(z.get_str());
    nlohmann::json j{{"n", c.n},
                     {"k", c.k},
                     {"perm", rho.cycles()},
                     {"char_poly", coeffs},
                     {"spectral_radius", res.spectral_radius}};
    emit(c, j.dump(2));
  } else if (c.format == "csv") {
    std::ostringstream os;
    os << "n,k,perm,spectral_radius,char_poly\n"
       << c.n << "," << c.k << ",\"" << rho.cycles() << "\"," << std::setprecision(9) << std::fixed
       << res.spectral_radius << ",\"" << res.char_poly.to_csv() << "\"\n";
    emit(c, os.str());
  } else {
    std::ostringstream os;
    os << "n=" << c.n << " k=" << c.k << " perm=" << rho.cycles() << "\n"
       << "char poly   = " << res.char_poly.pretty() << "\n"
       << "coefficients= " << res.char_poly.to_csv() << "\n"
       << "lambda_" << c.k << "    = " << std::setprecision(8) << std::fixed << res.spectral_radius
       << "\n";
    emit(c, os.str());
  }
  return 0;
}

int run_sweep(const Common& c, const std::string& scope) {
  const auto tables = load_tables(c);
  verify::SweepOptions opts;
  opts.n = c.n;
  opts.k = c.k;
  opts.scope = (scope == "cyclic") ? verify::Scope::Cyclic : verify::Scope::All;
  opts.jobs = c.jobs;
  opts.cache_dir = c.cache_dir;
  const verify::SweepReport report = verify::sweep(opts, tables);
  if (c.format == "json")
    emit(c, report.to_json().dump(2));
  else if (c.format == "csv")
    emit(c, report.to_csv());
  else
    emit(c, report.to_text());
  return report.all_matched() ? 0 : 1;
}

int run_verify(const Common& c, const std::string& table) {
  const auto tables = load_tables(c);
  std::vector<std::string> ids;
  if (table == "all")
    ids = {"T1", "T_N3", "T_N4", "T_N5"};
  else
    ids = {table};
  bool ok = true;
  std::ostringstream text;
  nlohmann::json all = nlohmann::json::array();
  for (const auto& id : ids) {
    const auto report = verify::verify_table(id, tables, c.jobs, c.cache_dir);
    ok = ok && report.all_pass();
    if (c.format == "json")
      all.push_back(report.to_json());
    else
      text << report.to_text();
  }
  emit(c, c.format == "json" ? all.dump(2) : text.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact dynamical degrees of the squared-then-relabeled self-maps of the "
      "n-pointed genus-0 moduli spaces"};
  app.require_subcommand(1);

  Common c;
  std::string perm;
  std::string map = "f";
  std::string scope = "all";
  std::string table = "all";

  auto* dims = app.add_subcommand("dims", "cohomology dimension and stratum count");
  add_common(dims, c);

  auto* basis = app.add_subcommand("basis", "print the working basis");
  add_common(basis, c);

  auto* pb = app.add_subcommand("pullback", "dump a pullback matrix");
  add_common(pb, c);
  pb->add_option("--map", map, "which operator: s, g, or f")
      ->check(CLI::IsMember({"s", "g", "f"}));
  pb->add_option("--perm", perm, "permutation in cycle notation");

  auto* dd = app.add_subcommand("dyndeg", "characteristic polynomial and dynamical degree");
  add_common(dd, c);
  dd->add_option("--perm", perm, "permutation in cycle notation")->envname("MODDEG_PERM");

  auto* sw = app.add_subcommand("sweep", "compute lambda_k for a whole permutation set");
  add_common(sw, c);
  sw->add_option("--scope", scope, "all or cyclic")->check(CLI::IsMember({"all", "cyclic"}));

  auto* vf = app.add_subcommand("verify", "re-check the reference tables");
  add_common(vf, c, /*with_nk=*/false);
  vf->add_option("--table", table, "T1, T_N3, T_N4, T_N5, or all")
      ->check(CLI::IsMember({"T1", "T_N3", "T_N4", "T_N5", "all"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (dims->parsed()) return run_dims(c);
    if (basis->parsed()) return run_basis(c);
    if (pb->parsed()) return run_pullback(c, map, perm);
    if (dd->parsed()) return run_dyndeg(c, perm);
    if (sw->parsed()) return run_sweep(c, scope);
    if (vf->parsed()) return run_verify(c, table);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedDegree& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
