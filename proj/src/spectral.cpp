#include "moddeg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "moddeg/errors.hpp"

namespace moddeg::spectral {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(u128(a) * b % p); }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 p) { return powmod(a, p - 2, p); }

u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

// Deterministic stream of primes just above 2^61.
class PrimeStream {
 public:
  PrimeStream() : cur_(mpz_class(1) << 61) {}
  u64 next() {
    mpz_nextprime(cur_.get_mpz_t(), cur_.get_mpz_t());
    return mpz_get_ui(cur_.get_mpz_t());
  }

 private:
  mpz_class cur_;
};

u64 mpz_mod_u64(const mpz_class& z, u64 p) {
  return mpz_fdiv_ui(z.get_mpz_t(), static_cast<unsigned long>(p));
}

// Characteristic polynomial mod p, coefficients ascending, length d+1.
// nullopt-like failure (a denominator hit p) is signalled by returning empty.
std::vector<u64> charpoly_mod(const RatMatrix& m, u64 p) {
  const int d = m.rows();
  std::vector<u64> a(std::size_t(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Rat& q = m.at(i, j);
      const u64 den = mpz_mod_u64(q.get_den(), p);
      if (den == 0) return {};
      const u64 num = mpz_mod_u64(q.get_num(), p);
      a[std::size_t(i) * d + j] = mulmod(num, invmod(den, p), p);
    }
  auto at = [&](int i, int j) -> u64& { return a[std::size_t(i) * d + j]; };

  // Hessenberg reduction by similarity transforms.
  for (int j = 0; j + 2 < d; ++j) {
    int piv = -1;
    for (int i = j + 1; i < d; ++i)
      if (at(i, j) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != j + 1) {
      for (int c = 0; c < d; ++c) std::swap(at(piv, c), at(j + 1, c));
      for (int r = 0; r < d; ++r) std::swap(at(r, piv), at(r, j + 1));
    }
    const u64 inv = invmod(at(j + 1, j), p);
    for (int i = j + 2; i < d; ++i) {
      if (at(i, j) == 0) continue;
      const u64 f = mulmod(at(i, j), inv, p);
      for (int c = j; c < d; ++c) at(i, c) = submod(at(i, c), mulmod(f, at(j + 1, c), p), p);
      for (int r = 0; r < d; ++r) at(r, j + 1) = (at(r, j + 1) + mulmod(f, at(r, i), p)) % p;
    }
  }

  // Leading-minor recurrence for an upper Hessenberg matrix.
  std::vector<std::vector<u64>> polys(d + 1);
  polys[0] = {1};
  for (int mm = 1; mm <= d; ++mm) {
    std::vector<u64> cur(mm + 1, 0);
    const u64 hmm = at(mm - 1, mm - 1);
    // (x - h_mm) * p_{m-1}
    for (int t = 0; t <= mm - 1; ++t) {
      cur[t + 1] = (cur[t + 1] + polys[mm - 1][t]) % p;
      cur[t] = submod(cur[t], mulmod(hmm, polys[mm - 1][t], p), p);
    }
    u64 sub = 1;  // product of subdiagonal entries h_{j,j-1}
    for (int i = 2; i <= mm; ++i) {
      sub = mulmod(sub, at(mm - i + 1, mm - i), p);
      if (sub == 0) break;
      const u64 f = mulmod(at(mm - i, mm - 1), sub, p);
      if (f == 0) continue;
      for (int t = 0; t <= mm - i; ++t)
        cur[t] = submod(cur[t], mulmod(f, polys[mm - i][t], p), p);
    }
    polys[mm] = std::move(cur);
  }
  return polys[d];
}

// Bits needed to cover 2 * max_k C(d,k) (sqrt(d) A)^k.
long coefficient_bound_bits(int d, double max_abs) {
  const double a = std::max(max_abs, 1.0);
  const double half_logd = 0.5 * std::log2(static_cast<double>(std::max(d, 2)));
  const double loga = std::log2(a);
  double best = 1.0;
  double lchoose = 0.0;  // log2 C(d,k), built incrementally
  for (int k = 1; k <= d; ++k) {
    lchoose += std::log2(static_cast<double>(d - k + 1)) - std::log2(static_cast<double>(k));
    best = std::max(best, lchoose + k * (half_logd + loga));
  }
  return static_cast<long>(best) + 24;
}

}  // namespace

// ------------------------------------------------------------ polynomials

void IntPolynomial::normalize() {
  std::size_t i = 0;
  while (i < coeffs.size() && coeffs[i] == 0) ++i;
  if (i) coeffs.erase(coeffs.begin(), coeffs.begin() + i);
}

IntPolynomial IntPolynomial::from_coeffs(std::vector<mpz_class> c) {
  IntPolynomial p{std::move(c)};
  p.normalize();
  return p;
}

IntPolynomial IntPolynomial::from_ints(const std::vector<long>& c) {
  std::vector<mpz_class> z(c.begin(), c.end());
  return from_coeffs(std::move(z));
}

IntPolynomial IntPolynomial::parse(const std::string& text) {
  std::vector<mpz_class> c;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    // trim whitespace
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) throw ParseError("polynomial list: empty coefficient in \"" + text + "\"");
    tok = tok.substr(b, e - b + 1);
    try {
      c.emplace_back(tok);
    } catch (const std::invalid_argument&) {
      throw ParseError("polynomial list: bad coefficient \"" + tok + "\"");
    }
  }
  if (c.empty()) throw ParseError("polynomial list: no coefficients");
  return from_coeffs(std::move(c));
}

std::string IntPolynomial::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) os << ',';
    os << coeffs[i].get_str();
  }
  return is_zero() ? "0" : os.str();
}

std::string IntPolynomial::pretty(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  const int d = degree();
  bool first = true;
  for (int i = 0; i <= d; ++i) {
    const mpz_class& c = coeffs[i];
    if (c == 0) continue;
    const int e = d - i;
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? '-' : '+');
    }
    const mpz_class ac = abs(c);
    if (ac != 1 || e == 0) os << ac.get_str();
    if (e > 0) {
      os << var;
      if (e > 1) os << '^' << e;
    }
    first = false;
  }
  return os.str();
}

IntPolynomial mul(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpz_class> c(a.coeffs.size() + b.coeffs.size() - 1);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
  return IntPolynomial::from_coeffs(std::move(c));
}

IntPolynomial pow(const IntPolynomial& a, int e) {
  IntPolynomial r = IntPolynomial::from_ints({1});
  for (int i = 0; i < e; ++i) r = mul(r, a);
  return r;
}

IntPolynomial derivative(const IntPolynomial& p) {
  if (p.degree() < 1) return {};
  const int d = p.degree();
  std::vector<mpz_class> c(d);
  for (int i = 0; i < d; ++i) c[i] = p.coeffs[i] * (d - i);
  return IntPolynomial::from_coeffs(std::move(c));
}

// ----------------------------------------------------------- char_poly

IntPolynomial char_poly(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw Error("characteristic polynomial of a non-square matrix");
  const int d = m.rows();
  if (d == 0) return IntPolynomial::from_ints({1});

  const long need_bits = coefficient_bound_bits(d, m.max_abs_entry_bound());
  PrimeStream primes;

  std::vector<mpz_class> acc(d + 1);  // CRT residues (ascending degree)
  mpz_class modulus = 1;
  double have_bits = 0;
  while (have_bits < static_cast<double>(need_bits)) {
    const u64 p = primes.next();
    const auto cp = charpoly_mod(m, p);
    if (cp.empty()) continue;  // denominator collision, take next prime
    const u64 minv = invmod(mpz_mod_u64(modulus, p), p);
    for (int t = 0; t <= d; ++t) {
      // acc_t += modulus * ((cp_t - acc_t) * minv mod p)
      const u64 r = mulmod(submod(cp[t] % p, mpz_mod_u64(acc[t], p), p), minv, p);
      acc[t] += modulus * mpz_class(r);
    }
    modulus *= mpz_class(p);
    have_bits += 61.0;
  }
  // symmetric lift
  const mpz_class half = modulus / 2;
  for (auto& c : acc)
    if (c > half) c -= modulus;

  // consistency check with one extra prime
  for (;;) {
    const u64 q = primes.next();
    const auto cq = charpoly_mod(m, q);
    if (cq.empty()) continue;
    for (int t = 0; t <= d; ++t)
      if (mpz_mod_u64(acc[t], q) != cq[t])
        throw NonIntegralCharPoly("characteristic polynomial reconstruction inconsistent");
    break;
  }

  std::vector<mpz_class> desc(d + 1);
  for (int t = 0; t <= d; ++t) desc[t] = acc[d - t];
  IntPolynomial out = IntPolynomial::from_coeffs(std::move(desc));
  if (out.degree() != d || !out.is_monic())
    throw NonIntegralCharPoly("characteristic polynomial is not monic of full degree");
  return out;
}

// ------------------------------------------------------------- division

bool divides(const IntPolynomial& p, const IntPolynomial& q) {
  if (p.is_zero()) throw Error("division by the zero polynomial");
  if (q.is_zero()) return true;
  if (q.degree() < p.degree()) return false;
  std::vector<Rat> r(q.coeffs.begin(), q.coeffs.end());
  const int dp = p.degree();
  const Rat lead(p.coeffs.front());
  for (std::size_t shift = 0; static_cast<int>(r.size() - shift) - 1 >= dp; ++shift) {
    const Rat f = r[shift] / lead;
    if (sgn(f) == 0) continue;
    for (int i = 0; i <= dp; ++i) r[shift + i] -= f * Rat(p.coeffs[i]);
  }
  for (std::size_t i = r.size() - dp; i < r.size(); ++i)
    if (sgn(r[i]) != 0) return false;
  return true;
}

namespace {

mpz_class content(const std::vector<mpz_class>& c) {
  mpz_class g = 0;
  for (const auto& z : c) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

IntPolynomial primitive_part(IntPolynomial p) {
  if (p.is_zero()) return p;
  mpz_class g = content(p.coeffs);
  if (sgn(p.coeffs.front()) < 0) g = -g;
  for (auto& c : p.coeffs) c /= g;
  return p;
}

// Pseudo-remainder of a by b (up to a nonzero constant; callers take
// primitive parts anyway).
IntPolynomial pseudo_rem(IntPolynomial a, const IntPolynomial& b) {
  const int db = b.degree();
  const mpz_class& lb = b.coeffs.front();
  while (!a.is_zero() && a.degree() >= db) {
    const int da = a.degree();
    const mpz_class la = a.coeffs.front();
    for (auto& c : a.coeffs) c *= lb;
    for (int i = 0; i <= db; ++i) a.coeffs[da - db + i] -= la * b.coeffs[i];
    a.normalize();
  }
  return a;
}

IntPolynomial gcd_poly(IntPolynomial a, IntPolynomial b) {
  a = primitive_part(std::move(a));
  b = primitive_part(std::move(b));
  while (!b.is_zero()) {
    IntPolynomial r = primitive_part(pseudo_rem(std::move(a), b));
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Exact quotient a / b, which must divide.
IntPolynomial exact_div(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<Rat> r(a.coeffs.begin(), a.coeffs.end());
  const int db = b.degree();
  const Rat lead(b.coeffs.front());
  std::vector<Rat> quo(a.degree() - db + 1);
  for (std::size_t shift = 0; static_cast<int>(r.size() - shift) - 1 >= db; ++shift) {
    const Rat f = r[shift] / lead;
    quo[shift] = f;
    if (sgn(f) == 0) continue;
    for (int i = 0; i <= db; ++i) r[shift + i] -= f * Rat(b.coeffs[i]);
  }
  for (const Rat& rest : r)
    if (sgn(rest) != 0) throw Error("exact polynomial division left a remainder");
  std::vector<mpz_class> out(quo.size());
  for (std::size_t i = 0; i < quo.size(); ++i) {
    if (quo[i].get_den() != 1) throw Error("exact polynomial quotient is not integral");
    out[i] = quo[i].get_num();
  }
  return IntPolynomial::from_coeffs(std::move(out));
}

}  // namespace

IntPolynomial square_free_part(const IntPolynomial& p) {
  if (p.degree() < 1) return primitive_part(p);
  IntPolynomial pp = primitive_part(p);
  IntPolynomial g = gcd_poly(pp, derivative(pp));
  if (g.degree() < 1) return pp;
  return primitive_part(exact_div(pp, g));
}

// ------------------------------------------------------------ root radius

namespace {

using C = std::complex<long double>;

struct DominantRoot {
  double modulus = 0.0;
  double residual = 0.0;
};

std::once_flag mpf_prec_flag;
void ensure_mpf_precision() {
  std::call_once(mpf_prec_flag, [] { mpf_set_default_prec(256); });
}

struct MpfC {
  mpf_class re, im;
};

MpfC mpfc_mul(const MpfC& a, const MpfC& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

MpfC mpfc_div(const MpfC& a, const MpfC& b) {
  mpf_class den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

mpf_class mpfc_abs(const MpfC& a) {
  mpf_class s = a.re * a.re + a.im * a.im;
  mpf_class r;
  mpf_sqrt(r.get_mpf_t(), s.get_mpf_t());
  return r;
}

MpfC horner(const std::vector<mpf_class>& coeffs, const MpfC& z) {
  MpfC acc{coeffs.front(), mpf_class(0)};
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    acc = mpfc_mul(acc, z);
    acc.re += coeffs[i];
  }
  return acc;
}

// All roots of a square-free polynomial, long double precision.
std::vector<C> aberth_roots(const IntPolynomial& q) {
  const int d = q.degree();
  std::vector<C> coeff(d + 1);
  {
    // monic-ize in floating point; magnitudes here stay far below
    // long double overflow
    const long double lead = mpz_get_d(q.coeffs.front().get_mpz_t());
    for (int i = 0; i <= d; ++i)
      coeff[i] = C(static_cast<long double>(mpz_get_d(q.coeffs[i].get_mpz_t())) / lead, 0.0L);
  }
  // Fujiwara-type initial radius
  long double radius = 0.0L;
  for (int i = 1; i <= d; ++i) {
    const long double a = std::abs(coeff[i].real());
    if (a > 0) radius = std::max(radius, std::pow(a, 1.0L / i));
  }
  radius = 2.0L * std::max(radius, 0.5L);

  std::vector<C> z(d);
  for (int j = 0; j < d; ++j) {
    const long double ang = 2.0L * 3.14159265358979323846L * j / d + 0.45L;
    z[j] = radius * C(std::cos(ang), std::sin(ang));
  }

  auto eval = [&](const C& x, C& p, C& dp) {
    p = coeff[0];
    dp = C(0, 0);
    for (int i = 1; i <= d; ++i) {
      dp = dp * x + p;
      p = p * x + coeff[i];
    }
  };

  const int max_iter = 2000;
  long double worst = 0.0L;
  for (int iter = 0; iter < max_iter; ++iter) {
    worst = 0.0L;
    for (int j = 0; j < d; ++j) {
      C p, dp;
      eval(z[j], p, dp);
      if (std::abs(p) == 0.0L) continue;
      C newton;
      if (std::abs(dp) == 0.0L) {
        newton = C(1e-3L, 1e-3L);  // nudge away from a critical point
      } else {
        newton = p / dp;
      }
      C sum(0, 0);
      for (int l = 0; l < d; ++l)
        if (l != j) sum += C(1, 0) / (z[j] - z[l]);
      const C denom = C(1, 0) - newton * sum;
      const C delta = (std::abs(denom) == 0.0L) ? newton : newton / denom;
      z[j] -= delta;
      worst = std::max(worst, std::abs(delta) / (1.0L + std::abs(z[j])));
    }
    if (worst < 1e-16L) return z;
  }
  // Stagnation slightly above machine precision is fine: the dominant
  // root is re-polished in 256-bit arithmetic afterwards.
  if (worst < 1e-9L) return z;
  throw ConvergenceError("root iteration did not settle after 2000 sweeps");
}

// Newton-polish z against q in 256-bit arithmetic; returns refined point.
MpfC newton_polish(const std::vector<mpf_class>& q, const std::vector<mpf_class>& dq, MpfC z) {
  for (int it = 0; it < 64; ++it) {
    const MpfC pv = horner(q, z);
    const MpfC dv = horner(dq, z);
    const mpf_class dabs = dv.re * dv.re + dv.im * dv.im;
    if (sgn(dabs) == 0) break;
    const MpfC step = mpfc_div(pv, dv);
    z.re -= step.re;
    z.im -= step.im;
    mpf_class sz = step.re * step.re + step.im * step.im;
    mpf_class zz = z.re * z.re + z.im * z.im + 1;
    // stop once the relative step is far below double precision
    if (sz * mpf_class(1e72) < zz) break;
  }
  return z;
}

DominantRoot dominant_root(const IntPolynomial& poly) {
  if (poly.degree() < 1) throw Error("dominant root of a constant polynomial");
  ensure_mpf_precision();

  // factor out roots at zero
  IntPolynomial p = poly;
  while (!p.coeffs.empty() && p.coeffs.back() == 0) p.coeffs.pop_back();
  if (p.degree() < 1) return {0.0, 0.0};

  const IntPolynomial sf = square_free_part(p);
  const auto roots = aberth_roots(sf);

  long double rmax = 0.0L;
  for (const auto& z : roots) rmax = std::max(rmax, std::abs(z));

  std::vector<mpf_class> qc(sf.coeffs.size()), dqc;
  for (std::size_t i = 0; i < sf.coeffs.size(); ++i) qc[i] = mpf_class(sf.coeffs[i]);
  {
    const IntPolynomial d = derivative(sf);
    dqc.resize(d.coeffs.size());
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) dqc[i] = mpf_class(d.coeffs[i]);
  }

  mpf_class best = 0;
  MpfC best_z{mpf_class(0), mpf_class(0)};
  for (const auto& z : roots) {
    if (std::abs(z) < rmax * (1.0L - 1e-4L)) continue;
    MpfC refined = newton_polish(
        qc, dqc, MpfC{mpf_class(static_cast<double>(z.real())), mpf_class(static_cast<double>(z.imag()))});
    const mpf_class mod = mpfc_abs(refined);
    if (mod > best) {
      best = mod;
      best_z = refined;
    }
  }

  // normalized residual of the full polynomial at the dominant root
  std::vector<mpf_class> pc(poly.coeffs.size());
  for (std::size_t i = 0; i < poly.coeffs.size(); ++i) pc[i] = mpf_class(poly.coeffs[i]);
  const mpf_class pval = mpfc_abs(horner(pc, best_z));
  mpf_class scale = 0;
  {
    mpf_class zpow = 1;
    const mpf_class zabs = mpfc_abs(best_z);
    for (auto it = pc.rbegin(); it != pc.rend(); ++it) {
      scale += abs(*it) * zpow;
      zpow *= zabs;
    }
  }
  if (sgn(scale) == 0) scale = 1;
  const double residual = mpf_class(pval / scale).get_d();
  return {best.get_d(), residual};
}

}  // namespace

double max_root_modulus(const IntPolynomial& p) {
  if (p.is_zero() || p.degree() < 1)
    throw Error("max_root_modulus needs a polynomial of degree >= 1");
  return dominant_root(p).modulus;
}

SpectralResult spectral_radius(IntPolynomial cp) {
  const DominantRoot dom = dominant_root(cp);
  return SpectralResult{std::move(cp), dom.modulus, dom.residual};
}

SpectralResult spectral_radius(const RatMatrix& m) { return spectral_radius(char_poly(m)); }

}  // namespace moddeg::spectral
