#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "moddeg/ratlin.hpp"

/*
 * Exact characteristic polynomials of rational matrices and numeric
 * dominant-root extraction.
 *
 * char_poly runs a Hessenberg characteristic-polynomial computation
 * modulo a deterministic family of 61-bit primes and reconstructs the
 * integer coefficients by CRT under a rigorous Hadamard-type bound; one
 * extra prime re-checks the lift. Root moduli come from the exact
 * square-free part via simultaneous Aberth iteration, with the dominant
 * root polished by Newton steps in 256-bit floats.
 */

namespace moddeg::spectral {

struct IntPolynomial {
  // Coefficients in descending degree; leading coefficient nonzero.
  // An empty vector is the zero polynomial.
  std::vector<mpz_class> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }
  bool is_monic() const { return !coeffs.empty() && coeffs.front() == 1; }
  const mpz_class& leading() const { return coeffs.front(); }

  void normalize();  // strip leading zeros

  static IntPolynomial from_coeffs(std::vector<mpz_class> c);
  static IntPolynomial from_ints(const std::vector<long>& c);
  // Comma-separated descending coefficients, e.g. "1,1,-2,-8,-8".
  static IntPolynomial parse(const std::string& text);
  std::string to_csv() const;
  // Matches the usual display, e.g. "λ^4+λ^3-2λ^2-8λ-8".
  std::string pretty(const std::string& var = "λ") const;

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;
};

IntPolynomial mul(const IntPolynomial& a, const IntPolynomial& b);
IntPolynomial pow(const IntPolynomial& a, int e);
IntPolynomial derivative(const IntPolynomial& p);

// Exact monic characteristic polynomial det(λI - M).
// Throws NonIntegralCharPoly if the reconstruction is inconsistent.
IntPolynomial char_poly(const RatMatrix& m);

// True iff q = p * h for some rational polynomial h (exact division).
bool divides(const IntPolynomial& p, const IntPolynomial& q);

// Product of the distinct irreducible factors (exact, primitive).
IntPolynomial square_free_part(const IntPolynomial& p);

// Maximum modulus among the complex roots; absolute error <= 1e-8 for the
// polynomial families handled here. Throws ConvergenceError on stall.
double max_root_modulus(const IntPolynomial& p);

struct SpectralResult {
  IntPolynomial char_poly;
  double spectral_radius = 0.0;
  double dominant_root_residual = 0.0;  // normalized |p(z)| at the dominant root
};

SpectralResult spectral_radius(const RatMatrix& m);
// Same, for a characteristic polynomial that is already known.
SpectralResult spectral_radius(IntPolynomial char_poly);

}  // namespace moddeg::spectral
