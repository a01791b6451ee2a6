#include "moddeg/ratlin.hpp"

#include <cmath>

#include "moddeg/errors.hpp"

namespace moddeg {

RatMatrix RatMatrix::identity(int d) {
  RatMatrix m(d, d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

RatMatrix RatMatrix::operator*(const RatMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error("matrix product shape mismatch");
  RatMatrix out(rows_, rhs.cols_);
  Rat acc;
  for (int i = 0; i < rows_; ++i) {
    for (int l = 0; l < cols_; ++l) {
      const Rat& x = at(i, l);
      if (sgn(x) == 0) continue;
      for (int j = 0; j < rhs.cols_; ++j) {
        const Rat& y = rhs.at(l, j);
        if (sgn(y) == 0) continue;
        acc = x * y;
        out.at(i, j) += acc;
      }
    }
  }
  return out;
}

std::vector<Rat> RatMatrix::operator*(const std::vector<Rat>& v) const {
  if (static_cast<int>(v.size()) != cols_) throw Error("matrix-vector shape mismatch");
  std::vector<Rat> out(rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (sgn(at(i, j)) != 0 && sgn(v[j]) != 0) out[i] += at(i, j) * v[j];
  return out;
}

bool operator==(const RatMatrix& a, const RatMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
}

RatMatrix RatMatrix::inverse() const {
  if (rows_ != cols_) throw Error("inverse of non-square matrix");
  const int d = rows_;
  RatMatrix work(*this);
  RatMatrix inv = identity(d);
  for (int col = 0; col < d; ++col) {
    int piv = -1;
    for (int r = col; r < d; ++r)
      if (sgn(work.at(r, col)) != 0) { piv = r; break; }
    if (piv < 0) throw InconsistentClass("singular matrix in exact solve");
    if (piv != col) {
      for (int j = 0; j < d; ++j) {
        swap(work.at(piv, j), work.at(col, j));
        swap(inv.at(piv, j), inv.at(col, j));
      }
    }
    const Rat lead = work.at(col, col);
    for (int j = 0; j < d; ++j) {
      work.at(col, j) /= lead;
      inv.at(col, j) /= lead;
    }
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      const Rat f = work.at(r, col);
      if (sgn(f) == 0) continue;
      for (int j = 0; j < d; ++j) {
        if (sgn(work.at(col, j)) != 0) work.at(r, j) -= f * work.at(col, j);
        if (sgn(inv.at(col, j)) != 0) inv.at(r, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

bool RatMatrix::is_integral() const {
  for (const Rat& q : a_)
    if (q.get_den() != 1) return false;
  return true;
}

double RatMatrix::max_abs_entry_bound() const {
  double best = 0.0;
  for (const Rat& q : a_) {
    if (sgn(q) == 0) continue;
    // ceil(|num| / den) bounds |q| and stays finite in double for our sizes
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), mpz_class(abs(q.get_num())).get_mpz_t(), q.get_den().get_mpz_t());
    const double v = c.get_d();
    if (v > best) best = v;
  }
  return best;
}

}  // namespace moddeg
