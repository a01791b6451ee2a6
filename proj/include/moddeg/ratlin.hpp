#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace moddeg {

using Rat = mpq_class;

// Dense exact-rational matrix, row-major. Operators act on coordinate
// column vectors throughout the project.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  static RatMatrix identity(int d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& at(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const Rat& at(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

  RatMatrix operator*(const RatMatrix& rhs) const;
  std::vector<Rat> operator*(const std::vector<Rat>& v) const;
  friend bool operator==(const RatMatrix&, const RatMatrix&);

  // Gauss-Jordan with exact pivots; throws InconsistentClass when singular.
  RatMatrix inverse() const;

  bool is_integral() const;
  // max |entry| as a double upper bound (rounded up); 0 for empty.
  double max_abs_entry_bound() const;

  std::string entry_string(int i, int j) const { return at(i, j).get_str(); }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rat> a_;
};

}  // namespace moddeg
