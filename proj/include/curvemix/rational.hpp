#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace curvemix {

// Dense matrix over exact rationals, used for transition kernels and the
// identities that must hold without rounding.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, mpq_class(0)) {}

  static RationalMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  mpq_class& at(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  const mpq_class& at(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  mpq_class row_sum(int i) const;
  bool is_symmetric() const;
  bool is_stochastic() const;  // nonnegative entries, every row sums to 1
  mpq_class min_entry() const;

  RationalMatrix multiply(const RationalMatrix& other) const;
  RationalMatrix scaled(const mpq_class& factor) const;
  RationalMatrix plus(const RationalMatrix& other) const;
  RationalMatrix minus(const RationalMatrix& other) const;

  bool operator==(const RationalMatrix& other) const = default;

  std::vector<std::vector<double>> to_double() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<mpq_class> data_;
};

// lazy_mix(delta, P) = (1 - delta) * I + delta * P, holding probability 1 - delta
RationalMatrix lazy_mix(const mpq_class& delta, const RationalMatrix& P);

std::string rational_to_string(const mpq_class& x);
mpq_class rational_from_string(const std::string& text);

}  // namespace curvemix
