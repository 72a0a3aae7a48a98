#include "curvemix/rational.hpp"

#include "curvemix/core.hpp"

namespace curvemix {

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix M(n, n);
  for (int i = 0; i < n; ++i) M.at(i, i) = 1;
  return M;
}

mpq_class RationalMatrix::row_sum(int i) const {
  mpq_class s = 0;
  for (int j = 0; j < cols_; ++j) s += at(i, j);
  return s;
}

bool RationalMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

bool RationalMatrix::is_stochastic() const {
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j)
      if (at(i, j) < 0) return false;
    if (row_sum(i) != 1) return false;
  }
  return true;
}

mpq_class RationalMatrix::min_entry() const {
  mpq_class best = data_.empty() ? mpq_class(0) : data_.front();
  for (const mpq_class& x : data_)
    if (x < best) best = x;
  return best;
}

RationalMatrix RationalMatrix::multiply(const RationalMatrix& other) const {
  if (cols_ != other.rows_)
    fail(ErrorCode::LengthMismatch, "matrix product dimension mismatch");
  RationalMatrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const mpq_class& a = at(i, k);
      if (a == 0) continue;
      for (int j = 0; j < other.cols_; ++j)
        out.at(i, j) += a * other.at(k, j);
    }
  return out;
}

RationalMatrix RationalMatrix::scaled(const mpq_class& factor) const {
  RationalMatrix out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(i, j) = at(i, j) * factor;
  return out;
}

RationalMatrix RationalMatrix::plus(const RationalMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    fail(ErrorCode::LengthMismatch, "matrix sum dimension mismatch");
  RationalMatrix out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(i, j) = at(i, j) + other.at(i, j);
  return out;
}

RationalMatrix RationalMatrix::minus(const RationalMatrix& other) const {
  return plus(other.scaled(-1));
}

std::vector<std::vector<double>> RationalMatrix::to_double() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i) {
    out[i].resize(static_cast<std::size_t>(cols_));
    for (int j = 0; j < cols_; ++j) out[i][j] = at(i, j).get_d();
  }
  return out;
}

RationalMatrix lazy_mix(const mpq_class& delta, const RationalMatrix& P) {
  if (delta <= 0 || delta >= 1)
    fail(ErrorCode::BadDelta, "need 0 < delta < 1");
  RationalMatrix out = P.scaled(delta);
  for (int i = 0; i < P.rows(); ++i) out.at(i, i) += 1 - delta;
  return out;
}

std::string rational_to_string(const mpq_class& x) {
  return x.get_str();
}

mpq_class rational_from_string(const std::string& text) {
  mpq_class x;
  if (x.set_str(text, 10) != 0)
    fail(ErrorCode::BadPQ, "cannot parse rational '" + text + "'");
  x.canonicalize();
  if (x.get_den() <= 0) fail(ErrorCode::BadPQ, "denominator must be positive");
  return x;
}

}  // namespace curvemix
