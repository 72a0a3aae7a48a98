#include "curvemix/core.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace curvemix {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MarginMismatch: return "MarginMismatch";
    case ErrorCode::InfeasibleRow: return "InfeasibleRow";
    case ErrorCode::InfeasibleColumn: return "InfeasibleColumn";
    case ErrorCode::ForbiddenOutOfRange: return "ForbiddenOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::NotACheckerboard: return "NotACheckerboard";
    case ErrorCode::ForbiddenEntryTouched: return "ForbiddenEntryTouched";
    case ErrorCode::BadTradeSet: return "BadTradeSet";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::BadDelta: return "BadDelta";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::EmptyStateSpace: return "EmptyStateSpace";
    case ErrorCode::StateNotFound: return "StateNotFound";
    case ErrorCode::OverlappingPairs: return "OverlappingPairs";
    case ErrorCode::NotIsomorphic: return "NotIsomorphic";
    case ErrorCode::ReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorCode::BadPQ: return "BadPQ";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::ConditionFailed: return "ConditionFailed";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::Periodic: return "Periodic";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::NegativeLazySpectrum: return "NegativeLazySpectrum";
    case ErrorCode::InconsistentVerdict: return "InconsistentVerdict";
    case ErrorCode::NotReversible: return "NotReversible";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::BadDescriptor: return "BadDescriptor";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

namespace detail {

void index_out_of_range(const char* what, int value) {
  fail(ErrorCode::IndexOutOfRange,
       std::string(what) + " " + std::to_string(value + 1));
}

}  // namespace detail

bool MarginSpec::same_instance(const MarginSpec& other) const {
  return m == other.m && n == other.n && r == other.r && c == other.c &&
         forbidden == other.forbidden;
}

SpecPtr validate_instance(MarginSpec spec) {
  if (spec.m <= 0 || spec.n <= 0)
    fail(ErrorCode::InfeasibleRow, "matrix dimensions must be positive");
  if (static_cast<int>(spec.r.size()) != spec.m)
    fail(ErrorCode::InfeasibleRow, "row-sum vector length does not match m");
  if (static_cast<int>(spec.c.size()) != spec.n)
    fail(ErrorCode::InfeasibleColumn, "column-sum vector length does not match n");

  std::sort(spec.forbidden.begin(), spec.forbidden.end());
  if (std::adjacent_find(spec.forbidden.begin(), spec.forbidden.end()) !=
      spec.forbidden.end())
    fail(ErrorCode::ForbiddenOutOfRange, "duplicate forbidden entry");
  for (auto [i, j] : spec.forbidden)
    if (i < 0 || i >= spec.m || j < 0 || j >= spec.n)
      fail(ErrorCode::ForbiddenOutOfRange,
           "forbidden entry (" + std::to_string(i + 1) + "," +
               std::to_string(j + 1) + ") outside the matrix");

  spec.words_per_row = (spec.n + 63) / 64;
  spec.forbidden_mask.assign(
      static_cast<std::size_t>(spec.m) * spec.words_per_row, 0);
  std::vector<int> forb_row(spec.m, 0), forb_col(spec.n, 0);
  for (auto [i, j] : spec.forbidden) {
    spec.forbidden_mask[static_cast<std::size_t>(i) * spec.words_per_row +
                        j / 64] |= std::uint64_t{1} << (j % 64);
    ++forb_row[i];
    ++forb_col[j];
  }

  long long sum_r = std::accumulate(spec.r.begin(), spec.r.end(), 0LL);
  long long sum_c = std::accumulate(spec.c.begin(), spec.c.end(), 0LL);
  if (sum_r != sum_c)
    fail(ErrorCode::MarginMismatch,
         "row sums total " + std::to_string(sum_r) + " but column sums total " +
             std::to_string(sum_c));
  for (int i = 0; i < spec.m; ++i)
    if (spec.r[i] < 0 || spec.r[i] > spec.n - forb_row[i])
      fail(ErrorCode::InfeasibleRow,
           "row " + std::to_string(i + 1) + " needs " + std::to_string(spec.r[i]) +
               " ones but only " + std::to_string(spec.n - forb_row[i]) +
               " columns are allowed");
  for (int j = 0; j < spec.n; ++j)
    if (spec.c[j] < 0 || spec.c[j] > spec.m - forb_col[j])
      fail(ErrorCode::InfeasibleColumn,
           "column " + std::to_string(j + 1) + " needs " +
               std::to_string(spec.c[j]) + " ones but only " +
               std::to_string(spec.m - forb_col[j]) + " rows are allowed");

  spec.r_max = *std::max_element(spec.r.begin(), spec.r.end());
  spec.rho_total = sum_r;
  spec.validated = true;
  return std::make_shared<const MarginSpec>(std::move(spec));
}

namespace {

void check_validated(const MarginSpec& spec) {
  if (!spec.validated)
    fail(ErrorCode::SpecMismatch, "MarginSpec was not validated");
}

void check_row(const MarginSpec& spec, int i) {
  if (i < 0 || i >= spec.m)
    fail(ErrorCode::IndexOutOfRange, "row index " + std::to_string(i + 1));
}

void check_col(const MarginSpec& spec, int j) {
  if (j < 0 || j >= spec.n)
    fail(ErrorCode::IndexOutOfRange, "column index " + std::to_string(j + 1));
}

}  // namespace

BinaryMatrix::BinaryMatrix(SpecPtr spec) : spec_(std::move(spec)) {
  check_validated(*spec_);
  bits_.assign(static_cast<std::size_t>(spec_->m) * spec_->words_per_row, 0);
}

BinaryMatrix BinaryMatrix::from_rows(SpecPtr spec,
                                     const std::vector<std::vector<int>>& rows01) {
  BinaryMatrix A(std::move(spec));
  const MarginSpec& s = A.spec();
  if (static_cast<int>(rows01.size()) != s.m)
    fail(ErrorCode::LengthMismatch, "expected " + std::to_string(s.m) + " rows");
  for (int i = 0; i < s.m; ++i) {
    if (static_cast<int>(rows01[i].size()) != s.n)
      fail(ErrorCode::LengthMismatch, "row " + std::to_string(i + 1) +
                                          " expected " + std::to_string(s.n) +
                                          " entries");
    for (int j = 0; j < s.n; ++j) {
      if (rows01[i][j] != 0 && rows01[i][j] != 1)
        fail(ErrorCode::IoError, "entries must be 0 or 1");
      A.set(i, j, rows01[i][j] == 1);
    }
  }
  if (!A.satisfies_spec())
    fail(ErrorCode::MarginMismatch, "matrix does not satisfy its instance");
  return A;
}

bool BinaryMatrix::satisfies_spec() const {
  const MarginSpec& s = *spec_;
  std::vector<int> col_sum(s.n, 0);
  for (int i = 0; i < s.m; ++i) {
    int row_sum = 0;
    for (int w = 0; w < s.words_per_row; ++w) {
      std::uint64_t word = row_word(i, w);
      row_sum += std::popcount(word);
      if (word & s.forbidden_mask[static_cast<std::size_t>(i) * s.words_per_row + w])
        return false;
    }
    if (row_sum != s.r[i]) return false;
    for (int j = 0; j < s.n; ++j) col_sum[j] += get(i, j) ? 1 : 0;
  }
  for (int j = 0; j < s.n; ++j)
    if (col_sum[j] != s.c[j]) return false;
  return true;
}

std::vector<std::vector<int>> BinaryMatrix::to_rows() const {
  std::vector<std::vector<int>> rows(spec_->m, std::vector<int>(spec_->n, 0));
  for (int i = 0; i < spec_->m; ++i)
    for (int j = 0; j < spec_->n; ++j) rows[i][j] = get(i, j) ? 1 : 0;
  return rows;
}

bool BinaryMatrix::operator==(const BinaryMatrix& other) const {
  return spec_->same_instance(*other.spec_) && bits_ == other.bits_;
}

RowPairStats row_pair_stats(const BinaryMatrix& A, int i, int j) {
  const MarginSpec& s = A.spec();
  check_row(s, i);
  check_row(s, j);
  if (i >= j) fail(ErrorCode::IndexOutOfRange, "need i < j");
  RowPairStats st;
  st.i = i;
  st.j = j;
  for (int w = 0; w < s.words_per_row; ++w) {
    std::uint64_t ri = A.row_word(i, w);
    std::uint64_t rj = A.row_word(j, w);
    std::uint64_t fi =
        s.forbidden_mask[static_cast<std::size_t>(i) * s.words_per_row + w];
    std::uint64_t fj =
        s.forbidden_mask[static_cast<std::size_t>(j) * s.words_per_row + w];
    std::uint64_t uw = ri & ~rj & ~fj;
    std::uint64_t lw = ~ri & rj & ~fi;
    for (std::uint64_t x = uw; x; x &= x - 1)
      st.U.push_back(w * 64 + std::countr_zero(x));
    for (std::uint64_t x = lw; x; x &= x - 1)
      st.L.push_back(w * 64 + std::countr_zero(x));
  }
  st.u = static_cast<int>(st.U.size());
  st.l = static_cast<int>(st.L.size());
  st.trade_columns.resize(st.U.size() + st.L.size());
  std::merge(st.U.begin(), st.U.end(), st.L.begin(), st.L.end(),
             st.trade_columns.begin());
  return st;
}

std::optional<SwitchMove> is_switch_adjacent(const BinaryMatrix& A,
                                             const BinaryMatrix& B) {
  if (!A.spec().same_instance(B.spec()))
    fail(ErrorCode::SpecMismatch, "matrices belong to different instances");
  const MarginSpec& s = A.spec();
  int ri = -1, rj = -1;
  for (int i = 0; i < s.m; ++i) {
    bool differs = false;
    for (int w = 0; w < s.words_per_row; ++w)
      if (A.row_word(i, w) != B.row_word(i, w)) {
        differs = true;
        break;
      }
    if (!differs) continue;
    if (ri < 0)
      ri = i;
    else if (rj < 0)
      rj = i;
    else
      return std::nullopt;
  }
  if (rj < 0) return std::nullopt;

  int k = -1, l = -1;
  for (int w = 0; w < s.words_per_row; ++w) {
    std::uint64_t di = A.row_word(ri, w) ^ B.row_word(ri, w);
    std::uint64_t dj = A.row_word(rj, w) ^ B.row_word(rj, w);
    if (di != dj) return std::nullopt;
    for (std::uint64_t x = di; x; x &= x - 1) {
      int col = w * 64 + std::countr_zero(x);
      if (k < 0)
        k = col;
      else if (l < 0)
        l = col;
      else
        return std::nullopt;
    }
  }
  if (l < 0) return std::nullopt;
  bool aik = A.get(ri, k);
  if (aik == A.get(ri, l) || A.get(rj, k) == aik || A.get(rj, l) != aik)
    return std::nullopt;
  if (s.forbidden_at(ri, k) || s.forbidden_at(ri, l) || s.forbidden_at(rj, k) ||
      s.forbidden_at(rj, l))
    return std::nullopt;
  return SwitchMove{ri, rj, k, l};
}

BinaryMatrix apply_switch(const BinaryMatrix& A, int i, int j, int k, int l) {
  const MarginSpec& s = A.spec();
  check_row(s, i);
  check_row(s, j);
  check_col(s, k);
  check_col(s, l);
  if (i == j || k == l)
    fail(ErrorCode::NotACheckerboard, "rows and columns must be distinct");
  bool aik = A.get(i, k);
  if (A.get(i, l) == aik || A.get(j, k) == aik || A.get(j, l) != aik)
    fail(ErrorCode::NotACheckerboard, "2x2 block is not a checkerboard");
  if (s.forbidden_at(i, k) || s.forbidden_at(i, l) || s.forbidden_at(j, k) ||
      s.forbidden_at(j, l))
    fail(ErrorCode::ForbiddenEntryTouched, "switch touches a forbidden entry");
  BinaryMatrix B = A;
  B.set(i, k, !aik);
  B.set(i, l, aik);
  B.set(j, k, aik);
  B.set(j, l, !aik);
  return B;
}

BinaryMatrix apply_trade(const BinaryMatrix& A, int i, int j,
                         const std::vector<int>& S) {
  RowPairStats st = row_pair_stats(A, i, j);
  if (static_cast<int>(S.size()) != st.u)
    fail(ErrorCode::BadTradeSet, "trade set must have exactly u columns");
  std::vector<int> sorted_s = S;
  std::sort(sorted_s.begin(), sorted_s.end());
  if (std::adjacent_find(sorted_s.begin(), sorted_s.end()) != sorted_s.end())
    fail(ErrorCode::BadTradeSet, "trade set has duplicates");
  if (!std::includes(st.trade_columns.begin(), st.trade_columns.end(),
                     sorted_s.begin(), sorted_s.end()))
    fail(ErrorCode::BadTradeSet, "trade set is not a subset of the trade columns");
  BinaryMatrix B = A;
  std::size_t pos = 0;
  for (int col : st.trade_columns) {
    bool to_i = pos < sorted_s.size() && sorted_s[pos] == col;
    if (to_i) ++pos;
    B.set(i, col, to_i);
    B.set(j, col, !to_i);
  }
  return B;
}

std::string canonical_key(const BinaryMatrix& A) {
  const MarginSpec& s = A.spec();
  int bytes_per_row = (s.n + 7) / 8;
  std::string key(static_cast<std::size_t>(s.m) * bytes_per_row, '\0');
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j)
      if (A.get(i, j))
        key[static_cast<std::size_t>(i) * bytes_per_row + j / 8] |=
            static_cast<char>(0x80u >> (j % 8));
  return key;
}

std::string key_to_hex(const std::string& key) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(key.size() * 2);
  for (unsigned char b : key) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

BinaryMatrix matrix_from_key(SpecPtr spec, const std::string& key) {
  BinaryMatrix A(std::move(spec));
  const MarginSpec& s = A.spec();
  int bytes_per_row = (s.n + 7) / 8;
  if (key.size() != static_cast<std::size_t>(s.m) * bytes_per_row)
    fail(ErrorCode::LengthMismatch, "key has the wrong length");
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.n; ++j) {
      unsigned char b = static_cast<unsigned char>(
          key[static_cast<std::size_t>(i) * bytes_per_row + j / 8]);
      if (b & (0x80u >> (j % 8))) A.set(i, j, true);
    }
  return A;
}

}  // namespace curvemix
