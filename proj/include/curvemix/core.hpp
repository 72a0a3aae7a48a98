#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace curvemix {

enum class ErrorCode {
  MarginMismatch,
  InfeasibleRow,
  InfeasibleColumn,
  ForbiddenOutOfRange,
  IndexOutOfRange,
  SpecMismatch,
  NotACheckerboard,
  ForbiddenEntryTouched,
  BadTradeSet,
  AssumptionViolated,
  BadGamma,
  BadDelta,
  KTooLarge,
  StateSpaceTooLarge,
  EmptyStateSpace,
  StateNotFound,
  OverlappingPairs,
  NotIsomorphic,
  ReconstructionMismatch,
  BadPQ,
  NoConvergence,
  NotSymmetric,
  ConditionFailed,
  NegativeEigenvalue,
  Periodic,
  Reducible,
  NotRegular,
  NegativeLazySpectrum,
  InconsistentVerdict,
  NotReversible,
  LengthMismatch,
  HorizonExceeded,
  BoundViolated,
  BadDescriptor,
  IoError,
  Usage,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

[[nodiscard]] const char* error_code_name(ErrorCode code);

// All indices are 0-based in code; the IO layer converts from/to the 1-based
// convention used in instance files and printed reports.
struct MarginSpec {
  int m = 0;
  int n = 0;
  std::vector<int> r;
  std::vector<int> c;
  std::vector<std::pair<int, int>> forbidden;  // sorted, unique

  // caches, populated by validate_instance
  int r_max = 0;
  long long rho_total = 0;
  int words_per_row = 0;
  std::vector<std::uint64_t> forbidden_mask;  // m * words_per_row, bit j of row i
  bool validated = false;

  [[nodiscard]] bool forbidden_at(int i, int j) const;
  [[nodiscard]] bool same_instance(const MarginSpec& other) const;
};

namespace detail {
[[noreturn]] void index_out_of_range(const char* what, int value);
}

using SpecPtr = std::shared_ptr<const MarginSpec>;

// Checks every MarginSpec invariant and populates the caches.
SpecPtr validate_instance(MarginSpec spec);

class BinaryMatrix {
 public:
  explicit BinaryMatrix(SpecPtr spec);  // all-zero entries
  static BinaryMatrix from_rows(SpecPtr spec,
                                const std::vector<std::vector<int>>& rows01);

  [[nodiscard]] const MarginSpec& spec() const { return *spec_; }
  [[nodiscard]] const SpecPtr& spec_ptr() const { return spec_; }
  [[nodiscard]] bool get(int i, int j) const;
  void set(int i, int j, bool value);
  [[nodiscard]] std::uint64_t row_word(int i, int w) const;
  [[nodiscard]] bool satisfies_spec() const;  // margins + forbidden zeros
  [[nodiscard]] std::vector<std::vector<int>> to_rows() const;
  bool operator==(const BinaryMatrix& other) const;

 private:
  SpecPtr spec_;
  std::vector<std::uint64_t> bits_;
};

struct RowPairStats {
  int i = 0;
  int j = 0;
  std::vector<int> U;              // columns k with A(i,k)=1, A(j,k)=0, (j,k) allowed
  std::vector<int> L;              // columns k with A(i,k)=0, A(j,k)=1, (i,k) allowed
  std::vector<int> trade_columns;  // U ∪ L, ascending
  int u = 0;
  int l = 0;
};

RowPairStats row_pair_stats(const BinaryMatrix& A, int i, int j);

struct SwitchMove {
  int i = 0;
  int j = 0;
  int k = 0;
  int l = 0;
};

// The unique (i<j, {k,l}) such that B = apply_switch(A,i,j,k,l); absent when
// A = B or the difference is not a single switch.
std::optional<SwitchMove> is_switch_adjacent(const BinaryMatrix& A,
                                             const BinaryMatrix& B);

BinaryMatrix apply_switch(const BinaryMatrix& A, int i, int j, int k, int l);

// Redistributes ones on trade_columns(A,i,j): row i gets ones exactly at S,
// row j the complement. S must be a u-subset of the trade columns.
BinaryMatrix apply_trade(const BinaryMatrix& A, int i, int j,
                         const std::vector<int>& S);

// Injective, order-compatible byte encoding: row-major, MSB of each byte is
// the lowest column, each row padded to whole bytes.
[[nodiscard]] std::string canonical_key(const BinaryMatrix& A);
[[nodiscard]] std::string key_to_hex(const std::string& key);
BinaryMatrix matrix_from_key(SpecPtr spec, const std::string& key);

[[nodiscard]] inline long long pairs_of(long long x) { return x * (x - 1) / 2; }

inline bool MarginSpec::forbidden_at(int i, int j) const {
  return (forbidden_mask[static_cast<std::size_t>(i) * words_per_row + j / 64] >>
          (j % 64)) & 1u;
}

inline bool BinaryMatrix::get(int i, int j) const {
  return (bits_[static_cast<std::size_t>(i) * spec_->words_per_row + j / 64] >>
          (j % 64)) & 1u;
}

inline void BinaryMatrix::set(int i, int j, bool value) {
  if (i < 0 || i >= spec_->m) detail::index_out_of_range("row index", i);
  if (j < 0 || j >= spec_->n) detail::index_out_of_range("column index", j);
  std::uint64_t& w =
      bits_[static_cast<std::size_t>(i) * spec_->words_per_row + j / 64];
  if (value)
    w |= std::uint64_t{1} << (j % 64);
  else
    w &= ~(std::uint64_t{1} << (j % 64));
}

inline std::uint64_t BinaryMatrix::row_word(int i, int w) const {
  return bits_[static_cast<std::size_t>(i) * spec_->words_per_row + w];
}

}  // namespace curvemix
