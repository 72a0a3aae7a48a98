#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "curvemix/core.hpp"
#include "curvemix/rational.hpp"
#include "curvemix/rng.hpp"
#include "curvemix/statespace.hpp"

namespace curvemix::testsupport {

SpecPtr make_spec(std::vector<int> r, std::vector<int> c,
                  std::vector<std::pair<int, int>> forbidden = {});
SpecPtr diagonal_spec(std::vector<int> r, std::vector<int> c);

SpecPtr perm3_spec();                // r = c = (1,1,1), nothing forbidden
SpecPtr regular_spec(int n, int d);  // r = c = (d..d), diagonal forbidden

// Every matrix among all 2^(m*n) that satisfies the instance, as sorted
// canonical keys. Independent of the backtracking enumerator.
std::vector<std::string> filter_all_keys(const SpecPtr& spec);

// Margin signature of one matrix: row and column sums packed into a uint64
// at the smallest field width the shape allows. Covers every shape with
// m * n <= 20.
std::uint64_t margin_signature(const std::vector<int>& r,
                               const std::vector<int>& c);
std::pair<std::vector<int>, std::vector<int>> decode_signature(
    int m, int n, std::uint64_t sig);

// One pass over all 2^(m*n) matrices (diagonal entries forced to zero when
// diagonal is set), counting matrices per margin signature.
std::unordered_map<std::uint64_t, long long> scan_shape(int m, int n,
                                                        bool diagonal);

struct SweepInstance {
  std::string name;
  SpecPtr spec;
  long long N = 0;
};

// Feasible margin classes of one shape with r and c non-increasing, at least
// two states, and an irreducible switch graph; the `keep` largest by N.
std::vector<SweepInstance> margin_classes(int m, int n, bool diagonal,
                                          int keep);

// All feasible margin classes of one shape with r and c non-increasing,
// including single-state and reducible ones.
std::vector<SweepInstance> all_margin_classes(int m, int n);

// The shared instance set used by the theorem suites: the largest classes of
// every shape with 2 <= m <= 4 and 3 <= n <= 4, plus forbidden-diagonal
// square variants.
const std::vector<SweepInstance>& sweep();

// Metropolis chain over a complete graph with random integer weights;
// reversible by construction, exact rational entries.
RationalMatrix random_reversible_chain(int size, RngStream& rng);

using StepFn = std::function<BinaryMatrix(const BinaryMatrix&, RngStream&)>;

struct FrequencyCheck {
  bool ok = true;
  double worst_z = 0.0;   // largest |freq - p| / sigma over entries with p > 0
  int worst_state = -1;
  long long off_support = 0;  // draws that landed on zero-probability states
};

// reps independent one-step draws from A0, compared entrywise against the
// exact transition row at four standard deviations of the binomial model.
FrequencyCheck one_step_frequencies(const StateSpace& space,
                                    const BinaryMatrix& A0, const StepFn& step,
                                    const std::vector<mpq_class>& exact_row,
                                    int reps, std::uint64_t seed);

}  // namespace curvemix::testsupport
