#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvemix/core.hpp"
#include "curvemix/rng.hpp"
#include "curvemix/statespace.hpp"

namespace curvemix {

enum class ChainKind { GammaSwitch, KTVSwitch, Curveball, KCurveball, EdgeSwitch };

// Chain descriptors accepted on the command line:
//   ktv | gamma:<p/q> | curveball | kcurveball:<k> | edge | edge-lazy:<p/q>
struct ChainSpec {
  ChainKind kind = ChainKind::Curveball;
  mpq_class gamma;                      // GammaSwitch only
  int k = 1;                            // KCurveball only
  std::optional<mpq_class> laziness;    // move probability delta in (0,1)
};

ChainSpec parse_chain_descriptor(const std::string& text);
std::string chain_name(const ChainSpec& chain);

// Per-switch probability gamma realizing the chain on this instance.
mpq_class effective_gamma(const ChainSpec& chain, const MarginSpec& spec);

struct GammaCheck {
  bool satisfied = false;
  bool sufficient_only = false;  // bound mode can only certify, not refute
  long long max_ul = 0;
  std::optional<BinaryMatrix> witness;
  std::pair<int, int> witness_pair{-1, -1};
};

enum class GammaCheckMode { Exact, Bound };

GammaCheck check_gamma_assumption(const SpecPtr& spec, const mpq_class& gamma,
                                  GammaCheckMode mode,
                                  long long cap = kDefaultStateCap);

BinaryMatrix step_gamma_switch(const BinaryMatrix& A, const mpq_class& gamma,
                               RngStream& rng);
// Classical realization: two uniform rows, two uniform columns, switch if the
// 2x2 block is a checkerboard with both complementary entries allowed.
BinaryMatrix step_ktv_classical(const BinaryMatrix& A, RngStream& rng);
BinaryMatrix step_curveball(const BinaryMatrix& A, RngStream& rng);
std::vector<std::pair<int, int>> sample_disjoint_pairs(int m, int k,
                                                       RngStream& rng);
BinaryMatrix step_k_curveball(const BinaryMatrix& A, int k, RngStream& rng);
BinaryMatrix step_edge_switch(const BinaryMatrix& A, RngStream& rng);

template <typename Step>
BinaryMatrix step_lazy(const BinaryMatrix& A, const mpq_class& delta,
                       Step&& inner, RngStream& rng);

// Keeps the list of one-positions current across steps, so each edge-switch
// draw costs O(1) plus the move itself.
class EdgeSwitchSampler {
 public:
  explicit EdgeSwitchSampler(const BinaryMatrix& A);
  const BinaryMatrix& current() const { return A_; }
  void step(RngStream& rng);

 private:
  BinaryMatrix A_;
  std::vector<std::pair<int, int>> ones_;
};

BinaryMatrix run_chain(const BinaryMatrix& A0, const ChainSpec& chain,
                       long long steps, std::uint64_t seed,
                       std::vector<BinaryMatrix>* trajectory = nullptr,
                       long long thin = 1);

bool bernoulli_rational(RngStream& rng, const mpq_class& probability);

template <typename Step>
BinaryMatrix step_lazy(const BinaryMatrix& A, const mpq_class& delta,
                       Step&& inner, RngStream& rng) {
  if (delta <= 0 || delta >= 1)
    fail(ErrorCode::BadDelta, "need 0 < delta < 1");
  if (!bernoulli_rational(rng, delta)) return A;
  return inner(A, rng);
}

}  // namespace curvemix
