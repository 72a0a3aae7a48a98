#include "curvemix/samplers.hpp"

#include <algorithm>

#include "curvemix/rational.hpp"
#include "curvemix/statespace.hpp"

namespace curvemix {

namespace {

std::pair<int, int> decode_row_pair(long long t, int m) {
  for (int i = 0; i < m - 1; ++i) {
    long long count = m - 1 - i;
    if (t < count) return {i, i + 1 + static_cast<int>(t)};
    t -= count;
  }
  fail(ErrorCode::IndexOutOfRange, "row pair index");
}

std::uint64_t to_u64(const mpz_class& z) {
  if (z < 0 || !z.fits_ulong_p())
    fail(ErrorCode::BadGamma, "rational does not fit in 64 bits");
  return static_cast<std::uint64_t>(z.get_ui());
}

std::vector<int> uniform_subset(const std::vector<int>& columns, int size,
                                RngStream& rng) {
  std::vector<int> pool = columns;
  for (int t = 0; t < size; ++t) {
    std::size_t pick =
        t + static_cast<std::size_t>(rng.uniform_below(pool.size() - t));
    std::swap(pool[t], pool[pick]);
  }
  std::vector<int> subset(pool.begin(), pool.begin() + size);
  std::sort(subset.begin(), subset.end());
  return subset;
}

BinaryMatrix trade_uniform(const BinaryMatrix& A, int i, int j,
                           RngStream& rng) {
  RowPairStats st = row_pair_stats(A, i, j);
  return apply_trade(A, i, j, uniform_subset(st.trade_columns, st.u, rng));
}

}  // namespace

bool bernoulli_rational(RngStream& rng, const mpq_class& probability) {
  if (probability < 0 || probability > 1)
    fail(ErrorCode::BadGamma, "probability outside [0,1]");
  return rng.bernoulli_ratio(to_u64(probability.get_num()),
                             to_u64(probability.get_den()));
}

ChainSpec parse_chain_descriptor(const std::string& text) {
  ChainSpec chain;
  auto arg_of = [&](const std::string& prefix) {
    return text.substr(prefix.size());
  };
  if (text == "ktv") {
    chain.kind = ChainKind::KTVSwitch;
  } else if (text == "curveball") {
    chain.kind = ChainKind::Curveball;
  } else if (text == "edge") {
    chain.kind = ChainKind::EdgeSwitch;
  } else if (text.rfind("gamma:", 0) == 0) {
    chain.kind = ChainKind::GammaSwitch;
    chain.gamma = rational_from_string(arg_of("gamma:"));
    if (chain.gamma <= 0) fail(ErrorCode::BadGamma, "need gamma > 0");
  } else if (text.rfind("kcurveball:", 0) == 0) {
    chain.kind = ChainKind::KCurveball;
    const std::string arg = arg_of("kcurveball:");
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(arg, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::BadDescriptor, "bad k in '" + text + "'");
    }
    if (used != arg.size() || k < 1)
      fail(ErrorCode::BadDescriptor, "bad k in '" + text + "'");
    chain.k = k;
  } else if (text.rfind("edge-lazy:", 0) == 0) {
    chain.kind = ChainKind::EdgeSwitch;
    mpq_class delta = rational_from_string(arg_of("edge-lazy:"));
    if (delta <= 0 || delta >= 1)
      fail(ErrorCode::BadDelta, "need 0 < delta < 1");
    chain.laziness = delta;
  } else {
    fail(ErrorCode::BadDescriptor, "unknown chain '" + text + "'");
  }
  return chain;
}

std::string chain_name(const ChainSpec& chain) {
  std::string name;
  switch (chain.kind) {
    case ChainKind::GammaSwitch:
      name = "gamma:" + chain.gamma.get_str();
      break;
    case ChainKind::KTVSwitch:
      name = "ktv";
      break;
    case ChainKind::Curveball:
      name = "curveball";
      break;
    case ChainKind::KCurveball:
      name = "kcurveball:" + std::to_string(chain.k);
      break;
    case ChainKind::EdgeSwitch:
      name = chain.laziness ? "edge-lazy:" + chain.laziness->get_str() : "edge";
      break;
  }
  if (chain.laziness && chain.kind != ChainKind::EdgeSwitch)
    name += "@lazy:" + chain.laziness->get_str();
  return name;
}

mpq_class effective_gamma(const ChainSpec& chain, const MarginSpec& spec) {
  switch (chain.kind) {
    case ChainKind::GammaSwitch:
      if (chain.gamma <= 0) fail(ErrorCode::BadGamma, "need gamma > 0");
      return chain.gamma;
    case ChainKind::KTVSwitch: {
      if (spec.n < 2) fail(ErrorCode::BadGamma, "ktv chain needs n >= 2");
      mpq_class gamma(2, static_cast<long>(spec.n) * (spec.n - 1));
      gamma.canonicalize();
      return gamma;
    }
    case ChainKind::EdgeSwitch:
      if (spec.rho_total < 2)
        fail(ErrorCode::BadGamma, "edge chain needs at least two ones");
      return mpq_class(static_cast<long>(pairs_of(spec.m))) /
             mpq_class(static_cast<long>(pairs_of(spec.rho_total)));
    default:
      fail(ErrorCode::BadGamma, "chain has no switch probability");
  }
}

GammaCheck check_gamma_assumption(const SpecPtr& spec, const mpq_class& gamma,
                                  GammaCheckMode mode, long long cap) {
  if (gamma <= 0) fail(ErrorCode::BadGamma, "need gamma > 0");
  GammaCheck res;
  if (mode == GammaCheckMode::Bound) {
    res.sufficient_only = true;
    for (int i = 0; i < spec->m; ++i)
      for (int j = i + 1; j < spec->m; ++j) {
        long long cols = std::min<long long>(
            spec->n, static_cast<long long>(spec->r[i]) + spec->r[j]);
        long long bound = cols * cols / 4;
        if (bound > res.max_ul) {
          res.max_ul = bound;
          res.witness_pair = {i, j};
        }
      }
    res.satisfied = mpq_class(static_cast<long>(res.max_ul)) * gamma < 1;
    return res;
  }
  StateSpace space = enumerate_states(spec, cap);
  for (const BinaryMatrix& A : space.states)
    for (int i = 0; i < spec->m; ++i)
      for (int j = i + 1; j < spec->m; ++j) {
        RowPairStats st = row_pair_stats(A, i, j);
        long long ul = static_cast<long long>(st.u) * st.l;
        if (ul > res.max_ul) {
          res.max_ul = ul;
          res.witness = A;
          res.witness_pair = {i, j};
        }
      }
  res.satisfied = mpq_class(static_cast<long>(res.max_ul)) * gamma < 1;
  return res;
}

BinaryMatrix step_gamma_switch(const BinaryMatrix& A, const mpq_class& gamma,
                               RngStream& rng) {
  const MarginSpec& spec = A.spec();
  auto [i, j] = decode_row_pair(
      static_cast<long long>(rng.uniform_below(pairs_of(spec.m))), spec.m);
  RowPairStats st = row_pair_stats(A, i, j);
  mpq_class move = mpq_class(static_cast<long>(st.u) * st.l) * gamma;
  if (move >= 1)
    fail(ErrorCode::AssumptionViolated,
         "u*l*gamma >= 1 on rows (" + std::to_string(i + 1) + "," +
             std::to_string(j + 1) + ")");
  if (!bernoulli_rational(rng, move)) return A;
  int k = st.U[rng.uniform_below(st.u)];
  int l = st.L[rng.uniform_below(st.l)];
  return apply_switch(A, i, j, k, l);
}

BinaryMatrix step_ktv_classical(const BinaryMatrix& A, RngStream& rng) {
  const MarginSpec& spec = A.spec();
  if (spec.m < 2 || spec.n < 2)
    fail(ErrorCode::IndexOutOfRange, "needs two rows and two columns");
  auto [i, j] = decode_row_pair(
      static_cast<long long>(rng.uniform_below(pairs_of(spec.m))), spec.m);
  auto [k, l] = decode_row_pair(
      static_cast<long long>(rng.uniform_below(pairs_of(spec.n))), spec.n);
  bool ik = A.get(i, k), il = A.get(i, l);
  bool jk = A.get(j, k), jl = A.get(j, l);
  if (ik && jl && !il && !jk) {
    if (!spec.forbidden_at(i, l) && !spec.forbidden_at(j, k))
      return apply_switch(A, i, j, k, l);
  } else if (il && jk && !ik && !jl) {
    if (!spec.forbidden_at(i, k) && !spec.forbidden_at(j, l))
      return apply_switch(A, i, j, l, k);
  }
  return A;
}

BinaryMatrix step_curveball(const BinaryMatrix& A, RngStream& rng) {
  const MarginSpec& spec = A.spec();
  auto [i, j] = decode_row_pair(
      static_cast<long long>(rng.uniform_below(pairs_of(spec.m))), spec.m);
  return trade_uniform(A, i, j, rng);
}

std::vector<std::pair<int, int>> sample_disjoint_pairs(int m, int k,
                                                       RngStream& rng) {
  if (k < 1 || 2 * k > m) fail(ErrorCode::KTooLarge, "need 1 <= 2k <= m");
  std::vector<int> rows(m);
  for (int i = 0; i < m; ++i) rows[i] = i;
  for (int t = 0; t < 2 * k; ++t) {
    std::size_t pick =
        t + static_cast<std::size_t>(rng.uniform_below(m - t));
    std::swap(rows[t], rows[pick]);
  }
  std::vector<int> chosen(rows.begin(), rows.begin() + 2 * k);
  std::sort(chosen.begin(), chosen.end());
  // uniform perfect matching: pair the smallest row with a uniform partner
  std::vector<std::pair<int, int>> pairs;
  while (!chosen.empty()) {
    int a = chosen.front();
    chosen.erase(chosen.begin());
    std::size_t pick =
        static_cast<std::size_t>(rng.uniform_below(chosen.size()));
    int b = chosen[pick];
    chosen.erase(chosen.begin() + pick);
    pairs.emplace_back(a, b);
  }
  return pairs;
}

BinaryMatrix step_k_curveball(const BinaryMatrix& A, int k, RngStream& rng) {
  BinaryMatrix result = A;
  for (auto [i, j] : sample_disjoint_pairs(A.spec().m, k, rng))
    result = trade_uniform(result, i, j, rng);
  return result;
}

EdgeSwitchSampler::EdgeSwitchSampler(const BinaryMatrix& A) : A_(A) {
  const MarginSpec& spec = A.spec();
  if (spec.rho_total < 2)
    fail(ErrorCode::BadGamma, "edge chain needs at least two ones");
  for (int i = 0; i < spec.m; ++i)
    for (int j = 0; j < spec.n; ++j)
      if (A.get(i, j)) ones_.emplace_back(i, j);
}

void EdgeSwitchSampler::step(RngStream& rng) {
  std::size_t a = static_cast<std::size_t>(rng.uniform_below(ones_.size()));
  std::size_t b =
      static_cast<std::size_t>(rng.uniform_below(ones_.size() - 1));
  if (b >= a) ++b;
  auto [i, ca] = ones_[a];
  auto [j, cb] = ones_[b];
  if (i == j || ca == cb) return;
  const MarginSpec& spec = A_.spec();
  if (A_.get(i, cb) || A_.get(j, ca)) return;
  if (spec.forbidden_at(i, cb) || spec.forbidden_at(j, ca)) return;
  A_ = i < j ? apply_switch(A_, i, j, ca, cb) : apply_switch(A_, j, i, cb, ca);
  ones_[a] = {i, cb};
  ones_[b] = {j, ca};
}

BinaryMatrix step_edge_switch(const BinaryMatrix& A, RngStream& rng) {
  EdgeSwitchSampler sampler(A);
  sampler.step(rng);
  return sampler.current();
}

BinaryMatrix run_chain(const BinaryMatrix& A0, const ChainSpec& chain,
                       long long steps, std::uint64_t seed,
                       std::vector<BinaryMatrix>* trajectory, long long thin) {
  if (steps < 0) fail(ErrorCode::IndexOutOfRange, "steps must be >= 0");
  if (thin < 1) fail(ErrorCode::IndexOutOfRange, "thin must be >= 1");
  RngStream rng(seed);
  const SpecPtr& spec = A0.spec_ptr();

  std::optional<EdgeSwitchSampler> edge;
  if (chain.kind == ChainKind::EdgeSwitch) edge.emplace(A0);
  mpq_class gamma;
  if (chain.kind == ChainKind::GammaSwitch ||
      chain.kind == ChainKind::KTVSwitch)
    gamma = effective_gamma(chain, *spec);
  if (chain.kind == ChainKind::KCurveball && 2 * chain.k > spec->m)
    fail(ErrorCode::KTooLarge, "need 2k <= m");

  auto advance = [&](const BinaryMatrix& A, RngStream& r) -> BinaryMatrix {
    switch (chain.kind) {
      case ChainKind::GammaSwitch:
      case ChainKind::KTVSwitch:
        return step_gamma_switch(A, gamma, r);
      case ChainKind::Curveball:
        return step_curveball(A, r);
      case ChainKind::KCurveball:
        return step_k_curveball(A, chain.k, r);
      case ChainKind::EdgeSwitch:
        edge->step(r);
        return edge->current();
    }
    fail(ErrorCode::BadDescriptor, "unknown chain kind");
  };

  BinaryMatrix A = A0;
  for (long long t = 0; t < steps; ++t) {
    if (chain.laziness)
      A = step_lazy(A, *chain.laziness, advance, rng);
    else
      A = advance(A, rng);
    if (trajectory && (t + 1) % thin == 0) trajectory->push_back(A);
  }
  return A;
}

}  // namespace curvemix
