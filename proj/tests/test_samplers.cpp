#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "curvemix/samplers.hpp"
#include "curvemix/spectral.hpp"
#include "support.hpp"

using namespace curvemix;
using testsupport::make_spec;
using testsupport::one_step_frequencies;
using testsupport::perm3_spec;

namespace {

std::vector<mpq_class> exact_row(const StateSpace& space,
                                 const ChainSpec& chain, int state) {
  RationalMatrix P = build_transition(space, chain).P;
  std::vector<mpq_class> row(space.N);
  for (int b = 0; b < space.N; ++b) row[b] = P.at(state, b);
  return row;
}

}  // namespace

TEST_CASE("parse_chain_descriptor accepts the documented grammar") {
  CHECK(parse_chain_descriptor("ktv").kind == ChainKind::KTVSwitch);
  CHECK(parse_chain_descriptor("curveball").kind == ChainKind::Curveball);
  CHECK(parse_chain_descriptor("edge").kind == ChainKind::EdgeSwitch);
  CHECK_FALSE(parse_chain_descriptor("edge").laziness.has_value());

  ChainSpec gamma = parse_chain_descriptor("gamma:2/9");
  CHECK(gamma.kind == ChainKind::GammaSwitch);
  CHECK(gamma.gamma == mpq_class(2, 9));

  ChainSpec kc = parse_chain_descriptor("kcurveball:3");
  CHECK(kc.kind == ChainKind::KCurveball);
  CHECK(kc.k == 3);

  ChainSpec lazy = parse_chain_descriptor("edge-lazy:1/4");
  CHECK(lazy.kind == ChainKind::EdgeSwitch);
  CHECK(lazy.laziness.has_value());
  CHECK(*lazy.laziness == mpq_class(1, 4));

  for (const char* text : {"ktv", "curveball", "edge", "gamma:2/9",
                           "kcurveball:3", "edge-lazy:1/4"})
    CHECK(chain_name(parse_chain_descriptor(text)) == text);
}

TEST_CASE("parse_chain_descriptor rejects malformed descriptors") {
  auto code_of = [](const std::string& text) {
    try {
      parse_chain_descriptor(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Usage;
  };
  CHECK(code_of("bogus") == ErrorCode::BadDescriptor);
  CHECK(code_of("kcurveball:x") == ErrorCode::BadDescriptor);
  CHECK(code_of("kcurveball:0") == ErrorCode::BadDescriptor);
  CHECK(code_of("gamma:nope") == ErrorCode::BadPQ);
  CHECK(code_of("gamma:0") == ErrorCode::BadGamma);
  CHECK(code_of("gamma:-1/3") == ErrorCode::BadGamma);
  CHECK(code_of("edge-lazy:0") == ErrorCode::BadDelta);
  CHECK(code_of("edge-lazy:5/4") == ErrorCode::BadDelta);
}

TEST_CASE("effective_gamma matches the chain definitions") {
  SpecPtr spec = perm3_spec();
  CHECK(effective_gamma(parse_chain_descriptor("ktv"), *spec) ==
        mpq_class(1, 3));
  CHECK(effective_gamma(parse_chain_descriptor("edge"), *spec) == 1);
  CHECK(effective_gamma(parse_chain_descriptor("gamma:1/7"), *spec) ==
        mpq_class(1, 7));

  SpecPtr wide = make_spec({2, 2}, {1, 1, 1, 1});
  CHECK(effective_gamma(parse_chain_descriptor("edge"), *wide) ==
        mpq_class(1, 6));  // C(2,2)=1 row pair over C(4,2)=6 entry pairs

  CHECK_THROWS_AS(
      effective_gamma(parse_chain_descriptor("curveball"), *spec), Error);
}

TEST_CASE("check_gamma_assumption certifies and refutes exactly") {
  SpecPtr spec = perm3_spec();
  GammaCheck ok = check_gamma_assumption(spec, mpq_class(1, 3),
                                         GammaCheckMode::Exact);
  CHECK(ok.satisfied);
  CHECK(ok.max_ul == 1);
  CHECK_FALSE(ok.sufficient_only);

  GammaCheck bad = check_gamma_assumption(spec, mpq_class(1),
                                          GammaCheckMode::Exact);
  CHECK_FALSE(bad.satisfied);
  CHECK(bad.witness.has_value());
  RowPairStats st = row_pair_stats(*bad.witness, bad.witness_pair.first,
                                   bad.witness_pair.second);
  CHECK(static_cast<long long>(st.u) * st.l == bad.max_ul);

  GammaCheck bound = check_gamma_assumption(spec, mpq_class(1, 3),
                                            GammaCheckMode::Bound);
  CHECK(bound.sufficient_only);
  CHECK(bound.satisfied);
  CHECK(bound.max_ul >= ok.max_ul);
}

TEST_CASE("every sampler stays inside the state space") {
  SpecPtr spec = testsupport::regular_spec(4, 2);
  StateSpace space = enumerate_states(spec);
  BinaryMatrix A0 = first_state(spec);
  for (const char* text :
       {"ktv", "gamma:1/6", "curveball", "kcurveball:2", "edge",
        "edge-lazy:1/4"}) {
    std::vector<BinaryMatrix> trajectory;
    BinaryMatrix last =
        run_chain(A0, parse_chain_descriptor(text), 400, 99, &trajectory);
    CHECK(trajectory.size() == 400);
    CHECK(last == trajectory.back());
    for (const BinaryMatrix& A : trajectory) {
      CHECK(A.satisfies_spec());
      CHECK(space.index_of(A) >= 0);
    }
  }
}

TEST_CASE("run_chain is deterministic in the seed") {
  SpecPtr spec = perm3_spec();
  BinaryMatrix A0 = first_state(spec);
  ChainSpec chain = parse_chain_descriptor("curveball");
  CHECK(run_chain(A0, chain, 0, 7) == A0);
  BinaryMatrix a = run_chain(A0, chain, 257, 7);
  BinaryMatrix b = run_chain(A0, chain, 257, 7);
  CHECK(a == b);

  std::vector<BinaryMatrix> thinned;
  run_chain(A0, chain, 100, 7, &thinned, 10);
  CHECK(thinned.size() == 10);
  std::vector<BinaryMatrix> full;
  run_chain(A0, chain, 100, 7, &full, 1);
  CHECK(full.size() == 100);
  for (int t = 0; t < 10; ++t) CHECK(thinned[t] == full[10 * t + 9]);
}

TEST_CASE("step_gamma_switch raises when the holding bound is violated") {
  SpecPtr spec = perm3_spec();
  BinaryMatrix A0 = first_state(spec);
  RngStream rng(1);
  CHECK_THROWS_AS(step_gamma_switch(A0, mpq_class(1), rng), Error);
}

TEST_CASE("bernoulli_rational is exact at the endpoints and unbiased inside") {
  RngStream rng(5);
  for (int t = 0; t < 50; ++t) {
    CHECK_FALSE(bernoulli_rational(rng, mpq_class(0)));
    CHECK(bernoulli_rational(rng, mpq_class(1)));
  }
  CHECK_THROWS_AS(bernoulli_rational(rng, mpq_class(3, 2)), Error);

  const int reps = 40000;
  int hits = 0;
  for (int t = 0; t < reps; ++t)
    if (bernoulli_rational(rng, mpq_class(1, 3))) ++hits;
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(p * (1 - p) / reps);
  CHECK(std::fabs(static_cast<double>(hits) / reps - p) <= 4 * sigma);
}

TEST_CASE("sample_disjoint_pairs is uniform over perfect matchings") {
  CHECK_THROWS_AS([] {
    RngStream rng(1);
    sample_disjoint_pairs(3, 2, rng);
  }(), Error);

  RngStream rng(11);
  const int reps = 30000;
  std::map<std::vector<std::pair<int, int>>, int> counts;
  for (int t = 0; t < reps; ++t) {
    auto kappa = sample_disjoint_pairs(4, 2, rng);
    CHECK(kappa.size() == 2);
    CHECK(kappa[0].first == 0);  // smallest row leads its pair
    ++counts[kappa];
  }
  CHECK(counts.size() == 3);
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(p * (1 - p) / reps);
  for (const auto& [kappa, count] : counts)
    CHECK(std::fabs(static_cast<double>(count) / reps - p) <= 4 * sigma);
}

TEST_CASE("one-step frequencies match the exact kernels on the permutations") {
  SpecPtr spec = perm3_spec();
  StateSpace space = enumerate_states(spec);
  BinaryMatrix A0 = space.states[0];
  const int reps = 20000;

  const std::vector<std::pair<std::string, testsupport::StepFn>> samplers = {
      {"curveball",
       [](const BinaryMatrix& A, RngStream& r) { return step_curveball(A, r); }},
      {"ktv",
       [](const BinaryMatrix& A, RngStream& r) {
         return step_ktv_classical(A, r);
       }},
      {"edge",
       [](const BinaryMatrix& A, RngStream& r) {
         return step_edge_switch(A, r);
       }},
      {"kcurveball:1",
       [](const BinaryMatrix& A, RngStream& r) {
         return step_k_curveball(A, 1, r);
       }},
  };
  for (const auto& [text, step] : samplers) {
    CAPTURE(text);
    auto row = exact_row(space, parse_chain_descriptor(text), 0);
    auto check = one_step_frequencies(space, A0, step, row, reps, 1234);
    CAPTURE(check.worst_z);
    CHECK(check.ok);
    CHECK(check.off_support == 0);
  }
}

TEST_CASE("the lazy wrapper holds with the complementary probability") {
  SpecPtr spec = perm3_spec();
  BinaryMatrix A0 = first_state(spec);
  auto always_move = [](const BinaryMatrix& A, RngStream& r) {
    return step_edge_switch(A, r);  // never holds on permutation matrices
  };
  RngStream probe(3);
  CHECK(step_edge_switch(A0, probe) != A0);

  const int reps = 20000;
  int moved = 0;
  RngStream base(17);
  for (int t = 0; t < reps; ++t) {
    RngStream rng = base.split(t);
    if (step_lazy(A0, mpq_class(1, 4), always_move, rng) != A0) ++moved;
  }
  const double p = 0.25;
  const double sigma = std::sqrt(p * (1 - p) / reps);
  CHECK(std::fabs(static_cast<double>(moved) / reps - p) <= 4 * sigma);

  RngStream rng(1);
  CHECK_THROWS_AS(step_lazy(A0, mpq_class(0), always_move, rng), Error);
  CHECK_THROWS_AS(step_lazy(A0, mpq_class(1), always_move, rng), Error);
}

TEST_CASE("incremental edge sampler agrees with the one-shot step") {
  SpecPtr spec = testsupport::regular_spec(4, 2);
  StateSpace space = enumerate_states(spec);
  for (int s = 0; s < space.N; ++s)
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
      RngStream a(seed), b(seed);
      EdgeSwitchSampler sampler(space.states[s]);
      sampler.step(a);
      CHECK(sampler.current() == step_edge_switch(space.states[s], b));
    }
}
