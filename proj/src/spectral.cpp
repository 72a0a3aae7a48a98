#include "curvemix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curvemix {

namespace {

mpq_class make_ratio(long long num, long long den) {
  mpq_class q(static_cast<long>(num), static_cast<long>(den));
  q.canonicalize();
  return q;
}

// Off-diagonal entries gamma/C(m,2) on switch-adjacent pairs, diagonal by
// row-sum completion.
RationalMatrix gamma_form(const StateSpace& space, const mpq_class& gamma,
                          bool require_stochastic) {
  const int N = static_cast<int>(space.N);
  const int m = space.spec->m;
  const mpq_class per_move = gamma / make_ratio(pairs_of(m), 1);
  RationalMatrix P(N, N);
  for (int s = 0; s < N; ++s) {
    const BinaryMatrix& A = space.states[s];
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        RowPairStats st = row_pair_stats(A, i, j);
        for (int k : st.U)
          for (int l : st.L)
            P.at(s, space.index_of(apply_switch(A, i, j, k, l))) = per_move;
      }
  }
  for (int s = 0; s < N; ++s) {
    mpq_class off = P.row_sum(s);
    P.at(s, s) = 1 - off;
    if (require_stochastic && P.at(s, s) < 0)
      fail(ErrorCode::ConditionFailed,
           "holding probability is negative at state " + std::to_string(s));
  }
  return P;
}

long long max_ul_over_states(const StateSpace& space) {
  long long max_ul = 0;
  for (const BinaryMatrix& A : space.states)
    for (int i = 0; i < space.spec->m; ++i)
      for (int j = i + 1; j < space.spec->m; ++j) {
        RowPairStats st = row_pair_stats(A, i, j);
        max_ul = std::max(max_ul, static_cast<long long>(st.u) * st.l);
      }
  return max_ul;
}

double rel_tol(double reference, double tol) {
  return tol * std::max(1.0, std::fabs(reference));
}

Inequality make_check(const std::string& name, double lhs, double rhs,
                      double tol) {
  return {name, lhs, rhs, lhs <= rhs + rel_tol(rhs, tol)};
}

void finish_report(ComparisonReport& report) {
  report.pass = true;
  for (const Inequality& c : report.checks) report.pass = report.pass && c.pass;
}

ComparisonReport vacuous_report(const std::string& theorem, double tol) {
  ComparisonReport report;
  report.theorem = theorem;
  report.tolerance = tol;
  report.values["vacuous"] = 1.0;
  report.pass = true;
  return report;
}

void require_irreducible(const StateSpace& space) {
  if (!check_irreducibility(build_state_graph(space, GraphKind::Switch))
           .irreducible())
    fail(ErrorCode::Reducible, "state graph is disconnected");
}

}  // namespace

std::vector<std::pair<int, int>> all_row_pairs(int m) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  return pairs;
}

std::vector<std::vector<Neighborhood>> all_rowpair_partitions(
    const StateSpace& space) {
  std::vector<std::vector<Neighborhood>> out;
  for (auto [i, j] : all_row_pairs(space.spec->m))
    out.push_back(partition_by_rowpair(space, i, j));
  return out;
}

TransitionMatrix build_transition(const StateSpace& space,
                                  const ChainSpec& chain) {
  const int N = static_cast<int>(space.N);
  const MarginSpec& spec = *space.spec;
  TransitionMatrix result;
  result.chain = chain;

  switch (chain.kind) {
    case ChainKind::GammaSwitch:
    case ChainKind::KTVSwitch: {
      mpq_class gamma = effective_gamma(chain, spec);
      if (make_ratio(max_ul_over_states(space), 1) * gamma >= 1)
        fail(ErrorCode::AssumptionViolated,
             "u*l*gamma >= 1 somewhere on the state space");
      result.P = gamma_form(space, gamma, true);
      break;
    }
    case ChainKind::EdgeSwitch: {
      if (spec.rho_total < 2)
        fail(ErrorCode::BadGamma, "edge chain needs at least two ones");
      result.P = gamma_form(space, effective_gamma(chain, spec), true);
      break;
    }
    case ChainKind::Curveball: {
      RationalMatrix P(N, N);
      const mpq_class per_pair = make_ratio(1, pairs_of(spec.m));
      for (const auto& partition : all_rowpair_partitions(space))
        for (const Neighborhood& klass : partition) {
          const mpq_class w = per_pair / make_ratio(klass.size, 1);
          for (int a : klass.member_indices)
            for (int b : klass.member_indices)
              if (a != b) P.at(a, b) += w;
        }
      for (int s = 0; s < N; ++s) P.at(s, s) = 1 - P.row_sum(s);
      result.P = std::move(P);
      break;
    }
    case ChainKind::KCurveball: {
      if (chain.k < 1 || 2 * chain.k > spec.m)
        fail(ErrorCode::KTooLarge, "need 1 <= 2k <= m");
      auto kappas = all_disjoint_pair_sets(spec.m, chain.k);
      RationalMatrix P(N, N);
      const mpq_class per_kappa =
          make_ratio(1, static_cast<long long>(kappas.size()));
      for (const auto& kappa : kappas)
        for (const Neighborhood& klass : kappa_partition(space, kappa)) {
          const mpq_class w = per_kappa / make_ratio(klass.size, 1);
          for (int a : klass.member_indices)
            for (int b : klass.member_indices) P.at(a, b) += w;
        }
      result.P = std::move(P);
      break;
    }
  }

  if (chain.laziness) result.P = lazy_mix(*chain.laziness, result.P);
  if (!result.P.is_stochastic())
    fail(ErrorCode::ConditionFailed, "transition matrix is not stochastic");
  return result;
}

TransitionMatrix build_heat_bath(
    const StateSpace& space,
    const std::vector<std::vector<Neighborhood>>& partitions) {
  const int N = static_cast<int>(space.N);
  const MarginSpec& spec = *space.spec;
  if (partitions.size() != static_cast<std::size_t>(pairs_of(spec.m)))
    fail(ErrorCode::LengthMismatch, "one partition per row pair expected");
  RationalMatrix P(N, N);
  const mpq_class per_pair = make_ratio(1, pairs_of(spec.m));
  for (const auto& partition : partitions) {
    std::vector<bool> covered(static_cast<std::size_t>(N), false);
    for (const Neighborhood& klass : partition) {
      const mpq_class w = per_pair / make_ratio(klass.size, 1);
      for (int a : klass.member_indices) {
        covered[a] = true;
        for (int b : klass.member_indices) P.at(a, b) += w;
      }
    }
    for (bool c : covered)
      if (!c) fail(ErrorCode::LengthMismatch, "partition does not cover Omega");
  }
  TransitionMatrix result;
  result.chain.kind = ChainKind::Curveball;
  result.P = std::move(P);
  return result;
}

SwitchDecomposition decompose_switch(const StateSpace& space,
                                     const mpq_class& gamma) {
  if (gamma <= 0) fail(ErrorCode::BadGamma, "need gamma > 0");
  SwitchDecomposition dec;
  dec.gamma = gamma;
  const MarginSpec& spec = *space.spec;

  for (auto [i, j] : all_row_pairs(spec.m))
    for (Neighborhood& klass : partition_by_rowpair(space, i, j)) {
      auto [u, l] = klass.ul_profile.front();
      const int size = static_cast<int>(klass.member_indices.size());
      SwitchBlock blk;
      blk.i = i;
      blk.j = j;
      RationalMatrix B(size, size);
      const mpq_class hold = 1 - mpq_class(static_cast<long>(u) * l) * gamma;
      for (int a = 0; a < size; ++a) {
        B.at(a, a) = hold;
        for (int b = a + 1; b < size; ++b) {
          const BinaryMatrix& A1 = space.states[klass.member_indices[a]];
          const BinaryMatrix& A2 = space.states[klass.member_indices[b]];
          if (is_switch_adjacent(A1, A2)) {
            B.at(a, b) = gamma;
            B.at(b, a) = gamma;
          }
        }
      }
      blk.stochastic = hold >= 0;
      if (!blk.stochastic) dec.negative_diagonal = true;
      blk.block = std::move(B);
      blk.klass = std::move(klass);
      dec.blocks.push_back(std::move(blk));
    }

  const int N = static_cast<int>(space.N);
  RationalMatrix rebuilt(N, N);
  const mpq_class per_pair = make_ratio(1, pairs_of(spec.m));
  for (const SwitchBlock& blk : dec.blocks) {
    const auto& members = blk.klass.member_indices;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = 0; b < members.size(); ++b)
        rebuilt.at(members[a], members[b]) +=
            per_pair * blk.block.at(static_cast<int>(a), static_cast<int>(b));
  }
  RationalMatrix direct = gamma_form(space, gamma, false);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      if (rebuilt.at(a, b) != direct.at(a, b))
        fail(ErrorCode::ReconstructionMismatch,
             "entry (" + std::to_string(a) + "," + std::to_string(b) +
                 "): blocks give " + rebuilt.at(a, b).get_str() +
                 ", chain has " + direct.at(a, b).get_str());
  return dec;
}

mpq_class johnson_min_bound(int p) {
  if (p < 1) fail(ErrorCode::BadPQ, "need p >= 1");
  return make_ratio(-static_cast<long long>(p + 1) * (p + 1), 4);
}

JohnsonSpectrum johnson_spectrum(int p, int q) {
  if (q < 1 || q > p) fail(ErrorCode::BadPQ, "need 1 <= q <= p");
  JohnsonSpectrum js;
  js.p = p;
  js.q = q;
  js.min_bound = johnson_min_bound(p);
  // the multiplicity formula is valid for i = 0..min(q, p-q)
  const int imax = std::min(q, p - q);
  long long total = 0;
  for (int i = 0; i <= imax; ++i) {
    long long value =
        static_cast<long long>(q - i) * (p - q - i) - i;
    long long mult = binomial_ll(p, i) - (i > 0 ? binomial_ll(p, i - 1) : 0);
    js.entries.emplace_back(value, mult);
    total += mult;
  }
  if (total != binomial_ll(p, q))
    fail(ErrorCode::BadPQ, "multiplicities do not sum to C(p,q)");
  return js;
}

EigenSystem eigendecompose_symmetric(const std::vector<std::vector<double>>& M,
                                     double tol) {
  const int n = static_cast<int>(M.size());
  double max_abs = 0.0;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(M[i].size()) != n)
      fail(ErrorCode::LengthMismatch, "matrix is not square");
    for (int j = 0; j < n; ++j) max_abs = std::max(max_abs, std::fabs(M[i][j]));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(M[i][j] - M[j][i]) > tol * std::max(1.0, max_abs))
        fail(ErrorCode::NotSymmetric,
             "entry (" + std::to_string(i) + "," + std::to_string(j) + ")");

  std::vector<std::vector<double>> B = M;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = 0.5 * (B[i][j] + B[j][i]);
      B[i][j] = B[j][i] = s;
    }
  std::vector<std::vector<double>> V(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) V[i][i] = 1.0;

  double frob = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) frob += B[i][j] * B[i][j];
  frob = std::sqrt(frob);
  const double target = tol * std::max(frob, 1e-300);

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += B[i][j] * B[i][j];
    return std::sqrt(s);
  };

  const int max_sweeps = 100;
  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > max_sweeps)
      fail(ErrorCode::NoConvergence,
           "jacobi did not converge in " + std::to_string(max_sweeps) +
               " sweeps");
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(B[p][q]) <= 1e-300) continue;
        const double theta = (B[q][q] - B[p][p]) / (2.0 * B[p][q]);
        const double t =
            (theta >= 0 ? 1.0 : -1.0) /
            (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double bkp = B[k][p], bkq = B[k][q];
          B[k][p] = c * bkp - s * bkq;
          B[k][q] = s * bkp + c * bkq;
        }
        for (int k = 0; k < n; ++k) {
          const double bpk = B[p][k], bqk = B[q][k];
          B[p][k] = c * bpk - s * bqk;
          B[q][k] = s * bpk + c * bqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = c * vkp - s * vkq;
          V[k][q] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return B[a][a] > B[b][b]; });

  EigenSystem sys;
  sys.sweeps = sweep;
  sys.values.resize(n);
  sys.vectors.assign(n, std::vector<double>(n, 0.0));
  for (int k = 0; k < n; ++k) {
    sys.values[k] = B[order[k]][order[k]];
    for (int i = 0; i < n; ++i) sys.vectors[k][i] = V[i][order[k]];
  }
  for (int k = 0; k < n; ++k) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double mv = 0.0;
      for (int j = 0; j < n; ++j) mv += M[i][j] * sys.vectors[k][j];
      worst = std::max(worst,
                       std::fabs(mv - sys.values[k] * sys.vectors[k][i]));
    }
    sys.residual_norm = std::max(sys.residual_norm, worst);
  }
  return sys;
}

Spectrum spectral_report(const RationalMatrix& P) {
  const int N = P.rows();
  if (N < 1) fail(ErrorCode::LengthMismatch, "empty matrix");
  if (!P.is_symmetric())
    fail(ErrorCode::NotSymmetric, "transition matrix is not symmetric");
  if (!P.is_stochastic())
    fail(ErrorCode::ConditionFailed, "transition matrix is not stochastic");
  Spectrum spec;
  if (N == 1) {
    spec.eigenvalues = {1.0};
    return spec;
  }
  EigenSystem sys = eigendecompose_symmetric(P.to_double());
  spec.eigenvalues = sys.values;
  spec.residual_norm = sys.residual_norm;
  if (std::fabs(sys.values.front() - 1.0) > 1e-6)
    fail(ErrorCode::NoConvergence, "leading eigenvalue is not 1");
  spec.lambda_1 = sys.values[1];
  spec.lambda_min = sys.values.back();
  spec.lambda_star = std::max(spec.lambda_1, std::fabs(spec.lambda_min));
  spec.gap = 1.0 - spec.lambda_star;
  spec.relaxation = spec.gap > 0
                        ? 1.0 / spec.gap
                        : std::numeric_limits<double>::infinity();
  spec.gap_second = 1.0 - spec.lambda_1;
  spec.relaxation_second = spec.gap_second > 0
                               ? 1.0 / spec.gap_second
                               : std::numeric_limits<double>::infinity();
  spec.periodic = spec.lambda_min <= -1.0 + kComparisonTol;
  return spec;
}

HeatbathCheck check_heatbath_condition(const StateSpace& space,
                                       const SwitchDecomposition& dec,
                                       const mpq_class& alpha,
                                       const mpq_class& beta, double tol) {
  if (alpha == 0 || beta == 0 || alpha * beta <= 0)
    fail(ErrorCode::ConditionFailed, "need nonzero alpha, beta of equal sign");
  HeatbathCheck res;
  res.alpha = alpha;
  res.beta = beta;

  for (const SwitchBlock& blk : dec.blocks) {
    auto [u, l] = blk.klass.ul_profile.front();
    if (u == 0 || l == 0) continue;  // singleton class, nothing below the top
    const long long ul = static_cast<long long>(u) * l;
    JohnsonSpectrum js = johnson_spectrum(u + l, u);
    for (std::size_t e = 1; e < js.entries.size(); ++e) {
      const long long mu = js.entries[e].first;
      const mpq_class lambda =
          1 + mpq_class(static_cast<long>(mu - ul)) * dec.gamma;
      const mpq_class second = alpha - beta * (1 - lambda);
      if (lambda < 0 || second < 0) {
        std::ostringstream msg;
        msg << "rows (" << blk.i + 1 << "," << blk.j + 1 << "), u=" << u
            << ", l=" << l << ", johnson eigenvalue " << mu
            << ": block eigenvalue " << lambda.get_str()
            << ", alpha - beta(1-lambda) = " << second.get_str();
        fail(ErrorCode::ConditionFailed, msg.str());
      }
    }
  }
  res.condition_holds = true;

  Spectrum base = spectral_report(gamma_form(space, dec.gamma, false));
  ChainSpec curveball;
  curveball.kind = ChainKind::Curveball;
  Spectrum heat = spectral_report(build_transition(space, curveball).P);
  res.heat_side = (1.0 / alpha.get_d()) * heat.relaxation_second;
  res.base_side = (1.0 / beta.get_d()) * base.relaxation_second;
  res.conclusion_holds =
      res.heat_side <= res.base_side + rel_tol(res.base_side, tol);
  return res;
}

ComparisonReport verify_relaxation_comparison(const StateSpace& space,
                                              double tol) {
  const MarginSpec& spec = *space.spec;
  if (spec.n < 3) fail(ErrorCode::BadGamma, "needs n >= 3");
  if (space.N == 1)
    return vacuous_report("curveball_switch_relaxation_sandwich", tol);
  require_irreducible(space);

  ChainSpec ktv;
  ktv.kind = ChainKind::KTVSwitch;
  ChainSpec curveball;
  curveball.kind = ChainKind::Curveball;
  Spectrum s = spectral_report(build_transition(space, ktv).P);
  Spectrum c = spectral_report(build_transition(space, curveball).P);
  if (s.periodic || c.periodic) fail(ErrorCode::Periodic, "chain is periodic");

  const double rel_s = s.relaxation_second;
  const double rel_c = c.relaxation_second;
  const double nn = static_cast<double>(spec.n) * (spec.n - 1);
  const double upper_factor =
      std::min(1.0, (2.0 * spec.r_max + 1) * (2.0 * spec.r_max + 1) /
                        (2.0 * nn));

  ComparisonReport report;
  report.theorem = "curveball_switch_relaxation_sandwich";
  report.tolerance = tol;
  report.checks.push_back(
      make_check("lower_bound", (2.0 / nn) * rel_s, rel_c, tol));
  report.checks.push_back(
      make_check("upper_bound", rel_c, upper_factor * rel_s, tol));
  report.values["relaxation_switch"] = rel_s;
  report.values["relaxation_curveball"] = rel_c;
  report.values["upper_factor"] = upper_factor;
  finish_report(report);
  return report;
}

KtvNonnegReport verify_ktv_nonneg(const StateSpace& space, double tol) {
  if (space.spec->n < 3) fail(ErrorCode::BadGamma, "needs n >= 3");
  KtvNonnegReport report;
  if (space.N == 1) {
    report.min_eigenvalue = 1.0;
    report.pass = true;
    return report;
  }
  ChainSpec ktv;
  ktv.kind = ChainKind::KTVSwitch;
  Spectrum s = spectral_report(build_transition(space, ktv).P);
  report.min_eigenvalue = s.lambda_min;
  report.pass = s.lambda_min >= -tol;
  return report;
}

ComparisonReport verify_edge_comparison(const StateSpace& space, double tol) {
  const MarginSpec& spec = *space.spec;
  if (space.N == 1 || spec.rho_total < 2)
    return vacuous_report("curveball_vs_lazy_edge", tol);
  require_irreducible(space);

  const mpq_class gamma_edge =
      make_ratio(pairs_of(spec.m), pairs_of(spec.rho_total));
  mpq_class delta =
      make_ratio(2 * pairs_of(spec.rho_total),
                 static_cast<long long>(spec.n) * spec.n * pairs_of(spec.m));
  if (delta > make_ratio(1, 2)) delta = make_ratio(1, 2);

  ChainSpec edge;
  edge.kind = ChainKind::EdgeSwitch;
  ChainSpec curveball;
  curveball.kind = ChainKind::Curveball;
  RationalMatrix P_edge = build_transition(space, edge).P;
  RationalMatrix P_lazy = lazy_mix(delta, P_edge);
  Spectrum edge_spec = spectral_report(P_edge);
  Spectrum lazy_spec = spectral_report(P_lazy);
  Spectrum c = spectral_report(build_transition(space, curveball).P);

  mpq_class min_hold = P_lazy.at(0, 0);
  for (int s = 0; s < P_lazy.rows(); ++s)
    min_hold = std::min(min_hold, P_lazy.at(s, s));

  ComparisonReport report;
  report.theorem = "curveball_vs_lazy_edge";
  report.tolerance = tol;
  report.checks.push_back({"lazy_holding_at_least_half", 0.5,
                           min_hold.get_d(), min_hold >= make_ratio(1, 2)});
  report.checks.push_back(make_check("lazy_spectrum_nonnegative", 0.0,
                                     lazy_spec.lambda_min, tol));

  HeatbathCheck hb = check_heatbath_condition(
      space, decompose_switch(space, delta * gamma_edge), 1, 1, tol);
  report.checks.push_back({"curveball_vs_lazy_relaxation", hb.heat_side,
                           hb.base_side,
                           hb.condition_holds && hb.conclusion_holds});
  report.checks.push_back(make_check(
      "relaxation_vs_scaled_edge", c.relaxation_second,
      (1.0 / delta.get_d()) * edge_spec.relaxation_second, tol));

  report.values["delta"] = delta.get_d();
  report.values["relaxation_curveball"] = c.relaxation_second;
  report.values["relaxation_edge"] = edge_spec.relaxation_second;
  report.values["relaxation_lazy_edge"] = lazy_spec.relaxation_second;
  finish_report(report);
  return report;
}

ComparisonReport verify_regular_bounds(const StateSpace& space, int d,
                                       double tol) {
  const MarginSpec& spec = *space.spec;
  if (spec.m != spec.n) fail(ErrorCode::NotRegular, "needs a square instance");
  for (int x : spec.r)
    if (x != d) fail(ErrorCode::NotRegular, "row sums must all equal d");
  for (int x : spec.c)
    if (x != d) fail(ErrorCode::NotRegular, "column sums must all equal d");
  if (d < 1) fail(ErrorCode::NotRegular, "needs d >= 1");
  if (space.N == 1) return vacuous_report("regular_edge_bounds", tol);
  require_irreducible(space);

  ChainSpec edge;
  edge.kind = ChainKind::EdgeSwitch;
  ChainSpec curveball;
  curveball.kind = ChainKind::Curveball;
  Spectrum e = spectral_report(build_transition(space, edge).P);
  Spectrum c = spectral_report(build_transition(space, curveball).P);

  const double dd = static_cast<double>(d);
  const double factor = (2 * dd + 1) * (2 * dd + 1) / (4 * dd * dd);
  const double min_bound = -(1.0 / dd + 1.0 / (4 * dd * dd));

  ComparisonReport report;
  report.theorem = "regular_edge_bounds";
  report.tolerance = tol;
  report.checks.push_back(make_check("curveball_vs_edge", c.relaxation_second,
                                     factor * e.relaxation_second, tol));
  report.checks.push_back(
      make_check("edge_min_eigenvalue", min_bound, e.lambda_min, tol));
  if (d >= 2) {
    const double cap = 4 * dd * dd / (4 * dd * dd - 4 * dd - 1);
    report.checks.push_back(make_check(
        "edge_min_reciprocal", 1.0 / (1.0 + e.lambda_min), cap, tol));
    report.checks.push_back(make_check("reciprocal_cap", cap, 2.5, tol));
  }
  report.values["relaxation_curveball"] = c.relaxation_second;
  report.values["relaxation_edge"] = e.relaxation_second;
  report.values["edge_lambda_min"] = e.lambda_min;
  finish_report(report);
  return report;
}

ComparisonReport verify_k_curveball_bounds(const StateSpace& space, int k,
                                           double tol) {
  const MarginSpec& spec = *space.spec;
  if (k < 1 || 2 * k > spec.m) fail(ErrorCode::KTooLarge, "need 1 <= 2k <= m");
  if (space.N == 1) return vacuous_report("k_curveball_sandwich", tol);
  require_irreducible(space);

  ChainSpec curveball;
  curveball.kind = ChainKind::Curveball;
  ChainSpec kc;
  kc.kind = ChainKind::KCurveball;
  kc.k = k;
  Spectrum c = spectral_report(build_transition(space, curveball).P);
  Spectrum ck = spectral_report(build_transition(space, kc).P);

  // Exact condition behind both bounds: within every kappa class, all
  // averaged-factor eigenvalues below the top satisfy mu >= 0 and
  // -1 + k(1 - mu) >= 0.
  bool condition = true;
  for (const auto& kappa : all_disjoint_pair_sets(spec.m, k))
    for (const Neighborhood& klass : kappa_partition(space, kappa)) {
      std::vector<long long> sizes;
      for (auto [u, l] : klass.ul_profile)
        sizes.push_back(binomial_ll(u + l, u));
      auto spectrum_entries = tensor_block_spectrum(sizes, k);
      for (std::size_t e = 0; e < spectrum_entries.size(); ++e) {
        auto [mu, mult] = spectrum_entries[e];
        if (e == 0) --mult;  // the top eigenvalue 1 is excluded once
        if (mult <= 0) continue;
        if (mu < 0 || mpq_class(-1) + k * (1 - mu) < 0) condition = false;
      }
    }

  const double rel_c = c.relaxation_second;
  const double rel_kc = ck.relaxation_second;

  ComparisonReport report;
  report.theorem = "k_curveball_sandwich";
  report.tolerance = tol;
  report.checks.push_back({"block_condition", condition ? 0.0 : 1.0, 0.0,
                           condition});
  report.checks.push_back(make_check("lower_bound", rel_c / k, rel_kc, tol));
  report.checks.push_back(make_check("upper_bound", rel_kc, rel_c, tol));
  report.values["relaxation_curveball"] = rel_c;
  report.values["relaxation_k_curveball"] = rel_kc;
  report.values["ratio"] = rel_kc / rel_c;
  finish_report(report);
  return report;
}

std::vector<std::pair<mpq_class, long long>> tensor_block_spectrum(
    const std::vector<long long>& w_sizes, int k) {
  if (k < 1 || static_cast<std::size_t>(k) != w_sizes.size())
    fail(ErrorCode::LengthMismatch, "need k = |w_sizes| >= 1");
  for (long long w : w_sizes)
    if (w < 1) fail(ErrorCode::LengthMismatch, "class sizes must be >= 1");
  // multiplicity of eigenvalue t/k = coefficient of x^t in prod(x + (w_i - 1))
  std::vector<long long> coeff(static_cast<std::size_t>(k) + 1, 0);
  coeff[0] = 1;
  for (int i = 0; i < k; ++i) {
    for (int t = i + 1; t >= 1; --t)
      coeff[t] = coeff[t - 1] + coeff[t] * (w_sizes[i] - 1);
    coeff[0] *= w_sizes[i] - 1;
  }
  std::vector<std::pair<mpq_class, long long>> out;
  for (int t = k; t >= 0; --t)
    if (coeff[t] > 0) out.emplace_back(make_ratio(t, k), coeff[t]);
  return out;
}

EigenDifferenceCheck eigen_difference_check(
    const std::vector<std::vector<double>>& X, double alpha, double beta,
    double tol) {
  const int n = static_cast<int>(X.size());
  if (n == 0) fail(ErrorCode::LengthMismatch, "empty matrix");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(X[i].size()) != n)
      fail(ErrorCode::LengthMismatch, "matrix is not square");
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      if (X[i][j] < -1e-12)
        fail(ErrorCode::NotReversible, "negative transition probability");
      s += X[i][j];
    }
    if (std::fabs(s - 1.0) > 1e-9)
      fail(ErrorCode::NotReversible, "rows must sum to 1");
  }

  // stationary weights along a spanning tree, then detailed balance check
  std::vector<double> pi(n, 0.0);
  std::vector<int> stack{0};
  pi[0] = 1.0;
  int seen = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int y = 0; y < n; ++y) {
      if (pi[y] > 0.0 || y == x) continue;
      if (X[x][y] > 1e-14) {
        if (X[y][x] <= 1e-14)
          fail(ErrorCode::NotReversible, "one-directional transition");
        pi[y] = pi[x] * X[x][y] / X[y][x];
        stack.push_back(y);
        ++seen;
      }
    }
  }
  if (seen != n) fail(ErrorCode::Reducible, "chain is not irreducible");
  double total = 0.0;
  for (double w : pi) total += w;
  for (double& w : pi) w /= total;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::fabs(pi[i] * X[i][j] - pi[j] * X[j][i]) > 1e-9)
        fail(ErrorCode::NotReversible, "detailed balance fails");

  std::vector<double> root(n);
  for (int i = 0; i < n; ++i) root[i] = std::sqrt(pi[i]);
  std::vector<std::vector<double>> S(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S[i][j] = root[i] * X[i][j] / root[j];
  EigenSystem base = eigendecompose_symmetric(S, 1e-9);

  std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double id = i == j ? 1.0 : 0.0;
      T[i][j] = alpha * (id - root[i] * root[j]) - beta * (id - S[i][j]);
    }
  EigenSystem diff = eigendecompose_symmetric(T, 1e-9);

  std::vector<double> expected{0.0};
  for (int i = 1; i < n; ++i)
    expected.push_back(alpha - beta * (1.0 - base.values[i]));
  std::sort(expected.begin(), expected.end());
  std::vector<double> actual = diff.values;
  std::sort(actual.begin(), actual.end());

  EigenDifferenceCheck res;
  for (int i = 0; i < n; ++i)
    res.max_deviation =
        std::max(res.max_deviation, std::fabs(expected[i] - actual[i]));
  res.pass = res.max_deviation <= tol;
  return res;
}

LazyCheck lazy_relaxation_check(const RationalMatrix& P,
                                const mpq_class& delta, double tol) {
  Spectrum base = spectral_report(P);
  Spectrum lazy = spectral_report(lazy_mix(delta, P));
  if (lazy.lambda_min < -tol)
    fail(ErrorCode::NegativeLazySpectrum,
         "lazy chain has eigenvalue " + std::to_string(lazy.lambda_min));
  LazyCheck res;
  res.lambda_star_lazy = lazy.lambda_1;
  res.expected_lambda_star_lazy =
      1.0 - delta.get_d() + delta.get_d() * base.lambda_1;
  res.lhs = lazy.relaxation_second;
  res.rhs = (1.0 / delta.get_d()) * base.relaxation;
  res.pass = std::fabs(res.lambda_star_lazy - res.expected_lambda_star_lazy) <=
                 tol &&
             res.lhs <= res.rhs + rel_tol(res.rhs, tol);
  return res;
}

bool psd_check(const std::vector<std::vector<double>>& M, double tol) {
  if (M.empty()) return true;
  EigenSystem sys = eigendecompose_symmetric(M, 1e-9);
  return sys.values.back() >= -tol;
}

DirichletCheck dirichlet_equivalence_check(const RationalMatrix& P,
                                           const RationalMatrix& Pt,
                                           double alpha, int trials,
                                           std::uint64_t seed, double tol) {
  if (P.rows() != Pt.rows() || P.cols() != Pt.cols())
    fail(ErrorCode::LengthMismatch, "chains act on different spaces");
  if (P.rows() == 0) fail(ErrorCode::LengthMismatch, "empty matrix");
  if (!P.is_symmetric() || !Pt.is_symmetric())
    fail(ErrorCode::NotSymmetric, "both chains must be uniform-reversible");
  const int n = P.rows();

  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double id = i == j ? 1.0 : 0.0;
      M[i][j] = alpha * (id - P.at(i, j).get_d()) -
                (id - Pt.at(i, j).get_d());
    }
  EigenSystem sys = eigendecompose_symmetric(M, 1e-9);

  DirichletCheck res;
  res.trials = trials;
  res.psd_verdict = sys.values.back() >= -tol;

  auto quad = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += f[i] * M[i][j] * f[j];
    return s;
  };
  auto norm2 = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (double x : f) s += x * x;
    return s;
  };

  RngStream rng(seed);
  res.quadratic_verdict = true;
  res.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> probes;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i)
      f[i] = 2.0 * (static_cast<double>(rng.next()) / 18446744073709551616.0) -
             1.0;
    probes.push_back(std::move(f));
  }
  probes.push_back(sys.vectors.back());  // witness for the smallest eigenvalue
  for (const auto& f : probes) {
    const double scale = norm2(f);
    if (scale <= 0) continue;
    const double margin = quad(f) / scale;
    res.worst_margin = std::min(res.worst_margin, margin);
    if (margin < -tol * (1 + 1e-6) - 1e-15) res.quadratic_verdict = false;
  }
  if (res.psd_verdict != res.quadratic_verdict)
    fail(ErrorCode::InconsistentVerdict,
         "psd test and quadratic-form probes disagree");
  res.holds = res.psd_verdict;
  return res;
}

}  // namespace curvemix
