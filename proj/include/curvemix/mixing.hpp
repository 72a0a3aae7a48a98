#pragma once

#include <cstdint>
#include <vector>

#include "curvemix/rational.hpp"
#include "curvemix/samplers.hpp"
#include "curvemix/spectral.hpp"
#include "curvemix/statespace.hpp"

namespace curvemix {

// Row x of P^t by repeated vector-matrix products in double precision,
// renormalized each step; probability drift beyond 1e-9 is an error.
std::vector<double> distribution_at(const RationalMatrix& P, int x,
                                    long long t);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

struct MixingReport {
  long long N = 0;
  double epsilon = 0.0;
  long long tau = 0;
  double lower_bound = 0.0;  // (1/2) (l*/(1-l*)) ln(1/(2 eps))
  double upper_bound = 0.0;  // (1-l*)^-1 (ln N + ln(1/eps))
  double lambda_star = 0.0;  // max(lambda_1, |lambda_min|)
  long long horizon = 0;
  std::vector<double> tv_curve;  // d(0) .. d(tau)
};

// Smallest t with max_x tv(P^t(x,.), uniform) <= epsilon, scanning t upward;
// the worst-case distance is non-increasing for ergodic chains, so the first
// crossing is the mixing time. horizon = 0 selects
// 10 * ceil((1 - lambda_*)^-1 ln(4N)).
MixingReport mixing_time(const RationalMatrix& P, double epsilon,
                         long long horizon = 0);

struct BoundsVerdict {
  MixingReport report;
  bool lower_ok = false;  // tau >= ceil(lower_bound) - 1
  bool upper_ok = false;  // tau <= upper_bound within tol
  bool pass = false;
};

// raise = true turns a violated bound into a BoundViolated error carrying
// the computed values.
BoundsVerdict check_mixing_bounds(const RationalMatrix& P, double epsilon,
                                  double tol = kComparisonTol,
                                  bool raise = true);

struct EmpiricalReport {
  long long T = 0;
  int runs = 0;
  std::vector<long long> counts;       // endpoint histogram over states
  double tv_to_uniform = 0.0;
  double tv_to_exact = 0.0;            // against the exact row of P^T
  double chi_square = 0.0;             // against uniform
  double chi_square_critical = 0.0;    // 99.9% quantile at N-1 dof
  bool within_critical = false;
};

EmpiricalReport empirical_distribution(const StateSpace& space,
                                       const ChainSpec& chain,
                                       const BinaryMatrix& A0, long long T,
                                       int runs, std::uint64_t seed);

}  // namespace curvemix
