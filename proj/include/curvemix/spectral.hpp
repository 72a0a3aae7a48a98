#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "curvemix/rational.hpp"
#include "curvemix/samplers.hpp"
#include "curvemix/statespace.hpp"

namespace curvemix {

inline constexpr double kJacobiTol = 1e-12;
inline constexpr double kComparisonTol = 1e-9;

struct TransitionMatrix {
  ChainSpec chain;
  RationalMatrix P;
};

// Exact transition matrix of the chain on the enumerated space.
TransitionMatrix build_transition(const StateSpace& space,
                                  const ChainSpec& chain);

std::vector<std::pair<int, int>> all_row_pairs(int m);
std::vector<std::vector<Neighborhood>> all_rowpair_partitions(
    const StateSpace& space);

// P_heat = sum over row pairs of C(m,2)^-1 times the uniform resampling of
// each partition class.
TransitionMatrix build_heat_bath(
    const StateSpace& space,
    const std::vector<std::vector<Neighborhood>>& partitions);

struct SwitchBlock {
  int i = 0;
  int j = 0;
  Neighborhood klass;
  RationalMatrix block;  // (1 - u*l*gamma) I + gamma * adjacency
  bool stochastic = true;
};

struct SwitchDecomposition {
  mpq_class gamma;
  std::vector<SwitchBlock> blocks;
  bool negative_diagonal = false;  // some block holds with probability < 0
};

// Splits the gamma-form chain into its per-row-pair class blocks and checks
// that they reassemble to the full matrix exactly.
SwitchDecomposition decompose_switch(const StateSpace& space,
                                     const mpq_class& gamma);

struct JohnsonSpectrum {
  int p = 0;
  int q = 0;
  // (eigenvalue, multiplicity), eigenvalues strictly decreasing
  std::vector<std::pair<long long, long long>> entries;
  mpq_class min_bound;  // -(p+1)^2/4
};

JohnsonSpectrum johnson_spectrum(int p, int q);
mpq_class johnson_min_bound(int p);

struct EigenSystem {
  std::vector<double> values;                 // descending
  std::vector<std::vector<double>> vectors;   // vectors[k] pairs with values[k]
  double residual_norm = 0.0;
  int sweeps = 0;
};

EigenSystem eigendecompose_symmetric(const std::vector<std::vector<double>>& M,
                                     double tol = kJacobiTol);

// For a single state the chain is trivially mixed; lambda_1 and lambda_min
// are reported as 0 so that gap = relaxation = 1.
struct Spectrum {
  std::vector<double> eigenvalues;
  double lambda_1 = 0.0;    // second largest
  double lambda_min = 0.0;
  double lambda_star = 0.0; // max(lambda_1, |lambda_min|)
  double gap = 1.0;
  double relaxation = 1.0;
  double gap_second = 1.0;         // 1 - lambda_1
  double relaxation_second = 1.0;  // comparison theorems use this convention
  double residual_norm = 0.0;
  bool periodic = false;  // lambda_min = -1 within kComparisonTol
};

Spectrum spectral_report(const RationalMatrix& P);

struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::string theorem;
  std::vector<Inequality> checks;
  std::map<std::string, double> values;
  double tolerance = kComparisonTol;
  bool pass = false;
};

struct HeatbathCheck {
  mpq_class alpha;
  mpq_class beta;
  bool condition_holds = false;   // exact, over all block eigenvalues
  bool conclusion_holds = false;  // (1/a)(1-l1_heat)^-1 <= (1/b)(1-l1)^-1
  double heat_side = 0.0;
  double base_side = 0.0;
};

// Throws ConditionFailed with a block witness when the eigenvalue condition
// fails; otherwise also evaluates the relaxation conclusion numerically.
HeatbathCheck check_heatbath_condition(const StateSpace& space,
                                       const SwitchDecomposition& dec,
                                       const mpq_class& alpha,
                                       const mpq_class& beta,
                                       double tol = kComparisonTol);

ComparisonReport verify_relaxation_comparison(const StateSpace& space,
                                              double tol = kComparisonTol);

struct KtvNonnegReport {
  double min_eigenvalue = 0.0;
  bool pass = false;
};

KtvNonnegReport verify_ktv_nonneg(const StateSpace& space,
                                  double tol = kComparisonTol);

ComparisonReport verify_edge_comparison(const StateSpace& space,
                                        double tol = kComparisonTol);

ComparisonReport verify_regular_bounds(const StateSpace& space, int d,
                                       double tol = kComparisonTol);

ComparisonReport verify_k_curveball_bounds(const StateSpace& space, int k,
                                           double tol = kComparisonTol);

// Spectrum of the mean of k commuting uniform-resampling factors with the
// given class sizes: eigenvalue t/k for t successes, multiplicity the
// coefficient of x^t in prod(x + (w_i - 1)).
std::vector<std::pair<mpq_class, long long>> tensor_block_spectrum(
    const std::vector<long long>& w_sizes, int k);

struct EigenDifferenceCheck {
  bool pass = false;
  double max_deviation = 0.0;
};

// Verifies that alpha(I - X*) - beta(I - X) has spectrum
// {0} union {alpha - beta(1 - lambda_i)} for a reversible chain X.
EigenDifferenceCheck eigen_difference_check(
    const std::vector<std::vector<double>>& X, double alpha, double beta,
    double tol = 1e-8);

struct LazyCheck {
  bool pass = false;
  double lambda_star_lazy = 0.0;
  double expected_lambda_star_lazy = 0.0;
  double lhs = 0.0;  // (1 - lambda_star_lazy)^-1
  double rhs = 0.0;  // (1/delta)(1 - lambda_star)^-1
};

LazyCheck lazy_relaxation_check(const RationalMatrix& P,
                                const mpq_class& delta,
                                double tol = kComparisonTol);

bool psd_check(const std::vector<std::vector<double>>& M, double tol);

struct DirichletCheck {
  bool holds = false;  // both verdicts, cross-asserted
  bool psd_verdict = false;
  bool quadratic_verdict = false;
  int trials = 0;
  double worst_margin = 0.0;
};

// Compares f'(I - Pt)f <= alpha f'(I - P)f over random vectors against the
// PSD test of alpha(I - P) - (I - Pt); disagreement is an error.
DirichletCheck dirichlet_equivalence_check(const RationalMatrix& P,
                                           const RationalMatrix& Pt,
                                           double alpha, int trials,
                                           std::uint64_t seed,
                                           double tol = kComparisonTol);

}  // namespace curvemix
