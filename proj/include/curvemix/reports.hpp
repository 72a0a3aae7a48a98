#pragma once

#include <string>
#include <vector>

#include "curvemix/mixing.hpp"
#include "curvemix/spectral.hpp"

namespace curvemix {

inline constexpr const char* kVersion = "0.1.0";

std::string spectrum_to_json(const Spectrum& s, const ChainSpec& chain,
                             const MarginSpec& spec);
std::string comparison_to_json(const ComparisonReport& r,
                               const MarginSpec& spec);
std::string mixing_to_json(const MixingReport& r, const ChainSpec& chain,
                           const MarginSpec& spec);
std::string mixing_to_csv(const MixingReport& r);
std::string johnson_to_json(const JohnsonSpectrum& js);
std::string empirical_to_json(const EmpiricalReport& r, const ChainSpec& chain,
                              const MarginSpec& spec);
std::string matrix_to_json(const TransitionMatrix& t, const MarginSpec& spec);
std::string matrix_to_csv(const RationalMatrix& P);

struct SuiteItem {
  std::string name;
  bool ran = false;  // false when the theorem does not apply to the instance
  bool pass = false;
  std::string detail;
};

struct VerifyOutcome {
  bool pass = false;       // every item that ran passed
  bool reducible = false;  // per-component spectra reported instead
  std::vector<SuiteItem> items;
  std::string json;
  std::string table;
};

// Runs the full theorem suite on one instance: switch-chain block
// reconstruction, the heat-bath identity, non-negativity of the classical
// switch spectrum, the relaxation-time sandwich, edge-switch comparisons,
// regular-instance bounds when the instance is d-regular, the k-subset
// sandwich, and the mixing-time bounds for every aperiodic chain.
VerifyOutcome run_verify_suite(const StateSpace& space, int k, double epsilon,
                               double tol = kComparisonTol);

}  // namespace curvemix
