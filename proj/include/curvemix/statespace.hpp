#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvemix/core.hpp"

namespace curvemix {

inline constexpr long long kDefaultStateCap = 200000;

struct StateSpace {
  SpecPtr spec;
  std::vector<BinaryMatrix> states;  // strictly increasing by canonical_key
  std::map<std::string, int> index;  // canonical_key -> position
  long long N = 0;

  [[nodiscard]] int index_of(const BinaryMatrix& A) const;
};

// Row-wise backtracking with column-sum feasibility pruning; throws when the
// count exceeds cap or when no matrix satisfies the instance.
StateSpace enumerate_states(const SpecPtr& spec,
                            long long cap = kDefaultStateCap);

// First matrix found by the same backtracking order, without materializing Ω.
BinaryMatrix first_state(const SpecPtr& spec);

struct Neighborhood {
  std::vector<std::pair<int, int>> pairs;      // one row pair, or κ
  std::vector<int> member_indices;             // sorted state indices
  std::vector<std::pair<int, int>> ul_profile; // (u,l) per pair
  long long size = 0;                          // = Π C(u_i+l_i, u_i)
};

Neighborhood binomial_neighborhood(const StateSpace& space, int state, int i,
                                   int j);

std::vector<Neighborhood> partition_by_rowpair(const StateSpace& space, int i,
                                               int j);

std::vector<Neighborhood> kappa_partition(
    const StateSpace& space, const std::vector<std::pair<int, int>>& kappa);

// All sets of k pairwise disjoint row pairs, deterministic order.
std::vector<std::vector<std::pair<int, int>>> all_disjoint_pair_sets(int m,
                                                                     int k);

enum class GraphKind { Switch, Curveball, KCurveball };

struct StateGraph {
  long long N = 0;
  GraphKind kind = GraphKind::Switch;
  int k = 1;  // for KCurveball
  std::vector<std::vector<int>> adjacency;  // sorted, loop-free, symmetric
  // For Switch/Curveball edges, the unique row pair carrying the move,
  // keyed by (min state, max state).
  std::map<std::pair<int, int>, std::pair<int, int>> move_labels;

  [[nodiscard]] long long edge_count() const;
};

StateGraph build_state_graph(const StateSpace& space, GraphKind kind, int k = 1);

struct JohnsonCheck {
  bool isomorphic = false;
  int p = 0;
  int q = 0;
  std::vector<std::vector<int>> labels;  // per member, positions of row-i ones
  std::string counterexample;
};

// Verifies that switch-adjacency inside the class matches intersection-size
// adjacency of the member labels, i.e. the class graph is J(u+l, u).
JohnsonCheck check_johnson_isomorphism(const Neighborhood& nbhd,
                                       const StateSpace& space);

struct Components {
  int count = 0;
  std::vector<int> component_of;        // per state
  std::vector<std::vector<int>> members;

  [[nodiscard]] bool irreducible() const { return count == 1; }
};

Components check_irreducibility(const StateGraph& graph);

[[nodiscard]] bool is_bipartite(const StateGraph& graph);

[[nodiscard]] long long binomial_ll(int p, int q);

}  // namespace curvemix
