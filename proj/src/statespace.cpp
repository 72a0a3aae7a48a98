#include "curvemix/statespace.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace curvemix {

long long binomial_ll(int p, int q) {
  if (q < 0 || q > p) return 0;
  q = std::min(q, p - q);
  unsigned __int128 acc = 1;
  for (int i = 1; i <= q; ++i) {
    acc = acc * static_cast<unsigned>(p - q + i) / static_cast<unsigned>(i);
    if (acc > static_cast<unsigned __int128>(LLONG_MAX))
      fail(ErrorCode::BadPQ, "binomial coefficient overflows");
  }
  return static_cast<long long>(acc);
}

int StateSpace::index_of(const BinaryMatrix& A) const {
  auto it = index.find(canonical_key(A));
  if (it == index.end())
    fail(ErrorCode::StateNotFound, "matrix is not a state of this space");
  return it->second;
}

namespace {

class Enumerator {
 public:
  Enumerator(const SpecPtr& spec, long long cap, bool first_only)
      : spec_(spec), cap_(cap), first_only_(first_only), work_(spec) {
    const MarginSpec& s = *spec;
    col_left_.assign(s.n, 0);
    for (int j = 0; j < s.n; ++j) col_left_[j] = s.c[j];
    // suffix_allowed_[i*n+j]: rows in [i, m) where (row, j) is not forbidden
    suffix_allowed_.assign(static_cast<std::size_t>(s.m + 1) * s.n, 0);
    for (int i = s.m - 1; i >= 0; --i)
      for (int j = 0; j < s.n; ++j)
        suffix_allowed_[static_cast<std::size_t>(i) * s.n + j] =
            suffix_allowed_[static_cast<std::size_t>(i + 1) * s.n + j] +
            (s.forbidden_at(i, j) ? 0 : 1);
    avail_.assign(static_cast<std::size_t>(s.m) * (s.n + 1), 0);
  }

  std::vector<BinaryMatrix> run() {
    place_row(0);
    return std::move(found_);
  }

 private:
  bool columns_completable(int next_row) const {
    const MarginSpec& s = *spec_;
    for (int j = 0; j < s.n; ++j)
      if (col_left_[j] >
          suffix_allowed_[static_cast<std::size_t>(next_row) * s.n + j])
        return false;
    return true;
  }

  // done_ short-circuits the recursion once the first state is found.
  void place_row(int i) {
    if (done_) return;
    const MarginSpec& s = *spec_;
    if (i == s.m) {
      found_.push_back(work_);
      if (first_only_)
        done_ = true;
      else if (static_cast<long long>(found_.size()) > cap_)
        fail(ErrorCode::StateSpaceTooLarge,
             "more than " + std::to_string(cap_) + " states");
      return;
    }
    // avail_[i][j]: columns k >= j this row may still take; valid throughout
    // the row because takes happen in ascending column order
    const std::size_t base = static_cast<std::size_t>(i) * (s.n + 1);
    avail_[base + s.n] = 0;
    for (int j = s.n - 1; j >= 0; --j)
      avail_[base + j] = avail_[base + j + 1] +
                         (col_left_[j] > 0 && !s.forbidden_at(i, j) ? 1 : 0);
    if (avail_[base] < s.r[i]) return;
    choose_cols(i, 0, s.r[i]);
  }

  void choose_cols(int i, int from, int need) {
    if (done_) return;
    const MarginSpec& s = *spec_;
    if (need == 0) {
      if (columns_completable(i + 1)) place_row(i + 1);
      return;
    }
    const std::size_t base = static_cast<std::size_t>(i) * (s.n + 1);
    for (int j = from; j <= s.n - need; ++j) {
      if (avail_[base + j] < need) return;
      if (s.forbidden_at(i, j) || col_left_[j] == 0) continue;
      --col_left_[j];
      work_.set(i, j, true);
      choose_cols(i, j + 1, need - 1);
      work_.set(i, j, false);
      ++col_left_[j];
      if (done_) return;
    }
  }

  SpecPtr spec_;
  long long cap_;
  bool first_only_;
  bool done_ = false;
  BinaryMatrix work_;
  std::vector<int> col_left_;
  std::vector<int> suffix_allowed_;
  std::vector<int> avail_;
  std::vector<BinaryMatrix> found_;
};

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<Neighborhood> classes_from_unionfind(
    const StateSpace& space, UnionFind& uf,
    const std::vector<std::pair<int, int>>& pairs) {
  std::map<int, std::vector<int>> groups;
  for (int s = 0; s < space.N; ++s) groups[uf.find(s)].push_back(s);
  std::vector<Neighborhood> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) {
    (void)root;
    Neighborhood nb;
    nb.pairs = pairs;
    nb.member_indices = members;  // already ascending
    const BinaryMatrix& rep = space.states[members.front()];
    nb.size = 1;
    for (auto [i, j] : pairs) {
      RowPairStats st = row_pair_stats(rep, i, j);
      nb.ul_profile.emplace_back(st.u, st.l);
      nb.size *= binomial_ll(st.u + st.l, st.u);
    }
    if (nb.size != static_cast<long long>(members.size()))
      fail(ErrorCode::ConditionFailed,
           "class size " + std::to_string(members.size()) +
               " does not equal the binomial product " +
               std::to_string(nb.size));
    out.push_back(std::move(nb));
  }
  std::sort(out.begin(), out.end(),
            [](const Neighborhood& a, const Neighborhood& b) {
              return a.member_indices.front() < b.member_indices.front();
            });
  return out;
}

void unite_switches_on_pair(const StateSpace& space, int i, int j,
                            UnionFind& uf) {
  for (int s = 0; s < space.N; ++s) {
    const BinaryMatrix& A = space.states[s];
    RowPairStats st = row_pair_stats(A, i, j);
    for (int k : st.U)
      for (int l : st.L)
        uf.unite(s, space.index_of(apply_switch(A, i, j, k, l)));
  }
}

}  // namespace

StateSpace enumerate_states(const SpecPtr& spec, long long cap) {
  Enumerator en(spec, cap, false);
  StateSpace space;
  space.spec = spec;
  space.states = en.run();
  if (space.states.empty())
    fail(ErrorCode::EmptyStateSpace, "no matrix satisfies the instance");
  std::vector<std::pair<std::string, int>> keyed;
  keyed.reserve(space.states.size());
  for (std::size_t s = 0; s < space.states.size(); ++s)
    keyed.emplace_back(canonical_key(space.states[s]), static_cast<int>(s));
  std::sort(keyed.begin(), keyed.end());
  std::vector<BinaryMatrix> ordered;
  ordered.reserve(space.states.size());
  for (const auto& [key, pos] : keyed)
    ordered.push_back(std::move(space.states[static_cast<std::size_t>(pos)]));
  space.states = std::move(ordered);
  space.N = static_cast<long long>(space.states.size());
  for (int s = 0; s < space.N; ++s)
    space.index.emplace_hint(space.index.end(),
                             std::move(keyed[static_cast<std::size_t>(s)].first),
                             s);
  return space;
}

BinaryMatrix first_state(const SpecPtr& spec) {
  Enumerator en(spec, 1, true);
  std::vector<BinaryMatrix> found = en.run();
  if (found.empty())
    fail(ErrorCode::EmptyStateSpace, "no matrix satisfies the instance");
  return found.front();
}

Neighborhood binomial_neighborhood(const StateSpace& space, int state, int i,
                                   int j) {
  if (state < 0 || state >= space.N)
    fail(ErrorCode::IndexOutOfRange, "state index");
  const BinaryMatrix& A = space.states[state];
  RowPairStats st = row_pair_stats(A, i, j);
  Neighborhood nb;
  nb.pairs = {{i, j}};
  nb.ul_profile = {{st.u, st.l}};
  nb.size = binomial_ll(st.u + st.l, st.u);

  std::vector<int> subset(st.u);
  std::vector<int> members;
  // all u-subsets S of the trade columns, lexicographic
  auto rec = [&](auto&& self, int from, int need) -> void {
    if (need == 0) {
      members.push_back(space.index_of(apply_trade(A, i, j, subset)));
      return;
    }
    for (int t = from; t <= static_cast<int>(st.trade_columns.size()) - need;
         ++t) {
      subset[st.u - need] = st.trade_columns[t];
      self(self, t + 1, need - 1);
    }
  };
  rec(rec, 0, st.u);
  std::sort(members.begin(), members.end());
  nb.member_indices = std::move(members);
  if (static_cast<long long>(nb.member_indices.size()) != nb.size)
    fail(ErrorCode::ConditionFailed, "neighborhood size mismatch");
  return nb;
}

std::vector<Neighborhood> partition_by_rowpair(const StateSpace& space, int i,
                                               int j) {
  UnionFind uf(static_cast<int>(space.N));
  unite_switches_on_pair(space, i, j, uf);
  return classes_from_unionfind(space, uf, {{i, j}});
}

std::vector<Neighborhood> kappa_partition(
    const StateSpace& space, const std::vector<std::pair<int, int>>& kappa) {
  std::set<int> seen;
  for (auto [i, j] : kappa) {
    if (i >= j) fail(ErrorCode::IndexOutOfRange, "pairs need i < j");
    if (!seen.insert(i).second || !seen.insert(j).second)
      fail(ErrorCode::OverlappingPairs, "row pairs overlap");
  }
  UnionFind uf(static_cast<int>(space.N));
  for (auto [i, j] : kappa) unite_switches_on_pair(space, i, j, uf);
  return classes_from_unionfind(space, uf, kappa);
}

std::vector<std::vector<std::pair<int, int>>> all_disjoint_pair_sets(int m,
                                                                     int k) {
  if (2 * k > m) fail(ErrorCode::KTooLarge, "need 2k <= m");
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> current;
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self, int a, int left) -> void {
    if (left == 0) {
      out.push_back(current);
      return;
    }
    while (a < m && used[a]) ++a;
    if (m - a < 2 * left) return;
    // smallest free row: either skipped or paired with some larger free row
    used[a] = true;
    for (int b = a + 1; b < m; ++b) {
      if (used[b]) continue;
      used[b] = true;
      current.emplace_back(a, b);
      self(self, a + 1, left - 1);
      current.pop_back();
      used[b] = false;
    }
    used[a] = false;
    self(self, a + 1, left);
  };
  rec(rec, 0, k);
  std::sort(out.begin(), out.end());
  return out;
}

long long StateGraph::edge_count() const {
  long long twice = 0;
  for (const auto& nbrs : adjacency) twice += static_cast<long long>(nbrs.size());
  return twice / 2;
}

StateGraph build_state_graph(const StateSpace& space, GraphKind kind, int k) {
  StateGraph g;
  g.N = space.N;
  g.kind = kind;
  g.k = k;
  const int m = space.spec->m;
  std::set<std::pair<int, int>> edges;
  auto add_edge = [&](int a, int b, std::optional<std::pair<int, int>> label) {
    if (a == b) return;
    std::pair<int, int> e{std::min(a, b), std::max(a, b)};
    edges.insert(e);
    if (label) g.move_labels.emplace(e, *label);
  };

  if (kind == GraphKind::Switch) {
    for (int s = 0; s < space.N; ++s) {
      const BinaryMatrix& A = space.states[s];
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          RowPairStats st = row_pair_stats(A, i, j);
          for (int kc : st.U)
            for (int lc : st.L)
              add_edge(s, space.index_of(apply_switch(A, i, j, kc, lc)),
                       std::make_pair(i, j));
        }
    }
  } else if (kind == GraphKind::Curveball) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (const Neighborhood& nb : partition_by_rowpair(space, i, j))
          for (std::size_t a = 0; a < nb.member_indices.size(); ++a)
            for (std::size_t b = a + 1; b < nb.member_indices.size(); ++b)
              add_edge(nb.member_indices[a], nb.member_indices[b],
                       std::make_pair(i, j));
  } else {
    for (const auto& kappa : all_disjoint_pair_sets(m, k))
      for (const Neighborhood& nb : kappa_partition(space, kappa))
        for (std::size_t a = 0; a < nb.member_indices.size(); ++a)
          for (std::size_t b = a + 1; b < nb.member_indices.size(); ++b)
            add_edge(nb.member_indices[a], nb.member_indices[b], std::nullopt);
  }

  g.adjacency.assign(static_cast<std::size_t>(space.N), {});
  for (auto [a, b] : edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

JohnsonCheck check_johnson_isomorphism(const Neighborhood& nbhd,
                                       const StateSpace& space) {
  if (nbhd.pairs.size() != 1)
    fail(ErrorCode::NotIsomorphic, "needs a single-row-pair neighborhood");
  auto [i, j] = nbhd.pairs.front();
  auto [u, l] = nbhd.ul_profile.front();
  if (u < 1 || l < 1)
    fail(ErrorCode::NotIsomorphic, "needs u >= 1 and l >= 1");

  JohnsonCheck res;
  res.p = u + l;
  res.q = u;
  const BinaryMatrix& rep = space.states[nbhd.member_indices.front()];
  std::vector<int> trade_cols = row_pair_stats(rep, i, j).trade_columns;

  for (int s : nbhd.member_indices) {
    const BinaryMatrix& B = space.states[s];
    std::vector<int> label;
    for (int pos = 0; pos < res.p; ++pos)
      if (B.get(i, trade_cols[pos])) label.push_back(pos);
    if (static_cast<int>(label.size()) != u) {
      res.counterexample = "member " + std::to_string(s) +
                           " does not place u ones on the trade columns";
      return res;
    }
    res.labels.push_back(std::move(label));
  }

  std::set<std::vector<int>> distinct(res.labels.begin(), res.labels.end());
  if (static_cast<long long>(distinct.size()) != nbhd.size) {
    res.counterexample = "labels are not distinct";
    return res;
  }

  for (std::size_t a = 0; a < nbhd.member_indices.size(); ++a)
    for (std::size_t b = a + 1; b < nbhd.member_indices.size(); ++b) {
      std::vector<int> inter;
      std::set_intersection(res.labels[a].begin(), res.labels[a].end(),
                            res.labels[b].begin(), res.labels[b].end(),
                            std::back_inserter(inter));
      bool label_adjacent = static_cast<int>(inter.size()) == u - 1;
      auto mv = is_switch_adjacent(space.states[nbhd.member_indices[a]],
                                   space.states[nbhd.member_indices[b]]);
      bool switch_adjacent = mv.has_value() && mv->i == i && mv->j == j;
      if (label_adjacent != switch_adjacent) {
        res.counterexample =
            "states " + std::to_string(nbhd.member_indices[a]) + "," +
            std::to_string(nbhd.member_indices[b]) +
            ": label adjacency disagrees with switch adjacency";
        return res;
      }
    }
  res.isomorphic = true;
  return res;
}

Components check_irreducibility(const StateGraph& graph) {
  Components comp;
  comp.component_of.assign(static_cast<std::size_t>(graph.N), -1);
  for (int s = 0; s < graph.N; ++s) {
    if (comp.component_of[s] >= 0) continue;
    std::vector<int> stack{s};
    comp.component_of[s] = comp.count;
    comp.members.emplace_back();
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      comp.members.back().push_back(x);
      for (int y : graph.adjacency[x])
        if (comp.component_of[y] < 0) {
          comp.component_of[y] = comp.count;
          stack.push_back(y);
        }
    }
    std::sort(comp.members.back().begin(), comp.members.back().end());
    ++comp.count;
  }
  return comp;
}

bool is_bipartite(const StateGraph& graph) {
  std::vector<int> color(static_cast<std::size_t>(graph.N), -1);
  for (int s = 0; s < graph.N; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : graph.adjacency[x]) {
        if (color[y] < 0) {
          color[y] = 1 - color[x];
          stack.push_back(y);
        } else if (color[y] == color[x]) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace curvemix
