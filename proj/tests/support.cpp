#include "support.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace curvemix::testsupport {

SpecPtr make_spec(std::vector<int> r, std::vector<int> c,
                  std::vector<std::pair<int, int>> forbidden) {
  MarginSpec spec;
  spec.m = static_cast<int>(r.size());
  spec.n = static_cast<int>(c.size());
  spec.r = std::move(r);
  spec.c = std::move(c);
  std::sort(forbidden.begin(), forbidden.end());
  forbidden.erase(std::unique(forbidden.begin(), forbidden.end()),
                  forbidden.end());
  spec.forbidden = std::move(forbidden);
  return validate_instance(std::move(spec));
}

SpecPtr diagonal_spec(std::vector<int> r, std::vector<int> c) {
  std::vector<std::pair<int, int>> forbidden;
  for (int i = 0; i < static_cast<int>(r.size()); ++i)
    forbidden.emplace_back(i, i);
  return make_spec(std::move(r), std::move(c), std::move(forbidden));
}

SpecPtr perm3_spec() { return make_spec({1, 1, 1}, {1, 1, 1}); }

SpecPtr regular_spec(int n, int d) {
  return diagonal_spec(std::vector<int>(n, d), std::vector<int>(n, d));
}

std::vector<std::string> filter_all_keys(const SpecPtr& spec) {
  const int m = spec->m;
  const int n = spec->n;
  const int cells = m * n;
  std::vector<std::string> keys;
  std::vector<std::vector<int>> rows(m, std::vector<int>(n, 0));
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << cells); ++x) {
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      int sum = 0;
      for (int j = 0; j < n; ++j) {
        const int bit = static_cast<int>((x >> (i * n + j)) & 1);
        rows[i][j] = bit;
        sum += bit;
        if (bit && spec->forbidden_at(i, j)) ok = false;
      }
      if (sum != spec->r[i]) ok = false;
    }
    for (int j = 0; j < n && ok; ++j) {
      int sum = 0;
      for (int i = 0; i < m; ++i) sum += rows[i][j];
      if (sum != spec->c[j]) ok = false;
    }
    if (ok) keys.push_back(canonical_key(BinaryMatrix::from_rows(spec, rows)));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::uint64_t margin_signature(const std::vector<int>& r,
                               const std::vector<int>& c) {
  const int row_bits = static_cast<int>(std::bit_width(c.size()));
  const int col_bits = static_cast<int>(std::bit_width(r.size()));
  if (row_bits * r.size() + col_bits * c.size() > 64)
    fail(ErrorCode::Usage, "margins do not fit the signature");
  std::uint64_t sig = 0;
  int shift = 0;
  for (int x : r) {
    sig |= static_cast<std::uint64_t>(x) << shift;
    shift += row_bits;
  }
  for (int x : c) {
    sig |= static_cast<std::uint64_t>(x) << shift;
    shift += col_bits;
  }
  return sig;
}

std::pair<std::vector<int>, std::vector<int>> decode_signature(
    int m, int n, std::uint64_t sig) {
  const int row_bits = std::bit_width(static_cast<unsigned>(n));
  const int col_bits = std::bit_width(static_cast<unsigned>(m));
  std::vector<int> r(m), c(n);
  int shift = 0;
  for (int i = 0; i < m; ++i) {
    r[i] = static_cast<int>((sig >> shift) & ((1u << row_bits) - 1));
    shift += row_bits;
  }
  for (int j = 0; j < n; ++j) {
    c[j] = static_cast<int>((sig >> shift) & ((1u << col_bits) - 1));
    shift += col_bits;
  }
  return {std::move(r), std::move(c)};
}

std::unordered_map<std::uint64_t, long long> scan_shape(int m, int n,
                                                        bool diagonal) {
  if (diagonal && m != n) fail(ErrorCode::Usage, "diagonal needs m = n");
  const int cells = m * n;
  std::unordered_map<std::uint64_t, long long> counts;
  std::vector<int> r(m), c(n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << cells); ++x) {
    std::fill(r.begin(), r.end(), 0);
    std::fill(c.begin(), c.end(), 0);
    bool ok = true;
    for (int i = 0; i < m && ok; ++i)
      for (int j = 0; j < n; ++j)
        if ((x >> (i * n + j)) & 1) {
          if (diagonal && i == j) {
            ok = false;
            break;
          }
          ++r[i];
          ++c[j];
        }
    if (ok) ++counts[margin_signature(r, c)];
  }
  return counts;
}

namespace {

void descending_vectors(int len, int maxv, std::vector<int>& prefix,
                        std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == len) {
    out.push_back(prefix);
    return;
  }
  const int top = prefix.empty() ? maxv : prefix.back();
  for (int v = top; v >= 0; --v) {
    prefix.push_back(v);
    descending_vectors(len, maxv, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> all_descending(int len, int maxv) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  descending_vectors(len, maxv, prefix, out);
  return out;
}

std::string class_name(int m, int n, const std::vector<int>& r,
                       const std::vector<int>& c, bool diagonal) {
  std::ostringstream os;
  os << m << "x" << n << " r=(";
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
  os << ") c=(";
  for (std::size_t j = 0; j < c.size(); ++j) os << (j ? "," : "") << c[j];
  os << ")";
  if (diagonal) os << " diag";
  return os.str();
}

std::vector<SweepInstance> feasible_classes(int m, int n, bool diagonal) {
  std::vector<SweepInstance> out;
  const int rmax = diagonal ? n - 1 : n;
  const int cmax = diagonal ? m - 1 : m;
  for (const auto& r : all_descending(m, rmax)) {
    const int total = std::accumulate(r.begin(), r.end(), 0);
    for (const auto& c : all_descending(n, cmax)) {
      if (std::accumulate(c.begin(), c.end(), 0) != total) continue;
      SweepInstance item;
      item.name = class_name(m, n, r, c, diagonal);
      try {
        item.spec = diagonal ? diagonal_spec(r, c) : make_spec(r, c);
        item.N = enumerate_states(item.spec).N;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyStateSpace) continue;
        throw;
      }
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace

std::vector<SweepInstance> margin_classes(int m, int n, bool diagonal,
                                          int keep) {
  std::vector<SweepInstance> classes = feasible_classes(m, n, diagonal);
  std::erase_if(classes, [](const SweepInstance& item) { return item.N < 2; });
  std::erase_if(classes, [](const SweepInstance& item) {
    StateSpace space = enumerate_states(item.spec);
    StateGraph graph = build_state_graph(space, GraphKind::Switch);
    return !check_irreducibility(graph).irreducible();
  });
  std::sort(classes.begin(), classes.end(),
            [](const SweepInstance& a, const SweepInstance& b) {
              return a.N != b.N ? a.N > b.N : a.name < b.name;
            });
  if (static_cast<int>(classes.size()) > keep) classes.resize(keep);
  return classes;
}

std::vector<SweepInstance> all_margin_classes(int m, int n) {
  return feasible_classes(m, n, false);
}

const std::vector<SweepInstance>& sweep() {
  static const std::vector<SweepInstance> instances = [] {
    std::vector<SweepInstance> all;
    for (int m : {2, 3, 4})
      for (int n : {3, 4})
        for (const SweepInstance& item : margin_classes(m, n, false, 8))
          all.push_back(item);
    for (const SweepInstance& item : margin_classes(3, 3, true, 4))
      all.push_back(item);
    for (const SweepInstance& item : margin_classes(4, 4, true, 8))
      all.push_back(item);
    return all;
  }();
  return instances;
}

RationalMatrix random_reversible_chain(int size, RngStream& rng) {
  if (size < 2) fail(ErrorCode::Usage, "need at least two states");
  std::vector<long> w(size);
  for (long& x : w) x = 1 + static_cast<long>(rng.uniform_below(9));
  RationalMatrix P(size, size);
  for (int i = 0; i < size; ++i) {
    mpq_class hold(1);
    for (int j = 0; j < size; ++j) {
      if (j == i) continue;
      mpq_class accept =
          w[j] >= w[i] ? mpq_class(1) : mpq_class(w[j], w[i]);
      accept.canonicalize();
      mpq_class move = accept / mpq_class(size - 1);
      move.canonicalize();
      P.at(i, j) = move;
      hold -= move;
    }
    P.at(i, i) = hold;
  }
  return P;
}

FrequencyCheck one_step_frequencies(const StateSpace& space,
                                    const BinaryMatrix& A0, const StepFn& step,
                                    const std::vector<mpq_class>& exact_row,
                                    int reps, std::uint64_t seed) {
  std::vector<long long> counts(space.states.size(), 0);
  RngStream base(seed);
  for (int rep = 0; rep < reps; ++rep) {
    RngStream stream = base.split(rep);
    ++counts[space.index_of(step(A0, stream))];
  }
  FrequencyCheck check;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const double p = exact_row[s].get_d();
    const double freq = static_cast<double>(counts[s]) / reps;
    if (exact_row[s] == 0) {
      check.off_support += counts[s];
      if (counts[s] != 0) check.ok = false;
      continue;
    }
    const double sigma = std::sqrt(p * (1.0 - p) / reps);
    if (sigma == 0.0) {
      if (freq != p) check.ok = false;
      continue;
    }
    const double z = std::fabs(freq - p) / sigma;
    if (z > check.worst_z) {
      check.worst_z = z;
      check.worst_state = static_cast<int>(s);
    }
    if (z > 4.0) check.ok = false;
  }
  return check;
}

}  // namespace curvemix::testsupport
