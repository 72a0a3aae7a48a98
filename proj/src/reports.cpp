#include "curvemix/reports.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "curvemix/instance_io.hpp"
#include "json.hpp"

namespace curvemix {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json instance_json(const MarginSpec& spec) {
  return ordered_json::parse(instance_to_json(spec));
}

ordered_json header_json(const MarginSpec& spec) {
  ordered_json doc;
  doc["version"] = kVersion;
  doc["instance"] = instance_json(spec);
  return doc;
}

ordered_json checks_json(const std::vector<Inequality>& checks) {
  ordered_json arr = ordered_json::array();
  for (const Inequality& c : checks) {
    ordered_json item;
    item["name"] = c.name;
    item["lhs"] = c.lhs;
    item["rhs"] = c.rhs;
    item["pass"] = c.pass;
    arr.push_back(item);
  }
  return arr;
}

ordered_json comparison_json(const ComparisonReport& r) {
  ordered_json doc;
  doc["theorem"] = r.theorem;
  doc["tolerance"] = r.tolerance;
  doc["checks"] = checks_json(r.checks);
  doc["values"] = ordered_json::object();
  for (const auto& [key, value] : r.values) doc["values"][key] = value;
  doc["pass"] = r.pass;
  return doc;
}

ordered_json mixing_json(const MixingReport& r) {
  ordered_json doc;
  doc["N"] = r.N;
  doc["epsilon"] = r.epsilon;
  doc["tau"] = r.tau;
  doc["lower_bound"] = r.lower_bound;
  doc["upper_bound"] = r.upper_bound;
  doc["lambda_star"] = r.lambda_star;
  doc["horizon"] = r.horizon;
  doc["tv_curve"] = r.tv_curve;
  return doc;
}

std::string format_double(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

bool is_regular_square(const MarginSpec& spec, int& d) {
  if (spec.m != spec.n || spec.r.empty()) return false;
  d = spec.r.front();
  for (int x : spec.r)
    if (x != d) return false;
  for (int x : spec.c)
    if (x != d) return false;
  return d >= 1;
}

std::string summarize(const ComparisonReport& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    if (i > 0) out << ", ";
    out << r.checks[i].name << (r.checks[i].pass ? " ok" : " VIOLATED");
  }
  return out.str();
}

}  // namespace

std::string spectrum_to_json(const Spectrum& s, const ChainSpec& chain,
                             const MarginSpec& spec) {
  ordered_json doc = header_json(spec);
  doc["chain"] = chain_name(chain);
  doc["N"] = s.eigenvalues.size();
  doc["eigenvalues"] = s.eigenvalues;
  doc["lambda_1"] = s.lambda_1;
  doc["lambda_min"] = s.lambda_min;
  doc["lambda_star"] = s.lambda_star;
  doc["spectral_gap"] = s.gap;
  doc["relaxation"] = s.relaxation;
  doc["gap_second"] = s.gap_second;
  doc["relaxation_second"] = s.relaxation_second;
  doc["periodic"] = s.periodic;
  doc["residual_norm"] = s.residual_norm;
  return doc.dump(2);
}

std::string comparison_to_json(const ComparisonReport& r,
                               const MarginSpec& spec) {
  ordered_json doc = header_json(spec);
  doc.update(comparison_json(r));
  return doc.dump(2);
}

std::string mixing_to_json(const MixingReport& r, const ChainSpec& chain,
                           const MarginSpec& spec) {
  ordered_json doc = header_json(spec);
  doc["chain"] = chain_name(chain);
  doc.update(mixing_json(r));
  return doc.dump(2);
}

std::string mixing_to_csv(const MixingReport& r) {
  std::ostringstream out;
  out << "t,tv\n";
  for (std::size_t t = 0; t < r.tv_curve.size(); ++t)
    out << t << "," << format_double(r.tv_curve[t]) << "\n";
  return out.str();
}

std::string johnson_to_json(const JohnsonSpectrum& js) {
  ordered_json doc;
  doc["version"] = kVersion;
  doc["p"] = js.p;
  doc["q"] = js.q;
  ordered_json entries = ordered_json::array();
  for (auto [value, mult] : js.entries) entries.push_back({value, mult});
  doc["entries"] = entries;
  doc["min_bound"] = js.min_bound.get_str();
  return doc.dump(2);
}

std::string empirical_to_json(const EmpiricalReport& r, const ChainSpec& chain,
                              const MarginSpec& spec) {
  ordered_json doc = header_json(spec);
  doc["chain"] = chain_name(chain);
  doc["steps"] = r.T;
  doc["runs"] = r.runs;
  doc["counts"] = r.counts;
  doc["tv_to_uniform"] = r.tv_to_uniform;
  doc["tv_to_exact"] = r.tv_to_exact;
  doc["chi_square"] = r.chi_square;
  doc["chi_square_critical"] = r.chi_square_critical;
  doc["within_critical"] = r.within_critical;
  return doc.dump(2);
}

std::string matrix_to_json(const TransitionMatrix& t, const MarginSpec& spec) {
  ordered_json doc = header_json(spec);
  doc["chain"] = chain_name(t.chain);
  doc["N"] = t.P.rows();
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < t.P.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < t.P.cols(); ++j)
      row.push_back(t.P.at(i, j).get_str());
    rows.push_back(row);
  }
  doc["entries"] = rows;
  return doc.dump(2);
}

std::string matrix_to_csv(const RationalMatrix& P) {
  std::ostringstream out;
  for (int i = 0; i < P.rows(); ++i) {
    for (int j = 0; j < P.cols(); ++j) {
      if (j > 0) out << ",";
      out << P.at(i, j).get_str();
    }
    out << "\n";
  }
  return out.str();
}

VerifyOutcome run_verify_suite(const StateSpace& space, int k, double epsilon,
                               double tol) {
  VerifyOutcome out;
  const MarginSpec& spec = *space.spec;
  ordered_json doc = header_json(spec);
  doc["tolerance"] = tol;
  doc["N"] = space.N;

  ChainSpec curveball;
  curveball.kind = ChainKind::Curveball;

  Components comps =
      check_irreducibility(build_state_graph(space, GraphKind::Switch));
  if (!comps.irreducible()) {
    out.reducible = true;
    out.pass = false;
    doc["reducible"] = true;
    RationalMatrix P = build_transition(space, curveball).P;
    ordered_json comp_arr = ordered_json::array();
    std::ostringstream table;
    table << "REDUCIBLE state space: " << comps.count << " components\n";
    for (int c = 0; c < comps.count; ++c) {
      const std::vector<int>& members = comps.members[c];
      const int size = static_cast<int>(members.size());
      RationalMatrix sub(size, size);
      for (int a = 0; a < size; ++a)
        for (int b = 0; b < size; ++b)
          sub.at(a, b) = P.at(members[a], members[b]);
      Spectrum s = spectral_report(sub);
      ordered_json entry;
      entry["size"] = size;
      entry["eigenvalues"] = s.eigenvalues;
      comp_arr.push_back(entry);
      table << "component " << c + 1 << ": size " << size << ", eigenvalues [";
      for (int e = 0; e < size; ++e)
        table << (e > 0 ? ", " : "") << format_double(s.eigenvalues[e]);
      table << "]\n";
    }
    doc["components"] = comp_arr;
    doc["pass"] = false;
    out.json = doc.dump(2);
    out.table = table.str();
    return out;
  }

  ordered_json comparisons = ordered_json::array();
  auto guarded = [&](const std::string& name, auto&& body) {
    SuiteItem item;
    item.name = name;
    item.ran = true;
    try {
      body(item);
    } catch (const Error& e) {
      item.pass = false;
      item.detail = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    out.items.push_back(std::move(item));
  };
  auto skipped = [&](const std::string& name, const std::string& why) {
    SuiteItem item;
    item.name = name;
    item.detail = why;
    out.items.push_back(std::move(item));
  };
  auto from_comparison = [&](SuiteItem& item, const ComparisonReport& r) {
    item.pass = r.pass;
    item.detail = summarize(r);
    comparisons.push_back(comparison_json(r));
  };

  guarded("switch_block_reconstruction", [&](SuiteItem& item) {
    ChainSpec ktv;
    ktv.kind = ChainKind::KTVSwitch;
    SwitchDecomposition dec =
        decompose_switch(space, effective_gamma(ktv, spec));
    item.pass = true;
    item.detail = "blocks=" + std::to_string(dec.blocks.size()) +
                  (dec.negative_diagonal ? ", negative block diagonal"
                                         : ", all blocks stochastic");
  });

  guarded("heat_bath_identity", [&](SuiteItem& item) {
    RationalMatrix direct = build_transition(space, curveball).P;
    RationalMatrix heat =
        build_heat_bath(space, all_rowpair_partitions(space)).P;
    item.pass = direct == heat;
    item.detail = item.pass ? "exact equality" : "matrices differ";
  });

  if (spec.n < 3) {
    skipped("classical_switch_nonnegative", "needs n >= 3");
    skipped("relaxation_sandwich", "needs n >= 3");
  } else {
    guarded("classical_switch_nonnegative", [&](SuiteItem& item) {
      KtvNonnegReport r = verify_ktv_nonneg(space, tol);
      item.pass = r.pass;
      item.detail = "min eigenvalue " + format_double(r.min_eigenvalue);
    });
    guarded("relaxation_sandwich", [&](SuiteItem& item) {
      from_comparison(item, verify_relaxation_comparison(space, tol));
    });
  }

  if (spec.rho_total < 2) {
    skipped("edge_comparison", "fewer than two ones");
  } else {
    guarded("edge_comparison", [&](SuiteItem& item) {
      from_comparison(item, verify_edge_comparison(space, tol));
    });
  }

  int d = 0;
  if (is_regular_square(spec, d)) {
    guarded("regular_bounds", [&](SuiteItem& item) {
      from_comparison(item, verify_regular_bounds(space, d, tol));
    });
  } else {
    skipped("regular_bounds", "not a d-regular square instance");
  }

  if (k >= 1 && 2 * k <= spec.m) {
    guarded("k_subset_sandwich", [&](SuiteItem& item) {
      from_comparison(item, verify_k_curveball_bounds(space, k, tol));
    });
  } else {
    skipped("k_subset_sandwich", "needs 1 <= 2k <= m");
  }

  doc["comparisons"] = comparisons;

  std::vector<ChainSpec> chains;
  {
    ChainSpec ktv;
    ktv.kind = ChainKind::KTVSwitch;
    if (spec.n >= 2) chains.push_back(ktv);
    chains.push_back(curveball);
    if (k >= 1 && 2 * k <= spec.m) {
      ChainSpec kc;
      kc.kind = ChainKind::KCurveball;
      kc.k = k;
      chains.push_back(kc);
    }
    if (spec.rho_total >= 2) {
      ChainSpec edge;
      edge.kind = ChainKind::EdgeSwitch;
      chains.push_back(edge);
    }
  }
  const std::vector<double> epsilons = [&]() {
    std::vector<double> eps{0.25, 0.05, 0.01};
    if (std::find(eps.begin(), eps.end(), epsilon) == eps.end())
      eps.push_back(epsilon);
    return eps;
  }();

  ordered_json mixing = ordered_json::object();
  for (const ChainSpec& chain : chains) {
    const std::string name = chain_name(chain);
    guarded("mixing_bounds[" + name + "]", [&](SuiteItem& item) {
      RationalMatrix P = build_transition(space, chain).P;
      Spectrum s = spectral_report(P);
      if (s.periodic) {
        item.pass = true;
        item.detail = "flagged periodic (lambda_min within 1e-9 of -1), "
                      "not analyzed";
        ordered_json entry;
        entry["periodic"] = true;
        mixing[name] = entry;
        return;
      }
      item.pass = true;
      std::ostringstream detail;
      ordered_json entry = ordered_json::array();
      for (std::size_t e = 0; e < epsilons.size(); ++e) {
        BoundsVerdict v = check_mixing_bounds(P, epsilons[e], tol, false);
        item.pass = item.pass && v.pass;
        ordered_json one = mixing_json(v.report);
        one.erase("tv_curve");
        one["lower_ok"] = v.lower_ok;
        one["upper_ok"] = v.upper_ok;
        one["pass"] = v.pass;
        entry.push_back(one);
        if (e > 0) detail << ", ";
        detail << "tau(" << epsilons[e] << ")=" << v.report.tau
               << (v.pass ? "" : " OUT OF BOUNDS");
      }
      mixing[name] = entry;
      item.detail = detail.str();
    });
  }
  doc["mixing"] = mixing;

  out.pass = true;
  for (const SuiteItem& item : out.items)
    if (item.ran && !item.pass) out.pass = false;

  ordered_json checks = ordered_json::array();
  std::ostringstream table;
  for (const SuiteItem& item : out.items) {
    ordered_json one;
    one["name"] = item.name;
    one["ran"] = item.ran;
    one["pass"] = item.pass;
    one["detail"] = item.detail;
    checks.push_back(one);
    table << (item.ran ? (item.pass ? "PASS " : "FAIL ") : "SKIP ")
          << item.name;
    if (!item.detail.empty()) table << "  (" << item.detail << ")";
    table << "\n";
  }
  table << "overall: " << (out.pass ? "PASS" : "FAIL") << "\n";
  doc["checks"] = checks;
  doc["pass"] = out.pass;
  out.json = doc.dump(2);
  out.table = table.str();
  return out;
}

}  // namespace curvemix
