#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "curvemix/instance_io.hpp"
#include "curvemix/mixing.hpp"
#include "curvemix/reports.hpp"
#include "curvemix/statespace.hpp"
#include "json.hpp"

namespace py = pybind11;

namespace {

using namespace curvemix;
using ordered_json = nlohmann::ordered_json;

StateSpace space_of(const std::string& text, long long cap) {
  return enumerate_states(parse_instance_json(text), cap);
}

std::string enumerate_json(const std::string& text, long long cap) {
  StateSpace space = space_of(text, cap);
  ordered_json doc;
  doc["version"] = kVersion;
  doc["N"] = space.N;
  ordered_json keys = ordered_json::array();
  for (const BinaryMatrix& A : space.states)
    keys.push_back(key_to_hex(canonical_key(A)));
  doc["states"] = keys;
  return doc.dump();
}

std::string sample_json(const std::string& text, const std::string& chain_text,
                        long long steps, int count, std::uint64_t seed) {
  SpecPtr spec = parse_instance_json(text);
  ChainSpec chain = parse_chain_descriptor(chain_text);
  if (steps < 0) fail(ErrorCode::Usage, "need steps >= 0");
  if (count < 1) fail(ErrorCode::Usage, "need count >= 1");
  BinaryMatrix start = first_state(spec);
  RngStream base(seed);
  ordered_json doc;
  doc["version"] = kVersion;
  doc["chain"] = chain_name(chain);
  ordered_json arr = ordered_json::array();
  for (int run = 0; run < count; ++run) {
    BinaryMatrix A =
        run_chain(start, chain, steps,
                  base.split(static_cast<std::uint64_t>(run)).seed());
    ordered_json one;
    one["key"] = key_to_hex(canonical_key(A));
    ordered_json rows = ordered_json::array();
    for (const auto& row : A.to_rows()) rows.push_back(row);
    one["rows"] = rows;
    arr.push_back(one);
  }
  doc["samples"] = arr;
  return doc.dump();
}

std::string matrix_json(const std::string& text, const std::string& chain_text,
                        long long cap) {
  StateSpace space = space_of(text, cap);
  TransitionMatrix t = build_transition(space, parse_chain_descriptor(chain_text));
  return matrix_to_json(t, *space.spec);
}

std::string spectrum_json(const std::string& text,
                          const std::string& chain_text, long long cap) {
  StateSpace space = space_of(text, cap);
  ChainSpec chain = parse_chain_descriptor(chain_text);
  Spectrum s = spectral_report(build_transition(space, chain).P);
  return spectrum_to_json(s, chain, *space.spec);
}

std::string compare_json(const std::string& text, const std::string& theorem,
                         int k, double tolerance, long long cap) {
  StateSpace space = space_of(text, cap);
  ComparisonReport report;
  if (theorem == "sandwich") {
    report = verify_relaxation_comparison(space, tolerance);
  } else if (theorem == "edge") {
    report = verify_edge_comparison(space, tolerance);
  } else if (theorem == "regular") {
    const MarginSpec& spec = *space.spec;
    if (spec.m != spec.n || spec.r.empty())
      fail(ErrorCode::NotRegular, "needs a square instance");
    report = verify_regular_bounds(space, spec.r.front(), tolerance);
  } else if (theorem == "kcurveball") {
    report = verify_k_curveball_bounds(space, k, tolerance);
  } else {
    fail(ErrorCode::Usage, "theorem must be sandwich|edge|regular|kcurveball");
  }
  return comparison_to_json(report, *space.spec);
}

std::string mix_json(const std::string& text, const std::string& chain_text,
                     double epsilon, long long horizon, long long cap) {
  StateSpace space = space_of(text, cap);
  ChainSpec chain = parse_chain_descriptor(chain_text);
  RationalMatrix P = build_transition(space, chain).P;
  return mixing_to_json(mixing_time(P, epsilon, horizon), chain, *space.spec);
}

std::string verify_json(const std::string& text, int k, double epsilon,
                        double tolerance, long long cap) {
  StateSpace space = space_of(text, cap);
  return run_verify_suite(space, k, epsilon, tolerance).json;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Markov chains on binary matrices with fixed margins";
  m.attr("__version__") = kVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg =
          std::string(error_code_name(e.code())) + ": " + e.what();
      PyErr_SetString(PyExc_ValueError, msg.c_str());
    }
  });

  m.def("enumerate_states", &enumerate_json, py::arg("instance"),
        py::arg("max_states") = kDefaultStateCap);
  m.def("sample", &sample_json, py::arg("instance"),
        py::arg("chain") = "curveball", py::arg("steps") = 1000,
        py::arg("count") = 1, py::arg("seed") = 1);
  m.def("transition_matrix", &matrix_json, py::arg("instance"),
        py::arg("chain") = "curveball",
        py::arg("max_states") = kDefaultStateCap);
  m.def("spectrum", &spectrum_json, py::arg("instance"),
        py::arg("chain") = "curveball",
        py::arg("max_states") = kDefaultStateCap);
  m.def("compare", &compare_json, py::arg("instance"),
        py::arg("theorem") = "sandwich", py::arg("k") = 2,
        py::arg("tolerance") = kComparisonTol,
        py::arg("max_states") = kDefaultStateCap);
  m.def("mix", &mix_json, py::arg("instance"), py::arg("chain") = "curveball",
        py::arg("epsilon") = 0.05, py::arg("horizon") = 0,
        py::arg("max_states") = kDefaultStateCap);
  m.def("verify", &verify_json, py::arg("instance"), py::arg("k") = 2,
        py::arg("epsilon") = 0.05, py::arg("tolerance") = kComparisonTol,
        py::arg("max_states") = kDefaultStateCap);
}
