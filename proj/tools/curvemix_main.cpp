#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "curvemix/instance_io.hpp"
#include "curvemix/mixing.hpp"
#include "curvemix/reports.hpp"
#include "curvemix/statespace.hpp"
#include "json.hpp"

namespace {

using namespace curvemix;
using ordered_json = nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadDescriptor:
    case ErrorCode::BadGamma:
    case ErrorCode::BadDelta:
    case ErrorCode::BadPQ:
    case ErrorCode::IoError:
    case ErrorCode::Usage:
    case ErrorCode::ForbiddenOutOfRange:
    case ErrorCode::AssumptionViolated:
    case ErrorCode::KTooLarge:
    case ErrorCode::NotRegular:
    case ErrorCode::SpecMismatch:
    case ErrorCode::StateNotFound:
    case ErrorCode::IndexOutOfRange:
      return 2;
    case ErrorCode::EmptyStateSpace:
    case ErrorCode::MarginMismatch:
    case ErrorCode::InfeasibleRow:
    case ErrorCode::InfeasibleColumn:
      return 3;
    case ErrorCode::StateSpaceTooLarge:
      return 4;
    case ErrorCode::BoundViolated:
    case ErrorCode::ConditionFailed:
    case ErrorCode::NegativeEigenvalue:
    case ErrorCode::InconsistentVerdict:
    case ErrorCode::NegativeLazySpectrum:
    case ErrorCode::ReconstructionMismatch:
    case ErrorCode::NotIsomorphic:
    case ErrorCode::HorizonExceeded:
      return 5;
    case ErrorCode::Reducible:
    case ErrorCode::Periodic:
      return 6;
    default:
      return 1;
  }
}

long long state_cap_from_env() {
  const char* env = std::getenv("CURVEMIX_MAX_STATES");
  if (env == nullptr) return kDefaultStateCap;
  try {
    long long cap = std::stoll(env);
    if (cap < 1) throw std::invalid_argument("cap");
    return cap;
  } catch (const std::exception&) {
    fail(ErrorCode::Usage, "CURVEMIX_MAX_STATES must be a positive integer");
  }
}

std::string hex_to_key(const std::string& hex) {
  if (hex.size() % 2 != 0)
    fail(ErrorCode::Usage, "hex key needs an even number of digits");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return 10 + (c - 'a');
    if (c >= 'A' && c <= 'F') return 10 + (c - 'A');
    fail(ErrorCode::Usage, "invalid hex digit in key");
  };
  std::string key;
  key.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
    key.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  return key;
}

std::vector<std::string> row_strings(const BinaryMatrix& A) {
  const MarginSpec& spec = A.spec();
  std::vector<std::string> rows;
  for (int i = 0; i < spec.m; ++i) {
    std::string row(static_cast<std::size_t>(spec.n), '0');
    for (int j = 0; j < spec.n; ++j)
      if (A.get(i, j)) row[static_cast<std::size_t>(j)] = '1';
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Options {
  std::string instance_path;
  std::string chain_text = "curveball";
  std::string format;
  std::string theorem = "sandwich";
  std::string start_hex;
  std::uint64_t seed = 1;
  long long steps = 1000;
  int count = 1;
  int k = 2;
  double epsilon = 0.05;
  double tolerance = kComparisonTol;
  long long horizon = 0;
  long long max_states = 0;
};

long long effective_cap(const Options& opt) {
  return opt.max_states > 0 ? opt.max_states : state_cap_from_env();
}

int cmd_enumerate(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  StateSpace space = enumerate_states(spec, effective_cap(opt));
  if (opt.format == "json") {
    ordered_json doc;
    doc["version"] = kVersion;
    doc["instance"] = ordered_json::parse(instance_to_json(*spec));
    doc["N"] = space.N;
    ordered_json keys = ordered_json::array();
    for (const BinaryMatrix& A : space.states)
      keys.push_back(key_to_hex(canonical_key(A)));
    doc["states"] = keys;
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "N=" << space.N << "\n";
    for (const BinaryMatrix& A : space.states)
      std::cout << key_to_hex(canonical_key(A)) << "\n";
  }
  return 0;
}

int cmd_sample(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  ChainSpec chain = parse_chain_descriptor(opt.chain_text);
  if (opt.steps < 0) fail(ErrorCode::Usage, "need steps >= 0");
  if (opt.count < 1) fail(ErrorCode::Usage, "need count >= 1");
  BinaryMatrix start = opt.start_hex.empty()
                           ? first_state(spec)
                           : matrix_from_key(spec, hex_to_key(opt.start_hex));
  RngStream base(opt.seed);
  std::vector<BinaryMatrix> samples;
  for (int run = 0; run < opt.count; ++run)
    samples.push_back(
        run_chain(start, chain, opt.steps,
                  base.split(static_cast<std::uint64_t>(run)).seed()));
  if (opt.format == "json") {
    ordered_json doc;
    doc["version"] = kVersion;
    doc["instance"] = ordered_json::parse(instance_to_json(*spec));
    doc["chain"] = chain_name(chain);
    doc["seed"] = opt.seed;
    doc["steps"] = opt.steps;
    ordered_json arr = ordered_json::array();
    for (const BinaryMatrix& A : samples) {
      ordered_json one;
      one["key"] = key_to_hex(canonical_key(A));
      one["rows"] = row_strings(A);
      arr.push_back(one);
    }
    doc["samples"] = arr;
    std::cout << doc.dump(2) << "\n";
  } else {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (s > 0) std::cout << "\n";
      for (const std::string& row : row_strings(samples[s]))
        std::cout << row << "\n";
    }
  }
  return 0;
}

int cmd_matrix(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  ChainSpec chain = parse_chain_descriptor(opt.chain_text);
  StateSpace space = enumerate_states(spec, effective_cap(opt));
  TransitionMatrix t = build_transition(space, chain);
  if (opt.format == "csv")
    std::cout << matrix_to_csv(t.P);
  else
    std::cout << matrix_to_json(t, *spec) << "\n";
  return 0;
}

int cmd_spectrum(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  ChainSpec chain = parse_chain_descriptor(opt.chain_text);
  StateSpace space = enumerate_states(spec, effective_cap(opt));
  Spectrum s = spectral_report(build_transition(space, chain).P);
  if (opt.format == "table") {
    std::cout << "N " << s.eigenvalues.size() << "\n";
    std::cout << "lambda_1 " << s.lambda_1 << "\n";
    std::cout << "lambda_min " << s.lambda_min << "\n";
    std::cout << "lambda_star " << s.lambda_star << "\n";
    std::cout << "gap " << s.gap << "\n";
    std::cout << "relaxation " << s.relaxation << "\n";
    std::cout << "gap_second " << s.gap_second << "\n";
    std::cout << "relaxation_second " << s.relaxation_second << "\n";
    std::cout << "periodic " << (s.periodic ? "true" : "false") << "\n";
  } else {
    std::cout << spectrum_to_json(s, chain, *spec) << "\n";
  }
  return 0;
}

int cmd_compare(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  StateSpace space = enumerate_states(spec, effective_cap(opt));
  ComparisonReport report;
  if (opt.theorem == "sandwich") {
    report = verify_relaxation_comparison(space, opt.tolerance);
  } else if (opt.theorem == "edge") {
    report = verify_edge_comparison(space, opt.tolerance);
  } else if (opt.theorem == "regular") {
    if (spec->m != spec->n || spec->r.empty())
      fail(ErrorCode::NotRegular, "needs a square instance");
    report = verify_regular_bounds(space, spec->r.front(), opt.tolerance);
  } else if (opt.theorem == "kcurveball") {
    report = verify_k_curveball_bounds(space, opt.k, opt.tolerance);
  } else {
    fail(ErrorCode::Usage, "theorem must be sandwich|edge|regular|kcurveball");
  }
  std::cout << comparison_to_json(report, *spec) << "\n";
  return report.pass ? 0 : 5;
}

int cmd_mix(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  ChainSpec chain = parse_chain_descriptor(opt.chain_text);
  StateSpace space = enumerate_states(spec, effective_cap(opt));
  RationalMatrix P = build_transition(space, chain).P;
  MixingReport report = mixing_time(P, opt.epsilon, opt.horizon);
  if (opt.format == "csv")
    std::cout << mixing_to_csv(report);
  else
    std::cout << mixing_to_json(report, chain, *spec) << "\n";
  return 0;
}

int cmd_verify(const Options& opt) {
  SpecPtr spec = load_instance_file(opt.instance_path);
  StateSpace space = enumerate_states(spec, effective_cap(opt));
  VerifyOutcome outcome =
      run_verify_suite(space, opt.k, opt.epsilon, opt.tolerance);
  if (opt.format == "json")
    std::cout << outcome.json << "\n";
  else
    std::cout << outcome.table;
  if (outcome.reducible) return 6;
  return outcome.pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chains on binary matrices with fixed margins"};
  app.require_subcommand(1);

  Options opt;
  std::map<CLI::App*, std::string> default_format;

  CLI::App* enumerate = app.add_subcommand("enumerate", "list all states");
  CLI::App* sample = app.add_subcommand("sample", "run a chain, print states");
  CLI::App* matrix = app.add_subcommand("matrix", "exact transition matrix");
  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalue report");
  CLI::App* compare = app.add_subcommand("compare", "one comparison theorem");
  CLI::App* mix = app.add_subcommand("mix", "mixing time analysis");
  CLI::App* verify = app.add_subcommand("verify", "full theorem suite");

  default_format[enumerate] = "table";
  default_format[sample] = "table";
  default_format[matrix] = "json";
  default_format[spectrum] = "json";
  default_format[compare] = "json";
  default_format[mix] = "json";
  default_format[verify] = "table";

  for (auto& [cmd, fmt] : default_format) {
    cmd->add_option("instance", opt.instance_path, "instance JSON file")
        ->required();
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--max-states", opt.max_states,
                    "enumeration cap (overrides CURVEMIX_MAX_STATES)");
  }

  for (CLI::App* cmd : {sample, matrix, spectrum, mix})
    cmd->add_option("--chain", opt.chain_text,
                    "ktv | gamma:<p/q> | curveball | kcurveball:<k> | edge | "
                    "edge-lazy:<p/q>");
  sample->add_option("--steps", opt.steps, "steps per sample");
  sample->add_option("--count", opt.count, "number of samples");
  sample->add_option("--seed", opt.seed, "random seed");
  sample->add_option("--start", opt.start_hex, "start state (hex key)");
  compare->add_option("--theorem", opt.theorem,
                      "sandwich | edge | regular | kcurveball");
  for (CLI::App* cmd : {compare, verify})
    cmd->add_option("--k", opt.k, "disjoint row pairs per step");
  for (CLI::App* cmd : {mix, verify})
    cmd->add_option("--epsilon", opt.epsilon, "target variation distance");
  mix->add_option("--horizon", opt.horizon, "scan limit (0 = automatic)");
  for (CLI::App* cmd : {compare, verify})
    cmd->add_option("--tolerance", opt.tolerance, "comparison tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = nullptr;
  for (auto& [cmd, fmt] : default_format)
    if (cmd->parsed()) {
      chosen = cmd;
      if (cmd->count("--format") == 0) opt.format = fmt;
    }

  try {
    if (chosen == enumerate) return cmd_enumerate(opt);
    if (chosen == sample) return cmd_sample(opt);
    if (chosen == matrix) return cmd_matrix(opt);
    if (chosen == spectrum) return cmd_spectrum(opt);
    if (chosen == compare) return cmd_compare(opt);
    if (chosen == mix) return cmd_mix(opt);
    if (chosen == verify) return cmd_verify(opt);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what()
              << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
