#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "curvemix/statespace.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace curvemix;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_binary() {
  const char* path = std::getenv("CURVEMIX_CLI");
  REQUIRE_MESSAGE(path != nullptr, "CURVEMIX_CLI must point at the binary");
  return path;
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
  std::string command;
  if (!env.empty()) command += env + " ";
  command += "\"" + cli_binary() + "\" " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0)
    result.output.append(buffer, got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_instance(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text << "\n";
  return name;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

const std::string kPerm3 =
    write_instance("cli_perm3.json", R"({"rows": [1,1,1], "cols": [1,1,1]})");
const std::string kDiag3 = write_instance(
    "cli_diag3.json",
    R"({"rows": [1,1,1], "cols": [1,1,1], "diagonal_forbidden": true})");
const std::string kMismatch =
    write_instance("cli_mismatch.json", R"({"rows": [2,1], "cols": [1,1]})");
const std::string kEmpty = write_instance(
    "cli_empty.json", R"({"rows": [2,2,0], "cols": [3,1,0]})");
const std::string kRect = write_instance(
    "cli_rect.json", R"({"rows": [2,1], "cols": [1,1,1]})");

}  // namespace

TEST_CASE("enumerate lists every state as a hex key") {
  CliResult result = run_cli("enumerate " + kPerm3);
  CHECK(result.exit_code == 0);
  std::vector<std::string> lines = lines_of(result.output);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "N=6");

  StateSpace space = enumerate_states(testsupport::perm3_spec());
  for (long long s = 0; s < space.N; ++s)
    CHECK(lines[static_cast<std::size_t>(s) + 1] ==
          key_to_hex(canonical_key(space.states[static_cast<std::size_t>(s)])));
}

TEST_CASE("enumerate json carries the version and instance echo") {
  CliResult result = run_cli("enumerate " + kPerm3 + " --format json");
  CHECK(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["version"] == "0.1.0");
  CHECK(doc["N"] == 6);
  CHECK(doc["states"].size() == 6);
  CHECK(doc["instance"]["rows"] == json({1, 1, 1}));
  CHECK(doc["instance"]["cols"] == json({1, 1, 1}));
}

TEST_CASE("usage and argument errors exit with code 2") {
  CHECK(run_cli("enumerate " + kPerm3 + " --bogus").exit_code == 2);
  CHECK(run_cli("enumerate no_such_file.json").exit_code == 2);
  CHECK(run_cli("spectrum " + kPerm3 + " --chain bogus").exit_code == 2);
  CHECK(run_cli("sample " + kPerm3 + " --chain kcurveball:2").exit_code == 2);
  CHECK(run_cli("compare " + kRect + " --theorem regular").exit_code == 2);
  CHECK(run_cli("enumerate " + kPerm3, "CURVEMIX_MAX_STATES=abc").exit_code ==
        2);
}

TEST_CASE("infeasible instances exit with code 3") {
  CliResult mismatch = run_cli("enumerate " + kMismatch);
  CHECK(mismatch.exit_code == 3);
  CHECK(mismatch.output.find("MarginMismatch") != std::string::npos);
  CHECK(run_cli("enumerate " + kEmpty).exit_code == 3);
}

TEST_CASE("the state cap exits with code 4") {
  CHECK(run_cli("enumerate " + kPerm3, "CURVEMIX_MAX_STATES=3").exit_code == 4);
  CHECK(run_cli("enumerate " + kPerm3 + " --max-states 3").exit_code == 4);
  CHECK(run_cli("enumerate " + kPerm3 + " --max-states 6",
                "CURVEMIX_MAX_STATES=3")
            .exit_code == 0);
}

TEST_CASE("an exhausted scan horizon exits with code 5") {
  CliResult result =
      run_cli("mix " + kPerm3 + " --horizon 2 --epsilon 0.01");
  CHECK(result.exit_code == 5);
  CHECK(result.output.find("HorizonExceeded") != std::string::npos);
}

TEST_CASE("a reducible state space exits with code 6") {
  CliResult result = run_cli("verify " + kDiag3);
  CHECK(result.exit_code == 6);
  CHECK(result.output.find("REDUCIBLE state space: 2 components") !=
        std::string::npos);
}

TEST_CASE("sample output is deterministic for a fixed seed") {
  const std::string args =
      "sample " + kPerm3 + " --chain curveball --steps 40 --count 3 --seed 9";
  CliResult first = run_cli(args);
  CliResult second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);

  StateSpace space = enumerate_states(testsupport::perm3_spec());
  std::vector<std::string> lines = lines_of(first.output);
  REQUIRE(lines.size() == 11);
  for (int s = 0; s < 3; ++s) {
    std::vector<std::vector<int>> rows01;
    for (int i = 0; i < 3; ++i) {
      const std::string& line = lines[static_cast<std::size_t>(4 * s + i)];
      REQUIRE(line.size() == 3);
      std::vector<int> row;
      for (char c : line) row.push_back(c == '1' ? 1 : 0);
      rows01.push_back(std::move(row));
    }
    BinaryMatrix A = BinaryMatrix::from_rows(space.spec, rows01);
    CHECK(A.satisfies_spec());
    CHECK(space.index_of(A) >= 0);
    if (s < 2) CHECK(lines[static_cast<std::size_t>(4 * s + 3)].empty());
  }
}

TEST_CASE("sample json names the chain and keys each draw") {
  CliResult result = run_cli("sample " + kPerm3 +
                             " --chain ktv --steps 5 --count 2 --format json");
  CHECK(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["chain"] == "ktv");
  CHECK(doc["seed"] == 1);
  CHECK(doc["steps"] == 5);
  REQUIRE(doc["samples"].size() == 2);
  for (const json& one : doc["samples"]) {
    CHECK(one["key"].get<std::string>().size() == 6);
    CHECK(one["rows"].size() == 3);
  }
}

TEST_CASE("matrix csv prints exact rational entries") {
  CliResult result =
      run_cli("matrix " + kPerm3 + " --chain curveball --format csv");
  CHECK(result.exit_code == 0);
  std::vector<std::string> lines = lines_of(result.output);
  REQUIRE(lines.size() == 6);
  for (int i = 0; i < 6; ++i) {
    std::istringstream in(lines[static_cast<std::size_t>(i)]);
    std::string cell;
    int half = 0, sixth = 0, zero = 0, j = 0;
    while (std::getline(in, cell, ',')) {
      if (cell == "1/2") {
        ++half;
        CHECK(j == i);
      } else if (cell == "1/6") {
        ++sixth;
      } else if (cell == "0") {
        ++zero;
      }
      ++j;
    }
    CHECK(j == 6);
    CHECK(half == 1);
    CHECK(sixth == 3);
    CHECK(zero == 2);
  }
}

TEST_CASE("spectrum json reports the eigenvalue summary") {
  CliResult result = run_cli("spectrum " + kPerm3 + " --chain curveball");
  CHECK(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["chain"] == "curveball");
  CHECK(doc["N"] == 6);
  CHECK(doc["eigenvalues"].size() == 6);
  CHECK(doc["lambda_star"].get<double>() == doctest::Approx(0.5));
  CHECK(doc["relaxation_second"].get<double>() == doctest::Approx(2.0));
  CHECK_FALSE(doc["periodic"].get<bool>());

  CliResult table =
      run_cli("spectrum " + kPerm3 + " --chain edge --format table");
  CHECK(table.exit_code == 0);
  CHECK(table.output.find("periodic true") != std::string::npos);
}

TEST_CASE("mix reports the tv curve in both formats") {
  CliResult csv = run_cli("mix " + kPerm3 +
                          " --chain curveball --epsilon 0.01 --format csv");
  CHECK(csv.exit_code == 0);
  std::vector<std::string> lines = lines_of(csv.output);
  REQUIRE(lines.size() == 9);
  CHECK(lines[0] == "t,tv");
  CHECK(lines[1].rfind("0,0.8333", 0) == 0);
  CHECK(lines[8].rfind("7,0.0052", 0) == 0);

  CliResult js =
      run_cli("mix " + kPerm3 + " --chain curveball --epsilon 0.01");
  json doc = json::parse(js.output);
  CHECK(doc["tau"] == 7);
  CHECK(doc["N"] == 6);
  CHECK(doc["lambda_star"].get<double>() == doctest::Approx(0.5));
  CHECK(doc["tv_curve"].size() == 8);
}

TEST_CASE("verify passes on the permutation instance") {
  CliResult table = run_cli("verify " + kPerm3);
  CHECK(table.exit_code == 0);
  CHECK(table.output.find("overall: PASS") != std::string::npos);
  CHECK(table.output.find("PASS heat_bath_identity") != std::string::npos);
  CHECK(table.output.find("SKIP k_subset_sandwich") != std::string::npos);

  CliResult js = run_cli("verify " + kPerm3 + " --format json");
  CHECK(js.exit_code == 0);
  json doc = json::parse(js.output);
  CHECK(doc["pass"].get<bool>());
  CHECK(doc["checks"].size() >= 7);
  CHECK(doc["mixing"]["edge"]["periodic"].get<bool>());
}
