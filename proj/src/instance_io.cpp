#include "curvemix/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace curvemix {

namespace {

std::vector<int> int_array(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array())
    fail(ErrorCode::IoError, "instance needs an array field '" + key + "'");
  std::vector<int> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer())
      fail(ErrorCode::IoError, "'" + key + "' must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

SpecPtr parse_instance_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::IoError, "instance must be an object");

  MarginSpec spec;
  spec.r = int_array(j, "rows");
  spec.c = int_array(j, "cols");
  spec.m = static_cast<int>(spec.r.size());
  spec.n = static_cast<int>(spec.c.size());

  if (j.contains("forbidden")) {
    if (!j.at("forbidden").is_array())
      fail(ErrorCode::IoError, "'forbidden' must be an array of [i, j] pairs");
    for (const auto& entry : j.at("forbidden")) {
      if (!entry.is_array() || entry.size() != 2 ||
          !entry[0].is_number_integer() || !entry[1].is_number_integer())
        fail(ErrorCode::IoError, "'forbidden' entries must be [i, j] pairs");
      spec.forbidden.emplace_back(entry[0].get<int>() - 1,
                                  entry[1].get<int>() - 1);
    }
  }
  if (j.contains("diagonal_forbidden")) {
    if (!j.at("diagonal_forbidden").is_boolean())
      fail(ErrorCode::IoError, "'diagonal_forbidden' must be a boolean");
    if (j.at("diagonal_forbidden").get<bool>()) {
      if (spec.m != spec.n)
        fail(ErrorCode::MarginMismatch,
             "diagonal_forbidden needs a square instance");
      for (int i = 0; i < spec.m; ++i) spec.forbidden.emplace_back(i, i);
    }
  }
  return validate_instance(std::move(spec));
}

SpecPtr load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance_json(buffer.str());
}

std::string instance_to_json(const MarginSpec& spec) {
  nlohmann::ordered_json j;
  j["rows"] = spec.r;
  j["cols"] = spec.c;
  j["forbidden"] = nlohmann::ordered_json::array();
  for (auto [i, k] : spec.forbidden)
    j["forbidden"].push_back({i + 1, k + 1});
  return j.dump();
}

}  // namespace curvemix
