#pragma once

#include <string>

#include "curvemix/core.hpp"

namespace curvemix {

// Instance files are JSON objects with 1-based indices:
//   {"rows": [...], "cols": [...], "forbidden": [[i, j], ...],
//    "diagonal_forbidden": true}
SpecPtr parse_instance_json(const std::string& text);
SpecPtr load_instance_file(const std::string& path);
std::string instance_to_json(const MarginSpec& spec);

}  // namespace curvemix
