#pragma once

#include <filesystem>
#include <string>

#include "polyshoot/system_spec.hpp"

namespace polyshoot {

// System config: a JSON document
//   { "n": 3,
//     "equations": [ { "order": 1,
//                      "monomials": [ { "coef": 1, "sigma": 0, "powers": [5] } ] } ] }
// Unknown keys are rejected. Parsing does not validate the mathematics; call
// validate() for that.

SystemSpec parse_spec(const std::string& text);
SystemSpec load_spec(const std::filesystem::path& path);
std::string dump_spec(const SystemSpec& spec);

}  // namespace polyshoot
