#pragma once

#include <string>

#include <json.hpp>

namespace cutkit {

using json = nlohmann::json;

// Canonical rendering used for snapshot and registry files: object keys in
// sorted order (nlohmann's default ordering), floating-point numbers always
// printed with exactly six decimals, integers printed plain. Output is
// byte-stable for a given document, which makes snapshots diffable fixtures.
std::string canonical_dump(const json& value, int indent = 2);

// Fixed 6-decimal rendering of a double; -0 collapses to 0.
std::string format_fixed6(double value);

} // namespace cutkit
