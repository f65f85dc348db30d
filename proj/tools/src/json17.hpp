#pragma once

// Deterministic JSON serialization: insertion-ordered keys and every
// floating-point number rendered with 17 significant digits, so equal
// doubles always produce equal bytes and round-trip exactly. Non-finite
// numbers are rejected (the output contract has no NaN/Inf).

#include <string>

#include "json.hpp"

namespace watecli {

// Render a double with printf %.17g semantics. Throws wate::Error on
// non-finite input.
std::string format17(double v);

// Serialize with 2-space indentation and a trailing newline.
std::string dump_json17(const nlohmann::ordered_json& value);

}  // namespace watecli
