#pragma once

#include <string>

namespace facekit {

/// Formats a double with 17 significant digits so that parsing the text
/// recovers the exact value. Used for every number the CLI emits.
std::string format_g17(double value);

/// JSON string escaping (quotes included in the result).
std::string json_quote(const std::string& s);

}  // namespace facekit
