#pragma once

#include <string>

namespace ruelle {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace ruelle
