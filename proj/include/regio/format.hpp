#pragma once

#include <string>

namespace regio {

/// Shortest decimal form that round-trips, capped at 12 significant digits.
std::string format_number(double value);

}
