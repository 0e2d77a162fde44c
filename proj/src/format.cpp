#include "regio/format.hpp"

#include <charconv>
#include <cmath>

namespace regio {

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0"; // also folds -0
    }

    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    std::string shortest(buf, res.ptr);

    std::size_t digits = 0;
    bool leading       = true;
    for (char c : shortest) {
        if (c == 'e' || c == 'E') {
            break;
        }
        if (c >= '0' && c <= '9') {
            if (c != '0') {
                leading = false;
            }
            if (!leading) {
                ++digits;
            }
        }
    }
    if (digits <= 12) {
        return shortest;
    }

    res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

}
