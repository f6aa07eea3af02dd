#include "reviewcoin/amount.hpp"

#include <cstdio>
#include <cstdlib>

namespace reviewcoin {

namespace {

std::string format_impl(Amount a, bool trim) {
    const std::int64_t v = a.millicoins();
    const bool negative = v < 0;
    // Avoid overflow on INT64_MIN by working in unsigned.
    const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%03llu", negative ? "-" : "",
                  static_cast<unsigned long long>(mag / 1000),
                  static_cast<unsigned long long>(mag % 1000));
    std::string s(buf);
    if (trim) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

}  // namespace

std::string format_rc(Amount a) { return format_impl(a, true); }

std::string format_rc_fixed(Amount a) { return format_impl(a, false); }

}  // namespace reviewcoin
