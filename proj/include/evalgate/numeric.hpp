#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace evalgate {

// Rounding is half away from zero and happens only at presentation
// boundaries (percentages, money, stored scores). Internals stay unrounded.
inline double round_half_away(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

// Money is carried as dollars but rounded through integer cents so that
// halves (e.g. 115.775) land away from zero instead of drifting on binary
// representation error.
inline std::int64_t to_cents(double dollars) { return std::llround(dollars * 100.0); }

inline double from_cents(std::int64_t cents) { return static_cast<double>(cents) / 100.0; }

// Fixed-decimal rendering for tables and documents.
inline std::string fmt_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

inline std::string fmt_count(std::uint64_t value) { return std::to_string(value); }

}  // namespace evalgate
