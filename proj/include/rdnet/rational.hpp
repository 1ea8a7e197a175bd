#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rdnet {

using Rational = mpq_class;

/// Parses "7", "-3/4", "0.25", "1e-3" or "2.5E+2" into an exact rational.
/// Decimal literals are expanded digit by digit, so 0.1 is exactly 1/10.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Always "num/den" with a positive denominator.
std::string to_fraction_string(const Rational& q);

/// Integer-valued rationals print as "n", the rest as "num/den".
std::string to_compact_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace rdnet
