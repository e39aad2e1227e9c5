#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace railq {

/// Exact rational used for QUBO coefficients, weights and energies.
using Rational = boost::rational<std::int64_t>;

/// Parses "1.75", "-3", "17/14" or "2.2e0"-free decimal text into an exact rational.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Decimal text when the value has a terminating expansion, "p/q" otherwise.
std::string format_rational(const Rational& value);

/// Fixed-point rendering for reports (rounded half away from zero).
std::string format_decimal(const Rational& value, int digits);

inline double to_double(const Rational& value) {
    return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

} // namespace railq
