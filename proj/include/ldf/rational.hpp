#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace ldf {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-2/7", "0.125" or "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact rational of the shortest decimal that round-trips to `value`,
/// so 0.1 maps to 1/10 rather than its binary expansion.
Rational rational_from_double(double value);

std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace ldf
