#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace ordstat {

// Arbitrary precision rationals. Every finite double converts exactly.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Parses "p/q", "p" or a decimal literal such as "0.25" exactly.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

}  // namespace ordstat
