#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace amalgact {

/// Exact rational used for every ratio, threshold and verdict.
using Rational = boost::rational<std::int64_t>;

/// Parses "p/q" or "p". Decimal notation is rejected.
Rational parse_rational(std::string_view text);

/// Renders as "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& r);

}  // namespace amalgact
