#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace hmcdist {

/// Exact rational number. GMP keeps every result in canonical form
/// (gcd-reduced, positive denominator).
using Rat = mpq_class;
using RatVector = std::vector<Rat>;
using RatMatrix = std::vector<RatVector>;

/// Parses "p/q", an integer, or a decimal literal such as "0.25" or "-1.5e-3".
/// Decimals are converted exactly. Throws ValidationError on malformed input.
Rat parse_rational(std::string_view text);

std::string to_string(const Rat& value);
double to_double(const Rat& value);

/// Natural logarithm of a positive rational, accurate even when the value
/// lies far outside the range of double.
double log_rat(const Rat& value);

/// Exact conversion of a finite double.
Rat rat_from_double(double value);

}  // namespace hmcdist
