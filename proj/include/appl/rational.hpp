#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace appl {

using Rational = mpq_class;

/// Parses "12", "-3", "0.25", "3/4", "-1/2" into an exact rational.
/// Returns nullopt on malformed input or a zero denominator.
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical text: "3", "-1/2". Never uses decimal notation.
std::string to_string(const Rational& q);

std::size_t hash_value(const Rational& q);

/// Exact conversion; every finite double is a dyadic rational.
Rational from_double(double v);

inline double to_double(const Rational& q) { return q.get_d(); }

} // namespace appl
