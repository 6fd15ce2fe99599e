#pragma once

// Closed intervals with exact rational endpoints; a missing endpoint is
// unbounded. Used for entailment bounds and the bounded-update analysis.

#include "appl/poly.hpp"
#include "appl/rational.hpp"

#include <optional>
#include <span>
#include <string>

namespace appl {

struct Interval {
    std::optional<Rational> lo;
    std::optional<Rational> hi;

    static Interval top() { return {}; }
    static Interval point(const Rational& v) { return {v, v}; }
    static Interval range(const Rational& a, const Rational& b) { return {a, b}; }

    bool is_top() const { return !lo && !hi; }
    bool bounded() const { return lo && hi; }
    bool is_empty() const { return lo && hi && *lo > *hi; }
    bool contains(const Rational& v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }

    /// max(|lo|, |hi|); nullopt when unbounded.
    std::optional<Rational> magnitude() const;

    friend bool operator==(const Interval&, const Interval&) = default;
    std::string to_string() const;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval scale(const Interval& a, const Rational& c);
Interval pow(const Interval& a, int e);
Interval join(const Interval& a, const Interval& b);
/// Intersection; the result may be empty.
Interval meet(const Interval& a, const Interval& b);
/// Standard widening: endpoints that moved are dropped.
Interval widen(const Interval& prev, const Interval& next);

/// Range of a polynomial over a box, bounding each monomial separately.
Interval bound(const polynomials::Poly& p, std::span<const Interval> box);
Interval bound(const polynomials::Monomial& m, std::span<const Interval> box);

} // namespace appl
