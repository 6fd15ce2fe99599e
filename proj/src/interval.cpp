#include "appl/interval.hpp"

#include <algorithm>
#include <vector>

namespace appl {

namespace {

// Extended reals for endpoint products: value, or +/- infinity.
struct Ext {
    int inf = 0;  // -1, 0, +1
    Rational v;
};

Ext lo_ext(const Interval& a) { return a.lo ? Ext{0, *a.lo} : Ext{-1, 0}; }
Ext hi_ext(const Interval& a) { return a.hi ? Ext{0, *a.hi} : Ext{1, 0}; }

int sign(const Ext& e) { return e.inf != 0 ? e.inf : sgn(e.v); }

Ext mul(const Ext& a, const Ext& b) {
    if (a.inf == 0 && b.inf == 0) return {0, a.v * b.v};
    int s = sign(a) * sign(b);
    if (s == 0) return {0, 0};  // 0 * inf taken as 0 for interval endpoints
    return {s, 0};
}

bool less(const Ext& a, const Ext& b) {
    if (a.inf != b.inf) return a.inf < b.inf;
    if (a.inf != 0) return false;
    return a.v < b.v;
}

} // namespace

std::optional<Rational> Interval::magnitude() const {
    if (!lo || !hi) return std::nullopt;
    return std::max(Rational(abs(*lo)), Rational(abs(*hi)));
}

std::string Interval::to_string() const {
    return "[" + (lo ? appl::to_string(*lo) : std::string("-inf")) + ", " +
           (hi ? appl::to_string(*hi) : std::string("+inf")) + "]";
}

Interval operator+(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.lo) r.lo = *a.lo + *b.lo;
    if (a.hi && b.hi) r.hi = *a.hi + *b.hi;
    return r;
}

Interval operator-(const Interval& a) {
    Interval r;
    if (a.hi) r.lo = -*a.hi;
    if (a.lo) r.hi = -*a.lo;
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    Ext c[4] = {mul(lo_ext(a), lo_ext(b)), mul(lo_ext(a), hi_ext(b)), mul(hi_ext(a), lo_ext(b)),
                mul(hi_ext(a), hi_ext(b))};
    Ext mn = c[0];
    Ext mx = c[0];
    for (const auto& e : c) {
        if (less(e, mn)) mn = e;
        if (less(mx, e)) mx = e;
    }
    Interval r;
    if (mn.inf == 0) r.lo = mn.v;
    if (mx.inf == 0) r.hi = mx.v;
    return r;
}

Interval scale(const Interval& a, const Rational& c) { return a * Interval::point(c); }

Interval pow(const Interval& a, int e) {
    if (e == 0) return Interval::point(1);
    Interval r = a;
    for (int i = 1; i < e; ++i) r = r * a;
    if (e % 2 == 0) {
        // even powers are nonnegative; tighten the dependency-free product
        Interval sq;
        bool straddles = (!a.lo || *a.lo < 0) && (!a.hi || *a.hi > 0);
        if (straddles) {
            sq.lo = Rational(0);
            if (a.lo && a.hi) {
                Rational m = std::max(Rational(abs(*a.lo)), Rational(abs(*a.hi)));
                Rational p = 1;
                for (int i = 0; i < e; ++i) p *= m;
                sq.hi = p;
            }
            return sq;
        }
        if (!r.lo || *r.lo < 0) r.lo = Rational(0);
    }
    return r;
}

Interval join(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.lo) r.lo = std::min(*a.lo, *b.lo);
    if (a.hi && b.hi) r.hi = std::max(*a.hi, *b.hi);
    return r;
}

Interval meet(const Interval& a, const Interval& b) {
    Interval r;
    r.lo = !a.lo ? b.lo : !b.lo ? a.lo : std::optional<Rational>(std::max(*a.lo, *b.lo));
    r.hi = !a.hi ? b.hi : !b.hi ? a.hi : std::optional<Rational>(std::min(*a.hi, *b.hi));
    return r;
}

Interval widen(const Interval& prev, const Interval& next) {
    Interval r = next;
    if (prev.lo && next.lo && *next.lo < *prev.lo) r.lo.reset();
    if (!prev.lo) r.lo.reset();
    if (prev.hi && next.hi && *next.hi > *prev.hi) r.hi.reset();
    if (!prev.hi) r.hi.reset();
    return r;
}

Interval bound(const polynomials::Monomial& m, std::span<const Interval> box) {
    Interval r = Interval::point(1);
    for (const auto& [v, e] : m.powers()) {
        Interval x = v >= 0 && static_cast<std::size_t>(v) < box.size() ? box[static_cast<std::size_t>(v)]
                                                                        : Interval::top();
        r = r * pow(x, e);
    }
    return r;
}

Interval bound(const polynomials::Poly& p, std::span<const Interval> box) {
    Interval r = Interval::point(0);
    for (const auto& [m, c] : p.terms()) r = r + scale(bound(m, box), c);
    return r;
}

} // namespace appl
