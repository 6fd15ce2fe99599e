#include "appl/context.hpp"

#include <algorithm>

namespace appl::logic {

bool holds(const Atom& a, std::span<const Rational> point) {
    Rational v = a.p.eval(point);
    switch (a.rel) {
    case Rel::Ge: return v >= 0;
    case Rel::Gt: return v > 0;
    case Rel::Eq: return v == 0;
    }
    return false;
}

bool satisfies(const LogicalContext& ctx, std::span<const Rational> point) {
    return std::all_of(ctx.begin(), ctx.end(), [&](const Atom& a) { return holds(a, point); });
}

bool satisfies(const LogicalContext& ctx, std::span<const double> point) {
    if (ctx.empty()) return true;
    std::vector<Rational> exact;
    exact.reserve(point.size());
    for (double v : point) exact.push_back(from_double(v));
    return satisfies(ctx, std::span<const Rational>(exact));
}

std::string to_string(const Atom& a, std::span<const std::string> names) {
    const char* rel = a.rel == Rel::Ge ? " >= 0" : a.rel == Rel::Gt ? " > 0" : " == 0";
    return a.p.to_string(names) + rel;
}

std::string to_string(const LogicalContext& ctx, std::span<const std::string> names) {
    if (ctx.empty()) return "true";
    std::string out;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (i > 0) out += ", ";
        out += to_string(ctx[i], names);
    }
    return out;
}

void conjoin(LogicalContext& ctx, const LogicalContext& extra) {
    for (const auto& a : extra)
        if (std::find(ctx.begin(), ctx.end(), a) == ctx.end()) ctx.push_back(a);
}

bool mentions(const Atom& a, int var) { return a.p.mentions(var); }

namespace {

void add_atoms(const Cond& c, bool truth, LogicalContext& out) {
    using polynomials::from_expr;
    switch (c.kind) {
    case Cond::Kind::True:
        if (!truth) conjoin(out, {Atom{polynomials::Poly(Rational(-1)), Rel::Ge}});
        break;
    case Cond::Kind::Not: add_atoms(*c.a, !truth, out); break;
    case Cond::Kind::And:
        if (truth) {
            add_atoms(*c.a, true, out);
            add_atoms(*c.b, true, out);
        } else if (c.a->kind == Cond::Kind::True) {
            add_atoms(*c.b, false, out);
        } else if (c.b->kind == Cond::Kind::True) {
            add_atoms(*c.a, false, out);
        }
        break;
    case Cond::Kind::Le:
        if (truth)
            conjoin(out, {Atom{from_expr(*c.e2) - from_expr(*c.e1), Rel::Ge}});
        else
            conjoin(out, {Atom{from_expr(*c.e1) - from_expr(*c.e2), Rel::Gt}});
        break;
    }
}

} // namespace

LogicalContext cond_atoms(const Cond& c, bool truth) {
    LogicalContext out;
    add_atoms(c, truth, out);
    return out;
}

} // namespace appl::logic
