#pragma once

// Logical contexts: conjunctions of polynomial constraints P >= 0, P > 0
// or P = 0 over program variables. The empty conjunction is `true`.

#include "appl/ast.hpp"
#include "appl/poly.hpp"

#include <span>
#include <string>
#include <vector>

namespace appl::logic {

enum class Rel { Ge, Gt, Eq };

struct Atom {
    polynomials::Poly p;
    Rel rel = Rel::Ge;

    friend bool operator==(const Atom&, const Atom&) = default;
};

using LogicalContext = std::vector<Atom>;

bool holds(const Atom& a, std::span<const Rational> point);
bool satisfies(const LogicalContext& ctx, std::span<const Rational> point);
bool satisfies(const LogicalContext& ctx, std::span<const double> point);

std::string to_string(const Atom& a, std::span<const std::string> names);
std::string to_string(const LogicalContext& ctx, std::span<const std::string> names);

/// Appends the atoms of `extra` not already present.
void conjoin(LogicalContext& ctx, const LogicalContext& extra);

bool mentions(const Atom& a, int var);

/// Atoms known to hold when `c` evaluates to `truth`. A negated conjunction
/// is a disjunction and contributes nothing.
LogicalContext cond_atoms(const Cond& c, bool truth);

} // namespace appl::logic
