#pragma once

// Sound but incomplete entailment for polynomial constraints:
// Γ ⊨ lhs >= rhs is Proved, Refuted with an exact witness, or Unknown.

#include "appl/context.hpp"
#include "appl/interval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace appl::logic {

enum class EntailKind { Proved, Refuted, Unknown };

struct EntailVerdict {
    EntailKind kind = EntailKind::Unknown;
    std::vector<Rational> witness;  // Refuted only: satisfies Γ, violates the goal
    std::string stage;              // which stage decided

    bool proved() const { return kind == EntailKind::Proved; }
};

struct EntailOptions {
    std::uint64_t seed = 0x5eed5eedULL;
    int samples = 3000;
    Rational box = 10;                 // falsification box half-width
    std::size_t fm_budget = 6000;      // constraint cap for elimination
    bool falsify = true;
};

const char* to_string(EntailKind k);

/// Γ ⊨ lhs >= rhs.
EntailVerdict entail(const LogicalContext& gamma, const polynomials::Poly& lhs, const polynomials::Poly& rhs,
                     const EntailOptions& opts = {});

/// Γ ⊨ goal for a single atom.
EntailVerdict entail_atom(const LogicalContext& gamma, const Atom& goal, const EntailOptions& opts = {});

/// Γ ⊨ every atom of `goal`; reports the first atom that is not Proved.
EntailVerdict entail_all(const LogicalContext& gamma, const LogicalContext& goal, const EntailOptions& opts = {},
                         std::size_t* failed_atom = nullptr);

/// Variable bounds implied by the linear atoms of Γ (with propagation).
std::vector<Interval> variable_bounds(const LogicalContext& gamma, std::size_t nvars);

/// Tightens `box` with the bounds the linear atoms of Γ imply.
std::vector<Interval> refine_bounds(const LogicalContext& gamma, std::vector<Interval> box);

} // namespace appl::logic
