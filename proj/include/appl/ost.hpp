#pragma once

// Side conditions under which a checked derivation bounds E[A_T]: a static
// step bound, nonnegative costs and potentials, or bounded updates together
// with empirical evidence that E[T^d] is finite.

#include "appl/checker.hpp"
#include "appl/interval.hpp"
#include "appl/simulate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace appl::ost {

struct SiteChange {
    int site = -1;
    int var = -1;
    SourceLoc loc;
    Interval delta;  // x' − x over all visits
    Interval range;  // values x' can take
};

struct BoundedUpdateReport {
    bool bounded = true;
    Rational c0;             // max |Δ| over all sites when bounded
    int site = -1;           // first unbounded site
    SourceLoc loc;
    std::vector<SiteChange> changes;  // by site id
};

/// Per-variable start box: variables constrained by the precondition take
/// its implied bounds, the others their value in `init` (0 when absent).
std::vector<Interval> initial_box(const Program& p, std::span<const std::optional<Rational>> init);

BoundedUpdateReport bounded_update_check(const Program& p, std::span<const Interval> start);

struct CostSummary {
    bool nonnegative = true;
    Rational c1;  // max |c| over tick(c)
    std::size_t ticks = 0;
};

CostSummary classify_costs(const Program& p);

enum class Level { CertifiedBoundedTime, CertifiedNonnegative, ConditionallyCertified, Rejected };

const char* to_string(Level l);

struct OstOptions {
    simulate::TailOptions tail;
    double power_margin = 0.5;  // power-law exponent must reach ℓ + margin
    std::uint64_t step_bound_horizon_cap = 100000;
    logic::EntailOptions entail;
};

struct OstVerdict {
    Level level = Level::Rejected;
    int degree = 0;   // max total degree of the derivation's potentials
    int ell = 1;      // moment order required of T: max(degree, 1)
    CostSummary costs;
    BoundedUpdateReport updates;
    std::optional<simulate::TailReport> tail;
    std::optional<std::uint64_t> step_bound;  // static bound on T when one was established
    std::vector<std::string> evidence;        // one line per criterion tried
    std::string reason;                       // Rejected only
};

/// Runs the criteria strongest first. `stats` supplies the tail evidence for
/// the empirical criterion and may be absent; `init` is the exact start
/// valuation used to verify a declared step bound.
OstVerdict verify(const Program& p, const AnnotationSet& ann, const logic::CheckResult& r,
                  const simulate::TraceStats* stats, std::span<const Interval> start,
                  std::span<const Rational> init, const OstOptions& opts = {});

} // namespace appl::ost
