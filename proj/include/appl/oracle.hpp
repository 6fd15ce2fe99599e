#pragma once

// Exact finite-horizon evaluation for programs with finite-support sampling:
// the initial Dirac pushed through the step kernel with rational masses,
// equal configurations merged.

#include "appl/kernel.hpp"

#include <cstdint>
#include <stdexcept>

namespace appl::oracle {

class OracleError : public std::runtime_error {
  public:
    enum class Kind { Continuous, Budget };
    OracleError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

struct OracleOptions {
    std::size_t node_budget = 1'000'000;
};

struct ExactResult {
    std::uint64_t horizon = 0;
    Rational expected_cost;   // E[A_{min(T,H)}]
    Rational terminated;      // P[T <= H]
    Rational expected_time;   // E[T * 1{T <= H}]
    Rational alive;           // mass still running after H steps
    std::size_t peak_nodes = 0;
};

/// Throws OracleError for uniform sampling or when a frontier exceeds the budget.
ExactResult exact_run(const Program& p, std::uint64_t horizon, std::span<const Rational> init = {},
                      const OracleOptions& opts = {});

/// E[(α' − α) + Φ'] over the finite step distribution of `c`.
Rational exact_one_step_expectation(const logic::AnnotatedKernel& k, const logic::AnnotatedConfig<Rational>& c);

struct StepViolation {
    int ctx = -1;
    int site = -1;
    SourceLoc loc;
    Rational potential;
    Rational expectation;
};

struct ReachableCheck {
    std::size_t configs = 0;
    std::size_t violations = 0;          // expectation > potential
    std::size_t context_violations = 0;  // Γ of the carried annotation fails
    bool truncated = false;              // budget reached before the depth
    std::vector<StepViolation> first;    // up to 16 examples
};

/// Checks the one-step inequality exactly at every annotated configuration
/// reachable within `depth` steps.
ReachableCheck check_reachable(const logic::AnnotatedKernel& k, std::span<const Rational> init, int depth = 50,
                               const OracleOptions& opts = {});

} // namespace appl::oracle
