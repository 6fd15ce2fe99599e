#pragma once

// Small-step semantics: configurations <valuation, statement, continuation,
// cost> and the one-step transition kernel. The same template serves binary64
// simulation and exact-rational enumeration.

#include "appl/program.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace appl::runtime {

/// One continuation frame. Seq holds the statement to run next; Loop holds
/// the While statement whose guard is re-tested.
struct Frame {
    enum class Kind : std::uint8_t { Seq, Loop };
    Kind kind;
    const Stmt* stmt;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// The continuation, innermost frame last. Empty means Kstop.
using Continuation = std::vector<Frame>;

template <class Num>
struct BasicConfig {
    std::vector<Num> vals;
    const Stmt* stmt = nullptr;
    Continuation cont;
    Num cost = 0;

    bool terminal() const { return stmt->kind == Stmt::Kind::Skip && cont.empty(); }
};

using Config = BasicConfig<double>;
using ExactConfig = BasicConfig<Rational>;

template <class Num>
Num eval_expr(std::span<const Num> vals, const Expr& e);

template <class Num>
bool eval_cond(std::span<const Num> vals, const Cond& c);

template <class Num>
struct StepDistribution {
    /// Finite outcomes; empty when the step samples (see `dist`).
    std::vector<std::pair<Num, BasicConfig<Num>>> finite;

    /// Pushforward of `dist` through r |-> base[var := r].
    const Dist* dist = nullptr;
    int var = -1;
    BasicConfig<Num> base;

    bool is_finite() const { return dist == nullptr; }
    BasicConfig<Num> build(const Num& r) const;

    /// Finite view; a discrete pushforward expands to its outcomes.
    /// Throws std::domain_error for a continuous distribution.
    std::vector<std::pair<Num, BasicConfig<Num>>> expand() const;
};

template <class Num>
StepDistribution<Num> step(const Program& p, const BasicConfig<Num>& cfg);

/// Initial configuration for main with the given valuation (missing entries 0).
template <class Num>
BasicConfig<Num> initial_config(const Program& p, std::span<const Num> init = {});

/// Per-trace generator: 64-bit Mersenne twister seeded from a master seed
/// and a stream index through splitmix64.
class Rng {
  public:
    Rng(std::uint64_t master_seed, std::uint64_t stream);

    /// Uniform on [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::uint64_t bits() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x);

double sample(Rng& rng, const Dist& d);

/// Draws one successor of `cfg` in place. Equivalent in distribution to
/// `step`, without allocating a StepDistribution.
void sample_step(Rng& rng, const Program& p, Config& cfg);

/// Draws one successor from an already computed step distribution.
Config sample_from(Rng& rng, const StepDistribution<double>& dist);

} // namespace appl::runtime
