#pragma once

// Monte Carlo traces of the step kernel: cost and stopping-time statistics,
// tail curves, and supermartingale diagnostics along annotated traces.
//
// Every trace draws from its own generator stream (master seed, trace index)
// and per-trace results are reduced in index order, so results do not depend
// on the thread count.

#include "appl/kernel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace appl::simulate {

struct SimOptions {
    std::size_t traces = 10000;
    std::uint64_t horizon = 10000;
    std::uint64_t seed = 42;
    int threads = 0;              // 0: OpenMP default
    std::vector<double> init;     // initial valuation, missing entries 0
    int moments = 2;              // Ê[min(T,H)^k] for k = 1..moments
};

struct TailPoint {
    std::uint64_t n;
    double p;              // P̂[T > n]
    std::size_t count;     // traces with T > n
};

struct TraceStats {
    std::size_t n_traces = 0;
    std::uint64_t seed = 0;
    std::uint64_t horizon = 0;
    double mean_cost = 0;  // of A_{min(T,H)}
    double sd_cost = 0;
    double ci95 = 0;       // half-width 1.96 s / sqrt(n)
    std::size_t terminated = 0;
    std::size_t censored = 0;
    double termination_fraction = 0;
    double censored_fraction = 0;
    double mean_censored_cost = 0;  // over censored traces only
    std::vector<double> time_moments;  // index k-1 holds Ê[min(T,H)^k]
    std::vector<TailPoint> tail_curve;
    double max_update = 0;  // largest |x' − x| over all assignment and sampling steps
    bool cost_monotone = true;  // A_n never decreased on any trace
};

TraceStats run_traces(const Program& p, const SimOptions& opts);

/// Single-threaded reference with identical results.
TraceStats run_traces_serial(const Program& p, const SimOptions& opts);

/// Geometric grid 0, 1, 2, 3, 4, 6, 8, ... up to h (inclusive), at most ~16 points per octave.
std::vector<std::uint64_t> tail_grid(std::uint64_t h);

/// Powers of two up to h, starting at 0.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t h);

struct DiagnosticPoint {
    std::uint64_t n = 0;
    double mean_y = 0;
    double ci_y = 0;
    double mean_a = 0;
    double mean_phi = 0;
    double alive = 0;  // P̂[T > n]
    double gap = 0;    // P̂[T>n] · Ê[|A_{T∧H} − A_n − Φ_n| | T > n]
};

struct DiagnosticSeries {
    std::size_t n_traces = 0;
    std::uint64_t horizon = 0;
    double mean_final_cost = 0;  // Ê[A_{T∧H}]
    std::vector<DiagnosticPoint> points;
};

/// Throws std::invalid_argument if the kernel's derivation was rejected,
/// unless `unchecked`.
DiagnosticSeries diagnose(const logic::AnnotatedKernel& k, const std::vector<std::uint64_t>& checkpoints,
                          const SimOptions& opts, bool unchecked = false);

struct OneStepOptions {
    std::size_t configs = 1000;
    std::size_t draws = 1000;
    std::uint64_t seed = 42;
    std::vector<double> init;
    std::uint64_t max_depth = 64;  // configurations are taken within this many steps of the start
    int threads = 0;
};

struct OneStepViolation {
    int ctx = -1;
    int site = -1;
    SourceLoc loc;
    double potential = 0;
    double estimate = 0;
    double stderr_ = 0;
};

struct OneStepReport {
    std::size_t configs = 0;
    std::size_t violations = 0;
    std::size_t context_violations = 0;
    double min_potential = 0;
    std::vector<OneStepViolation> sites;  // first violation per site, by site id
};

OneStepReport one_step_check(const logic::AnnotatedKernel& k, const OneStepOptions& opts, bool unchecked = false);

struct TailReport {
    enum class Hint { Geometric, PowerLaw, Inconclusive };
    Hint hint = Hint::Inconclusive;
    double exponent = 0;  // −slope of log P̂ against log n
    double r2_power = 0;
    double rate = 0;      // −slope of log P̂ against n
    double r2_geometric = 0;
    std::size_t points = 0;
    std::uint64_t n_lo = 0, n_hi = 0;
    bool reaches_zero = false;
};

const char* to_string(TailReport::Hint h);

struct TailOptions {
    double max_p = 0.5;         // window starts once P̂ drops to this level
    std::size_t min_count = 20;  // and ends while at least this many traces survive
    std::size_t min_points = 5;
    double geometric_r2 = 0.98;
};

/// Throws std::invalid_argument when the window has fewer than `min_points`
/// points and the curve never reaches 0.
TailReport estimate_tail(const TraceStats& s, const TailOptions& opts = {});

} // namespace appl::simulate
