#include "appl/simulate.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace appl;
using namespace appl::simulate;

namespace {

SimOptions opts(std::size_t traces, std::uint64_t horizon, std::vector<double> init = {}, std::uint64_t seed = 42) {
    SimOptions o;
    o.traces = traces;
    o.horizon = horizon;
    o.init = std::move(init);
    o.seed = seed;
    return o;
}

// Log of C(n, k) 2^{-n}.
double log_binom_half(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0);
}

// P[max_{j<=m} S_j < N] for the simple symmetric walk, by reflection:
// 1 − P[S_m >= N] − P[S_m > N].
double walk_survival(int m, int N) {
    double ge = 0, gt = 0;
    for (int up = 0; up <= m; ++up) {
        int s = 2 * up - m;
        double pr = std::exp(log_binom_half(m, up));
        if (s >= N) ge += pr;
        if (s > N) gt += pr;
    }
    return 1 - ge - gt;
}

void expect_same(const TraceStats& a, const TraceStats& b) {
    EXPECT_EQ(a.mean_cost, b.mean_cost);
    EXPECT_EQ(a.sd_cost, b.sd_cost);
    EXPECT_EQ(a.terminated, b.terminated);
    EXPECT_EQ(a.time_moments, b.time_moments);
    EXPECT_EQ(a.max_update, b.max_update);
    ASSERT_EQ(a.tail_curve.size(), b.tail_curve.size());
    for (std::size_t i = 0; i < a.tail_curve.size(); ++i) EXPECT_EQ(a.tail_curve[i].count, b.tail_curve[i].count);
}

} // namespace

TEST(Traces, DeterministicCost) {
    auto pp = parse("func main() { tick(1); tick(2) }");
    auto s = run_traces(pp.program, opts(1000, 100));
    EXPECT_EQ(s.mean_cost, 3);
    EXPECT_EQ(s.sd_cost, 0);
    EXPECT_EQ(s.terminated, 1000u);
    EXPECT_EQ(s.censored, 0u);
    EXPECT_TRUE(s.cost_monotone);
    // seq, tick, pop, tick: four steps
    EXPECT_EQ(s.time_moments.at(0), 4);
}

TEST(Traces, RdwalkAgreesWithDirectWalk) {
    auto pp = test::load("rdwalk");
    for (double d : {1.0, 5.0}) {
        auto s = run_traces(pp.program, opts(40000, 100000, {0, d}));
        EXPECT_EQ(s.censored, 0u);
        std::mt19937_64 g(1234);
        std::uniform_real_distribution<double> u(-1, 2);
        const int n = 40000;
        double sum = 0, sq = 0;
        for (int i = 0; i < n; ++i) {
            double x = 0, cost = 0;
            while (x < d) {
                x += u(g);
                cost += 1;
            }
            sum += cost;
            sq += cost * cost;
        }
        double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
        double se_sim = s.sd_cost / std::sqrt(static_cast<double>(s.n_traces));
        EXPECT_NEAR(s.mean_cost, mean, 4 * std::hypot(se, se_sim)) << "d=" << d;
        EXPECT_LE(s.mean_cost, 2 * d + 4 + 3 * s.ci95);
        EXPECT_GE(s.mean_cost, 2 * d - 2 - 3 * s.ci95);
        EXPECT_LE(s.max_update, 3.0);
    }
}

TEST(Traces, CounterexampleStoppedMeanIsZero) {
    auto pp = test::load("counterexample");
    auto s = run_traces(pp.program, opts(20000, 2000, {0, 3}));
    EXPECT_GT(s.censored, 0u);
    EXPECT_NEAR(s.mean_cost, 0, 4 * s.sd_cost / std::sqrt(20000.0));
    EXPECT_FALSE(s.cost_monotone);
}

TEST(Traces, TailMatchesReflectionPrinciple) {
    // Machine steps: 4 to enter the loop, 6 per walk step, 1 to leave.
    // T > n iff the walk has not reached N within floor((n − 5)/6) steps.
    auto pp = test::load("counterexample");
    const int N = 3;
    auto s = run_traces(pp.program, opts(50000, 4000, {0, N}, 7));
    std::size_t checked = 0;
    for (const TailPoint& tp : s.tail_curve) {
        if (tp.n < 5) {
            EXPECT_EQ(tp.p, 1.0);
            continue;
        }
        double exact = walk_survival(static_cast<int>((tp.n - 5) / 6), N);
        double se = std::sqrt(exact * (1 - exact) / 50000.0);
        EXPECT_NEAR(tp.p, exact, 4 * se + 1e-9) << "n=" << tp.n;
        ++checked;
    }
    EXPECT_GT(checked, 50u);
}

TEST(Traces, SerialAndParallelAgree) {
    auto pp = test::load("rdwalk");
    auto o = opts(3000, 10000, {0, 5}, 99);
    o.threads = 1;
    auto a = run_traces(pp.program, o);
    o.threads = 4;
    auto b = run_traces(pp.program, o);
    auto c = run_traces_serial(pp.program, o);
    expect_same(a, b);
    expect_same(a, c);
    o.seed = 100;
    EXPECT_NE(run_traces(pp.program, o).mean_cost, a.mean_cost);
}

TEST(Traces, CensoringAtHorizon) {
    auto pp = parse("func main() { {# true; 0 #} while (true) { tick(1) } }");
    auto s = run_traces(pp.program, opts(10, 50));
    EXPECT_EQ(s.censored, 10u);
    EXPECT_EQ(s.terminated, 0u);
    EXPECT_GT(s.mean_censored_cost, 0);
    EXPECT_EQ(s.tail_curve.back().n, 50u);
    EXPECT_EQ(s.tail_curve.back().p, 1.0);
}

TEST(Grids, TailAndCheckpoints) {
    auto g = tail_grid(1000);
    EXPECT_EQ(g.front(), 0u);
    EXPECT_EQ(g.back(), 1000u);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
    EXPECT_EQ(default_checkpoints(10), (std::vector<std::uint64_t>{0, 1, 2, 4, 8}));
}

TEST(Tail, Hints) {
    auto geo = test::load("geometric");
    auto s = run_traces(geo.program, opts(100000, 10000));
    auto t = estimate_tail(s);
    EXPECT_EQ(t.hint, TailReport::Hint::Geometric);
    EXPECT_GE(t.r2_geometric, 0.98);

    auto cx = test::load("counterexample");
    auto c = run_traces(cx.program, opts(100000, 16384, {0, 3}));
    auto tc = estimate_tail(c);
    EXPECT_EQ(tc.hint, TailReport::Hint::PowerLaw);
    EXPECT_NEAR(tc.exponent, 0.5, 0.15);

    auto quick = parse("func main() { tick(1) }");
    auto q = estimate_tail(run_traces(quick.program, opts(100, 100)));
    EXPECT_TRUE(q.reaches_zero);
    EXPECT_EQ(q.hint, TailReport::Hint::Geometric);

    auto forever = parse("func main() { {# true; 0 #} while (true) { tick(1) } }");
    EXPECT_THROW(estimate_tail(run_traces(forever.program, opts(100, 100))), std::invalid_argument);
    EXPECT_STREQ(to_string(TailReport::Hint::PowerLaw), "power-law");
}

TEST(Diagnose, RdwalkIsSupermartingale) {
    auto pp = test::load("rdwalk");
    auto r = logic::check_program(pp.program, pp.annotations);
    logic::AnnotatedKernel k(pp.program, pp.annotations, r);
    auto o = opts(20000, 10000, {0, 5});
    auto series = diagnose(k, default_checkpoints(1024), o);
    ASSERT_FALSE(series.points.empty());
    EXPECT_EQ(series.points[0].mean_y, 14);
    EXPECT_EQ(series.points[0].alive, 1);
    for (const auto& pt : series.points) EXPECT_LE(pt.mean_y, 14 + 3 * pt.ci_y + 1e-9) << "n=" << pt.n;
    EXPECT_LE(series.mean_final_cost, 14);
    EXPECT_LT(series.points.back().gap, 0.05);
}

TEST(Diagnose, RejectedDerivationNeedsOverride) {
    auto pp = parse("func main() { {# true; 0 #} tick(1) }");
    auto r = logic::check_program(pp.program, pp.annotations);
    ASSERT_FALSE(r.accepted());
    logic::AnnotatedKernel k(pp.program, pp.annotations, r);
    EXPECT_THROW(diagnose(k, {0, 1}, opts(10, 10)), std::invalid_argument);
    EXPECT_NO_THROW(diagnose(k, {0, 1}, opts(10, 10), true));
    OneStepOptions os;
    os.configs = 50;
    os.draws = 10;
    EXPECT_THROW(one_step_check(k, os), std::invalid_argument);
    auto rep = one_step_check(k, os, true);
    EXPECT_GT(rep.violations, 0u);
    ASSERT_FALSE(rep.sites.empty());
    EXPECT_EQ(rep.sites[0].site, pp.program.body(pp.program.main).id);
    EXPECT_EQ(rep.sites[0].potential, 0);
    EXPECT_EQ(rep.sites[0].estimate, 1);
}

TEST(OneStep, RdwalkHasNoViolations) {
    auto pp = test::load("rdwalk");
    auto r = logic::check_program(pp.program, pp.annotations);
    logic::AnnotatedKernel k(pp.program, pp.annotations, r);
    OneStepOptions os;
    os.configs = 300;
    os.draws = 300;
    os.init = {0, 10};
    auto rep = one_step_check(k, os);
    EXPECT_EQ(rep.configs, 300u);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_EQ(rep.context_violations, 0u);
}
