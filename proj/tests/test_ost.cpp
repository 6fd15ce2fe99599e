#include "appl/ost.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace appl;
using namespace appl::ost;

namespace {

std::vector<Interval> box(const Program& p, std::vector<std::optional<Rational>> init = {}) {
    init.resize(p.num_vars());
    return initial_box(p, init);
}

struct Certified {
    ParsedProgram pp;
    logic::CheckResult r;
    std::optional<simulate::TraceStats> stats;
};

OstVerdict certify(const std::string& src, std::vector<double> init, bool simulate_first, std::uint64_t horizon = 10000) {
    auto pp = parse(src);
    auto r = logic::check_program(pp.program, pp.annotations);
    EXPECT_TRUE(r.accepted()) << r.reason;
    std::vector<std::optional<Rational>> start(pp.program.num_vars());
    std::vector<Rational> exact(pp.program.num_vars());
    for (std::size_t i = 0; i < init.size(); ++i) {
        start[i] = from_double(init[i]);
        exact[i] = from_double(init[i]);
    }
    std::optional<simulate::TraceStats> stats;
    if (simulate_first) {
        simulate::SimOptions o;
        o.traces = 100000;
        o.horizon = horizon;
        o.init = init;
        stats = simulate::run_traces(pp.program, o);
    }
    return verify(pp.program, pp.annotations, r, stats ? &*stats : nullptr, initial_box(pp.program, start), exact);
}

std::string slurp(const std::string& name) {
    auto pp = test::load(name);
    return print(pp.program, pp.annotations);
}

} // namespace

TEST(BoundedUpdate, Rdwalk) {
    auto pp = test::load("rdwalk");
    auto rep = bounded_update_check(pp.program, box(pp.program, {std::nullopt, Rational(10)}));
    EXPECT_TRUE(rep.bounded);
    EXPECT_EQ(rep.c0, 3);
}

TEST(BoundedUpdate, Counterexample) {
    auto pp = test::load("counterexample");
    auto rep = bounded_update_check(pp.program, box(pp.program, {std::nullopt, Rational(3)}));
    EXPECT_TRUE(rep.bounded);
    EXPECT_EQ(rep.c0, 1);
}

TEST(BoundedUpdate, DoublingIsUnbounded) {
    auto pp = parse("vars x; pre x >= 1; func main() { x := 2 * x }");
    auto rep = bounded_update_check(pp.program, box(pp.program));
    EXPECT_FALSE(rep.bounded);
    EXPECT_EQ(rep.site, pp.program.body(pp.program.main).id);
    EXPECT_FALSE(rep.changes.at(static_cast<std::size_t>(rep.site)).delta.hi.has_value());
}

TEST(BoundedUpdate, DoublingFromBoundedStartIsBounded) {
    auto pp = test::load("countdown");
    auto rep = bounded_update_check(pp.program, box(pp.program));
    EXPECT_TRUE(rep.bounded);
    EXPECT_EQ(rep.c0, 2);
}

TEST(BoundedUpdate, GrowingLoopIsUnbounded) {
    auto pp = parse("vars x; func main() { x := 1; {# x >= 1; 0 #} while (x <= 1000000) { x := 2 * x } }");
    auto rep = bounded_update_check(pp.program, box(pp.program));
    EXPECT_TRUE(rep.bounded);
    auto wild = parse("vars x, y; func main() { x := 1; {# x >= 1; 0 #} while (y <= 0) { x := 2 * x } }");
    EXPECT_FALSE(bounded_update_check(wild.program, box(wild.program)).bounded);
}

TEST(Costs, Classification) {
    auto cx = classify_costs(test::load("counterexample").program);
    EXPECT_FALSE(cx.nonnegative);
    EXPECT_EQ(cx.c1, 1);
    EXPECT_EQ(cx.ticks, 2u);
    auto coin = classify_costs(test::load("coin").program);
    EXPECT_TRUE(coin.nonnegative);
    EXPECT_EQ(coin.c1, 3);
}

TEST(Verify, StraightLineIsBoundedTime) {
    auto v = certify("func main() { tick(5) }", {}, false);
    EXPECT_EQ(v.level, Level::CertifiedBoundedTime);
    EXPECT_STREQ(to_string(v.level), "certified-bounded-time");
}

TEST(Verify, DeclaredStepBound) {
    const char* body = R"(func main() {
  i := 0;
  {# i >= 0, i <= 4; i - 3 #}
  while (i < 3) { i := i + 1; tick(-1) }
})";
    auto ok = certify(std::string("vars i; {# steps <= 40 #} ") + body, {}, false);
    EXPECT_EQ(ok.level, Level::CertifiedBoundedTime);
    ASSERT_TRUE(ok.step_bound.has_value());
    EXPECT_EQ(*ok.step_bound, 40u);
    auto tight = certify(std::string("vars i; {# steps <= 20 #} ") + body, {}, false);
    EXPECT_EQ(tight.level, Level::CertifiedBoundedTime);
    auto wrong = certify(std::string("vars i; {# steps <= 19 #} ") + body, {}, false);
    EXPECT_NE(wrong.level, Level::CertifiedBoundedTime);
}

TEST(Verify, RdwalkNonnegative) {
    auto v = certify(slurp("rdwalk"), {0, 10}, true);
    EXPECT_EQ(v.level, Level::CertifiedNonnegative);
    EXPECT_EQ(v.degree, 1);
    EXPECT_EQ(v.ell, 1);
}

TEST(Verify, MixedCostsWithGeometricTail) {
    const char* src = R"(vars f;
func main() {
  f := 1;
  {# f >= 0, f <= 1; 3*f #}
  while (f >= 1) {
    tick(2);
    prob(1/2) { f := 0; tick(-1) } else { skip }
  }
})";
    auto v = certify(src, {}, true);
    EXPECT_EQ(v.level, Level::ConditionallyCertified);
    EXPECT_FALSE(v.costs.nonnegative);
    EXPECT_TRUE(v.updates.bounded);
    ASSERT_TRUE(v.tail.has_value());
    EXPECT_EQ(v.tail->hint, simulate::TailReport::Hint::Geometric);
}

TEST(Verify, CounterexampleFails) {
    auto v = certify(slurp("counterexample"), {0, 3}, true, 16384);
    EXPECT_EQ(v.level, Level::Rejected);
    EXPECT_TRUE(v.updates.bounded);
    EXPECT_EQ(v.updates.c0, 1);
    ASSERT_TRUE(v.tail.has_value());
    EXPECT_LT(v.tail->exponent, v.ell + 0.5);
    EXPECT_FALSE(v.reason.empty());
    auto without = certify(slurp("counterexample"), {0, 3}, false);
    EXPECT_EQ(without.level, Level::Rejected);
}
