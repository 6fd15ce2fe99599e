#include "appl/runtime.hpp"

#include "fuzz.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace appl;
using namespace appl::runtime;

namespace {

const Stmt* first_of(const Program& p, Stmt::Kind k) {
    for (const Stmt* s : p.sites)
        if (s->kind == k) return s;
    return nullptr;
}

Config at(const Program& p, const Stmt* s, std::vector<double> vals = {}) {
    Config c;
    c.vals.assign(p.num_vars(), 0.0);
    for (std::size_t i = 0; i < vals.size(); ++i) c.vals[i] = vals[i];
    c.stmt = s;
    return c;
}

Config dirac(const StepDistribution<double>& d) {
    EXPECT_TRUE(d.is_finite());
    EXPECT_EQ(d.finite.size(), 1u);
    EXPECT_EQ(d.finite[0].first, 1.0);
    return d.finite[0].second;
}

} // namespace

TEST(Eval, Expressions) {
    // x = var 0, t = var 1
    auto sum = Expr::make_add(Expr::make_var(0), Expr::make_const(3));
    auto prod = Expr::make_mul(Expr::make_var(0), Expr::make_var(1));
    std::vector<double> g{2, -1};
    EXPECT_EQ(eval_expr<double>(g, *sum), 5);
    EXPECT_EQ(eval_expr<double>(g, *prod), -2);
    std::vector<Rational> ge{2, -1};
    EXPECT_EQ(eval_expr<Rational>(ge, *prod), -2);
}

TEST(Eval, DefaultZeroValuation) {
    auto pp = parse("vars x; func main() { x := x + 1 }");
    Config c = initial_config<double>(pp.program);
    EXPECT_EQ(c.vals, std::vector<double>{0});
    Config n = dirac(step(pp.program, c));
    EXPECT_EQ(n.vals[0], 1);
}

TEST(Eval, Conditions) {
    // x < d is not (d <= x)
    auto lt = Cond::make_not(Cond::make_le(Expr::make_var(1), Expr::make_var(0)));
    std::vector<double> in{0, 3}, out{5, 3};
    EXPECT_TRUE(eval_cond<double>(in, *lt));
    EXPECT_FALSE(eval_cond<double>(out, *lt));
    EXPECT_TRUE(eval_cond<double>({}, *Cond::make_true()));
    auto both = Cond::make_and(Cond::make_true(), Cond::make_le(Expr::make_var(0), Expr::make_const(0)));
    EXPECT_TRUE(eval_cond<double>(in, *both));
    EXPECT_FALSE(eval_cond<double>(out, *both));
}

TEST(Step, Tick) {
    auto pp = parse("func main() { tick(1) }");
    Config c = initial_config<double>(pp.program);
    c.cont.push_back({Frame::Kind::Seq, synthetic_skip()});
    Config n = dirac(step(pp.program, c));
    EXPECT_EQ(n.cost, 1);
    EXPECT_TRUE(is_skip(n.stmt));
    EXPECT_EQ(n.cont, c.cont);
}

TEST(Step, Prob) {
    auto pp = parse("func main() { prob(1/4) { tick(1) } else { tick(2) } }");
    const Program& p = pp.program;
    auto d = step(p, initial_config<double>(p));
    ASSERT_EQ(d.finite.size(), 2u);
    EXPECT_EQ(d.finite[0].first, 0.25);
    EXPECT_EQ(d.finite[1].first, 0.75);
    EXPECT_EQ(d.finite[0].second.stmt, p.body(p.main).s1.get());
    EXPECT_EQ(d.finite[1].second.stmt, p.body(p.main).s2.get());
}

TEST(Step, SamplePushforward) {
    auto pp = parse("vars t; func main() { t ~ uniform(-1, 2) }");
    const Program& p = pp.program;
    Config c = initial_config<double>(p, std::vector<double>{7});
    c.cost = 4;
    auto d = step(p, c);
    EXPECT_FALSE(d.is_finite());
    EXPECT_EQ(d.var, 0);
    EXPECT_THROW(d.expand(), std::domain_error);
    for (double r : {-1.0, 0.5, 2.0}) {
        Config n = d.build(r);
        EXPECT_EQ(n.vals[0], r);
        EXPECT_EQ(n.cost, 4);
        EXPECT_TRUE(n.terminal());
    }
}

TEST(Step, DiscreteSampleExpands) {
    auto pp = parse("vars r; func main() { r ~ discrete(1: 1/3, 2: 2/3) }");
    auto d = step(pp.program, initial_config<Rational>(pp.program));
    auto e = d.expand();
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0].first, test::rat(1, 3));
    EXPECT_EQ(e[1].second.vals[0], 2);
}

TEST(Step, CallReplacesStatementWithoutFrame) {
    auto pp = parse("func f() { tick(1) } func main() { call f }");
    const Program& p = pp.program;
    Config c = initial_config<double>(p);
    Config n = dirac(step(p, c));
    EXPECT_EQ(n.stmt, &p.body(p.func_index("f")));
    EXPECT_TRUE(n.cont.empty());
}

TEST(Step, SeqAndLoopFrames) {
    auto pp = parse("vars x; func main() { {# true; 0 #} while (x < 2) { x := x + 1 }; tick(1) }");
    const Program& p = pp.program;
    const Stmt* loop = first_of(p, Stmt::Kind::While);
    const Stmt* tick = first_of(p, Stmt::Kind::Tick);

    Config c = initial_config<double>(p);
    Config n = dirac(step(p, c));  // Seq
    EXPECT_EQ(n.stmt, loop);
    ASSERT_EQ(n.cont.size(), 1u);
    EXPECT_EQ(n.cont[0], (Frame{Frame::Kind::Seq, tick}));

    n = dirac(step(p, n));  // While pushes a loop frame
    EXPECT_TRUE(is_skip(n.stmt));
    ASSERT_EQ(n.cont.size(), 2u);
    EXPECT_EQ(n.cont[1], (Frame{Frame::Kind::Loop, loop}));

    n = dirac(step(p, n));  // guard true: body, frame kept
    EXPECT_EQ(n.stmt, loop->s1.get());
    EXPECT_EQ(n.cont.size(), 2u);

    Config done = n;
    done.stmt = synthetic_skip();
    done.vals[0] = 2;
    n = dirac(step(p, done));  // guard false: pop
    EXPECT_TRUE(is_skip(n.stmt));
    EXPECT_EQ(n.cont.size(), 1u);

    n = dirac(step(p, n));  // skip before Seq frame: pop and run the tail
    EXPECT_EQ(n.stmt, tick);
    EXPECT_TRUE(n.cont.empty());
}

TEST(Step, IfBranches) {
    auto pp = parse("vars x; func main() { if (x <= 0) { tick(1) } else { tick(2) } }");
    const Program& p = pp.program;
    const Stmt& s = p.body(p.main);
    EXPECT_EQ(dirac(step(p, at(p, &s, {0}))).stmt, s.s1.get());
    EXPECT_EQ(dirac(step(p, at(p, &s, {1}))).stmt, s.s2.get());
}

TEST(Step, TerminationStutters) {
    auto pp = parse("func main() { skip }");
    Config c = initial_config<double>(pp.program);
    c.cost = 3;
    EXPECT_TRUE(c.terminal());
    Config n = dirac(step(pp.program, c));
    EXPECT_TRUE(test::same_config(n, c));
}

TEST(Sampling, ProbFrequency) {
    auto pp = parse("func main() { prob(1/2) { tick(1) } else { skip } }");
    const Program& p = pp.program;
    Rng rng(2024, 0);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        Config c = initial_config<double>(p);
        sample_step(rng, p, c);
        hits += c.stmt == p.body(p.main).s1.get();
    }
    EXPECT_NEAR(static_cast<double>(hits) / n, 0.5, 0.01);
}

TEST(Sampling, UniformMean) {
    Rng rng(99, 3);
    Dist u = Dist::uniform(-1, 2);
    double s = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double v = sample(rng, u);
        ASSERT_GE(v, -1);
        ASSERT_LT(v, 2);
        s += v;
    }
    EXPECT_NEAR(s / n, 0.5, 0.02);
}

TEST(Sampling, DiscreteFrequencies) {
    Rng rng(5, 1);
    Dist d = Dist::discrete({{-1, test::rat(1, 4)}, {1, test::rat(3, 4)}});
    int up = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) up += sample(rng, d) == 1.0;
    EXPECT_NEAR(static_cast<double>(up) / n, 0.75, 0.01);
}

TEST(Sampling, StreamsAreReproducible) {
    Rng a(7, 11), b(7, 11), c(7, 12);
    for (int i = 0; i < 100; ++i) {
        auto x = a.bits();
        EXPECT_EQ(x, b.bits());
        EXPECT_NE(x, c.bits());
    }
}

TEST(KernelLaws, FuzzedCorpusConfigurations) {
    std::vector<ParsedProgram> corpus;
    for (const auto& e : std::filesystem::directory_iterator(APPL_CORPUS_DIR)) corpus.push_back(parse_file(e.path()));
    std::vector<const Program*> ps;
    for (const auto& pp : corpus) ps.push_back(&pp.program);
    auto r = test::fuzz_kernel(ps, 5000, 17);
    EXPECT_EQ(r.configs, 5000u);
    EXPECT_GT(r.finite_probabilistic, 0u);
    EXPECT_GT(r.pushforward, 0u);
    EXPECT_EQ(r.weight_failures, 0u);
    EXPECT_EQ(r.dirac_failures, 0u);
    EXPECT_EQ(r.cost_failures, 0u);
    EXPECT_EQ(r.stutter_failures, 0u);
    EXPECT_LE(r.max_weight_error, 1e-12);
}
