// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "appl/checker.hpp"
#include "appl/cli.hpp"
#include "appl/oracle.hpp"
#include "appl/simulate.hpp"

#include "fuzz.hpp"
#include "support.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

using namespace appl;
using test::rat;

namespace {

// Pinned tolerances and sizes.
constexpr double kCiMultiplier = 3.0;            // criterion 1: mean within 3 CI half-widths
constexpr double kRdwalkSeconds = 60.0;
constexpr std::size_t kRdwalkTraces = 100000;
constexpr std::uint64_t kRdwalkHorizon = 10000;
constexpr double kTailTarget = 0.5;               // criterion 2: exponent 0.5 ± 0.15
constexpr double kTailTolerance = 0.15;
constexpr std::size_t kTailTraces = 1000000;
constexpr std::uint64_t kTailHorizon = 16384;
constexpr std::size_t kCertifyTraces = 100000;
constexpr double kCounterexampleSeconds = 180.0;
constexpr double kSeMultiplier = 4.0;             // criteria 3, 7, 8
constexpr int kMomentTrials = 20;
constexpr int kMomentDraws = 200000;
constexpr std::size_t kFuzzConfigs = 10000;       // criterion 5
constexpr double kWeightTolerance = 1e-12;
constexpr int kRelaxShifts = 50;                  // criterion 6
constexpr int kReachableDepth = 50;               // criterion 7
constexpr std::size_t kOneStepConfigs = 1000;
constexpr std::size_t kOneStepDraws = 1000;
constexpr std::size_t kConsistencyTraces = 100000;  // criterion 8
constexpr std::uint64_t kConsistencyHorizon = 1000;
constexpr int kConsistencyRequired = 9;
constexpr std::uint64_t kSeed = 42;

struct Line {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct CliRun {
    int code;
    std::string out;
};

CliRun cli_run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str()};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::vector<ParsedProgram> corpus() {
    std::vector<ParsedProgram> out;
    std::vector<std::filesystem::path> paths;
    for (const auto& e : std::filesystem::directory_iterator(APPL_CORPUS_DIR)) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) out.push_back(parse_file(p.string()));
    return out;
}

void rdwalk_reproduction(Line& l) {
    auto t0 = std::chrono::steady_clock::now();
    auto pp = test::load("rdwalk");
    auto r = logic::check_program(pp.program, pp.annotations);
    l.require(r.accepted(), "checker accepts rdwalk");
    l.require(test::rdwalk_chain(pp.program, r), "derivation log chain");
    for (int d : {1, 5, 10}) {
        auto run = cli_run({"certify", test::corpus("rdwalk"), "--set", "d=" + std::to_string(d), "--traces",
                            std::to_string(kRdwalkTraces), "--horizon", std::to_string(kRdwalkHorizon), "--seed",
                            std::to_string(kSeed)});
        auto j = nlohmann::json::parse(run.out);
        std::string bound = j["bound"]["exact"];
        double mean = j["simulation"]["mean_cost"], ci = j["simulation"]["ci95"];
        l.detail << " d=" << d << ": " << std::string(j["status"]) << " bound " << bound << " mean " << fmt(mean)
                 << " ci " << fmt(ci) << ";";
        l.require(run.code == cli::Ok && j["status"] == "SOUND-BOUND", "SOUND-BOUND for d=" + std::to_string(d));
        l.require(bound == std::to_string(2 * d + 4), "bound 2d+4 for d=" + std::to_string(d));
        l.require(mean <= 2 * d + 4 + kCiMultiplier * ci, "mean <= 2d+4+3ci");
        l.require(mean >= 2 * d - 2 - kCiMultiplier * ci, "mean >= 2d-2-3ci");
    }
    double s = seconds_since(t0);
    l.detail << " " << fmt(s) << "s";
    l.require(s < kRdwalkSeconds, "runtime");
}

void counterexample_detection(Line& l) {
    auto t0 = std::chrono::steady_clock::now();
    auto pp = test::load("counterexample");
    const Program& p = pp.program;
    for (int n : {3, 5}) {
        std::string tag = "N=" + std::to_string(n);
        std::vector<Rational> init{0, n};
        auto r = logic::check_program(p, pp.annotations);
        l.require(r.accepted(), tag + " accepted");
        l.require(logic::bound_at(r, init) == n - 1, tag + " local bound N-1");
        for (std::uint64_t h : {100u, 1000u}) {
            auto e = oracle::exact_run(p, h, init);
            l.require(e.expected_cost == 0, tag + " exact E[A] = 0 at H=" + std::to_string(h));
        }
        auto cert = cli_run({"certify", test::corpus("counterexample"), "--set", "N=" + std::to_string(n), "--traces",
                             std::to_string(kCertifyTraces), "--horizon", std::to_string(kTailHorizon), "--seed",
                             std::to_string(kSeed)});
        auto j = nlohmann::json::parse(cert.out);
        l.require(cert.code == cli::OstFailed && j["status"] == "OST-FAILED", tag + " OST-FAILED");

        simulate::SimOptions o;
        o.traces = kTailTraces;
        o.horizon = kTailHorizon;
        o.seed = kSeed;
        o.init = {0, static_cast<double>(n)};
        auto stats = simulate::run_traces(p, o);
        auto tail = simulate::estimate_tail(stats);
        l.detail << " " << tag << ": " << std::string(j["status"]) << ", tail " << simulate::to_string(tail.hint)
                 << " exponent " << fmt(tail.exponent) << " (r2 " << fmt(tail.r2_power) << ");";
        l.require(tail.hint == simulate::TailReport::Hint::PowerLaw, tag + " power-law hint");
        l.require(std::abs(tail.exponent - kTailTarget) <= kTailTolerance, tag + " exponent 0.5 +- 0.15");
    }
    double s = seconds_since(t0);
    l.detail << " " << fmt(s) << "s";
    l.require(s < kCounterexampleSeconds, "runtime");
}

void moment_exactness(Line& l) {
    auto m = polynomials::moments(Dist::uniform(-1, 2), 3).moments;
    l.require(m == std::vector<Rational>{1, rat(1, 2), 1, rat(5, 4)}, "moments(uniform(-1,2), 3)");
    std::mt19937_64 g(kSeed);
    std::uniform_int_distribution<int> end(-5, 5), order(0, 6);
    int ok = 0;
    for (int trial = 0; trial < kMomentTrials; ++trial) {
        int a = end(g), b = end(g);
        while (b == a) b = end(g);
        if (a > b) std::swap(a, b);
        int k = order(g);
        mpz_class num, den = (k + 1) * (b - a);
        mpz_class ak, bk;
        mpz_pow_ui(ak.get_mpz_t(), mpz_class(a).get_mpz_t(), static_cast<unsigned>(k + 1));
        mpz_pow_ui(bk.get_mpz_t(), mpz_class(b).get_mpz_t(), static_cast<unsigned>(k + 1));
        Rational closed(bk - ak, den);
        closed.canonicalize();
        Rational got = polynomials::moments(Dist::uniform(a, b), k).moments[static_cast<std::size_t>(k)];
        std::uniform_real_distribution<double> u(a, b);
        double s = 0, s2 = 0;
        for (int i = 0; i < kMomentDraws; ++i) {
            double v = std::pow(u(g), k);
            s += v;
            s2 += v * v;
        }
        double mean = s / kMomentDraws, se = std::sqrt(std::max(0.0, s2 / kMomentDraws - mean * mean) / kMomentDraws);
        bool pass = got == closed && std::abs(mean - closed.get_d()) <= kSeMultiplier * se + 1e-12;
        ok += pass;
        if (!pass) l.detail << " (a,b,k)=(" << a << "," << b << "," << k << ")";
    }
    l.detail << " " << ok << "/" << kMomentTrials << " closed-form checks";
    l.require(ok == kMomentTrials, "closed form vs Monte Carlo");
}

void worked_expectation(Line& l) {
    using polynomials::Poly;
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly e = polynomials::expectation(x * y * y + x * x * x * y, 0, polynomials::moments(Dist::uniform(-1, 2), 3));
    std::vector<std::string> names{"x", "y"};
    l.detail << " E[xy^2 + x^3y] = " << e.to_string(names);
    l.require(e == Poly(rat(1, 2)) * y * y + Poly(rat(5, 4)) * y, "(1/2)y^2 + (5/4)y");
}

void kernel_property(Line& l) {
    auto programs = corpus();
    std::vector<const Program*> ps;
    for (const auto& pp : programs) ps.push_back(&pp.program);
    auto f = test::fuzz_kernel(ps, kFuzzConfigs, kSeed);
    l.detail << " " << f.configs << " configurations, " << f.finite_probabilistic << " prob, " << f.pushforward
             << " sample; max weight error " << fmt(f.max_weight_error);
    l.require(f.configs == kFuzzConfigs, "configuration count");
    l.require(f.weight_failures == 0 && f.max_weight_error <= kWeightTolerance, "weights sum to 1");
    l.require(f.dirac_failures == 0, "non-probabilistic rules are Dirac");
    l.require(f.cost_failures == 0 && f.stutter_failures == 0, "cost and stutter laws");
}

void relaxation(Line& l) {
    std::mt19937_64 g(kSeed);
    std::uniform_int_distribution<int> num(-1000, 1000), den(1, 97);
    std::size_t total = 0, passed = 0, triples = 0;
    for (const auto& pp : corpus()) {
        const Program& p = pp.program;
        auto r = logic::check_program(p, pp.annotations);
        if (!r.accepted()) continue;
        for (const auto& t : logic::program_triples(p, pp.annotations, r)) {
            if (!logic::check_triple(p, pp.annotations, t).accepted()) continue;
            ++triples;
            for (int k = 0; k < kRelaxShifts; ++k) {
                Rational c = rat(num(g), den(g));
                ++total;
                passed += logic::check_triple(p, logic::relax(pp.annotations, *t.stmt, c), logic::relax(t, c)).accepted();
            }
        }
    }
    l.detail << " " << passed << "/" << total << " shifted triples accepted over " << triples << " triples";
    l.require(triples > 0 && passed == total, "every shift accepted");
}

void one_step_inequality(Line& l) {
    std::size_t configs = 0, violations = 0;
    for (const auto& ex : test::discrete_expectations()) {
        auto pp = test::load(ex.name);
        auto r = logic::check_program(pp.program, pp.annotations);
        l.require(r.accepted(), std::string(ex.name) + " accepted");
        logic::AnnotatedKernel k(pp.program, pp.annotations, r);
        auto c = oracle::check_reachable(k, ex.init, kReachableDepth);
        configs += c.configs;
        violations += c.violations + c.context_violations;
        l.require(!c.truncated, std::string(ex.name) + " not truncated");
    }
    l.detail << " exact: " << violations << " violations at " << configs << " configurations;";
    l.require(violations == 0, "exact inequality");

    auto pp = test::load("rdwalk");
    auto r = logic::check_program(pp.program, pp.annotations);
    logic::AnnotatedKernel k(pp.program, pp.annotations, r);
    simulate::OneStepOptions o;
    o.configs = kOneStepConfigs;
    o.draws = kOneStepDraws;
    o.seed = kSeed;
    o.init = {0, 10};
    auto rep = simulate::one_step_check(k, o);
    l.detail << " rdwalk Monte Carlo: " << rep.violations << " violations at " << rep.configs << " configurations";
    l.require(rep.configs == kOneStepConfigs && rep.violations == 0 && rep.context_violations == 0,
              "rdwalk one-step check");
}

void oracle_simulator(Line& l) {
    int ok = 0, n = 0;
    bool deterministic = true;
    for (const auto& ex : test::discrete_expectations()) {
        auto pp = test::load(ex.name);
        auto exact = oracle::exact_run(pp.program, kConsistencyHorizon, ex.init);
        simulate::SimOptions o;
        o.traces = kConsistencyTraces;
        o.horizon = kConsistencyHorizon;
        o.seed = kSeed;
        for (const auto& v : ex.init) o.init.push_back(v.get_d());
        auto s = simulate::run_traces(pp.program, o);
        deterministic = deterministic && simulate::run_traces(pp.program, o).mean_cost == s.mean_cost;
        double se = s.sd_cost / std::sqrt(static_cast<double>(s.n_traces));
        double diff = std::abs(s.mean_cost - exact.expected_cost.get_d());
        bool pass = se > 0 ? diff <= kSeMultiplier * se : diff == 0;
        ++n;
        ok += pass;
        if (!pass) l.detail << " " << ex.name << " off by " << fmt(diff / se) << " se;";
    }
    l.detail << " " << ok << "/" << n << " programs within 4 standard errors";
    l.require(n == 10, "ten discrete programs");
    l.require(ok >= kConsistencyRequired, "at least 9 of 10");
    l.require(deterministic, "fixed seed reproduces");
}

void determinism(Line& l) {
    std::vector<std::vector<std::string>> cmds{
        {"parse", test::corpus("nested")},
        {"check", test::corpus("rdwalk")},
        {"simulate", test::corpus("rdwalk"), "--set", "d=5", "--traces", "20000"},
        {"oracle", test::corpus("drift"), "--set", "N=3", "--horizon", "200"},
        {"diagnose", test::corpus("rdwalk"), "--set", "d=5", "--traces", "5000", "--configs", "100", "--draws", "100"},
        {"certify", test::corpus("counterexample"), "--set", "N=3", "--traces", "20000", "--horizon", "4096"},
        {"certify", test::corpus("retry"), "--traces", "20000"},
    };
    int same = 0;
    for (const auto& cmd : cmds) {
        std::vector<std::string> outs;
        for (const char* threads : {"1", "4", "1", "2"}) {
            auto args = cmd;
            args.insert(args.end(), {"--threads", threads, "--seed", "7"});
            if (cmd[0] == "parse" || cmd[0] == "check" || cmd[0] == "oracle") args.resize(cmd.size());
            outs.push_back(cli_run(args).out);
        }
        bool eq = !outs[0].empty();
        for (const auto& o : outs) eq = eq && o == outs[0];
        same += eq;
        if (!eq) l.detail << " " << cmd[0] << " differs;";
    }
    l.detail << " " << same << "/" << cmds.size() << " commands byte-identical across runs and thread counts";
    l.require(same == static_cast<int>(cmds.size()), "byte-identical reports");
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void(Line&)> run;
    };
    const Criterion criteria[] = {
        {1, "rdwalk reproduction", rdwalk_reproduction},
        {2, "counterexample detection", counterexample_detection},
        {3, "moment exactness", moment_exactness},
        {4, "worked expectation", worked_expectation},
        {5, "kernel property", kernel_property},
        {6, "relaxation", relaxation},
        {7, "per-step potential inequality", one_step_inequality},
        {8, "oracle-simulator equivalence", oracle_simulator},
        {9, "determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Line l;
        try {
            c.run(l);
        } catch (const std::exception& e) {
            l.require(false, std::string("exception: ") + e.what());
        }
        failed += !l.pass;
        std::printf("criterion %d (%s): %s:%s\n", c.id, c.name, l.pass ? "PASS" : "FAIL", l.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
