#pragma once

#include "appl/checker.hpp"
#include "appl/program.hpp"

#include <string>

namespace appl::test {

inline std::string corpus(const std::string& name) { return std::string(APPL_CORPUS_DIR) + "/" + name + ".appl"; }

inline ParsedProgram load(const std::string& name) { return parse_file(corpus(name)); }

inline Rational q(const char* s) { return *parse_rational(s); }

inline Rational rat(long n, long d = 1) {
    Rational r{mpz_class(n), mpz_class(d)};
    r.canonicalize();
    return r;
}

/// The rdwalk body's backward chain 2(d−x)+4 ⇒ 2(d−x−t)+5 ⇒ 2(d−x)+5 ⇒ 1 ⇒ 0,
/// one log entry per rule in the context of the first rdwalk spec.
inline bool rdwalk_chain(const Program& p, const logic::CheckResult& r) {
    using polynomials::Poly;
    int ctx = r.derivation.context_of(p.func_index("rdwalk"), 0);
    if (ctx < 0) return false;
    Poly x = Poly::var(p.var_index("x")), d = Poly::var(p.var_index("d")), t = Poly::var(p.var_index("t"));
    struct Link {
        const char* rule;
        Poly pre, post;
    };
    const Link chain[] = {
        {"Q-Sample", Poly(2) * (d - x) + Poly(4), Poly(2) * (d - x - t) + Poly(5)},
        {"Q-Assign", Poly(2) * (d - x - t) + Poly(5), Poly(2) * (d - x) + Poly(5)},
        {"Q-Call", Poly(2) * (d - x) + Poly(5), Poly(1)},
        {"Q-Tick", Poly(1), Poly(0)},
    };
    for (const Link& l : chain) {
        bool found = false;
        for (const auto& e : r.log)
            found = found || (e.ctx == ctx && e.rule == l.rule && e.q_pre == l.pre && e.q_post == l.post);
        if (!found) return false;
    }
    return true;
}

struct KnownCost {
    const char* name;
    std::vector<Rational> init;
    Rational value;     // E[A_T], derived by hand
    bool bounded_time;  // then E[A_{min(T,H)}] equals it for every large H
};

/// The discrete corpus programs with their expected total costs.
inline const std::vector<KnownCost>& discrete_expectations() {
    static const std::vector<KnownCost> v{
        {"coin", {}, 2, true},
        {"dice", {}, rat(3, 2), true},
        {"countdown", {}, 2, true},
        {"retry", {}, rat(23, 8), true},
        {"two_coins", {}, rat(11, 4), true},
        {"down", {5}, rat(15, 2), true},
        {"nested", {4, 0}, 9, true},
        {"geometric", {}, 2, false},
        {"flip", {}, 1, false},
        {"drift", {0, 0, 3}, 6, false},
    };
    return v;
}

} // namespace appl::test
