#include "appl/entail.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace appl::logic {

using polynomials::Monomial;
using polynomials::Poly;

const char* to_string(EntailKind k) {
    switch (k) {
    case EntailKind::Proved: return "proved";
    case EntailKind::Refuted: return "refuted";
    case EntailKind::Unknown: return "unknown";
    }
    return "?";
}

namespace {

std::size_t var_count(const LogicalContext& gamma, const Poly& p) {
    int n = 0;
    auto scan = [&](const Poly& q) {
        for (int v : q.variables()) n = std::max(n, v + 1);
    };
    for (const auto& a : gamma) scan(a.p);
    scan(p);
    return static_cast<std::size_t>(n);
}

bool decide_constant(const Rational& c, Rel rel) {
    switch (rel) {
    case Rel::Ge: return c >= 0;
    case Rel::Gt: return c > 0;
    case Rel::Eq: return c == 0;
    }
    return false;
}

// ---- stage 1: syntactic ----

bool syntactic(const LogicalContext& gamma, const Atom& goal) {
    if (goal.p.is_constant()) return decide_constant(goal.p.constant_term(), goal.rel);
    for (const auto& a : gamma) {
        if (a.p == goal.p && (a.rel == goal.rel || (goal.rel == Rel::Ge && a.rel != Rel::Ge))) return true;
        if (goal.rel == Rel::Ge && a.rel == Rel::Eq && a.p == -goal.p) return true;
        if (goal.rel == Rel::Eq && a.rel == Rel::Eq && a.p == -goal.p) return true;
    }
    return false;
}

// ---- stage 2: intervals ----

bool interval_proves(const Interval& i, Rel rel) {
    switch (rel) {
    case Rel::Ge: return i.lo && *i.lo >= 0;
    case Rel::Gt: return i.lo && *i.lo > 0;
    case Rel::Eq: return i.lo && i.hi && *i.lo == 0 && *i.hi == 0;
    }
    return false;
}

// ---- stage 2b: Fourier-Motzkin over monomials as columns ----

struct LinCon {
    std::vector<Rational> a;
    Rational c;
    bool strict = false;
};

enum class FmResult { Infeasible, Feasible, Budget };

class FourierMotzkin {
  public:
    explicit FourierMotzkin(std::size_t budget) : budget_(budget) {}

    int column(const Monomial& m) {
        auto [it, inserted] = cols_.try_emplace(m, static_cast<int>(cols_.size()));
        return it->second;
    }

    // adds p > 0 (strict) or p >= 0
    void add(const Poly& p, bool strict) { pending_.push_back({p, strict}); }

    FmResult solve() {
        std::size_t n = cols_.size();
        std::map<std::vector<Rational>, std::pair<Rational, bool>> set;
        for (const auto& [p, strict] : pending_) {
            LinCon con;
            con.a.assign(n, Rational(0));
            for (const auto& [m, c] : p.terms()) {
                if (m.is_one())
                    con.c = c;
                else
                    con.a[static_cast<std::size_t>(cols_.at(m))] = c;
            }
            con.strict = strict;
            if (!insert(set, std::move(con))) return FmResult::Infeasible;
        }
        std::vector<bool> done(n, false);
        while (true) {
            int best = -1;
            long best_cost = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (done[j]) continue;
                long pos = 0, neg = 0;
                for (const auto& [a, rest] : set) {
                    int s = sgn(a[j]);
                    pos += s > 0;
                    neg += s < 0;
                }
                long cost = pos * neg - pos - neg;
                if (best < 0 || cost < best_cost) {
                    best = static_cast<int>(j);
                    best_cost = cost;
                }
            }
            if (best < 0) return FmResult::Feasible;
            auto j = static_cast<std::size_t>(best);
            done[j] = true;
            std::vector<LinCon> pos, neg;
            std::map<std::vector<Rational>, std::pair<Rational, bool>> next;
            for (auto& [a, rest] : set) {
                LinCon con{a, rest.first, rest.second};
                int s = sgn(a[j]);
                if (s > 0)
                    pos.push_back(std::move(con));
                else if (s < 0)
                    neg.push_back(std::move(con));
                else
                    next.emplace(a, rest);
            }
            for (const auto& p : pos) {
                for (const auto& q : neg) {
                    // (-q_j) * p + p_j * q eliminates column j
                    Rational fp = -q.a[j];
                    Rational fq = p.a[j];
                    LinCon r;
                    r.a.resize(n);
                    for (std::size_t k = 0; k < n; ++k) r.a[k] = fp * p.a[k] + fq * q.a[k];
                    r.a[j] = 0;
                    r.c = fp * p.c + fq * q.c;
                    r.strict = p.strict || q.strict;
                    if (!insert(next, std::move(r))) return FmResult::Infeasible;
                    if (next.size() > budget_) return FmResult::Budget;
                }
            }
            set = std::move(next);
        }
    }

  private:
    // Normalizes and stores a constraint; false iff it is a constant contradiction.
    static bool insert(std::map<std::vector<Rational>, std::pair<Rational, bool>>& set, LinCon con) {
        Rational lead = 0;
        for (const auto& x : con.a)
            if (x != 0) {
                lead = abs(x);
                break;
            }
        if (lead == 0) {
            if (con.c < 0 || (con.c == 0 && con.strict)) return false;
            return true;
        }
        for (auto& x : con.a) x /= lead;
        con.c /= lead;
        auto it = set.find(con.a);
        if (it == set.end()) {
            set.emplace(std::move(con.a), std::make_pair(con.c, con.strict));
        } else {
            auto& [c, strict] = it->second;
            if (con.c < c || (con.c == c && con.strict && !strict)) {
                c = con.c;
                strict = con.strict;
            }
        }
        return true;
    }

    std::size_t budget_;
    std::map<Monomial, int, polynomials::GradedLex> cols_;
    std::vector<std::pair<Poly, bool>> pending_;
};

// Γ ∪ {goal fails} infeasible over the linear relaxation?
FmResult fm_refutes_negation(const LogicalContext& gamma, const Poly& p, bool goal_strict,
                             std::span<const Interval> box, std::size_t budget) {
    FourierMotzkin fm(budget);
    std::set<Monomial, polynomials::GradedLex> monos;
    auto note = [&](const Poly& q) {
        for (const auto& [m, c] : q.terms())
            if (!m.is_one()) {
                fm.column(m);
                monos.insert(m);
            }
    };
    for (const auto& a : gamma) {
        note(a.p);
        switch (a.rel) {
        case Rel::Ge: fm.add(a.p, false); break;
        case Rel::Gt: fm.add(a.p, true); break;
        case Rel::Eq:
            fm.add(a.p, false);
            fm.add(-a.p, false);
            break;
        }
    }
    note(p);
    // negation of p >= 0 is -p > 0; of p > 0 is -p >= 0
    fm.add(-p, !goal_strict);
    for (const auto& m : monos) {
        if (m.degree() < 2) continue;
        Interval b = bound(m, box);
        Poly mp = Poly::term(m, Rational(1));
        if (b.lo) fm.add(mp - Poly(*b.lo), false);
        if (b.hi) fm.add(Poly(*b.hi) - mp, false);
    }
    return fm.solve();
}

// ---- stage 3: randomized falsification ----

class Falsifier {
  public:
    Falsifier(const LogicalContext& gamma, const Atom& goal, std::span<const Interval> box, std::size_t nvars,
              const EntailOptions& opts)
        : gamma_(gamma), goal_(goal), box_(box.begin(), box.end()), nvars_(nvars), opts_(opts),
          rng_(opts.seed) {
        box_.resize(nvars, Interval::top());
        std::vector<bool> solved(nvars, false);
        for (const auto& a : gamma) {
            if (a.rel != Rel::Eq) continue;
            for (const auto& [m, c] : a.p.terms()) {
                if (m.degree() != 1) continue;
                int v = m.powers().front().first;
                if (solved[static_cast<std::size_t>(v)] || a.p.degree_in(v) != 1) continue;
                // v must appear only in this linear term
                bool only_linear = true;
                for (const auto& [m2, c2] : a.p.terms())
                    if (!(m2 == m) && m2.exponent(v) > 0) only_linear = false;
                if (!only_linear) continue;
                solved[static_cast<std::size_t>(v)] = true;
                equalities_.push_back({v, c, a.p - Poly::term(m, c)});
                break;
            }
        }
        for (std::size_t v = 0; v < nvars; ++v)
            if (!solved[v]) free_.push_back(static_cast<int>(v));
    }

    std::optional<std::vector<Rational>> run() {
        std::vector<Rational> point(nvars_, Rational(0));
        for (int k = 0; k < opts_.samples; ++k) {
            for (int v : free_) point[static_cast<std::size_t>(v)] = k == 0 ? Rational(0) : draw(box_[static_cast<std::size_t>(v)]);
            // solve equalities v = -rest / c, repeated so chains settle
            for (std::size_t round = 0; round < equalities_.size(); ++round)
                for (const auto& e : equalities_)
                    point[static_cast<std::size_t>(e.var)] = -e.rest.eval(std::span<const Rational>(point)) / e.coef;
            if (!satisfies(gamma_, std::span<const Rational>(point))) continue;
            if (!holds(goal_, std::span<const Rational>(point))) return point;
        }
        return std::nullopt;
    }

  private:
    struct Solved {
        int var;
        Rational coef;
        Poly rest;
    };

    Rational draw(const Interval& b) {
        std::uniform_int_distribution<int> pick(0, 9);
        int mode = pick(rng_);
        static const int small[] = {0, 1, -1, 2, -2, 3, -3, 5, -5, 10};
        if (mode < 3) {
            for (int tries = 0; tries < 8; ++tries) {
                Rational v = small[std::uniform_int_distribution<int>(0, 9)(rng_)];
                if (mode == 2) v /= 2;
                if (b.contains(v)) return v;
            }
        }
        if (mode < 6 && (b.lo || b.hi)) {
            static const Rational offsets[] = {Rational(0), Rational(1, 1000), Rational(1, 2), Rational(1),
                                               Rational(2), Rational(7)};
            Rational off = offsets[std::uniform_int_distribution<int>(0, 5)(rng_)];
            bool from_lo = b.lo && (!b.hi || pick(rng_) < 5);
            Rational v = from_lo ? Rational(*b.lo + off) : Rational(*b.hi - off);
            if (b.contains(v)) return v;
        }
        Rational lo = b.lo ? *b.lo : Rational(-opts_.box);
        Rational hi = b.hi ? *b.hi : Rational(opts_.box);
        if (!b.lo && hi < lo) lo = hi - opts_.box;
        if (!b.hi && hi < lo) hi = lo + opts_.box;
        if (b.lo && b.hi && *b.lo > *b.hi) return *b.lo;
        static const int dens[] = {1, 2, 3, 4, 8, 1000};
        int den = dens[std::uniform_int_distribution<int>(0, 5)(rng_)];
        Rational u(static_cast<long>(std::uniform_int_distribution<long>(0, 1L << 30)(rng_)), 1L << 30);
        u.canonicalize();
        Rational v = lo + (hi - lo) * u;
        mpz_class scaled(Rational(v * den));  // truncates toward zero
        Rational q(scaled, den);
        q.canonicalize();
        return b.contains(q) ? q : v;
    }

    const LogicalContext& gamma_;
    const Atom& goal_;
    std::vector<Interval> box_;
    std::size_t nvars_;
    const EntailOptions& opts_;
    std::mt19937_64 rng_;
    std::vector<Solved> equalities_;
    std::vector<int> free_;
};

} // namespace

std::vector<Interval> variable_bounds(const LogicalContext& gamma, std::size_t nvars) {
    return refine_bounds(gamma, std::vector<Interval>(nvars, Interval::top()));
}

std::vector<Interval> refine_bounds(const LogicalContext& gamma, std::vector<Interval> box) {
    const std::size_t nvars = box.size();
    for (int round = 0; round < 6; ++round) {
        bool changed = false;
        for (const auto& a : gamma) {
            if (a.p.degree() != 1) continue;
            for (const auto& [m, coef] : a.p.terms()) {
                if (m.is_one()) continue;
                auto v = static_cast<std::size_t>(m.powers().front().first);
                if (v >= nvars) continue;
                Poly rest = a.p - Poly::term(m, coef);
                Interval r = bound(rest, box);
                Interval implied;
                // coef*v + r >= 0 for some r in R  =>  coef*v >= -R.hi
                if (r.hi) {
                    Rational t = -*r.hi / coef;
                    if (coef > 0)
                        implied.lo = t;
                    else
                        implied.hi = t;
                }
                if (a.rel == Rel::Eq && r.lo) {
                    Rational t = -*r.lo / coef;
                    if (coef > 0)
                        implied.hi = t;
                    else
                        implied.lo = t;
                }
                Interval next = meet(box[v], implied);
                if (!(next == box[v])) {
                    box[v] = next;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return box;
}

EntailVerdict entail_atom(const LogicalContext& gamma, const Atom& goal, const EntailOptions& opts) {
    if (syntactic(gamma, goal)) return {EntailKind::Proved, {}, "syntactic"};

    std::size_t nvars = var_count(gamma, goal.p);
    auto box = variable_bounds(gamma, nvars);
    if (interval_proves(bound(goal.p, box), goal.rel)) return {EntailKind::Proved, {}, "interval"};

    bool budget_hit = false;
    auto fm = [&](const Poly& p, bool strict) {
        FmResult r = fm_refutes_negation(gamma, p, strict, box, opts.fm_budget);
        budget_hit = budget_hit || r == FmResult::Budget;
        return r == FmResult::Infeasible;
    };
    bool linear_ok = goal.rel == Rel::Eq ? fm(goal.p, false) && fm(-goal.p, false) : fm(goal.p, goal.rel == Rel::Gt);
    if (linear_ok) return {EntailKind::Proved, {}, "linear"};

    if (opts.falsify) {
        Falsifier f(gamma, goal, box, nvars, opts);
        if (auto w = f.run()) return {EntailKind::Refuted, std::move(*w), "falsification"};
    }
    return {EntailKind::Unknown, {}, budget_hit ? "budget" : "exhausted"};
}

EntailVerdict entail(const LogicalContext& gamma, const Poly& lhs, const Poly& rhs, const EntailOptions& opts) {
    return entail_atom(gamma, Atom{lhs - rhs, Rel::Ge}, opts);
}

EntailVerdict entail_all(const LogicalContext& gamma, const LogicalContext& goal, const EntailOptions& opts,
                         std::size_t* failed_atom) {
    for (std::size_t i = 0; i < goal.size(); ++i) {
        EntailVerdict v = entail_atom(gamma, goal[i], opts);
        if (!v.proved()) {
            if (failed_atom) *failed_atom = i;
            return v;
        }
    }
    return {EntailKind::Proved, {}, "all"};
}

} // namespace appl::logic
