#include "appl/ost.hpp"

#include "appl/entail.hpp"
#include "appl/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace appl::ost {

namespace {

using polynomials::Poly;

struct Env {
    bool bottom = true;
    std::vector<Interval> v;

    friend bool operator==(const Env&, const Env&) = default;
};

Env join(const Env& a, const Env& b) {
    if (a.bottom) return b;
    if (b.bottom) return a;
    Env out{false, a.v};
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = appl::join(a.v[i], b.v[i]);
    return out;
}

Env widen(const Env& prev, const Env& next) {
    if (prev.bottom) return next;
    if (next.bottom) return prev;
    Env out{false, prev.v};
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = appl::widen(prev.v[i], next.v[i]);
    return out;
}

Env refine(Env e, const Cond& c, bool truth) {
    if (e.bottom) return e;
    e.v = logic::refine_bounds(logic::cond_atoms(c, truth), std::move(e.v));
    for (const auto& i : e.v)
        if (i.is_empty()) return Env{};
    return e;
}

struct SiteAcc {
    int var = -1;
    SourceLoc loc;
    Interval delta;
    Interval range;
};

class Analyzer {
  public:
    explicit Analyzer(const Program& p) : p_(p), entry_(p.funcs.size()), exit_(p.funcs.size()) {}

    void run(std::span<const Interval> start) {
        Env init{false, std::vector<Interval>(start.begin(), start.end())};
        init.v.resize(p_.vars.size(), Interval::point(0));
        for (int round = 0; round < 200; ++round) {
            widening_ = round >= 3;
            auto entry_before = entry_;
            auto exit_before = exit_;
            exec(p_.body(p_.main), init);
            for (std::size_t f = 0; f < p_.funcs.size(); ++f) {
                if (entry_[f].bottom) continue;
                Env out = exec(p_.body(static_cast<int>(f)), entry_[f]);
                exit_[f] = widening_ ? widen(exit_[f], join(exit_[f], out)) : join(exit_[f], out);
            }
            if (entry_ == entry_before && exit_ == exit_before) break;
        }
    }

    const std::map<int, SiteAcc>& sites() const { return sites_; }

  private:
    void record(const Stmt& s, const Interval& delta, const Interval& range) {
        auto [it, fresh] = sites_.try_emplace(s.id, SiteAcc{s.var, s.loc, delta, range});
        if (!fresh) {
            it->second.delta = appl::join(it->second.delta, delta);
            it->second.range = appl::join(it->second.range, range);
        }
    }

    Env exec(const Stmt& s, Env e) {
        if (e.bottom) return e;
        switch (s.kind) {
        case Stmt::Kind::Skip:
        case Stmt::Kind::Tick: return e;
        case Stmt::Kind::Assign: {
            auto x = static_cast<std::size_t>(s.var);
            Poly rhs = polynomials::from_expr(*s.expr);
            Interval nv = bound(rhs, e.v);
            record(s, bound(rhs - Poly::var(s.var), e.v), nv);
            e.v[x] = nv;
            return e;
        }
        case Stmt::Kind::Sample: {
            auto x = static_cast<std::size_t>(s.var);
            Interval nv = Interval::range(s.dist.support_min(), s.dist.support_max());
            record(s, nv + (-e.v[x]), nv);
            e.v[x] = nv;
            return e;
        }
        case Stmt::Kind::Call: {
            auto f = static_cast<std::size_t>(s.callee);
            Env merged = join(entry_[f], e);
            entry_[f] = widening_ ? widen(entry_[f], merged) : merged;
            return exit_[f];
        }
        case Stmt::Kind::While: {
            Env head = e;
            for (int it = 0; it < 200; ++it) {
                Env out = exec(*s.s1, refine(head, *s.cond, true));
                Env next = join(head, out);
                if (it >= 3) next = widen(head, next);
                if (next == head) break;
                head = std::move(next);
            }
            return refine(head, *s.cond, false);
        }
        case Stmt::Kind::If:
            return join(exec(*s.s1, refine(e, *s.cond, true)), exec(*s.s2, refine(e, *s.cond, false)));
        case Stmt::Kind::Prob: return join(exec(*s.s1, e), exec(*s.s2, e));
        case Stmt::Kind::Seq: return exec(*s.s2, exec(*s.s1, std::move(e)));
        }
        return e;
    }

    const Program& p_;
    std::vector<Env> entry_;
    std::vector<Env> exit_;
    std::map<int, SiteAcc> sites_;
    bool widening_ = false;
};

bool mentions_var(const logic::LogicalContext& g, int v) {
    return std::any_of(g.begin(), g.end(), [v](const logic::Atom& a) { return logic::mentions(a, v); });
}

void scan_ticks(const Stmt& s, CostSummary& c) {
    if (s.kind == Stmt::Kind::Tick) {
        ++c.ticks;
        if (s.number < 0) c.nonnegative = false;
        Rational m = abs(s.number);
        if (m > c.c1) c.c1 = m;
    }
    if (s.s1) scan_ticks(*s.s1, c);
    if (s.s2) scan_ticks(*s.s2, c);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// Criterion (b): every potential the derivation carries is nonnegative over
// its context, and every call frame is nonnegative.
bool potentials_nonnegative(const Program& p, const AnnotationSet& ann, const logic::CheckResult& r,
                            const logic::EntailOptions& eo, std::string& why) {
    auto names = display_names(p, ann);
    auto check = [&](const Annotation& a, const std::string& where) {
        if (a.q.is_zero()) return true;
        auto v = logic::entail(a.gamma, a.q, Poly{}, eo);
        if (v.proved()) return true;
        why = where + ": " + logic::to_string(a.gamma, names) + " |= " + a.q.to_string(names) + " >= 0 is " +
              logic::to_string(v.kind);
        return false;
    };
    for (std::size_t ci = 0; ci < r.derivation.contexts.size(); ++ci) {
        const auto& dc = r.derivation.contexts[ci];
        if (!check(dc.pre, "pre-annotation of context " + std::to_string(ci))) return false;
        for (std::size_t id = 0; id < dc.nodes.size(); ++id) {
            const auto& n = dc.nodes[id];
            if (!n.visited) continue;
            std::string where = "site " + std::to_string(id);
            if (!check(n.pre, where) || !check(n.post, where)) return false;
            const Stmt& s = p.site(static_cast<int>(id));
            if (s.kind == Stmt::Kind::While && !check(n.exit, where + " loop exit")) return false;
            if (s.kind == Stmt::Kind::Call && n.frame < 0) {
                why = where + ": negative call frame " + appl::to_string(n.frame);
                return false;
            }
        }
    }
    for (const auto& [site, inv] : ann.loop_invariants)
        if (!check(inv, "invariant at site " + std::to_string(site))) return false;
    return true;
}

} // namespace

std::vector<Interval> initial_box(const Program& p, std::span<const std::optional<Rational>> init) {
    auto pre = logic::variable_bounds(p.precondition, p.vars.size());
    std::vector<Interval> box(p.vars.size(), Interval::point(0));
    for (std::size_t v = 0; v < box.size(); ++v) {
        if (v < init.size() && init[v])
            box[v] = Interval::point(*init[v]);
        else if (mentions_var(p.precondition, static_cast<int>(v)))
            box[v] = pre[v];
    }
    return box;
}

BoundedUpdateReport bounded_update_check(const Program& p, std::span<const Interval> start) {
    Analyzer a(p);
    a.run(start);
    BoundedUpdateReport r;
    for (const auto& [site, acc] : a.sites()) {
        r.changes.push_back({site, acc.var, acc.loc, acc.delta, acc.range});
        auto m = acc.delta.magnitude();
        if (!m) {
            if (r.bounded) {
                r.bounded = false;
                r.site = site;
                r.loc = acc.loc;
            }
        } else if (*m > r.c0) {
            r.c0 = *m;
        }
    }
    if (!r.bounded) r.c0 = 0;
    return r;
}

CostSummary classify_costs(const Program& p) {
    CostSummary c;
    for (const auto& f : p.funcs) scan_ticks(*f.body, c);
    return c;
}

const char* to_string(Level l) {
    switch (l) {
    case Level::CertifiedBoundedTime: return "certified-bounded-time";
    case Level::CertifiedNonnegative: return "certified-nonnegative";
    case Level::ConditionallyCertified: return "conditionally-certified";
    case Level::Rejected: return "rejected";
    }
    return "?";
}

OstVerdict verify(const Program& p, const AnnotationSet& ann, const logic::CheckResult& r,
                  const simulate::TraceStats* stats, std::span<const Interval> start, std::span<const Rational> init,
                  const OstOptions& opts) {
    OstVerdict v;
    v.degree = logic::derivation_degree(r.derivation);
    v.ell = std::max(v.degree, 1);
    v.costs = classify_costs(p);
    v.updates = bounded_update_check(p, start);

    // (a) bounded stopping time
    if (!has_loops(p) && !has_recursion(p)) {
        v.level = Level::CertifiedBoundedTime;
        v.evidence.push_back("bounded-time: no loops and no recursion");
        return v;
    }
    if (ann.step_bound) {
        std::uint64_t n = *ann.step_bound;
        if (n > opts.step_bound_horizon_cap) {
            v.evidence.push_back("bounded-time: declared bound " + std::to_string(n) + " exceeds the verification cap");
        } else {
            try {
                auto ex = oracle::exact_run(p, n, init);
                if (ex.terminated == 1) {
                    v.level = Level::CertifiedBoundedTime;
                    v.step_bound = n;
                    v.evidence.push_back("bounded-time: every execution terminates within the declared " +
                                         std::to_string(n) + " steps (exhaustive)");
                    return v;
                }
                v.evidence.push_back("bounded-time: declared bound " + std::to_string(n) +
                                     " fails, P[T > n] = " + appl::to_string(ex.alive));
            } catch (const oracle::OracleError& e) {
                v.evidence.push_back(std::string("bounded-time: declared bound not verifiable: ") + e.what());
            }
        }
    } else {
        v.evidence.push_back("bounded-time: program has loops or recursion and no declared step bound");
    }

    // (b) nonnegative costs and potentials
    if (!v.costs.nonnegative) {
        v.evidence.push_back("nonnegative: tick costs have mixed signs");
    } else {
        std::string why;
        if (potentials_nonnegative(p, ann, r, opts.entail, why)) {
            v.level = Level::CertifiedNonnegative;
            v.evidence.push_back("nonnegative: all ticks >= 0 and every potential is >= 0 over its context");
            return v;
        }
        v.evidence.push_back("nonnegative: " + why);
    }

    // (c) bounded updates plus tail evidence for E[T^ell] < inf
    if (!v.updates.bounded) {
        v.reason = "unbounded update at site " + std::to_string(v.updates.site) + " (line " +
                   std::to_string(v.updates.loc.line) + ")";
        v.evidence.push_back("tail: " + v.reason);
        return v;
    }
    if (!stats) {
        v.reason = "no simulation evidence for E[T^" + std::to_string(v.ell) + "] < inf";
        v.evidence.push_back("tail: " + v.reason);
        return v;
    }
    try {
        v.tail = simulate::estimate_tail(*stats, opts.tail);
    } catch (const std::invalid_argument& e) {
        v.reason = std::string("tail evidence unavailable: ") + e.what();
        v.evidence.push_back("tail: " + v.reason);
        return v;
    }
    const auto& t = *v.tail;
    std::string c0 = "bounded updates (C0 = " + appl::to_string(v.updates.c0) + ")";
    if (t.hint == simulate::TailReport::Hint::Geometric) {
        v.level = Level::ConditionallyCertified;
        v.evidence.push_back("tail: " + c0 + ", geometric decay (r2 = " + fmt(t.r2_geometric) + ")");
        return v;
    }
    double need = v.ell + opts.power_margin;
    if (t.hint == simulate::TailReport::Hint::PowerLaw && t.exponent >= need) {
        v.level = Level::ConditionallyCertified;
        v.evidence.push_back("tail: " + c0 + ", power-law exponent " + fmt(t.exponent) + " >= " + fmt(need));
        return v;
    }
    v.reason = std::string(v.costs.nonnegative ? "" : "mixed-sign costs; ") + "tail " +
               simulate::to_string(t.hint) + " with exponent " + fmt(t.exponent) + " < " + fmt(need) +
               " gives no evidence that E[T^" + std::to_string(v.ell) + "] is finite";
    v.evidence.push_back("tail: " + v.reason);
    return v;
}

} // namespace appl::ost
