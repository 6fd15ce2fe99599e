#include "appl/checker.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace appl::logic {

using polynomials::Poly;

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Rejected: return "rejected";
    case Verdict::Unknown: return "unknown";
    }
    return "?";
}

int Derivation::context_of(int func, int spec) const {
    for (std::size_t i = 0; i < contexts.size(); ++i)
        if (contexts[i].func == func && contexts[i].spec == spec) return static_cast<int>(i);
    return -1;
}

namespace {

LogicalContext with_cond(LogicalContext g, const Cond& c, bool truth) {
    conjoin(g, cond_atoms(c, truth));
    return g;
}

LogicalContext assign_post(const LogicalContext& g, int x, const Poly& e) {
    LogicalContext out;
    Poly lin;
    for (const auto& [m, c] : e.terms())
        if (m.exponent(x) == 1) lin += Poly::term(m.without(x), c);
    if (e.degree_in(x) == 1 && lin.is_constant() && !lin.is_zero()) {
        Rational a = lin.constant_term();
        Poly rest = e - Poly::var(x) * Poly(a);
        Poly inverse = (Poly::var(x) - rest) * (Rational(1) / a);
        for (const auto& atom : g) out.push_back({polynomials::substitute(atom.p, x, inverse), atom.rel});
        return out;
    }
    for (const auto& atom : g)
        if (!mentions(atom, x)) out.push_back(atom);
    if (!e.mentions(x)) conjoin(out, {Atom{Poly::var(x) - e, Rel::Eq}});
    return out;
}

LogicalContext sample_post(const LogicalContext& g, int x, const Dist& d) {
    LogicalContext out;
    for (const auto& atom : g)
        if (!mentions(atom, x)) out.push_back(atom);
    conjoin(out, {Atom{Poly::var(x) - Poly(d.support_min()), Rel::Ge},
                  Atom{Poly(d.support_max()) - Poly::var(x), Rel::Ge}});
    return out;
}

void collect_sites(const Stmt& s, std::vector<int>& out) {
    out.push_back(s.id);
    if (s.s1) collect_sites(*s.s1, out);
    if (s.s2) collect_sites(*s.s2, out);
}

int owning_function(const Program& p, const Stmt& s) {
    for (std::size_t f = 0; f < p.funcs.size(); ++f) {
        std::vector<int> ids;
        collect_sites(*p.funcs[f].body, ids);
        if (std::find(ids.begin(), ids.end(), s.id) != ids.end()) return static_cast<int>(f);
    }
    return -1;
}

const char* rule_name(Stmt::Kind k) {
    switch (k) {
    case Stmt::Kind::Skip: return "Q-Skip";
    case Stmt::Kind::Tick: return "Q-Tick";
    case Stmt::Kind::Assign: return "Q-Assign";
    case Stmt::Kind::Sample: return "Q-Sample";
    case Stmt::Kind::Call: return "Q-Call";
    case Stmt::Kind::While: return "Q-Loop";
    case Stmt::Kind::Prob: return "Q-Prob";
    case Stmt::Kind::If: return "Q-Cond";
    case Stmt::Kind::Seq: return "Q-Seq";
    }
    return "?";
}

class Checker {
  public:
    Checker(const Program& p, const AnnotationSet& ann, const CheckOptions& opts, CheckResult& out)
        : p_(p), ann_(ann), opts_(opts), out_(out), names_(display_names(p, ann)) {
        join_opts_ = opts.entail;
        join_opts_.falsify = false;
    }

    // Derives contexts[ctx] for `body`; `declared_pre` selects whether the
    // context's pre-potential is checked against the synthesized one.
    void derive(int ctx, const Stmt& body, bool declared_pre) {
        std::vector<Issue> issues;
        std::vector<LogEntry> log;
        for (int round = 0; round < 4; ++round) {
            issues_ = &issues;
            log_ = &log;
            issues.clear();
            log.clear();
            ctx_ = ctx;
            auto& dc = out_.derivation.contexts[static_cast<std::size_t>(ctx)];
            dc.nodes.assign(p_.sites.size(), NodeAnn{});
            // choices from the previous round guide the forward pass
            for (std::size_t i = 0; i < choices_.size() && i < dc.nodes.size(); ++i) dc.nodes[i].spec_index = choices_[i];

            LogicalContext end = forward(body, dc.pre.gamma);
            require_ctx(end, dc.post.gamma, &body, "post-condition of the body");
            changed_ = false;
            Poly q = backward(body, dc.post.q);
            if (declared_pre) {
                require(dc.pre.gamma, dc.pre.q, q, &body, "declared pre-potential covers the body", "Q-Weaken");
            } else {
                dc.pre.q = q;
            }
            choices_.assign(dc.nodes.size(), -1);
            for (std::size_t i = 0; i < dc.nodes.size(); ++i) choices_[i] = dc.nodes[i].spec_index;
            if (!changed_) break;
        }
        choices_.clear();
        for (auto& i : issues) out_.issues.push_back(std::move(i));
        for (auto& l : log) out_.log.push_back(std::move(l));
    }

  private:
    DerivationContext& dc() { return out_.derivation.contexts[static_cast<std::size_t>(ctx_)]; }
    NodeAnn& node(const Stmt& s) { return dc().nodes[static_cast<std::size_t>(s.id)]; }

    std::string show(const Poly& q) const { return q.to_string(names_); }
    std::string show(const LogicalContext& g) const { return to_string(g, names_); }

    std::string witness_text(const EntailVerdict& v) const {
        if (v.kind != EntailKind::Refuted) return "";
        std::ostringstream os;
        os << " (witness";
        for (std::size_t i = 0; i < v.witness.size(); ++i)
            os << (i ? ", " : " ") << (i < names_.size() ? names_[i] : "v" + std::to_string(i)) << " = "
               << appl::to_string(v.witness[i]);
        os << ")";
        return os.str();
    }

    void add_issue(const Stmt* s, const std::string& reason, const EntailVerdict& v) {
        Issue i;
        i.kind = v.kind == EntailKind::Unknown ? Verdict::Unknown : Verdict::Rejected;
        i.ctx = ctx_;
        i.site = s ? s->id : -1;
        i.loc = s ? s->loc : SourceLoc{};
        i.reason = reason;
        const DerivationContext& c = dc();
        if (c.spec >= 0)
            i.reason = "spec " + std::to_string(c.spec) + " of " + p_.funcs[static_cast<std::size_t>(c.func)].name +
                       ": " + reason;
        i.entail = v;
        issues_->push_back(std::move(i));
    }

    void fail(const Stmt* s, const std::string& reason) {
        EntailVerdict v;
        v.kind = EntailKind::Refuted;
        add_issue(s, reason, v);
    }

    bool require(const LogicalContext& g, const Poly& lhs, const Poly& rhs, const Stmt* s, const std::string& what,
                 const char* rule) {
        EntailVerdict v = entail(g, lhs, rhs, opts_.entail);
        LogEntry e{rule, ctx_, s ? s->id : -1, s ? s->loc : SourceLoc{}, g, lhs, rhs,
                   what + std::string(": ") + logic::to_string(v.kind)};
        log_->push_back(std::move(e));
        if (v.proved()) return true;
        add_issue(s,
                  what + ": " + show(g) + " |= " + show(lhs) + " >= " + show(rhs) + " is " +
                      logic::to_string(v.kind) + witness_text(v),
                  v);
        return false;
    }

    bool require_ctx(const LogicalContext& g, const LogicalContext& goal, const Stmt* s, const std::string& what) {
        std::size_t bad = 0;
        EntailVerdict v = entail_all(g, goal, opts_.entail, &bad);
        if (v.proved()) return true;
        add_issue(s,
                  what + ": " + show(g) + " |= " + logic::to_string(goal[bad], names_) + " is " +
                      logic::to_string(v.kind) + witness_text(v),
                  v);
        return false;
    }

    LogicalContext join(const LogicalContext& a, const LogicalContext& b) {
        LogicalContext out;
        for (const auto& atom : a)
            if (entail_atom(b, atom, join_opts_).proved()) conjoin(out, {atom});
        for (const auto& atom : b)
            if (entail_atom(a, atom, join_opts_).proved()) conjoin(out, {atom});
        return out;
    }

    const Annotation* mark(const Stmt& s) const {
        if (s.kind == Stmt::Kind::While) return nullptr;
        auto it = ann_.weaken_sites.find(s.id);
        return it == ann_.weaken_sites.end() ? nullptr : &it->second;
    }

    const Annotation* invariant(const Stmt& s) const {
        auto it = ann_.loop_invariants.find(s.id);
        return it == ann_.loop_invariants.end() ? nullptr : &it->second;
    }

    const std::vector<FunctionSpec>& specs_of(int f) const {
        static const std::vector<FunctionSpec> none;
        if (f < 0 || static_cast<std::size_t>(f) >= ann_.specs.size()) return none;
        return ann_.specs[static_cast<std::size_t>(f)];
    }

    // ---- forward: logical contexts ----

    LogicalContext forward(const Stmt& s, LogicalContext g) {
        NodeAnn& n = node(s);
        n.visited = true;
        if (const Annotation* m = mark(s)) {
            require_ctx(g, m->gamma, &s, "mark context");
            conjoin(g, m->gamma);
        }
        n.pre.gamma = g;
        n.pre.loc = s.loc;
        LogicalContext out;
        switch (s.kind) {
        case Stmt::Kind::Skip:
        case Stmt::Kind::Tick: out = g; break;
        case Stmt::Kind::Assign: out = assign_post(g, s.var, polynomials::from_expr(*s.expr)); break;
        case Stmt::Kind::Sample: out = sample_post(g, s.var, s.dist); break;
        case Stmt::Kind::Call: {
            const auto& specs = specs_of(s.callee);
            if (specs.empty()) {
                fail(&s, "no specification for function '" + p_.funcs[static_cast<std::size_t>(s.callee)].name + "'");
                break;
            }
            int j = n.spec_index;
            if (j < 0) {
                j = 0;
                for (std::size_t k = 0; k < specs.size(); ++k)
                    if (entail_all(g, specs[k].pre.gamma, join_opts_).proved()) {
                        j = static_cast<int>(k);
                        break;
                    }
                n.spec_index = j;
            }
            const auto& spec = specs[static_cast<std::size_t>(j)];
            require_ctx(g, spec.pre.gamma, &s, "call pre-context");
            out = spec.post.gamma;
            break;
        }
        case Stmt::Kind::While: {
            const Annotation* inv = invariant(s);
            if (!inv) {
                fail(&s, "missing loop invariant");
                out = with_cond({}, *s.cond, false);
                forward(*s.s1, with_cond({}, *s.cond, true));
                break;
            }
            require_ctx(g, inv->gamma, &s, "loop entry");
            LogicalContext body_end = forward(*s.s1, with_cond(inv->gamma, *s.cond, true));
            require_ctx(body_end, inv->gamma, &s, "loop invariant preserved by the body");
            out = with_cond(inv->gamma, *s.cond, false);
            n.exit.gamma = out;
            break;
        }
        case Stmt::Kind::If: {
            LogicalContext a = forward(*s.s1, with_cond(g, *s.cond, true));
            LogicalContext b = forward(*s.s2, with_cond(g, *s.cond, false));
            out = join(a, b);
            break;
        }
        case Stmt::Kind::Prob: {
            LogicalContext a = forward(*s.s1, g);
            LogicalContext b = forward(*s.s2, g);
            out = join(a, b);
            break;
        }
        case Stmt::Kind::Seq: out = forward(*s.s2, forward(*s.s1, g)); break;
        }
        n.post.gamma = out;
        return out;
    }

    // ---- backward: potentials ----

    Poly backward(const Stmt& s, const Poly& q_post) {
        NodeAnn& n = node(s);
        const LogicalContext& g = n.pre.gamma;
        n.post.q = q_post;
        Poly q;
        std::string note;
        switch (s.kind) {
        case Stmt::Kind::Skip: q = q_post; break;
        case Stmt::Kind::Tick: q = polynomials::add_const(q_post, s.number); break;
        case Stmt::Kind::Assign: q = polynomials::substitute(q_post, s.var, *s.expr); break;
        case Stmt::Kind::Sample: {
            auto table = polynomials::moments(s.dist, q_post.degree_in(s.var));
            q = polynomials::expectation(q_post, s.var, table);
            break;
        }
        case Stmt::Kind::Call: q = call_pre(s, q_post, note); break;
        case Stmt::Kind::While: {
            const Annotation* inv = invariant(s);
            if (!inv) {
                backward(*s.s1, Poly{});
                q = q_post;
                break;
            }
            Poly body = backward(*s.s1, inv->q);
            LogicalContext enter = with_cond(inv->gamma, *s.cond, true);
            LogicalContext leave = with_cond(inv->gamma, *s.cond, false);
            require(enter, inv->q, body, &s, "loop invariant covers the body", "Q-Weaken");
            require(leave, inv->q, q_post, &s, "loop invariant covers the exit", "Q-Weaken");
            n.exit.q = q_post;
            n.exit.loc = s.loc;
            q = inv->q;
            break;
        }
        case Stmt::Kind::If: q = cond_pre(s, q_post); break;
        case Stmt::Kind::Prob: {
            Poly a = backward(*s.s1, q_post);
            Poly b = backward(*s.s2, q_post);
            q = polynomials::affine(s.number, a, b);
            break;
        }
        case Stmt::Kind::Seq: q = backward(*s.s1, backward(*s.s2, q_post)); break;
        }
        n.synth_pre = Annotation{g, q, s.loc};
        n.pre.q = q;
        if (const Annotation* m = mark(s); m && s.kind != Stmt::Kind::If) {
            require(g, m->q, q, &s, "mark covers the statement", "Q-Weaken");
            n.pre.q = m->q;
        }
        log_->push_back(LogEntry{rule_name(s.kind), ctx_, s.id, s.loc, g, n.pre.q, q_post, note});
        return n.pre.q;
    }

    Poly call_pre(const Stmt& s, const Poly& q_post, std::string& note) {
        NodeAnn& n = node(s);
        const auto& specs = specs_of(s.callee);
        const std::string& fname = p_.funcs[static_cast<std::size_t>(s.callee)].name;
        if (specs.empty()) return q_post;
        int previous = n.spec_index;
        std::string why;
        for (std::size_t j = 0; j < specs.size(); ++j) {
            Poly frame = q_post - specs[j].post.q;
            if (!frame.is_constant()) {
                why += " spec " + std::to_string(j) + ": post-potential differs by non-constant " + show(frame) + ";";
                continue;
            }
            if (!entail_all(node(s).pre.gamma, specs[j].pre.gamma, opts_.entail).proved()) {
                why += " spec " + std::to_string(j) + ": pre-context not entailed;";
                continue;
            }
            n.spec_index = static_cast<int>(j);
            n.frame = frame.constant_term();
            n.callee_ctx = out_.derivation.context_of(s.callee, static_cast<int>(j));
            if (previous != n.spec_index) changed_ = true;
            note = "spec " + std::to_string(j) + " of " + fname + ", frame " + appl::to_string(n.frame);
            return specs[j].pre.q + Poly(n.frame);
        }
        fail(&s, "no matching call spec for '" + fname + "':" + why);
        return q_post;
    }

    Poly cond_pre(const Stmt& s, const Poly& q_post) {
        const LogicalContext& g = node(s).pre.gamma;
        Poly a = backward(*s.s1, q_post);
        Poly b = backward(*s.s2, q_post);
        LogicalContext gt = with_cond(g, *s.cond, true);
        LogicalContext gf = with_cond(g, *s.cond, false);
        if (const Annotation* m = mark(s)) {
            require(gt, m->q, a, &s, "mark covers the then-branch", "Q-Weaken");
            require(gf, m->q, b, &s, "mark covers the else-branch", "Q-Weaken");
            return m->q;
        }
        if (a == b) return a;
        EntailVerdict va = entail(gf, a, b, opts_.entail);
        if (va.proved()) {
            log_->push_back(LogEntry{"Q-Weaken", ctx_, s.id, s.loc, gf, a, b, "else-branch"});
            return a;
        }
        EntailVerdict vb = entail(gt, b, a, opts_.entail);
        if (vb.proved()) {
            log_->push_back(LogEntry{"Q-Weaken", ctx_, s.id, s.loc, gt, b, a, "then-branch"});
            return b;
        }
        EntailVerdict worst = va.kind == EntailKind::Unknown || vb.kind == EntailKind::Unknown ? (va.kind == EntailKind::Unknown ? va : vb) : va;
        add_issue(&s,
                  "branches need a common pre-potential: neither " + show(a) + " nor " + show(b) +
                      " covers both branches; add a mark before the conditional",
                  worst);
        return a;
    }

    const Program& p_;
    const AnnotationSet& ann_;
    const CheckOptions& opts_;
    CheckResult& out_;
    std::vector<std::string> names_;
    EntailOptions join_opts_;
    int ctx_ = 0;
    bool changed_ = false;
    std::vector<int> choices_;
    std::vector<Issue>* issues_ = nullptr;
    std::vector<LogEntry>* log_ = nullptr;
};

void finalize(CheckResult& r) {
    r.verdict = Verdict::Accepted;
    const Issue* first = nullptr;
    for (const auto& i : r.issues)
        if (i.kind == Verdict::Rejected) {
            first = &i;
            break;
        }
    if (!first)
        for (const auto& i : r.issues)
            if (i.kind == Verdict::Unknown) {
                first = &i;
                break;
            }
    if (first) {
        r.verdict = first->kind;
        r.site = first->site;
        r.loc = first->loc;
        r.reason = first->reason;
    }
}

void add_spec_contexts(const Program& p, const AnnotationSet& ann, CheckResult& r) {
    for (std::size_t f = 0; f < ann.specs.size() && f < p.funcs.size(); ++f)
        for (std::size_t j = 0; j < ann.specs[f].size(); ++j) {
            DerivationContext dc;
            dc.func = static_cast<int>(f);
            dc.spec = static_cast<int>(j);
            dc.pre = ann.specs[f][j].pre;
            dc.post = ann.specs[f][j].post;
            r.derivation.contexts.push_back(std::move(dc));
        }
}

void derive_specs(const Program& p, const AnnotationSet& ann, const CheckOptions& opts, CheckResult& r) {
    Checker c(p, ann, opts, r);
    for (std::size_t i = 0; i < r.derivation.contexts.size(); ++i) {
        const auto& dc = r.derivation.contexts[i];
        if (dc.spec < 0) continue;
        c.derive(static_cast<int>(i), p.body(dc.func), true);
    }
}

} // namespace

CheckResult check_context(const Program& p, const AnnotationSet& ann, const CheckOptions& opts) {
    CheckResult r;
    add_spec_contexts(p, ann, r);
    derive_specs(p, ann, opts, r);
    finalize(r);
    return r;
}

CheckResult check_triple(const Program& p, const AnnotationSet& ann, const Triple& t, const CheckOptions& opts) {
    CheckResult r;
    add_spec_contexts(p, ann, r);
    DerivationContext dc;
    dc.func = owning_function(p, *t.stmt);
    dc.pre = t.pre;
    dc.post = t.post;
    r.derivation.contexts.push_back(std::move(dc));
    Checker c(p, ann, opts, r);
    c.derive(static_cast<int>(r.derivation.contexts.size() - 1), *t.stmt, true);
    finalize(r);
    return r;
}

CheckResult check_program(const Program& p, const AnnotationSet& ann, const CheckOptions& opts) {
    CheckResult r;
    DerivationContext main;
    main.func = p.main;
    main.pre.gamma = p.precondition;
    if (ann.main_pre) {
        conjoin(main.pre.gamma, ann.main_pre->gamma);
        main.pre.q = ann.main_pre->q;
        main.pre.loc = ann.main_pre->loc;
    }
    r.derivation.contexts.push_back(std::move(main));
    r.derivation.main_ctx = 0;
    add_spec_contexts(p, ann, r);
    Checker c(p, ann, opts, r);
    for (std::size_t i = 1; i < r.derivation.contexts.size(); ++i) {
        const auto& dc = r.derivation.contexts[i];
        c.derive(static_cast<int>(i), p.body(dc.func), true);
    }
    c.derive(0, p.body(p.main), ann.main_pre.has_value());
    finalize(r);
    return r;
}

const Annotation& main_pre(const CheckResult& r) {
    return r.derivation.contexts.at(static_cast<std::size_t>(r.derivation.main_ctx)).pre;
}

Rational bound_at(const CheckResult& r, std::span<const Rational> init) { return main_pre(r).q.eval(init); }

std::vector<Triple> program_triples(const Program& p, const AnnotationSet& ann, const CheckResult& r) {
    std::vector<Triple> out;
    for (std::size_t f = 0; f < ann.specs.size() && f < p.funcs.size(); ++f)
        for (const auto& spec : ann.specs[f]) out.push_back({spec.pre, &p.body(static_cast<int>(f)), spec.post});
    if (r.derivation.main_ctx >= 0) out.push_back({main_pre(r), &p.body(p.main), Annotation{}});
    return out;
}

Triple relax(const Triple& t, const Rational& c) {
    Triple out = t;
    out.pre.q = polynomials::add_const(t.pre.q, c);
    out.post.q = polynomials::add_const(t.post.q, c);
    return out;
}

AnnotationSet relax(const AnnotationSet& ann, const Stmt& body, const Rational& c) {
    AnnotationSet out = ann;
    std::vector<int> ids;
    collect_sites(body, ids);
    for (int id : ids) {
        if (auto it = out.loop_invariants.find(id); it != out.loop_invariants.end())
            it->second.q = polynomials::add_const(it->second.q, c);
        if (auto it = out.weaken_sites.find(id); it != out.weaken_sites.end())
            it->second.q = polynomials::add_const(it->second.q, c);
    }
    return out;
}

int derivation_degree(const Derivation& d) {
    int deg = 0;
    for (const auto& dc : d.contexts) {
        deg = std::max({deg, dc.pre.q.degree(), dc.post.q.degree()});
        for (const auto& n : dc.nodes) {
            if (!n.visited) continue;
            deg = std::max({deg, n.pre.q.degree(), n.post.q.degree(), n.synth_pre.q.degree(), n.exit.q.degree()});
        }
    }
    return deg;
}

} // namespace appl::logic
