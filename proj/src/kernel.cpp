#include "appl/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace appl::logic {

namespace {

template <class Num>
Num to_num(const Rational& r);

template <>
double to_num<double>(const Rational& r) {
    return r.get_d();
}

template <>
Rational to_num<Rational>(const Rational& r) {
    return r;
}

} // namespace

double AnnotatedKernel::FastPoly::eval(std::span<const double> x) const {
    double s = 0;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
        double t = coeff[i];
        for (auto [v, e] : powers[i]) {
            double xv = static_cast<std::size_t>(v) < x.size() ? x[static_cast<std::size_t>(v)] : 0.0;
            for (int k = 0; k < e; ++k) t *= xv;
        }
        s += t;
    }
    return s;
}

AnnotatedKernel::AnnotatedKernel(const Program& p, const AnnotationSet& ann, const CheckResult& r)
    : p_(p), ann_(ann), r_(r) {
    auto add = [this](const Annotation* a) {
        if (fast_.count(a)) return;
        FastPoly f;
        for (const auto& [m, c] : a->q.terms()) {
            f.coeff.push_back(c.get_d());
            f.powers.push_back(m.powers());
        }
        fast_.emplace(a, std::move(f));
    };
    for (const auto& dc : r_.derivation.contexts) {
        add(&dc.pre);
        for (const auto& n : dc.nodes) {
            add(&n.pre);
            add(&n.post);
            add(&n.exit);
        }
    }
    for (const auto& [site, a] : ann_.loop_invariants) add(&a);
}

const AnnotatedKernel::FastPoly& AnnotatedKernel::fast(const Annotation* a) const { return fast_.at(a); }

const Annotation* AnnotatedKernel::pre_of(int ctx, const Stmt& s) const {
    return &r_.derivation.contexts.at(static_cast<std::size_t>(ctx)).node(s.id).pre;
}

const Annotation* AnnotatedKernel::post_of(int ctx, const Stmt& s) const {
    return &r_.derivation.contexts.at(static_cast<std::size_t>(ctx)).node(s.id).post;
}

const Annotation* AnnotatedKernel::exit_of(int ctx, const Stmt& s) const {
    return &r_.derivation.contexts.at(static_cast<std::size_t>(ctx)).node(s.id).exit;
}

const Annotation* AnnotatedKernel::invariant_of(const Stmt& s) const {
    auto it = ann_.loop_invariants.find(s.id);
    if (it == ann_.loop_invariants.end()) throw std::logic_error("loop without invariant in annotated kernel");
    return &it->second;
}

template <class Num>
AnnotatedConfig<Num> AnnotatedKernel::initial(runtime::BasicConfig<Num> cfg) const {
    AnnotatedConfig<Num> a;
    a.cfg = std::move(cfg);
    if (!a.cfg.terminal()) {
        a.tags.cur.ctx = r_.derivation.main_ctx;
        a.tags.cur.ann = &r_.derivation.contexts.at(static_cast<std::size_t>(r_.derivation.main_ctx)).pre;
    }
    return a;
}

template <class Num>
void AnnotatedKernel::retag(const StepOrigin& from, TagStack<Num>& tags, const runtime::BasicConfig<Num>& next) const {
    if (next.terminal()) {
        tags.cur = BasicTag<Num>{};
        tags.frames.clear();
        return;
    }
    BasicTag<Num>& cur = tags.cur;
    const Stmt& s = *from.stmt;
    switch (s.kind) {
    case Stmt::Kind::Skip: {
        const Stmt& f = *from.top.stmt;
        if (from.top.kind == runtime::Frame::Kind::Seq) {
            BasicTag<Num> t = std::move(tags.frames.back());
            tags.frames.pop_back();
            t.ann = pre_of(t.ctx, f);
            cur = std::move(t);
        } else if (next.cont.size() == from.depth) {
            const BasicTag<Num>& t = tags.frames.back();
            cur = BasicTag<Num>{t.ctx, t.shift, pre_of(t.ctx, *f.s1)};
        } else {
            BasicTag<Num> t = std::move(tags.frames.back());
            tags.frames.pop_back();
            t.ann = exit_of(t.ctx, f);
            cur = std::move(t);
        }
        break;
    }
    case Stmt::Kind::Tick:
    case Stmt::Kind::Assign:
    case Stmt::Kind::Sample: cur.ann = post_of(cur.ctx, s); break;
    case Stmt::Kind::Call: {
        const NodeAnn& n = r_.derivation.contexts.at(static_cast<std::size_t>(cur.ctx)).node(s.id);
        if (n.callee_ctx < 0) throw std::logic_error("call without a matched specification in annotated kernel");
        cur.ctx = n.callee_ctx;
        cur.shift = cur.shift + to_num<Num>(n.frame);
        cur.ann = pre_of(cur.ctx, p_.body(s.callee));
        break;
    }
    case Stmt::Kind::While:
        tags.frames.push_back(BasicTag<Num>{cur.ctx, cur.shift, nullptr});
        cur.ann = invariant_of(s);
        break;
    case Stmt::Kind::Seq:
        tags.frames.push_back(BasicTag<Num>{cur.ctx, cur.shift, nullptr});
        cur.ann = pre_of(cur.ctx, *s.s1);
        break;
    case Stmt::Kind::If:
    case Stmt::Kind::Prob: cur.ann = pre_of(cur.ctx, next.stmt == s.s1.get() ? *s.s1 : *s.s2); break;
    }
}

template <class Num>
std::vector<std::pair<Num, AnnotatedConfig<Num>>> AnnotatedKernel::step(const AnnotatedConfig<Num>& c) const {
    auto dist = runtime::step(p_, c.cfg);
    auto succ = dist.expand();
    StepOrigin o = origin_of(c.cfg);
    std::vector<std::pair<Num, AnnotatedConfig<Num>>> out;
    out.reserve(succ.size());
    for (auto& [w, cfg] : succ) {
        AnnotatedConfig<Num> a{std::move(cfg), c.tags};
        retag(o, a.tags, a.cfg);
        out.emplace_back(w, std::move(a));
    }
    return out;
}

double AnnotatedKernel::potential(const AnnotatedConfig<double>& c) const {
    if (c.tags.cur.terminal()) return 0.0;
    return fast(c.tags.cur.ann).eval(c.cfg.vals) + c.tags.cur.shift;
}

Rational AnnotatedKernel::potential(const AnnotatedConfig<Rational>& c) const {
    if (c.tags.cur.terminal()) return Rational(0);
    return c.tags.cur.ann->q.eval(c.cfg.vals) + c.tags.cur.shift;
}

bool AnnotatedKernel::in_context(const AnnotatedConfig<double>& c) const {
    return c.tags.cur.terminal() || satisfies(c.tags.cur.ann->gamma, std::span<const double>(c.cfg.vals));
}

bool AnnotatedKernel::in_context(const AnnotatedConfig<Rational>& c) const {
    return c.tags.cur.terminal() || satisfies(c.tags.cur.ann->gamma, std::span<const Rational>(c.cfg.vals));
}

template AnnotatedConfig<double> AnnotatedKernel::initial(runtime::BasicConfig<double>) const;
template AnnotatedConfig<Rational> AnnotatedKernel::initial(runtime::BasicConfig<Rational>) const;
template void AnnotatedKernel::retag(const StepOrigin&, TagStack<double>&, const runtime::BasicConfig<double>&) const;
template void AnnotatedKernel::retag(const StepOrigin&, TagStack<Rational>&,
                                     const runtime::BasicConfig<Rational>&) const;
template std::vector<std::pair<double, AnnotatedConfig<double>>>
AnnotatedKernel::step(const AnnotatedConfig<double>&) const;
template std::vector<std::pair<Rational, AnnotatedConfig<Rational>>>
AnnotatedKernel::step(const AnnotatedConfig<Rational>&) const;

} // namespace appl::logic
