#include "appl/runtime.hpp"

#include <stdexcept>

namespace appl::runtime {

namespace {

template <class Num>
Num const_value(const Expr& e);

template <>
double const_value<double>(const Expr& e) {
    return e.value_d;
}

template <>
Rational const_value<Rational>(const Expr& e) {
    return e.value;
}

template <class Num>
Num number_of(const Stmt& s);

template <>
double number_of<double>(const Stmt& s) {
    return s.number_d;
}

template <>
Rational number_of<Rational>(const Stmt& s) {
    return s.number;
}

} // namespace

template <class Num>
Num eval_expr(std::span<const Num> vals, const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Var:
        return e.var >= 0 && static_cast<std::size_t>(e.var) < vals.size() ? vals[static_cast<std::size_t>(e.var)]
                                                                           : Num(0);
    case Expr::Kind::Const: return const_value<Num>(e);
    case Expr::Kind::Add: return Num(eval_expr(vals, *e.lhs) + eval_expr(vals, *e.rhs));
    case Expr::Kind::Mul: return Num(eval_expr(vals, *e.lhs) * eval_expr(vals, *e.rhs));
    }
    return Num(0);
}

template <class Num>
bool eval_cond(std::span<const Num> vals, const Cond& c) {
    switch (c.kind) {
    case Cond::Kind::True: return true;
    case Cond::Kind::Not: return !eval_cond(vals, *c.a);
    case Cond::Kind::And: return eval_cond(vals, *c.a) && eval_cond(vals, *c.b);
    case Cond::Kind::Le: return eval_expr(vals, *c.e1) <= eval_expr(vals, *c.e2);
    }
    return false;
}

template <class Num>
BasicConfig<Num> StepDistribution<Num>::build(const Num& r) const {
    BasicConfig<Num> c = base;
    c.vals[static_cast<std::size_t>(var)] = r;
    return c;
}

template <class Num>
std::vector<std::pair<Num, BasicConfig<Num>>> StepDistribution<Num>::expand() const {
    if (is_finite()) return finite;
    if (dist->kind != Dist::Kind::Discrete) throw std::domain_error("continuous distribution has no finite expansion");
    std::vector<std::pair<Num, BasicConfig<Num>>> out;
    for (const auto& o : dist->outcomes) {
        if constexpr (std::is_same_v<Num, double>) {
            out.emplace_back(o.prob.get_d(), build(o.value.get_d()));
        } else {
            out.emplace_back(o.prob, build(o.value));
        }
    }
    return out;
}

template <class Num>
StepDistribution<Num> step(const Program& p, const BasicConfig<Num>& cfg) {
    StepDistribution<Num> out;
    auto dirac = [&](BasicConfig<Num> next) {
        out.finite.emplace_back(Num(1), std::move(next));
        return out;
    };
    const Stmt& s = *cfg.stmt;
    std::span<const Num> vals(cfg.vals);
    switch (s.kind) {
    case Stmt::Kind::Skip: {
        if (cfg.cont.empty()) return dirac(cfg);
        BasicConfig<Num> next = cfg;
        Frame top = next.cont.back();
        if (top.kind == Frame::Kind::Seq) {
            next.cont.pop_back();
            next.stmt = top.stmt;
        } else if (eval_cond(vals, *top.stmt->cond)) {
            next.stmt = top.stmt->s1.get();
        } else {
            next.cont.pop_back();
            next.stmt = synthetic_skip();
        }
        return dirac(std::move(next));
    }
    case Stmt::Kind::Tick: {
        BasicConfig<Num> next = cfg;
        next.stmt = synthetic_skip();
        next.cost += number_of<Num>(s);
        return dirac(std::move(next));
    }
    case Stmt::Kind::Assign: {
        BasicConfig<Num> next = cfg;
        next.vals[static_cast<std::size_t>(s.var)] = eval_expr(vals, *s.expr);
        next.stmt = synthetic_skip();
        return dirac(std::move(next));
    }
    case Stmt::Kind::Sample:
        out.dist = &s.dist;
        out.var = s.var;
        out.base = cfg;
        out.base.stmt = synthetic_skip();
        return out;
    case Stmt::Kind::Call: {
        BasicConfig<Num> next = cfg;
        next.stmt = p.funcs[static_cast<std::size_t>(s.callee)].body.get();
        return dirac(std::move(next));
    }
    case Stmt::Kind::While: {
        BasicConfig<Num> next = cfg;
        next.stmt = synthetic_skip();
        next.cont.push_back({Frame::Kind::Loop, &s});
        return dirac(std::move(next));
    }
    case Stmt::Kind::Prob: {
        Num prob = number_of<Num>(s);
        BasicConfig<Num> left = cfg;
        left.stmt = s.s1.get();
        BasicConfig<Num> right = cfg;
        right.stmt = s.s2.get();
        out.finite.emplace_back(prob, std::move(left));
        out.finite.emplace_back(Num(Num(1) - prob), std::move(right));
        return out;
    }
    case Stmt::Kind::If: {
        BasicConfig<Num> next = cfg;
        next.stmt = eval_cond(vals, *s.cond) ? s.s1.get() : s.s2.get();
        return dirac(std::move(next));
    }
    case Stmt::Kind::Seq: {
        BasicConfig<Num> next = cfg;
        next.stmt = s.s1.get();
        next.cont.push_back({Frame::Kind::Seq, s.s2.get()});
        return dirac(std::move(next));
    }
    }
    throw std::logic_error("unknown statement kind");
}

template <class Num>
BasicConfig<Num> initial_config(const Program& p, std::span<const Num> init) {
    BasicConfig<Num> c;
    c.vals.assign(p.vars.size(), Num(0));
    for (std::size_t i = 0; i < init.size() && i < c.vals.size(); ++i) c.vals[i] = init[i];
    c.stmt = p.funcs.at(static_cast<std::size_t>(p.main)).body.get();
    c.cost = 0;
    return c;
}

template double eval_expr<double>(std::span<const double>, const Expr&);
template Rational eval_expr<Rational>(std::span<const Rational>, const Expr&);
template bool eval_cond<double>(std::span<const double>, const Cond&);
template bool eval_cond<Rational>(std::span<const Rational>, const Cond&);
template struct StepDistribution<double>;
template struct StepDistribution<Rational>;
template StepDistribution<double> step<double>(const Program&, const BasicConfig<double>&);
template StepDistribution<Rational> step<Rational>(const Program&, const BasicConfig<Rational>&);
template BasicConfig<double> initial_config<double>(const Program&, std::span<const double>);
template BasicConfig<Rational> initial_config<Rational>(const Program&, std::span<const Rational>);

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream)
    : gen_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

double sample(Rng& rng, const Dist& d) {
    double u = rng.unit();
    if (d.kind == Dist::Kind::Uniform) return d.lo_d + u * (d.hi_d - d.lo_d);
    std::size_t n = d.cdf_d.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (u < d.cdf_d[i]) return d.values_d[i];
    return d.values_d[n - 1];
}

void sample_step(Rng& rng, const Program& p, Config& cfg) {
    const Stmt& s = *cfg.stmt;
    switch (s.kind) {
    case Stmt::Kind::Skip: {
        if (cfg.cont.empty()) return;
        Frame top = cfg.cont.back();
        if (top.kind == Frame::Kind::Seq) {
            cfg.cont.pop_back();
            cfg.stmt = top.stmt;
        } else if (eval_cond(std::span<const double>(cfg.vals), *top.stmt->cond)) {
            cfg.stmt = top.stmt->s1.get();
        } else {
            cfg.cont.pop_back();
            cfg.stmt = synthetic_skip();
        }
        return;
    }
    case Stmt::Kind::Tick:
        cfg.cost += s.number_d;
        cfg.stmt = synthetic_skip();
        return;
    case Stmt::Kind::Assign:
        cfg.vals[static_cast<std::size_t>(s.var)] = eval_expr(std::span<const double>(cfg.vals), *s.expr);
        cfg.stmt = synthetic_skip();
        return;
    case Stmt::Kind::Sample:
        cfg.vals[static_cast<std::size_t>(s.var)] = sample(rng, s.dist);
        cfg.stmt = synthetic_skip();
        return;
    case Stmt::Kind::Call: cfg.stmt = p.funcs[static_cast<std::size_t>(s.callee)].body.get(); return;
    case Stmt::Kind::While:
        cfg.cont.push_back({Frame::Kind::Loop, &s});
        cfg.stmt = synthetic_skip();
        return;
    case Stmt::Kind::Prob: cfg.stmt = rng.unit() < s.number_d ? s.s1.get() : s.s2.get(); return;
    case Stmt::Kind::If:
        cfg.stmt = eval_cond(std::span<const double>(cfg.vals), *s.cond) ? s.s1.get() : s.s2.get();
        return;
    case Stmt::Kind::Seq:
        cfg.cont.push_back({Frame::Kind::Seq, s.s2.get()});
        cfg.stmt = s.s1.get();
        return;
    }
}

Config sample_from(Rng& rng, const StepDistribution<double>& dist) {
    if (!dist.is_finite()) return dist.build(sample(rng, *dist.dist));
    if (dist.finite.size() == 1) return dist.finite.front().second;
    double u = rng.unit();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < dist.finite.size(); ++i) {
        acc += dist.finite[i].first;
        if (u < acc) return dist.finite[i].second;
    }
    return dist.finite.back().second;
}

} // namespace appl::runtime
