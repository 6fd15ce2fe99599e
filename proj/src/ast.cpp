#include "appl/ast.hpp"

#include <algorithm>
#include <stdexcept>

namespace appl {

std::unique_ptr<Expr> Expr::make_var(int v) {
    auto e = std::make_unique<Expr>();
    e->kind = Kind::Var;
    e->var = v;
    return e;
}

std::unique_ptr<Expr> Expr::make_const(const Rational& c) {
    auto e = std::make_unique<Expr>();
    e->kind = Kind::Const;
    e->value = c;
    e->value_d = c.get_d();
    return e;
}

std::unique_ptr<Expr> Expr::make_add(std::unique_ptr<Expr> a, std::unique_ptr<Expr> b) {
    auto e = std::make_unique<Expr>();
    e->kind = Kind::Add;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

std::unique_ptr<Expr> Expr::make_mul(std::unique_ptr<Expr> a, std::unique_ptr<Expr> b) {
    auto e = std::make_unique<Expr>();
    e->kind = Kind::Mul;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

std::unique_ptr<Expr> Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->var = var;
    e->value = value;
    e->value_d = value_d;
    if (lhs) e->lhs = lhs->clone();
    if (rhs) e->rhs = rhs->clone();
    return e;
}

bool equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Var: return a.var == b.var;
    case Expr::Kind::Const: return a.value == b.value;
    case Expr::Kind::Add:
    case Expr::Kind::Mul: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
    return false;
}

std::unique_ptr<Cond> Cond::make_true() { return std::make_unique<Cond>(); }

std::unique_ptr<Cond> Cond::make_not(std::unique_ptr<Cond> c) {
    auto r = std::make_unique<Cond>();
    r->kind = Kind::Not;
    r->a = std::move(c);
    return r;
}

std::unique_ptr<Cond> Cond::make_and(std::unique_ptr<Cond> l, std::unique_ptr<Cond> r) {
    auto c = std::make_unique<Cond>();
    c->kind = Kind::And;
    c->a = std::move(l);
    c->b = std::move(r);
    return c;
}

std::unique_ptr<Cond> Cond::make_le(std::unique_ptr<Expr> l, std::unique_ptr<Expr> r) {
    auto c = std::make_unique<Cond>();
    c->kind = Kind::Le;
    c->e1 = std::move(l);
    c->e2 = std::move(r);
    return c;
}

std::unique_ptr<Cond> Cond::clone() const {
    auto c = std::make_unique<Cond>();
    c->kind = kind;
    if (a) c->a = a->clone();
    if (b) c->b = b->clone();
    if (e1) c->e1 = e1->clone();
    if (e2) c->e2 = e2->clone();
    return c;
}

bool equal(const Cond& a, const Cond& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Cond::Kind::True: return true;
    case Cond::Kind::Not: return equal(*a.a, *b.a);
    case Cond::Kind::And: return equal(*a.a, *b.a) && equal(*a.b, *b.b);
    case Cond::Kind::Le: return equal(*a.e1, *b.e1) && equal(*a.e2, *b.e2);
    }
    return false;
}

Dist Dist::uniform(const Rational& a, const Rational& b) {
    Dist d;
    d.kind = Kind::Uniform;
    d.lo = a;
    d.hi = b;
    d.lo_d = a.get_d();
    d.hi_d = b.get_d();
    return d;
}

Dist Dist::discrete(std::vector<Outcome> outs) {
    Dist d;
    d.kind = Kind::Discrete;
    d.outcomes = std::move(outs);
    Rational acc = 0;
    for (const auto& o : d.outcomes) {
        acc += o.prob;
        d.values_d.push_back(o.value.get_d());
        d.cdf_d.push_back(acc.get_d());
    }
    return d;
}

Rational Dist::support_min() const {
    if (kind == Kind::Uniform) return lo;
    if (outcomes.empty()) throw std::logic_error("empty discrete distribution");
    Rational m = outcomes.front().value;
    for (const auto& o : outcomes)
        if (o.prob > 0 && o.value < m) m = o.value;
    return m;
}

Rational Dist::support_max() const {
    if (kind == Kind::Uniform) return hi;
    if (outcomes.empty()) throw std::logic_error("empty discrete distribution");
    Rational m = outcomes.front().value;
    for (const auto& o : outcomes)
        if (o.prob > 0 && o.value > m) m = o.value;
    return m;
}

bool equal(const Dist& a, const Dist& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Dist::Kind::Uniform) return a.lo == b.lo && a.hi == b.hi;
    return std::equal(a.outcomes.begin(), a.outcomes.end(), b.outcomes.begin(), b.outcomes.end(),
                      [](const Outcome& x, const Outcome& y) {
                          return x.value == y.value && x.prob == y.prob;
                      });
}

bool equal(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Stmt::Kind::Skip: return true;
    case Stmt::Kind::Tick: return a.number == b.number;
    case Stmt::Kind::Assign: return a.var == b.var && equal(*a.expr, *b.expr);
    case Stmt::Kind::Sample: return a.var == b.var && equal(a.dist, b.dist);
    case Stmt::Kind::Call: return a.callee == b.callee;
    case Stmt::Kind::While: return equal(*a.cond, *b.cond) && equal(*a.s1, *b.s1);
    case Stmt::Kind::Prob:
        return a.number == b.number && equal(*a.s1, *b.s1) && equal(*a.s2, *b.s2);
    case Stmt::Kind::If:
        return equal(*a.cond, *b.cond) && equal(*a.s1, *b.s1) && equal(*a.s2, *b.s2);
    case Stmt::Kind::Seq: return equal(*a.s1, *b.s1) && equal(*a.s2, *b.s2);
    }
    return false;
}

const Stmt* synthetic_skip() {
    static const Stmt skip{};
    return &skip;
}

} // namespace appl
