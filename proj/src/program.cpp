#include "appl/program.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace appl {

int Program::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return static_cast<int>(i);
    return -1;
}

int Program::func_index(std::string_view name) const {
    for (std::size_t i = 0; i < funcs.size(); ++i)
        if (funcs[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> display_names(const Program& p, const AnnotationSet& ann) {
    std::vector<std::string> names = p.vars;
    for (const auto& u : ann.unbound) names.push_back(u.name);
    return names;
}

bool equal(const Annotation& a, const Annotation& b) { return a.gamma == b.gamma && a.q == b.q; }

bool equal(const AnnotationSet& a, const AnnotationSet& b) {
    auto same_map = [](const std::map<int, Annotation>& x, const std::map<int, Annotation>& y) {
        if (x.size() != y.size()) return false;
        for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j)
            if (i->first != j->first || !equal(i->second, j->second)) return false;
        return true;
    };
    if (a.specs.size() != b.specs.size()) return false;
    for (std::size_t f = 0; f < a.specs.size(); ++f) {
        if (a.specs[f].size() != b.specs[f].size()) return false;
        for (std::size_t j = 0; j < a.specs[f].size(); ++j)
            if (!equal(a.specs[f][j].pre, b.specs[f][j].pre) || !equal(a.specs[f][j].post, b.specs[f][j].post))
                return false;
    }
    if (a.main_pre.has_value() != b.main_pre.has_value()) return false;
    if (a.main_pre && !equal(*a.main_pre, *b.main_pre)) return false;
    if (a.unbound.size() != b.unbound.size()) return false;
    for (std::size_t k = 0; k < a.unbound.size(); ++k)
        if (a.unbound[k].name != b.unbound[k].name) return false;
    return a.step_bound == b.step_bound && same_map(a.loop_invariants, b.loop_invariants) &&
           same_map(a.weaken_sites, b.weaken_sites);
}

bool equal(const Program& a, const Program& b) {
    if (a.vars != b.vars || a.main != b.main || a.precondition != b.precondition) return false;
    if (a.funcs.size() != b.funcs.size()) return false;
    for (std::size_t f = 0; f < a.funcs.size(); ++f)
        if (a.funcs[f].name != b.funcs[f].name || !equal(*a.funcs[f].body, *b.funcs[f].body)) return false;
    return true;
}

void number_sites(Program& p) {
    p.sites.clear();
    std::function<void(Stmt&)> visit = [&](Stmt& s) {
        s.id = static_cast<int>(p.sites.size());
        p.sites.push_back(&s);
        if (s.s1) visit(*s.s1);
        if (s.s2) visit(*s.s2);
    };
    for (auto& f : p.funcs) visit(*f.body);
}

namespace {

void collect_calls(const Stmt& s, std::set<int>& out) {
    if (s.kind == Stmt::Kind::Call) out.insert(s.callee);
    if (s.s1) collect_calls(*s.s1, out);
    if (s.s2) collect_calls(*s.s2, out);
}

bool contains_loop(const Stmt& s) {
    if (s.kind == Stmt::Kind::While) return true;
    return (s.s1 && contains_loop(*s.s1)) || (s.s2 && contains_loop(*s.s2));
}

} // namespace

bool has_recursion(const Program& p) {
    std::size_t n = p.funcs.size();
    std::vector<std::set<int>> edges(n);
    for (std::size_t f = 0; f < n; ++f) collect_calls(*p.funcs[f].body, edges[f]);
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> state(n, 0);
    std::function<bool(int)> cyclic = [&](int f) {
        state[static_cast<std::size_t>(f)] = 1;
        for (int g : edges[static_cast<std::size_t>(f)]) {
            if (state[static_cast<std::size_t>(g)] == 1) return true;
            if (state[static_cast<std::size_t>(g)] == 0 && cyclic(g)) return true;
        }
        state[static_cast<std::size_t>(f)] = 2;
        return false;
    };
    for (std::size_t f = 0; f < n; ++f)
        if (state[f] == 0 && cyclic(static_cast<int>(f))) return true;
    return false;
}

bool has_loops(const Program& p) {
    for (const auto& f : p.funcs)
        if (contains_loop(*f.body)) return true;
    return false;
}

std::string Diagnostic::render(const std::string& file) const {
    return file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + message;
}

std::vector<Diagnostic> validate(const Program& p, const AnnotationSet& ann, bool require_invariants) {
    std::vector<Diagnostic> out;
    if (require_invariants) {
        for (const Stmt* s : p.sites)
            if (s->kind == Stmt::Kind::While && !ann.loop_invariants.count(s->id))
                out.push_back({"missing-invariant", s->id, s->loc,
                               "missing-invariant: loop at site " + std::to_string(s->id) + " has no invariant"});
    }
    for (const auto& u : ann.unbound)
        out.push_back({"unbound", -1, u.loc, "unbound " + u.name});
    return out;
}

// Printing. Core forms only, so that parsing the output rebuilds the same tree.

std::string print_expr(const Expr& e, const std::vector<std::string>& names) {
    switch (e.kind) {
    case Expr::Kind::Var:
        return e.var >= 0 && static_cast<std::size_t>(e.var) < names.size() ? names[static_cast<std::size_t>(e.var)]
                                                                            : "v" + std::to_string(e.var);
    case Expr::Kind::Const: return e.value < 0 ? "(" + to_string(e.value) + ")" : to_string(e.value);
    case Expr::Kind::Add: return "(" + print_expr(*e.lhs, names) + " + " + print_expr(*e.rhs, names) + ")";
    case Expr::Kind::Mul: return "(" + print_expr(*e.lhs, names) + " * " + print_expr(*e.rhs, names) + ")";
    }
    return "";
}

std::string print_cond(const Cond& c, const std::vector<std::string>& names) {
    switch (c.kind) {
    case Cond::Kind::True: return "true";
    case Cond::Kind::Not: return "!(" + print_cond(*c.a, names) + ")";
    case Cond::Kind::And: return "(" + print_cond(*c.a, names) + " && " + print_cond(*c.b, names) + ")";
    case Cond::Kind::Le: return "(" + print_expr(*c.e1, names) + " <= " + print_expr(*c.e2, names) + ")";
    }
    return "";
}

namespace {

class Printer {
  public:
    Printer(const Program& p, const AnnotationSet* ann) : p_(p), ann_(ann) {
        names_ = ann ? display_names(p, *ann) : p.vars;
    }

    std::string run() {
        if (!p_.vars.empty()) {
            os_ << "vars ";
            for (std::size_t i = 0; i < p_.vars.size(); ++i) os_ << (i ? ", " : "") << p_.vars[i];
            os_ << ";\n";
        }
        if (!p_.precondition.empty()) os_ << "pre " << gamma(p_.precondition) << ";\n";
        if (ann_ && ann_->step_bound) os_ << "{# steps <= " << *ann_->step_bound << " #}\n";
        if (ann_) {
            for (std::size_t f = 0; f < ann_->specs.size(); ++f)
                for (const auto& s : ann_->specs[f])
                    os_ << "{# spec " << p_.funcs[f].name << " : {" << annot(s.pre) << "} -> {" << annot(s.post)
                        << "} #}\n";
        }
        for (std::size_t f = 0; f < p_.funcs.size(); ++f) {
            if (ann_ && static_cast<int>(f) == p_.main && ann_->main_pre)
                os_ << "{# " << annot(*ann_->main_pre) << " #}\n";
            os_ << "\nfunc " << p_.funcs[f].name << "() {\n";
            stmt_list(*p_.funcs[f].body, 1);
            os_ << "}\n";
        }
        return os_.str();
    }

  private:
    std::string gamma(const logic::LogicalContext& g) const {
        if (g.empty()) return "true";
        std::string out;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i) out += ", ";
            const char* rel = g[i].rel == logic::Rel::Ge ? " >= 0" : g[i].rel == logic::Rel::Gt ? " > 0" : " == 0";
            out += "(" + poly(g[i].p) + ")" + rel;
        }
        return out;
    }

    std::string poly(const polynomials::Poly& q) const {
        std::string s = q.to_string(names_);
        return s;
    }

    std::string annot(const Annotation& a) const { return gamma(a.gamma) + " ; " + poly(a.q); }

    void indent(int depth) {
        for (int i = 0; i < depth; ++i) os_ << "    ";
    }

    const Annotation* mark(const Stmt& s) const {
        if (!ann_) return nullptr;
        const auto& table = s.kind == Stmt::Kind::While ? ann_->loop_invariants : ann_->weaken_sites;
        auto it = table.find(s.id);
        return it == table.end() ? nullptr : &it->second;
    }

    // Prints a statement sequence; the caller supplies surrounding braces.
    void stmt_list(const Stmt& s, int depth) {
        if (s.kind == Stmt::Kind::Seq && !mark(s)) {
            item(*s.s1, depth, true);
            os_ << ";\n";
            stmt_list(*s.s2, depth);
            return;
        }
        item(s, depth, false);
        os_ << "\n";
    }

    // One list item. A Seq node as an item (left-nested or annotated) gets braces.
    void item(const Stmt& s, int depth, bool head) {
        indent(depth);
        if (const Annotation* a = mark(s)) os_ << "{# " << annot(*a) << " #} ";
        if (s.kind == Stmt::Kind::Seq && (head || mark(s))) {
            os_ << "{\n";
            stmt_list(s, depth + 1);
            indent(depth);
            os_ << "}";
            return;
        }
        core(s, depth);
    }

    void block(const Stmt& s, int depth) {
        os_ << "{\n";
        stmt_list(s, depth + 1);
        indent(depth);
        os_ << "}";
    }

    void core(const Stmt& s, int depth) {
        switch (s.kind) {
        case Stmt::Kind::Skip: os_ << "skip"; break;
        case Stmt::Kind::Tick: os_ << "tick(" << to_string(s.number) << ")"; break;
        case Stmt::Kind::Assign: os_ << names_[static_cast<std::size_t>(s.var)] << " := " << print_expr(*s.expr, names_); break;
        case Stmt::Kind::Sample:
            os_ << names_[static_cast<std::size_t>(s.var)] << " ~ ";
            if (s.dist.kind == Dist::Kind::Uniform) {
                os_ << "uniform(" << to_string(s.dist.lo) << ", " << to_string(s.dist.hi) << ")";
            } else {
                os_ << "discrete(";
                for (std::size_t i = 0; i < s.dist.outcomes.size(); ++i)
                    os_ << (i ? ", " : "") << to_string(s.dist.outcomes[i].value) << ": "
                        << to_string(s.dist.outcomes[i].prob);
                os_ << ")";
            }
            break;
        case Stmt::Kind::Call: os_ << "call " << p_.funcs[static_cast<std::size_t>(s.callee)].name; break;
        case Stmt::Kind::While:
            os_ << "while (" << print_cond(*s.cond, names_) << ") ";
            block(*s.s1, depth);
            break;
        case Stmt::Kind::Prob:
            os_ << "prob(" << to_string(s.number) << ") ";
            block(*s.s1, depth);
            os_ << " else ";
            block(*s.s2, depth);
            break;
        case Stmt::Kind::If:
            os_ << "if (" << print_cond(*s.cond, names_) << ") ";
            block(*s.s1, depth);
            os_ << " else ";
            block(*s.s2, depth);
            break;
        case Stmt::Kind::Seq: block(s, depth); break;
        }
    }

    const Program& p_;
    const AnnotationSet* ann_;
    std::vector<std::string> names_;
    std::ostringstream os_;
};

} // namespace

std::string print(const Program& p, const AnnotationSet& ann) { return Printer(p, &ann).run(); }
std::string print(const Program& p) { return Printer(p, nullptr).run(); }

} // namespace appl
