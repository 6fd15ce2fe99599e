#include "appl/program.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace appl {

namespace {

using polynomials::Poly;

enum class Tok {
    Ident,
    Number,
    LBrace,
    RBrace,
    LAnn,  // {#
    RAnn,  // #}
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Assign,  // :=
    Tilde,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Le,
    Ge,
    Lt,
    Gt,
    EqEq,
    Eq,
    Ne,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceLoc loc;
};

std::vector<Token> lex(std::string_view src, const std::string& file) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto peek = [&](std::size_t k) -> char { return i + k < src.size() ? src[i + k] : '\0'; };

    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && peek(1) == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourceLoc loc{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), loc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), loc});
            advance(j - i);
            continue;
        }
        struct Punct {
            const char* text;
            Tok kind;
        };
        static const Punct puncts[] = {
            {"{#", Tok::LAnn}, {"#}", Tok::RAnn},   {":=", Tok::Assign}, {"<=", Tok::Le},
            {">=", Tok::Ge},   {"==", Tok::EqEq},   {"!=", Tok::Ne},     {"&&", Tok::AndAnd},
            {"||", Tok::OrOr}, {"->", Tok::Arrow},  {"{", Tok::LBrace},  {"}", Tok::RBrace},
            {"(", Tok::LParen}, {")", Tok::RParen}, {";", Tok::Semi},    {",", Tok::Comma},
            {":", Tok::Colon}, {"~", Tok::Tilde},   {"+", Tok::Plus},    {"-", Tok::Minus},
            {"*", Tok::Star},  {"/", Tok::Slash},   {"^", Tok::Caret},   {"<", Tok::Lt},
            {">", Tok::Gt},    {"=", Tok::Eq},      {"!", Tok::Bang},
        };
        bool matched = false;
        for (const auto& p : puncts) {
            std::string_view t(p.text);
            if (src.substr(i, t.size()) == t) {
                out.push_back({p.kind, std::string(t), loc});
                advance(t.size());
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(file, loc, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

struct PendingAnnotation {
    Stmt* stmt;
    Annotation ann;
    bool loop;
};

struct PendingCall {
    Stmt* stmt;
    std::string name;
    SourceLoc loc;
};

struct PendingSpec {
    std::string func;
    FunctionSpec spec;
};

class Parser {
  public:
    Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

    ParsedProgram run() {
        ParsedProgram out;
        prog_.source_name = file_;
        std::optional<Annotation> func_ann;
        while (cur().kind != Tok::End) {
            if (func_ann && !is_keyword("func"))
                fail(cur().loc, "annotation must be followed by a function");
            if (is_keyword("vars")) {
                parse_vars();
            } else if (is_keyword("pre")) {
                next();
                conjoin(prog_.precondition, parse_gamma(false));
                expect(Tok::Semi, "';'");
            } else if (cur().kind == Tok::LAnn) {
                parse_top_annotation(func_ann);
            } else if (is_keyword("func")) {
                parse_function(func_ann);
                func_ann.reset();
            } else {
                fail(cur().loc, "expected 'vars', 'pre', 'func' or an annotation");
            }
        }
        if (func_ann) fail(cur().loc, "annotation must be followed by a function");
        prog_.main = prog_.func_index("main");
        if (prog_.main < 0) fail(cur().loc, "program has no main function");

        for (const auto& c : calls_) {
            int f = prog_.func_index(c.name);
            if (f < 0) fail(c.loc, "unbound function '" + c.name + "'");
            c.stmt->callee = f;
        }
        ann_.specs.assign(prog_.funcs.size(), {});
        for (auto& s : specs_) {
            int f = prog_.func_index(s.func);
            if (f < 0) fail(s.spec.loc, "spec for unbound function '" + s.func + "'");
            ann_.specs[static_cast<std::size_t>(f)].push_back(std::move(s.spec));
        }
        for (auto& [f, a] : func_anns_) {
            if (f == prog_.main) {
                ann_.main_pre = a;
            } else {
                FunctionSpec spec{a, Annotation{{}, Poly{}, a.loc}, a.loc};
                ann_.specs[static_cast<std::size_t>(f)].push_back(std::move(spec));
            }
        }
        number_sites(prog_);
        for (auto& p : pending_) {
            auto& table = p.loop ? ann_.loop_invariants : ann_.weaken_sites;
            if (!table.emplace(p.stmt->id, std::move(p.ann)).second)
                fail(p.stmt->loc, "statement carries two annotations");
        }
        ann_.unbound = unbound_;
        out.program = std::move(prog_);
        out.annotations = std::move(ann_);
        return out;
    }

  private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool is_keyword(const char* kw) const { return cur().kind == Tok::Ident && cur().text == kw; }

    [[noreturn]] void fail(SourceLoc loc, const std::string& msg) const { throw ParseError(file_, loc, msg); }

    const Token& expect(Tok k, const char* what) {
        if (cur().kind != k) fail(cur().loc, std::string("expected ") + what + ", found '" + describe(cur()) + "'");
        return next();
    }

    void expect_keyword(const char* kw) {
        if (!is_keyword(kw)) fail(cur().loc, std::string("expected '") + kw + "', found '" + describe(cur()) + "'");
        next();
    }

    static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

    static bool reserved(const std::string& s) {
        static const char* words[] = {"vars", "pre",  "func",    "skip",    "tick", "call",
                                      "while", "if",  "else",    "prob",    "true", "false",
                                      "uniform", "discrete", "spec", "steps"};
        for (const char* w : words)
            if (s == w) return true;
        return false;
    }

    void parse_vars() {
        next();
        if (cur().kind == Tok::Semi) {
            next();
            return;
        }
        while (true) {
            const Token& t = expect(Tok::Ident, "variable name");
            if (reserved(t.text)) fail(t.loc, "'" + t.text + "' is a keyword");
            if (prog_.var_index(t.text) >= 0) fail(t.loc, "variable '" + t.text + "' declared twice");
            if (!unbound_.empty()) fail(t.loc, "variables must be declared before annotations use them");
            prog_.vars.push_back(t.text);
            if (cur().kind == Tok::Comma) {
                next();
                continue;
            }
            break;
        }
        expect(Tok::Semi, "';'");
    }

    void parse_top_annotation(std::optional<Annotation>& func_ann) {
        SourceLoc loc = next().loc;  // {#
        if (is_keyword("spec")) {
            next();
            const Token& f = expect(Tok::Ident, "function name");
            expect(Tok::Colon, "':'");
            FunctionSpec spec;
            spec.loc = loc;
            spec.pre = parse_braced_annotation();
            expect(Tok::Arrow, "'->'");
            spec.post = parse_braced_annotation();
            expect(Tok::RAnn, "'#}'");
            specs_.push_back({f.text, std::move(spec)});
        } else if (is_keyword("steps")) {
            next();
            expect(Tok::Le, "'<='");
            const Token& n = expect(Tok::Number, "step count");
            auto v = parse_rational(n.text);
            if (!v || v->get_den() != 1 || *v < 0) fail(n.loc, "step bound must be a nonnegative integer");
            ann_.step_bound = v->get_num().get_ui();
            expect(Tok::RAnn, "'#}'");
        } else {
            Annotation a = parse_annotation_body(loc);
            expect(Tok::RAnn, "'#}'");
            func_ann = std::move(a);
        }
    }

    Annotation parse_braced_annotation() {
        SourceLoc loc = expect(Tok::LBrace, "'{'").loc;
        Annotation a = parse_annotation_body(loc);
        expect(Tok::RBrace, "'}'");
        return a;
    }

    Annotation parse_annotation_body(SourceLoc loc) {
        Annotation a;
        a.loc = loc;
        a.gamma = parse_gamma(true);
        expect(Tok::Semi, "';'");
        a.q = polynomials::from_expr(*parse_expr(true));
        return a;
    }

    logic::LogicalContext parse_gamma(bool lenient) {
        logic::LogicalContext ctx;
        if (is_keyword("true")) {
            next();
            return ctx;
        }
        while (true) {
            auto lhs = polynomials::from_expr(*parse_expr(lenient));
            const Token& op = next();
            auto rhs = polynomials::from_expr(*parse_expr(lenient));
            logic::Atom atom;
            switch (op.kind) {
            case Tok::Ge: atom = {lhs - rhs, logic::Rel::Ge}; break;
            case Tok::Gt: atom = {lhs - rhs, logic::Rel::Gt}; break;
            case Tok::Le: atom = {rhs - lhs, logic::Rel::Ge}; break;
            case Tok::Lt: atom = {rhs - lhs, logic::Rel::Gt}; break;
            case Tok::EqEq:
            case Tok::Eq: atom = {lhs - rhs, logic::Rel::Eq}; break;
            default: fail(op.loc, "expected a comparison operator, found '" + describe(op) + "'");
            }
            ctx.push_back(std::move(atom));
            if (cur().kind != Tok::Comma) break;
            next();
        }
        return ctx;
    }

    void parse_function(const std::optional<Annotation>& func_ann) {
        SourceLoc loc = next().loc;
        const Token& name = expect(Tok::Ident, "function name");
        if (reserved(name.text)) fail(name.loc, "'" + name.text + "' is a keyword");
        if (prog_.func_index(name.text) >= 0) fail(name.loc, "function '" + name.text + "' defined twice");
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        auto body = parse_block();
        int index = static_cast<int>(prog_.funcs.size());
        prog_.funcs.push_back(Function{name.text, std::move(body), loc});
        if (func_ann) func_anns_.emplace_back(index, *func_ann);
    }

    std::unique_ptr<Stmt> parse_block() {
        SourceLoc loc = expect(Tok::LBrace, "'{'").loc;
        auto s = parse_stmt_list(loc);
        expect(Tok::RBrace, "'}'");
        return s;
    }

    std::unique_ptr<Stmt> parse_stmt_list(SourceLoc loc) {
        std::vector<std::unique_ptr<Stmt>> items;
        while (cur().kind != Tok::RBrace) {
            bool ends_with_block = false;
            items.push_back(parse_stmt(ends_with_block));
            if (cur().kind == Tok::Semi) {
                next();
                continue;
            }
            if (cur().kind == Tok::RBrace) break;
            if (!ends_with_block) fail(cur().loc, "expected ';' or '}', found '" + describe(cur()) + "'");
        }
        if (items.empty()) {
            auto s = std::make_unique<Stmt>();
            s->kind = Stmt::Kind::Skip;
            s->loc = loc;
            return s;
        }
        auto tail = std::move(items.back());
        for (std::size_t k = items.size() - 1; k-- > 0;) {
            auto seq = std::make_unique<Stmt>();
            seq->kind = Stmt::Kind::Seq;
            seq->loc = items[k]->loc;
            seq->s1 = std::move(items[k]);
            seq->s2 = std::move(tail);
            tail = std::move(seq);
        }
        return tail;
    }

    std::unique_ptr<Stmt> parse_stmt(bool& ends_with_block) {
        std::optional<Annotation> ann;
        if (cur().kind == Tok::LAnn) {
            SourceLoc loc = next().loc;
            ann = parse_annotation_body(loc);
            expect(Tok::RAnn, "'#}'");
        }
        auto s = parse_core_stmt(ends_with_block);
        if (ann) pending_.push_back({s.get(), std::move(*ann), s->kind == Stmt::Kind::While});
        return s;
    }

    std::unique_ptr<Stmt> parse_core_stmt(bool& ends_with_block) {
        auto s = std::make_unique<Stmt>();
        const Token& t = cur();
        s->loc = t.loc;
        ends_with_block = false;
        if (t.kind == Tok::LBrace) {
            ends_with_block = true;
            return parse_block();
        }
        if (t.kind != Tok::Ident) fail(t.loc, "expected a statement, found '" + describe(t) + "'");
        if (t.text == "skip") {
            next();
            s->kind = Stmt::Kind::Skip;
        } else if (t.text == "tick") {
            next();
            expect(Tok::LParen, "'('");
            s->kind = Stmt::Kind::Tick;
            s->number = parse_signed_rational();
            s->number_d = s->number.get_d();
            expect(Tok::RParen, "')'");
        } else if (t.text == "call") {
            next();
            const Token& f = expect(Tok::Ident, "function name");
            s->kind = Stmt::Kind::Call;
            calls_.push_back({s.get(), f.text, f.loc});
        } else if (t.text == "while") {
            next();
            s->kind = Stmt::Kind::While;
            expect(Tok::LParen, "'('");
            s->cond = parse_cond();
            expect(Tok::RParen, "')'");
            s->s1 = parse_block();
            ends_with_block = true;
        } else if (t.text == "prob") {
            next();
            s->kind = Stmt::Kind::Prob;
            expect(Tok::LParen, "'('");
            SourceLoc ploc = cur().loc;
            s->number = parse_signed_rational();
            if (s->number < 0 || s->number > 1) fail(ploc, "probability must lie in [0, 1]");
            s->number_d = s->number.get_d();
            expect(Tok::RParen, "')'");
            s->s1 = parse_block();
            expect_keyword("else");
            s->s2 = parse_block();
            ends_with_block = true;
        } else if (t.text == "if") {
            return parse_if(ends_with_block);
        } else {
            const Token& name = next();
            int v = prog_.var_index(name.text);
            if (cur().kind == Tok::Assign) {
                if (v < 0) fail(name.loc, "unbound variable '" + name.text + "'");
                next();
                s->kind = Stmt::Kind::Assign;
                s->var = v;
                s->expr = parse_expr(false);
            } else if (cur().kind == Tok::Tilde) {
                if (v < 0) fail(name.loc, "unbound variable '" + name.text + "'");
                next();
                s->kind = Stmt::Kind::Sample;
                s->var = v;
                s->dist = parse_dist();
            } else {
                fail(cur().loc, "expected ':=' or '~' after '" + name.text + "'");
            }
        }
        return s;
    }

    std::unique_ptr<Stmt> parse_if(bool& ends_with_block) {
        auto s = std::make_unique<Stmt>();
        s->loc = next().loc;
        s->kind = Stmt::Kind::If;
        expect(Tok::LParen, "'('");
        s->cond = parse_cond();
        expect(Tok::RParen, "')'");
        s->s1 = parse_block();
        ends_with_block = true;
        if (is_keyword("else")) {
            next();
            if (is_keyword("if")) {
                bool dummy = false;
                s->s2 = parse_if(dummy);
            } else {
                s->s2 = parse_block();
            }
        } else {
            auto skip = std::make_unique<Stmt>();
            skip->kind = Stmt::Kind::Skip;
            skip->loc = s->loc;
            s->s2 = std::move(skip);
        }
        return s;
    }

    Rational parse_signed_rational() {
        bool neg = false;
        if (cur().kind == Tok::Minus) {
            next();
            neg = true;
        }
        Rational v = parse_ratio_literal();
        return neg ? Rational(-v) : v;
    }

    Rational parse_ratio_literal() {
        const Token& n = expect(Tok::Number, "number");
        Rational v = *parse_rational(n.text);
        if (cur().kind == Tok::Slash && toks_[pos_ + 1].kind == Tok::Number) {
            next();
            const Token& d = next();
            Rational den = *parse_rational(d.text);
            if (den == 0) fail(d.loc, "division by zero");
            v /= den;
        }
        return v;
    }

    Dist parse_dist() {
        const Token& t = expect(Tok::Ident, "distribution");
        expect(Tok::LParen, "'('");
        if (t.text == "uniform") {
            Rational a = parse_signed_rational();
            expect(Tok::Comma, "','");
            Rational b = parse_signed_rational();
            expect(Tok::RParen, "')'");
            if (a >= b) fail(t.loc, "uniform requires a < b");
            return Dist::uniform(a, b);
        }
        if (t.text == "discrete") {
            std::vector<Outcome> outs;
            Rational total = 0;
            while (true) {
                SourceLoc loc = cur().loc;
                Rational v = parse_signed_rational();
                expect(Tok::Colon, "':'");
                Rational p = parse_signed_rational();
                if (p < 0 || p > 1) fail(loc, "probability must lie in [0, 1]");
                total += p;
                outs.push_back({v, p});
                if (cur().kind != Tok::Comma) break;
                next();
            }
            expect(Tok::RParen, "')'");
            if (total != 1) fail(t.loc, "discrete probabilities sum to " + to_string(total) + ", not 1");
            return Dist::discrete(std::move(outs));
        }
        fail(t.loc, "unknown distribution '" + t.text + "'");
    }

    // Expressions. `lenient` admits undeclared identifiers (annotations only).

    std::unique_ptr<Expr> parse_expr(bool lenient) {
        auto e = parse_term(lenient);
        while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
            bool minus = next().kind == Tok::Minus;
            auto r = parse_term(lenient);
            if (minus) r = negate(std::move(r));
            e = Expr::make_add(std::move(e), std::move(r));
        }
        return e;
    }

    static std::unique_ptr<Expr> negate(std::unique_ptr<Expr> e) {
        if (e->kind == Expr::Kind::Const) return Expr::make_const(-e->value);
        return Expr::make_mul(Expr::make_const(Rational(-1)), std::move(e));
    }

    std::unique_ptr<Expr> parse_term(bool lenient) {
        auto e = parse_power(lenient);
        while (cur().kind == Tok::Star || cur().kind == Tok::Slash) {
            const Token& op = next();
            if (op.kind == Tok::Star) {
                e = Expr::make_mul(std::move(e), parse_power(lenient));
            } else {
                if (cur().kind != Tok::Number) fail(cur().loc, "division is only allowed by a number");
                Rational d = parse_ratio_literal();
                if (d == 0) fail(op.loc, "division by zero");
                e = Expr::make_mul(std::move(e), Expr::make_const(Rational(1) / d));
            }
        }
        return e;
    }

    std::unique_ptr<Expr> parse_power(bool lenient) {
        auto base = parse_unary(lenient);
        if (cur().kind != Tok::Caret) return base;
        next();
        const Token& n = expect(Tok::Number, "integer exponent");
        auto k = parse_rational(n.text);
        if (!k || k->get_den() != 1 || *k < 1 || *k > 64) fail(n.loc, "exponent must be an integer in [1, 64]");
        unsigned long times = k->get_num().get_ui();
        auto e = base->clone();
        for (unsigned long i = 1; i < times; ++i) e = Expr::make_mul(std::move(e), base->clone());
        return e;
    }

    std::unique_ptr<Expr> parse_unary(bool lenient) {
        if (cur().kind == Tok::Minus) {
            next();
            return negate(parse_unary(lenient));
        }
        return parse_atom(lenient);
    }

    std::unique_ptr<Expr> parse_atom(bool lenient) {
        const Token& t = cur();
        if (t.kind == Tok::Number) return Expr::make_const(parse_ratio_literal());
        if (t.kind == Tok::LParen) {
            next();
            auto e = parse_expr(lenient);
            expect(Tok::RParen, "')'");
            return e;
        }
        if (t.kind == Tok::Ident && !reserved(t.text)) {
            next();
            int v = prog_.var_index(t.text);
            if (v >= 0) return Expr::make_var(v);
            if (!lenient) fail(t.loc, "unbound variable '" + t.text + "'");
            return Expr::make_var(unbound_index(t));
        }
        fail(t.loc, "expected an expression, found '" + describe(t) + "'");
    }

    int unbound_index(const Token& t) {
        for (std::size_t k = 0; k < unbound_.size(); ++k)
            if (unbound_[k].name == t.text) return static_cast<int>(prog_.vars.size() + k);
        unbound_.push_back({t.text, t.loc});
        return static_cast<int>(prog_.vars.size() + unbound_.size() - 1);
    }

    // Conditions; surface comparisons and connectives lower to true/not/and/<=.

    std::unique_ptr<Cond> parse_cond() {
        auto c = parse_cand();
        while (cur().kind == Tok::OrOr) {
            next();
            auto r = parse_cand();
            c = Cond::make_not(Cond::make_and(Cond::make_not(std::move(c)), Cond::make_not(std::move(r))));
        }
        return c;
    }

    std::unique_ptr<Cond> parse_cand() {
        auto c = parse_cnot();
        while (cur().kind == Tok::AndAnd) {
            next();
            c = Cond::make_and(std::move(c), parse_cnot());
        }
        return c;
    }

    std::unique_ptr<Cond> parse_cnot() {
        if (cur().kind == Tok::Bang) {
            next();
            return Cond::make_not(parse_cnot());
        }
        return parse_catom();
    }

    std::unique_ptr<Cond> parse_catom() {
        if (is_keyword("true")) {
            next();
            return Cond::make_true();
        }
        if (is_keyword("false")) {
            next();
            return Cond::make_not(Cond::make_true());
        }
        std::size_t save = pos_;
        try {
            return parse_comparison();
        } catch (const ParseError&) {
            if (toks_[save].kind != Tok::LParen) throw;
            pos_ = save;
        }
        next();
        auto c = parse_cond();
        expect(Tok::RParen, "')'");
        return c;
    }

    std::unique_ptr<Cond> parse_comparison() {
        auto l = parse_expr(false);
        const Token& op = next();
        auto r = parse_expr(false);
        switch (op.kind) {
        case Tok::Le: return Cond::make_le(std::move(l), std::move(r));
        case Tok::Ge: return Cond::make_le(std::move(r), std::move(l));
        case Tok::Lt: return Cond::make_not(Cond::make_le(std::move(r), std::move(l)));
        case Tok::Gt: return Cond::make_not(Cond::make_le(std::move(l), std::move(r)));
        case Tok::EqEq:
        case Tok::Ne: {
            auto le = Cond::make_le(l->clone(), r->clone());
            auto both = Cond::make_and(std::move(le), Cond::make_le(std::move(r), std::move(l)));
            return op.kind == Tok::EqEq ? std::move(both) : Cond::make_not(std::move(both));
        }
        default: fail(op.loc, "expected a comparison operator, found '" + describe(op) + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string file_;
    Program prog_;
    AnnotationSet ann_;
    std::vector<PendingAnnotation> pending_;
    std::vector<PendingCall> calls_;
    std::vector<PendingSpec> specs_;
    std::vector<std::pair<int, Annotation>> func_anns_;
    std::vector<UnboundName> unbound_;
};

} // namespace

ParseError::ParseError(std::string file, SourceLoc loc, std::string message)
    : std::runtime_error(file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + message),
      file_(std::move(file)), loc_(loc), message_(std::move(message)) {}

ParsedProgram parse(std::string_view source, std::string filename) {
    auto toks = lex(source, filename);
    Parser p(std::move(toks), std::move(filename));
    return p.run();
}

ParsedProgram parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

} // namespace appl
