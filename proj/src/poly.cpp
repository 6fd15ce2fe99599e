#include "appl/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace appl::polynomials {

Monomial Monomial::var(int v, int exponent) {
    Monomial m;
    if (exponent > 0) m.powers_.emplace_back(v, exponent);
    return m;
}

int Monomial::degree() const {
    int d = 0;
    for (const auto& [v, e] : powers_) d += e;
    return d;
}

int Monomial::exponent(int v) const {
    for (const auto& [w, e] : powers_)
        if (w == v) return e;
    return 0;
}

Monomial Monomial::without(int v) const {
    Monomial m;
    for (const auto& p : powers_)
        if (p.first != v) m.powers_.push_back(p);
    return m;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    auto i = a.powers_.begin();
    auto j = b.powers_.begin();
    while (i != a.powers_.end() || j != b.powers_.end()) {
        if (j == b.powers_.end() || (i != a.powers_.end() && i->first < j->first)) {
            m.powers_.push_back(*i++);
        } else if (i == a.powers_.end() || j->first < i->first) {
            m.powers_.push_back(*j++);
        } else {
            m.powers_.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    return m;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree();
    int db = b.degree();
    if (da != db) return da < db;
    // Same degree: the monomial with the larger exponent on the smallest
    // variable index sorts later.
    const auto& pa = a.powers();
    const auto& pb = b.powers();
    std::size_t n = std::min(pa.size(), pb.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (pa[k].first != pb[k].first) return pa[k].first > pb[k].first;
        if (pa[k].second != pb[k].second) return pa[k].second < pb[k].second;
    }
    return pa.size() > pb.size();
}

Poly::Poly(const Rational& c) {
    if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::var(int v) { return term(Monomial::var(v), Rational(1)); }

Poly Poly::term(const Monomial& m, const Rational& c) {
    Poly p;
    p.add_term(m, c);
    return p;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Poly::constant_term() const { return coefficient(Monomial{}); }

Rational Poly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

int Poly::degree_in(int v) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(v));
    return d;
}

bool Poly::mentions(int v) const { return degree_in(v) > 0; }

std::vector<int> Poly::variables() const {
    std::vector<int> vs;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m.powers()) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

Poly& Poly::operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Poly& Poly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, coef] : terms_) coef *= c;
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
}

Poly Poly::pow(unsigned k) const {
    Poly result(Rational(1));
    Poly base = *this;
    while (k > 0) {
        if (k & 1U) result = result * base;
        k >>= 1U;
        if (k > 0) base = base * base;
    }
    return result;
}

Rational Poly::eval(std::span<const Rational> point) const {
    Rational sum = 0;
    Rational prod;
    mpq_class pw;
    for (const auto& [m, c] : terms_) {
        prod = c;
        for (const auto& [v, e] : m.powers()) {
            if (v < 0 || static_cast<std::size_t>(v) >= point.size()) {
                prod = 0;  // absent variables read as zero
                break;
            }
            mpz_class num, den;
            mpz_pow_ui(num.get_mpz_t(), point[v].get_num_mpz_t(), static_cast<unsigned long>(e));
            mpz_pow_ui(den.get_mpz_t(), point[v].get_den_mpz_t(), static_cast<unsigned long>(e));
            pw = mpq_class(num, den);
            prod *= pw;
        }
        sum += prod;
    }
    return sum;
}

double Poly::eval(std::span<const double> point) const {
    std::vector<Rational> exact;
    exact.reserve(point.size());
    for (double v : point) exact.push_back(from_double(v));
    return eval(std::span<const Rational>(exact)).get_d();
}

std::string Poly::to_string(std::span<const std::string> names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool unit = mag == 1 && !m.is_one();
        if (!unit) os << appl::to_string(mag);
        bool sep = !unit;
        for (const auto& [v, e] : m.powers()) {
            if (sep) os << "*";
            sep = true;
            if (v >= 0 && static_cast<std::size_t>(v) < names.size())
                os << names[v];
            else
                os << "v" << v;
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

Poly from_expr(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Var: return Poly::var(e.var);
    case Expr::Kind::Const: return Poly(e.value);
    case Expr::Kind::Add: return from_expr(*e.lhs) + from_expr(*e.rhs);
    case Expr::Kind::Mul: return from_expr(*e.lhs) * from_expr(*e.rhs);
    }
    return Poly{};
}

Poly substitute(const Poly& q, int x, const Poly& e) {
    int deg = q.degree_in(x);
    if (deg == 0) return q;
    std::vector<Poly> powers{Poly(Rational(1))};
    for (int i = 1; i <= deg; ++i) powers.push_back(powers.back() * e);
    Poly out;
    for (const auto& [m, c] : q.terms()) {
        int k = m.exponent(x);
        out += Poly::term(m.without(x), c) * powers[static_cast<std::size_t>(k)];
    }
    return out;
}

Poly substitute(const Poly& q, int x, const Expr& e) { return substitute(q, x, from_expr(e)); }

MomentTable moments(const Dist& d, int k) {
    if (k < 0) throw std::invalid_argument("moment order must be nonnegative");
    MomentTable t{d, {}};
    t.moments.reserve(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        Rational m = 0;
        if (d.kind == Dist::Kind::Uniform) {
            mpq_class bp = 1, ap = 1;
            for (int j = 0; j <= i; ++j) {
                bp *= d.hi;
                ap *= d.lo;
            }
            m = (bp - ap) / (Rational(i + 1) * (d.hi - d.lo));
        } else {
            for (const auto& o : d.outcomes) {
                mpq_class vp = 1;
                for (int j = 0; j < i; ++j) vp *= o.value;
                m += o.prob * vp;
            }
        }
        m.canonicalize();
        t.moments.push_back(m);
    }
    return t;
}

Poly expectation(const Poly& q, int x, const MomentTable& table) {
    Poly out;
    for (const auto& [m, c] : q.terms()) {
        int k = m.exponent(x);
        if (k > table.max_order())
            throw std::out_of_range("moment table lacks order " + std::to_string(k));
        out += Poly::term(m.without(x), c * table.moments[static_cast<std::size_t>(k)]);
    }
    return out;
}

Poly affine(const Rational& p, const Poly& q1, const Poly& q2) {
    return q1 * p + q2 * (Rational(1) - p);
}

Poly add_const(const Poly& q, const Rational& c) { return q + Poly(c); }

} // namespace appl::polynomials
