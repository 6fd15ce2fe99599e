#pragma once

// Exact-rational multivariate polynomials over program variables.
//
// A Poly is a sparse map from monomials to nonzero rational coefficients,
// kept in graded-lexicographic order, so two polynomials are equal exactly
// when their term maps are identical. Variables are indices into the
// program's declared variable list.

#include "appl/ast.hpp"
#include "appl/rational.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace appl::polynomials {

class Monomial {
  public:
    Monomial() = default;
    static Monomial var(int v, int exponent = 1);

    /// (variable, exponent) pairs sorted by variable; exponents are >= 1.
    const std::vector<std::pair<int, int>>& powers() const { return powers_; }

    int degree() const;
    int exponent(int v) const;
    bool is_one() const { return powers_.empty(); }
    Monomial without(int v) const;

    friend Monomial operator*(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) = default;

  private:
    std::vector<std::pair<int, int>> powers_;
};

struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

class Poly {
  public:
    using Terms = std::map<Monomial, Rational, GradedLex>;

    Poly() = default;
    Poly(const Rational& c);  // NOLINT: constants convert implicitly
    Poly(int c) : Poly(Rational(c)) {}  // NOLINT
    static Poly var(int v);
    static Poly term(const Monomial& m, const Rational& c);

    const Terms& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_term() const;
    Rational coefficient(const Monomial& m) const;
    int degree() const;
    int degree_in(int v) const;
    bool mentions(int v) const;
    std::vector<int> variables() const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Rational& c);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
    friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
    friend Poly operator-(Poly a) { return a *= Rational(-1); }
    friend bool operator==(const Poly& a, const Poly& b) = default;

    Poly pow(unsigned k) const;

    Rational eval(std::span<const Rational> point) const;
    /// Exact evaluation at a binary64 point, rounded once at the end.
    double eval(std::span<const double> point) const;

    /// Text with `*` and `^`, terms in descending graded-lex order.
    std::string to_string(std::span<const std::string> names) const;

  private:
    void add_term(const Monomial& m, const Rational& c);

    Terms terms_;
};

Poly from_expr(const Expr& e);

/// [e/x]q, expanded and re-canonicalized.
Poly substitute(const Poly& q, int x, const Poly& e);
Poly substitute(const Poly& q, int x, const Expr& e);

/// Raw moments m_0..m_k of a distribution, m_i = E[X^i].
struct MomentTable {
    Dist dist;
    std::vector<Rational> moments;

    int max_order() const { return static_cast<int>(moments.size()) - 1; }
};

MomentTable moments(const Dist& d, int k);

/// E_{x ~ D}[q]: each monomial c x^i M becomes c m_i M.
/// Throws std::out_of_range when the table lacks an order that q needs.
Poly expectation(const Poly& q, int x, const MomentTable& table);

/// p*q1 + (1-p)*q2.
Poly affine(const Rational& p, const Poly& q1, const Poly& q2);
Poly add_const(const Poly& q, const Rational& c);

} // namespace appl::polynomials
