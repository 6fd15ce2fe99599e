#pragma once

// Abstract syntax of APPL programs: expressions, conditions, distributions
// and statements. Nodes are owned by their parent through unique_ptr; a
// Program owns the roots and outlives every configuration that points into it.

#include "appl/rational.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace appl {

struct SourceLoc {
    int line = 0;
    int col = 0;
};

struct Expr {
    enum class Kind { Var, Const, Add, Mul };

    Kind kind = Kind::Const;
    int var = -1;
    Rational value;
    double value_d = 0.0;
    std::unique_ptr<Expr> lhs;
    std::unique_ptr<Expr> rhs;

    static std::unique_ptr<Expr> make_var(int v);
    static std::unique_ptr<Expr> make_const(const Rational& c);
    static std::unique_ptr<Expr> make_add(std::unique_ptr<Expr> a, std::unique_ptr<Expr> b);
    static std::unique_ptr<Expr> make_mul(std::unique_ptr<Expr> a, std::unique_ptr<Expr> b);

    std::unique_ptr<Expr> clone() const;
};

bool equal(const Expr& a, const Expr& b);

struct Cond {
    enum class Kind { True, Not, And, Le };

    Kind kind = Kind::True;
    std::unique_ptr<Cond> a;
    std::unique_ptr<Cond> b;
    std::unique_ptr<Expr> e1;
    std::unique_ptr<Expr> e2;

    static std::unique_ptr<Cond> make_true();
    static std::unique_ptr<Cond> make_not(std::unique_ptr<Cond> c);
    static std::unique_ptr<Cond> make_and(std::unique_ptr<Cond> l, std::unique_ptr<Cond> r);
    static std::unique_ptr<Cond> make_le(std::unique_ptr<Expr> l, std::unique_ptr<Expr> r);

    std::unique_ptr<Cond> clone() const;
};

bool equal(const Cond& a, const Cond& b);

struct Outcome {
    Rational value;
    Rational prob;
};

struct Dist {
    enum class Kind { Uniform, Discrete };

    Kind kind = Kind::Uniform;
    Rational lo;  // Uniform
    Rational hi;  // Uniform
    std::vector<Outcome> outcomes;  // Discrete

    // binary64 shadows used by the sampler
    double lo_d = 0.0;
    double hi_d = 0.0;
    std::vector<double> values_d;
    std::vector<double> cdf_d;

    static Dist uniform(const Rational& a, const Rational& b);
    static Dist discrete(std::vector<Outcome> outcomes);

    /// Smallest and largest point of the support.
    Rational support_min() const;
    Rational support_max() const;
};

bool equal(const Dist& a, const Dist& b);

struct Stmt {
    enum class Kind { Skip, Tick, Assign, Sample, Call, While, Prob, If, Seq };

    Kind kind = Kind::Skip;
    int id = -1;  // pre-order site number; -1 for the synthetic skip
    SourceLoc loc;

    Rational number;  // Tick cost or Prob probability
    double number_d = 0.0;
    int var = -1;     // Assign / Sample target
    int callee = -1;  // Call target function index
    std::unique_ptr<Expr> expr;
    Dist dist;
    std::unique_ptr<Cond> cond;
    std::unique_ptr<Stmt> s1;  // While body, branch 1, Seq head
    std::unique_ptr<Stmt> s2;  // branch 2, Seq tail
};

bool equal(const Stmt& a, const Stmt& b);

/// The skip statement that configurations carry after a primitive step.
const Stmt* synthetic_skip();

inline bool is_skip(const Stmt* s) { return s->kind == Stmt::Kind::Skip; }

} // namespace appl
