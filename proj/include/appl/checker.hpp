#pragma once

// Rule-directed checking of potential annotations.
//
// Each derivation context (the main body, or one function body under one of
// its specifications) is derived in two passes: logical contexts flow forward
// from the pre-condition, potentials are synthesized backward from the
// post-condition. Weakening happens only at loops, calls, conditionals,
// function boundaries and user marks, and every weakening is an entailment
// query.

#include "appl/entail.hpp"
#include "appl/program.hpp"

#include <span>
#include <string>
#include <vector>

namespace appl::logic {

struct NodeAnn {
    Annotation pre;        // carried by a configuration about to run the statement
    Annotation post;       // carried right after it
    Annotation synth_pre;  // synthesized pre-annotation before any mark
    Annotation exit;       // While: carried after the guard fails
    int callee_ctx = -1;   // Call: derivation context of the chosen spec
    int spec_index = -1;   // Call: chosen spec of the callee
    Rational frame;        // Call: constant frame around the spec
    bool visited = false;
};

struct DerivationContext {
    int func = -1;
    int spec = -1;  // -1 for the main derivation or a free-standing triple
    Annotation pre;
    Annotation post;
    std::vector<NodeAnn> nodes;  // by site id; only the function's own sites are visited

    const NodeAnn& node(int site) const { return nodes.at(static_cast<std::size_t>(site)); }
};

struct Derivation {
    std::vector<DerivationContext> contexts;
    int main_ctx = -1;

    int context_of(int func, int spec) const;
};

enum class Verdict { Accepted, Rejected, Unknown };

const char* to_string(Verdict v);

struct LogEntry {
    std::string rule;
    int ctx = -1;
    int site = -1;
    SourceLoc loc;
    LogicalContext gamma;
    polynomials::Poly q_pre;
    polynomials::Poly q_post;
    std::string note;
};

struct Issue {
    Verdict kind = Verdict::Rejected;
    int ctx = -1;
    int site = -1;
    SourceLoc loc;
    std::string reason;
    EntailVerdict entail;
};

struct CheckResult {
    Verdict verdict = Verdict::Accepted;
    int site = -1;
    SourceLoc loc;
    std::string reason;
    std::vector<Issue> issues;
    std::vector<LogEntry> log;
    Derivation derivation;

    bool accepted() const { return verdict == Verdict::Accepted; }
};

struct CheckOptions {
    EntailOptions entail;
};

struct Triple {
    Annotation pre;
    const Stmt* stmt = nullptr;
    Annotation post;
};

/// Checks every function specification against its body, assuming all
/// specifications at calls (including recursive ones).
CheckResult check_context(const Program& p, const AnnotationSet& ann, const CheckOptions& opts = {});

/// Checks one triple under the specifications in `ann`.
CheckResult check_triple(const Program& p, const AnnotationSet& ann, const Triple& t,
                         const CheckOptions& opts = {});

/// Specifications plus the main body from the precondition to {true; 0}.
/// The derivation holds the main context and one context per specification;
/// it is what the annotated kernel consumes.
CheckResult check_program(const Program& p, const AnnotationSet& ann, const CheckOptions& opts = {});

/// Pre-annotation of main (declared or synthesized) after check_program.
const Annotation& main_pre(const CheckResult& r);

/// Q of main's pre-annotation at a valuation.
Rational bound_at(const CheckResult& r, std::span<const Rational> init);

/// The triples a checked program consists of: one per specification, then main.
std::vector<Triple> program_triples(const Program& p, const AnnotationSet& ann, const CheckResult& r);

/// Shifts a triple and every loop invariant or mark inside its statement by c.
Triple relax(const Triple& t, const Rational& c);
AnnotationSet relax(const AnnotationSet& ann, const Stmt& body, const Rational& c);

/// Max total degree of every potential in a derivation.
int derivation_degree(const Derivation& d);

} // namespace appl::logic
