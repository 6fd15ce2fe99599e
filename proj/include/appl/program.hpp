#pragma once

// Parsed APPL programs and their potential annotations.

#include "appl/ast.hpp"
#include "appl/context.hpp"
#include "appl/poly.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace appl {

struct Annotation {
    logic::LogicalContext gamma;
    polynomials::Poly q;
    SourceLoc loc;
};

bool equal(const Annotation& a, const Annotation& b);

struct FunctionSpec {
    Annotation pre;
    Annotation post;
    SourceLoc loc;
};

struct UnboundName {
    std::string name;
    SourceLoc loc;
};

struct AnnotationSet {
    std::vector<std::vector<FunctionSpec>> specs;  // indexed by function
    std::map<int, Annotation> loop_invariants;     // While site -> invariant
    std::map<int, Annotation> weaken_sites;        // any other site -> mark
    std::optional<Annotation> main_pre;
    std::optional<std::uint64_t> step_bound;

    /// Identifiers used in annotations that are not program variables. They
    /// get indices after the program variables so annotations stay
    /// representable; validate() reports them.
    std::vector<UnboundName> unbound;
};

bool equal(const AnnotationSet& a, const AnnotationSet& b);

struct Function {
    std::string name;
    std::unique_ptr<Stmt> body;
    SourceLoc loc;
};

struct Program {
    std::string source_name = "<input>";
    std::vector<std::string> vars;
    std::vector<Function> funcs;
    int main = -1;
    logic::LogicalContext precondition;

    /// Every statement node, indexed by its site id.
    std::vector<const Stmt*> sites;

    int var_index(std::string_view name) const;
    int func_index(std::string_view name) const;
    const Stmt& site(int id) const { return *sites.at(static_cast<std::size_t>(id)); }
    const Stmt& body(int f) const { return *funcs.at(static_cast<std::size_t>(f)).body; }
    std::size_t num_vars() const { return vars.size(); }
};

/// Names for printing: program variables followed by unbound annotation names.
std::vector<std::string> display_names(const Program& p, const AnnotationSet& ann);

bool equal(const Program& a, const Program& b);

struct ParsedProgram {
    Program program;
    AnnotationSet annotations;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::string file, SourceLoc loc, std::string message);

    const std::string& file() const { return file_; }
    SourceLoc loc() const { return loc_; }
    const std::string& message() const { return message_; }

  private:
    std::string file_;
    SourceLoc loc_;
    std::string message_;
};

ParsedProgram parse(std::string_view source, std::string filename = "<input>");
ParsedProgram parse_file(const std::string& path);

struct Diagnostic {
    std::string kind;  // "missing-invariant", "unbound", ...
    int site = -1;
    SourceLoc loc;
    std::string message;

    std::string render(const std::string& file) const;
};

std::vector<Diagnostic> validate(const Program& p, const AnnotationSet& ann,
                                 bool require_invariants = true);

/// Source text that parses back to the same program and annotations.
std::string print(const Program& p, const AnnotationSet& ann);
std::string print(const Program& p);

std::string print_expr(const Expr& e, const std::vector<std::string>& names);
std::string print_cond(const Cond& c, const std::vector<std::string>& names);

/// Renumbers sites in pre-order over functions and fills Program::sites.
void number_sites(Program& p);

/// True iff some function is reachable from itself through calls.
bool has_recursion(const Program& p);
bool has_loops(const Program& p);

} // namespace appl
