#pragma once

// Annotated configurations <Γ, Q, γ, S, K, α>: the runtime kernel with the
// checker's derivation threaded through every step. Erasing the tags gives
// back runtime::step exactly.

#include "appl/checker.hpp"
#include "appl/runtime.hpp"

#include <unordered_map>
#include <utility>
#include <vector>

namespace appl::logic {

/// Which annotation a configuration (or a continuation frame) carries.
/// `shift` is the sum of call frames between main and the current function;
/// a null annotation marks a termination configuration, whose potential is 0.
template <class Num>
struct BasicTag {
    int ctx = -1;
    Num shift = 0;
    const Annotation* ann = nullptr;

    bool terminal() const { return ann == nullptr; }
};

template <class Num>
struct TagStack {
    BasicTag<Num> cur;
    std::vector<BasicTag<Num>> frames;  // parallel to the continuation
};

template <class Num>
struct AnnotatedConfig {
    runtime::BasicConfig<Num> cfg;
    TagStack<Num> tags;
};

/// What retagging needs to know about the configuration before a step.
struct StepOrigin {
    const Stmt* stmt = nullptr;
    runtime::Frame top{runtime::Frame::Kind::Seq, nullptr};
    std::size_t depth = 0;
};

template <class Num>
StepOrigin origin_of(const runtime::BasicConfig<Num>& c) {
    StepOrigin o;
    o.stmt = c.stmt;
    o.depth = c.cont.size();
    if (!c.cont.empty()) o.top = c.cont.back();
    return o;
}

class AnnotatedKernel {
  public:
    /// `r` must come from check_program on (p, ann) and outlive the kernel.
    /// A rejected derivation is still threaded (marks win), which is how
    /// violations are located empirically.
    AnnotatedKernel(const Program& p, const AnnotationSet& ann, const CheckResult& r);

    template <class Num>
    AnnotatedConfig<Num> initial(runtime::BasicConfig<Num> cfg) const;

    /// Updates `tags` for the step from `from` to `next`.
    template <class Num>
    void retag(const StepOrigin& from, TagStack<Num>& tags, const runtime::BasicConfig<Num>& next) const;

    /// Annotated successors with their weights; discrete samples are
    /// expanded, uniform ones throw std::domain_error.
    template <class Num>
    std::vector<std::pair<Num, AnnotatedConfig<Num>>> step(const AnnotatedConfig<Num>& c) const;

    /// Q(γ) + shift, or 0 at termination.
    double potential(const AnnotatedConfig<double>& c) const;
    Rational potential(const AnnotatedConfig<Rational>& c) const;

    /// Γ of the carried annotation holds at γ (termination: true).
    bool in_context(const AnnotatedConfig<double>& c) const;
    bool in_context(const AnnotatedConfig<Rational>& c) const;

    const Program& program() const { return p_; }
    const CheckResult& result() const { return r_; }

  private:
    struct FastPoly {
        std::vector<double> coeff;
        std::vector<std::vector<std::pair<int, int>>> powers;
        double eval(std::span<const double> x) const;
    };

    const Annotation* pre_of(int ctx, const Stmt& s) const;
    const Annotation* post_of(int ctx, const Stmt& s) const;
    const Annotation* exit_of(int ctx, const Stmt& s) const;
    const Annotation* invariant_of(const Stmt& s) const;
    const FastPoly& fast(const Annotation* a) const;

    const Program& p_;
    const AnnotationSet& ann_;
    const CheckResult& r_;
    std::unordered_map<const Annotation*, FastPoly> fast_;
};

} // namespace appl::logic
