#include "appl/oracle.hpp"

#include <map>

namespace appl::oracle {

namespace {

using logic::AnnotatedConfig;
using runtime::ExactConfig;

int cmp(const Rational& a, const Rational& b) { return ::cmp(a, b); }

int cmp(const void* a, const void* b) { return std::less<const void*>{}(a, b) ? -1 : (a == b ? 0 : 1); }

int cmp(const ExactConfig& a, const ExactConfig& b) {
    if (int c = cmp(a.stmt, b.stmt)) return c;
    if (a.cont.size() != b.cont.size()) return a.cont.size() < b.cont.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.cont.size(); ++i) {
        if (a.cont[i].kind != b.cont[i].kind) return a.cont[i].kind < b.cont[i].kind ? -1 : 1;
        if (int c = cmp(a.cont[i].stmt, b.cont[i].stmt)) return c;
    }
    for (std::size_t i = 0; i < a.vals.size(); ++i)
        if (int c = cmp(a.vals[i], b.vals[i])) return c;
    return cmp(a.cost, b.cost);
}

int cmp(const logic::BasicTag<Rational>& a, const logic::BasicTag<Rational>& b) {
    if (a.ctx != b.ctx) return a.ctx < b.ctx ? -1 : 1;
    if (int c = cmp(a.ann, b.ann)) return c;
    return cmp(a.shift, b.shift);
}

struct ConfigLess {
    bool operator()(const ExactConfig& a, const ExactConfig& b) const { return cmp(a, b) < 0; }
};

struct AnnotatedLess {
    bool operator()(const AnnotatedConfig<Rational>& a, const AnnotatedConfig<Rational>& b) const {
        if (int c = cmp(a.cfg, b.cfg)) return c < 0;
        if (int c = cmp(a.tags.cur, b.tags.cur)) return c < 0;
        for (std::size_t i = 0; i < a.tags.frames.size(); ++i)
            if (int c = cmp(a.tags.frames[i], b.tags.frames[i])) return c < 0;
        return false;
    }
};

bool has_uniform(const Stmt& s) {
    if (s.kind == Stmt::Kind::Sample && s.dist.kind == Dist::Kind::Uniform) return true;
    return (s.s1 && has_uniform(*s.s1)) || (s.s2 && has_uniform(*s.s2));
}

void reject_continuous(const Program& p) {
    for (const auto& f : p.funcs)
        if (has_uniform(*f.body))
            throw OracleError(OracleError::Kind::Continuous,
                              "function '" + f.name + "' samples from a continuous distribution");
}

void check_budget(std::size_t n, const OracleOptions& opts) {
    if (n > opts.node_budget)
        throw OracleError(OracleError::Kind::Budget,
                          "reachable configurations exceed the node budget of " + std::to_string(opts.node_budget));
}

} // namespace

ExactResult exact_run(const Program& p, std::uint64_t horizon, std::span<const Rational> init,
                      const OracleOptions& opts) {
    reject_continuous(p);
    ExactResult r;
    r.horizon = horizon;
    std::map<ExactConfig, Rational, ConfigLess> frontier;
    frontier.emplace(runtime::initial_config<Rational>(p, init), Rational(1));
    for (std::uint64_t n = 0;; ++n) {
        std::map<ExactConfig, Rational, ConfigLess> next;
        for (auto& [cfg, mass] : frontier) {
            if (cfg.terminal()) {
                r.terminated += mass;
                r.expected_cost += mass * cfg.cost;
                r.expected_time += mass * Rational(static_cast<unsigned long>(n));
                continue;
            }
            if (n == horizon) {
                r.alive += mass;
                r.expected_cost += mass * cfg.cost;
                continue;
            }
            for (auto& [w, succ] : runtime::step(p, cfg).expand()) {
                if (w == 0) continue;
                auto [it, fresh] = next.try_emplace(std::move(succ), 0);
                it->second += mass * w;
            }
        }
        if (n == horizon || next.empty()) break;
        check_budget(next.size(), opts);
        r.peak_nodes = std::max(r.peak_nodes, next.size());
        frontier = std::move(next);
    }
    return r;
}

Rational exact_one_step_expectation(const logic::AnnotatedKernel& k, const AnnotatedConfig<Rational>& c) {
    Rational e;
    try {
        for (const auto& [w, succ] : k.step(c)) e += w * (succ.cfg.cost - c.cfg.cost + k.potential(succ));
    } catch (const std::domain_error& err) {
        throw OracleError(OracleError::Kind::Continuous, err.what());
    }
    return e;
}

ReachableCheck check_reachable(const logic::AnnotatedKernel& k, std::span<const Rational> init, int depth,
                               const OracleOptions& opts) {
    reject_continuous(k.program());
    ReachableCheck out;
    std::map<AnnotatedConfig<Rational>, char, AnnotatedLess> seen;
    std::vector<AnnotatedConfig<Rational>> layer{k.initial(runtime::initial_config<Rational>(k.program(), init))};
    layer.back().cfg.cost = 0;
    seen.emplace(layer.back(), 0);
    for (int d = 0; d <= depth && !layer.empty(); ++d) {
        std::vector<AnnotatedConfig<Rational>> next;
        for (const auto& c : layer) {
            ++out.configs;
            Rational phi = k.potential(c);
            if (!k.in_context(c)) ++out.context_violations;
            auto succ = k.step(c);
            Rational e;
            for (const auto& [w, s] : succ) e += w * (s.cfg.cost - c.cfg.cost + k.potential(s));
            if (e > phi) {
                ++out.violations;
                if (out.first.size() < 16) {
                    const auto& t = c.tags.cur;
                    out.first.push_back({t.ctx, c.cfg.stmt->id, c.cfg.stmt->loc, phi, e});
                }
            }
            if (d == depth) continue;
            for (auto& [w, s] : succ) {
                if (w == 0) continue;
                s.cfg.cost = 0;  // cost does not affect the inequality
                if (seen.emplace(s, 0).second) next.push_back(std::move(s));
            }
        }
        if (seen.size() > opts.node_budget) {
            out.truncated = true;
            break;
        }
        layer = std::move(next);
    }
    return out;
}

} // namespace appl::oracle
