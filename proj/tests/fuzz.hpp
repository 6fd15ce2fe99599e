#pragma once

// Random walks over the step kernel from random starting valuations; every
// visited configuration is checked against the kernel laws.

#include "appl/runtime.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace appl::test {

struct KernelFuzz {
    std::size_t configs = 0;
    std::size_t finite_probabilistic = 0;
    std::size_t pushforward = 0;
    std::size_t weight_failures = 0;
    std::size_t dirac_failures = 0;
    std::size_t cost_failures = 0;
    std::size_t stutter_failures = 0;
    double max_weight_error = 0;
};

inline bool same_config(const runtime::Config& a, const runtime::Config& b) {
    return a.vals == b.vals && a.stmt == b.stmt && a.cont == b.cont && a.cost == b.cost;
}

inline void check_weights(KernelFuzz& out, const std::vector<double>& ws) {
    double sum = 0;
    bool in_range = true;
    for (double w : ws) {
        sum += w;
        in_range = in_range && w >= 0 && w <= 1;
    }
    double err = std::abs(sum - 1);
    out.max_weight_error = std::max(out.max_weight_error, err);
    if (err > 1e-12 || !in_range) ++out.weight_failures;
}

inline KernelFuzz fuzz_kernel(const std::vector<const Program*>& programs, std::size_t n, std::uint64_t seed,
                              std::uint64_t max_walk = 300) {
    using runtime::Config;
    KernelFuzz out;
    runtime::Rng rng(seed, 0);
    std::size_t walk = 0;
    while (out.configs < n) {
        const Program& p = *programs[walk % programs.size()];
        ++walk;
        std::vector<double> init(p.num_vars());
        for (double& v : init) v = static_cast<double>(static_cast<int>(rng.bits() % 21) - 5);
        Config c = runtime::initial_config<double>(p, init);
        for (std::uint64_t k = 0; k < max_walk && out.configs < n; ++k) {
            ++out.configs;
            const Stmt& s = *c.stmt;
            auto d = runtime::step(p, c);
            double tick = s.kind == Stmt::Kind::Tick ? s.number_d : 0.0;
            if (s.kind == Stmt::Kind::Sample) {
                if (d.is_finite()) ++out.dirac_failures;
                ++out.pushforward;
                if (s.dist.kind == Dist::Kind::Discrete) {
                    std::vector<double> ws;
                    for (const auto& [w, next] : d.expand()) {
                        ws.push_back(w);
                        if (next.cost != c.cost) ++out.cost_failures;
                    }
                    check_weights(out, ws);
                } else {
                    double r = sample(rng, s.dist);
                    Config next = d.build(r);
                    if (next.vals[static_cast<std::size_t>(s.var)] != r || next.cost != c.cost) ++out.cost_failures;
                }
            } else if (s.kind == Stmt::Kind::Prob) {
                ++out.finite_probabilistic;
                std::vector<double> ws;
                for (const auto& [w, next] : d.finite) {
                    ws.push_back(w);
                    if (next.cost != c.cost) ++out.cost_failures;
                }
                check_weights(out, ws);
            } else {
                if (!d.is_finite() || d.finite.size() != 1 || d.finite[0].first != 1.0) {
                    ++out.dirac_failures;
                } else {
                    if (d.finite[0].second.cost != c.cost + tick) ++out.cost_failures;
                    if (c.terminal() && !same_config(d.finite[0].second, c)) ++out.stutter_failures;
                }
            }
            if (c.terminal()) break;
            runtime::sample_step(rng, p, c);
        }
    }
    return out;
}

} // namespace appl::test
