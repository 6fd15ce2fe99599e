#include "appl/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace appl::simulate {

namespace {

using runtime::Config;
using runtime::Rng;

struct TraceOut {
    double cost = 0;
    std::uint64_t steps = 0;  // T when terminated, H otherwise
    bool terminated = false;
    bool monotone = true;
    double max_update = 0;
};

TraceOut run_one(const Program& p, const Config& start, std::uint64_t horizon, std::uint64_t seed, std::size_t i) {
    Rng rng(seed, i);
    Config c = start;
    TraceOut out;
    std::uint64_t n = 0;
    while (!c.terminal() && n < horizon) {
        const Stmt& s = *c.stmt;
        double before = c.cost;
        if (s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::Sample) {
            auto v = static_cast<std::size_t>(s.var);
            double old = c.vals[v];
            runtime::sample_step(rng, p, c);
            out.max_update = std::max(out.max_update, std::abs(c.vals[v] - old));
        } else {
            runtime::sample_step(rng, p, c);
        }
        if (c.cost < before) out.monotone = false;
        ++n;
    }
    out.cost = c.cost;
    out.steps = n;
    out.terminated = c.terminal();
    return out;
}

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

Config start_config(const Program& p, const std::vector<double>& init) {
    return runtime::initial_config<double>(p, std::span<const double>(init));
}

TraceStats aggregate(const std::vector<TraceOut>& traces, const SimOptions& opts) {
    TraceStats s;
    s.n_traces = traces.size();
    s.seed = opts.seed;
    s.horizon = opts.horizon;
    s.time_moments.assign(static_cast<std::size_t>(std::max(opts.moments, 0)), 0.0);
    double sum = 0, censored_sum = 0;
    std::vector<std::uint64_t> survive;  // T, or H + 1 when censored
    survive.reserve(traces.size());
    for (const auto& t : traces) {
        sum += t.cost;
        if (t.terminated)
            ++s.terminated;
        else {
            ++s.censored;
            censored_sum += t.cost;
        }
        s.max_update = std::max(s.max_update, t.max_update);
        s.cost_monotone = s.cost_monotone && t.monotone;
        double tk = 1;
        for (auto& m : s.time_moments) {
            tk *= static_cast<double>(t.steps);
            m += tk;
        }
        survive.push_back(t.terminated ? t.steps : opts.horizon + 1);
    }
    if (traces.empty()) return s;
    double n = static_cast<double>(traces.size());
    s.mean_cost = sum / n;
    double ss = 0;
    for (const auto& t : traces) ss += (t.cost - s.mean_cost) * (t.cost - s.mean_cost);
    s.sd_cost = traces.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    s.ci95 = 1.96 * s.sd_cost / std::sqrt(n);
    s.termination_fraction = static_cast<double>(s.terminated) / n;
    s.censored_fraction = static_cast<double>(s.censored) / n;
    s.mean_censored_cost = s.censored ? censored_sum / static_cast<double>(s.censored) : 0.0;
    for (auto& m : s.time_moments) m /= n;
    std::sort(survive.begin(), survive.end());
    for (std::uint64_t g : tail_grid(opts.horizon)) {
        auto count = static_cast<std::size_t>(survive.end() - std::upper_bound(survive.begin(), survive.end(), g));
        s.tail_curve.push_back({g, static_cast<double>(count) / n, count});
    }
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

struct Fit {
    double slope = 0;
    double r2 = 0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = mean_of(x), my = mean_of(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit f;
    if (sxx == 0) return f;
    f.slope = sxy / sxx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

void require_checked(const logic::AnnotatedKernel& k, bool unchecked) {
    if (!unchecked && !k.result().accepted())
        throw std::invalid_argument("annotations were not accepted by the checker: " + k.result().reason);
}

} // namespace

std::vector<std::uint64_t> tail_grid(std::uint64_t h) {
    std::vector<std::uint64_t> g;
    double x = 0;
    std::uint64_t last = 0;
    g.push_back(0);
    while (true) {
        x = x < 16 ? x + 1 : x * std::pow(2.0, 1.0 / 16.0);
        auto v = static_cast<std::uint64_t>(std::floor(x));
        if (v > h) break;
        if (v != last) g.push_back(v);
        last = v;
    }
    if (g.back() != h) g.push_back(h);
    return g;
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t h) {
    std::vector<std::uint64_t> c{0};
    for (std::uint64_t n = 1; n <= h; n *= 2) c.push_back(n);
    return c;
}

TraceStats run_traces(const Program& p, const SimOptions& opts) {
    const Config start = start_config(p, opts.init);
    std::vector<TraceOut> out(opts.traces);
    const auto n = static_cast<std::int64_t>(opts.traces);
#pragma omp parallel for schedule(dynamic, 256) num_threads(thread_count(opts.threads))
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = run_one(p, start, opts.horizon, opts.seed, static_cast<std::size_t>(i));
    return aggregate(out, opts);
}

TraceStats run_traces_serial(const Program& p, const SimOptions& opts) {
    const Config start = start_config(p, opts.init);
    std::vector<TraceOut> out(opts.traces);
    for (std::size_t i = 0; i < opts.traces; ++i) out[i] = run_one(p, start, opts.horizon, opts.seed, i);
    return aggregate(out, opts);
}

DiagnosticSeries diagnose(const logic::AnnotatedKernel& k, const std::vector<std::uint64_t>& checkpoints,
                          const SimOptions& opts, bool unchecked) {
    require_checked(k, unchecked);
    std::vector<std::uint64_t> cps;
    for (auto c : checkpoints)
        if (c <= opts.horizon) cps.push_back(c);
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    const std::size_t m = cps.size();
    const std::size_t nt = opts.traces;
    std::vector<double> a(nt * m), phi(nt * m), final_cost(nt);
    std::vector<char> alive(nt * m);
    const Program& p = k.program();
    const Config start = start_config(p, opts.init);
    const auto n = static_cast<std::int64_t>(nt);
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_count(opts.threads))
    for (std::int64_t ii = 0; ii < n; ++ii) {
        auto i = static_cast<std::size_t>(ii);
        Rng rng(opts.seed, i);
        auto c = k.initial(start);
        std::size_t next_cp = 0;
        for (std::uint64_t step = 0;; ++step) {
            while (next_cp < m && cps[next_cp] == step) {
                a[i * m + next_cp] = c.cfg.cost;
                phi[i * m + next_cp] = k.potential(c);
                alive[i * m + next_cp] = !c.cfg.terminal();
                ++next_cp;
            }
            if (c.cfg.terminal() || step == opts.horizon) break;
            auto origin = logic::origin_of(c.cfg);
            runtime::sample_step(rng, p, c.cfg);
            k.retag(origin, c.tags, c.cfg);
        }
        for (; next_cp < m; ++next_cp) {
            a[i * m + next_cp] = c.cfg.cost;
            phi[i * m + next_cp] = 0.0;
            alive[i * m + next_cp] = 0;
        }
        final_cost[i] = c.cfg.cost;
    }

    DiagnosticSeries d;
    d.n_traces = nt;
    d.horizon = opts.horizon;
    d.mean_final_cost = mean_of(final_cost);
    const double N = static_cast<double>(nt);
    for (std::size_t j = 0; j < m; ++j) {
        DiagnosticPoint pt;
        pt.n = cps[j];
        double sy = 0, sa = 0, sp = 0, gap = 0;
        std::size_t live = 0;
        for (std::size_t i = 0; i < nt; ++i) {
            double y = a[i * m + j] + phi[i * m + j];
            sy += y;
            sa += a[i * m + j];
            sp += phi[i * m + j];
            if (alive[i * m + j]) {
                ++live;
                gap += std::abs(final_cost[i] - a[i * m + j] - phi[i * m + j]);
            }
        }
        pt.mean_y = sy / N;
        pt.mean_a = sa / N;
        pt.mean_phi = sp / N;
        double ss = 0;
        for (std::size_t i = 0; i < nt; ++i) {
            double y = a[i * m + j] + phi[i * m + j] - pt.mean_y;
            ss += y * y;
        }
        pt.ci_y = nt > 1 ? 1.96 * std::sqrt(ss / (N - 1)) / std::sqrt(N) : 0.0;
        pt.alive = static_cast<double>(live) / N;
        pt.gap = gap / N;
        d.points.push_back(pt);
    }
    return d;
}

OneStepReport one_step_check(const logic::AnnotatedKernel& k, const OneStepOptions& opts, bool unchecked) {
    require_checked(k, unchecked);
    const Program& p = k.program();
    const Config start = start_config(p, opts.init);
    struct Local {
        double q = 0, mean = 0, se = 0;
        bool in_ctx = true;
        bool violated = false;
        int ctx = -1;
        const Stmt* stmt = nullptr;
    };
    std::vector<Local> res(opts.configs);
    const auto n = static_cast<std::int64_t>(opts.configs);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count(opts.threads))
    for (std::int64_t jj = 0; jj < n; ++jj) {
        auto j = static_cast<std::size_t>(jj);
        Rng walk(opts.seed, j);
        auto depth = static_cast<std::uint64_t>(walk.unit() * static_cast<double>(opts.max_depth));
        auto c = k.initial(start);
        for (std::uint64_t s = 0; s < depth && !c.cfg.terminal(); ++s) {
            auto prev = c;
            auto origin = logic::origin_of(c.cfg);
            runtime::sample_step(walk, p, c.cfg);
            k.retag(origin, c.tags, c.cfg);
            if (c.cfg.terminal()) {
                c = std::move(prev);
                break;
            }
        }
        Local& l = res[j];
        l.q = k.potential(c);
        l.in_ctx = k.in_context(c);
        l.ctx = c.tags.cur.ctx;
        l.stmt = c.cfg.stmt;
        Rng draws(runtime::splitmix64(opts.seed), j);
        const auto origin = logic::origin_of(c.cfg);
        double sum = 0, sum2 = 0;
        for (std::size_t d = 0; d < opts.draws; ++d) {
            auto next = c;
            runtime::sample_step(draws, p, next.cfg);
            k.retag(origin, next.tags, next.cfg);
            double v = next.cfg.cost - c.cfg.cost + k.potential(next);
            sum += v;
            sum2 += v * v;
        }
        double dn = static_cast<double>(opts.draws);
        l.mean = sum / dn;
        double var = opts.draws > 1 ? std::max(0.0, (sum2 - sum * sum / dn) / (dn - 1)) : 0.0;
        l.se = std::sqrt(var / dn);
        l.violated = l.mean > l.q + 4 * l.se + 1e-9 * (1 + std::abs(l.q));
    }

    OneStepReport r;
    r.configs = opts.configs;
    r.min_potential = res.empty() ? 0.0 : res.front().q;
    for (const auto& l : res) {
        r.min_potential = std::min(r.min_potential, l.q);
        if (!l.in_ctx) ++r.context_violations;
        if (!l.violated) continue;
        ++r.violations;
        int site = l.stmt->id;
        auto it = std::find_if(r.sites.begin(), r.sites.end(),
                               [&](const OneStepViolation& v) { return v.site == site && v.ctx == l.ctx; });
        if (it == r.sites.end()) r.sites.push_back({l.ctx, site, l.stmt->loc, l.q, l.mean, l.se});
    }
    std::sort(r.sites.begin(), r.sites.end(), [](const auto& a, const auto& b) {
        return a.site != b.site ? a.site < b.site : a.ctx < b.ctx;
    });
    return r;
}

const char* to_string(TailReport::Hint h) {
    switch (h) {
    case TailReport::Hint::Geometric: return "geometric-decay";
    case TailReport::Hint::PowerLaw: return "power-law";
    case TailReport::Hint::Inconclusive: return "inconclusive";
    }
    return "?";
}

TailReport estimate_tail(const TraceStats& s, const TailOptions& opts) {
    TailReport r;
    std::vector<double> logn, n, logp;
    for (const auto& pt : s.tail_curve) {
        if (pt.count == 0) {
            r.reaches_zero = true;
            break;
        }
        if (pt.n == 0 || pt.p > opts.max_p || pt.count < opts.min_count) continue;
        if (logn.empty()) r.n_lo = pt.n;
        r.n_hi = pt.n;
        logn.push_back(std::log(static_cast<double>(pt.n)));
        n.push_back(static_cast<double>(pt.n));
        logp.push_back(std::log(pt.p));
    }
    r.points = logn.size();
    if (r.points >= 2) {
        Fit pw = least_squares(logn, logp);
        Fit gm = least_squares(n, logp);
        r.exponent = -pw.slope;
        r.r2_power = pw.r2;
        r.rate = -gm.slope;
        r.r2_geometric = gm.r2;
    }
    if (r.points < opts.min_points) {
        if (!r.reaches_zero) throw std::invalid_argument("insufficient tail mass for a fit");
        r.hint = TailReport::Hint::Geometric;
        return r;
    }
    if (r.r2_geometric >= opts.geometric_r2 && r.r2_geometric >= r.r2_power)
        r.hint = TailReport::Hint::Geometric;
    else if (r.exponent > 0)
        r.hint = TailReport::Hint::PowerLaw;
    else
        r.hint = TailReport::Hint::Inconclusive;
    return r;
}

} // namespace appl::simulate
