#include "appl/cli.hpp"

#include "appl/checker.hpp"
#include "appl/kernel.hpp"
#include "appl/oracle.hpp"
#include "appl/ost.hpp"
#include "appl/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace appl::cli {

namespace {

using nlohmann::ordered_json;
using json = ordered_json;

struct Flags {
    std::string file;
    std::size_t traces = 100000;
    std::uint64_t horizon = 10000;
    std::uint64_t seed = 42;
    int threads = 0;
    std::vector<std::string> sets;
    std::string json_out;
    std::string csv_out;
    bool assume_entailments = false;
    bool unchecked = false;
    std::vector<std::uint64_t> checkpoints;
    std::size_t configs = 1000;
    std::size_t draws = 1000;
    std::size_t node_budget = 1'000'000;
    int depth = 50;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Loaded {
    std::string text;
    ParsedProgram pp;
    std::vector<std::string> names;
    std::vector<std::optional<Rational>> set;
    std::vector<Rational> init_exact;
    std::vector<double> init;
    std::string digest;
};

std::string fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Loaded load(const Flags& f) {
    Loaded l;
    std::ifstream in(f.file, std::ios::binary);
    if (!in) throw UsageError("cannot open " + f.file);
    std::ostringstream ss;
    ss << in.rdbuf();
    l.text = ss.str();
    l.digest = fnv1a(l.text);
    l.pp = parse(l.text, f.file);
    const Program& p = l.pp.program;
    l.names = display_names(p, l.pp.annotations);
    l.set.assign(p.vars.size(), std::nullopt);
    for (const auto& s : f.sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects var=value, got '" + s + "'");
        std::string name = s.substr(0, eq);
        int v = p.var_index(name);
        if (v < 0) throw UsageError("--set names unknown variable '" + name + "'");
        auto val = parse_rational(s.substr(eq + 1));
        if (!val) throw UsageError("--set value for '" + name + "' is not a rational number");
        l.set[static_cast<std::size_t>(v)] = *val;
    }
    l.init_exact.assign(p.vars.size(), Rational(0));
    l.init.assign(p.vars.size(), 0.0);
    for (std::size_t v = 0; v < p.vars.size(); ++v)
        if (l.set[v]) {
            l.init_exact[v] = *l.set[v];
            l.init[v] = l.set[v]->get_d();
        }
    return l;
}

void require_precondition(const Loaded& l) {
    if (!logic::satisfies(l.pp.program.precondition, std::span<const Rational>(l.init_exact)))
        throw UsageError("initial valuation violates the precondition " +
                         logic::to_string(l.pp.program.precondition, l.names) + "; use --set");
}

json loc_json(const SourceLoc& loc) { return json{{"line", loc.line}, {"col", loc.col}}; }

json rational_json(const Rational& r) { return json{{"exact", appl::to_string(r)}, {"value", r.get_d()}}; }

json header(const std::string& schema, const Flags& f, const Loaded& l) {
    json j;
    j["schema"] = schema;
    j["program"] = {{"file", f.file}, {"digest", l.digest}};
    json init = json::object();
    for (std::size_t v = 0; v < l.set.size(); ++v)
        if (l.set[v]) init[l.pp.program.vars[v]] = appl::to_string(*l.set[v]);
    j["init"] = init;
    return j;
}

json check_json(const logic::CheckResult& r, const Loaded& l, bool with_log) {
    json j;
    j["verdict"] = logic::to_string(r.verdict);
    if (!r.accepted()) {
        j["site"] = r.site;
        j["loc"] = loc_json(r.loc);
        j["reason"] = r.reason;
    }
    if (r.derivation.main_ctx >= 0) j["bound_polynomial"] = logic::main_pre(r).q.to_string(l.names);
    j["degree"] = logic::derivation_degree(r.derivation);
    json issues = json::array();
    for (const auto& i : r.issues)
        issues.push_back({{"kind", logic::to_string(i.kind)},
                          {"context", i.ctx},
                          {"site", i.site},
                          {"loc", loc_json(i.loc)},
                          {"reason", i.reason}});
    j["issues"] = issues;
    json contexts = json::array();
    for (const auto& dc : r.derivation.contexts) {
        std::string func = dc.func >= 0 ? l.pp.program.funcs[static_cast<std::size_t>(dc.func)].name : "";
        contexts.push_back({{"function", func},
                            {"spec", dc.spec},
                            {"pre", {{"gamma", logic::to_string(dc.pre.gamma, l.names)},
                                     {"q", dc.pre.q.to_string(l.names)}}},
                            {"post", {{"gamma", logic::to_string(dc.post.gamma, l.names)},
                                      {"q", dc.post.q.to_string(l.names)}}}});
    }
    j["contexts"] = contexts;
    if (with_log) {
        json log = json::array();
        for (const auto& e : r.log)
            log.push_back({{"rule", e.rule},
                           {"context", e.ctx},
                           {"site", e.site},
                           {"line", e.loc.line},
                           {"gamma", logic::to_string(e.gamma, l.names)},
                           {"pre", e.q_pre.to_string(l.names)},
                           {"post", e.q_post.to_string(l.names)},
                           {"note", e.note}});
        j["log"] = log;
    }
    return j;
}

json stats_json(const simulate::TraceStats& s) {
    json j;
    j["traces"] = s.n_traces;
    j["seed"] = s.seed;
    j["horizon"] = s.horizon;
    j["mean_cost"] = s.mean_cost;
    j["sd_cost"] = s.sd_cost;
    j["ci95"] = s.ci95;
    j["terminated"] = s.terminated;
    j["censored"] = s.censored;
    j["termination_fraction"] = s.termination_fraction;
    j["censored_fraction"] = s.censored_fraction;
    j["mean_censored_cost"] = s.mean_censored_cost;
    j["time_moments"] = s.time_moments;
    j["max_update"] = s.max_update;
    j["cost_monotone"] = s.cost_monotone;
    return j;
}

json tail_curve_json(const simulate::TraceStats& s) {
    json a = json::array();
    for (const auto& t : s.tail_curve) a.push_back({{"n", t.n}, {"p", t.p}, {"count", t.count}});
    return a;
}

json tail_json(const simulate::TailReport& t) {
    return json{{"hint", simulate::to_string(t.hint)}, {"exponent", t.exponent}, {"r2_power", t.r2_power},
                {"rate", t.rate},  {"r2_geometric", t.r2_geometric}, {"points", t.points},
                {"n_lo", t.n_lo},  {"n_hi", t.n_hi},             {"reaches_zero", t.reaches_zero}};
}

json updates_json(const ost::BoundedUpdateReport& u, const Loaded& l) {
    json j;
    j["bounded"] = u.bounded;
    if (u.bounded)
        j["c0"] = appl::to_string(u.c0);
    else
        j["unbounded_site"] = {{"site", u.site}, {"loc", loc_json(u.loc)}};
    json sites = json::array();
    for (const auto& c : u.changes)
        sites.push_back({{"site", c.site},
                         {"var", l.pp.program.vars[static_cast<std::size_t>(c.var)]},
                         {"line", c.loc.line},
                         {"delta", c.delta.to_string()},
                         {"range", c.range.to_string()}});
    j["sites"] = sites;
    return j;
}

json ost_json(const ost::OstVerdict& v, const Loaded& l) {
    json j;
    j["level"] = ost::to_string(v.level);
    j["degree"] = v.degree;
    j["ell"] = v.ell;
    j["costs"] = {{"nonnegative", v.costs.nonnegative}, {"c1", appl::to_string(v.costs.c1)}, {"ticks", v.costs.ticks}};
    j["bounded_update"] = updates_json(v.updates, l);
    if (v.tail) j["tail"] = tail_json(*v.tail);
    if (v.step_bound) j["step_bound"] = *v.step_bound;
    j["evidence"] = v.evidence;
    if (v.level == ost::Level::Rejected) j["reason"] = v.reason;
    return j;
}

simulate::SimOptions sim_options(const Flags& f, const Loaded& l, int moments) {
    simulate::SimOptions o;
    o.traces = f.traces;
    o.horizon = f.horizon;
    o.seed = f.seed;
    o.threads = f.threads;
    o.init = l.init;
    o.moments = moments;
    return o;
}

void emit(const json& j, const Flags& f, const std::string& summary, std::ostream& out) {
    std::string text = j.dump(2) + "\n";
    if (f.json_out.empty()) {
        out << text;
        return;
    }
    std::ofstream o(f.json_out, std::ios::binary);
    if (!o) throw UsageError("cannot write " + f.json_out);
    o << text;
    out << summary << "\n";
}

logic::CheckOptions check_options() { return {}; }

int cmd_parse(const Flags& f, std::ostream& out) {
    Loaded l = load(f);
    json j = header("appl-parse/1", f, l);
    const Program& p = l.pp.program;
    j["vars"] = p.vars;
    json funcs = json::array();
    for (const auto& fn : p.funcs) funcs.push_back(fn.name);
    j["functions"] = funcs;
    j["precondition"] = logic::to_string(p.precondition, l.names);
    j["sites"] = p.sites.size();
    json diags = json::array();
    for (const auto& d : validate(p, l.pp.annotations, true))
        diags.push_back({{"kind", d.kind}, {"site", d.site}, {"message", d.render(f.file)}});
    j["diagnostics"] = diags;
    j["normalized"] = print(p, l.pp.annotations);
    emit(j, f, "parsed " + f.file + " (" + std::to_string(diags.size()) + " diagnostics)", out);
    return Ok;
}

int check_exit(const logic::CheckResult& r, bool assume) {
    if (r.verdict == logic::Verdict::Rejected) return CheckRejected;
    if (r.verdict == logic::Verdict::Unknown && !assume) return CheckUnknown;
    return Ok;
}

int cmd_check(const Flags& f, std::ostream& out) {
    Loaded l = load(f);
    json j = header("appl-check/1", f, l);
    auto diags = validate(l.pp.program, l.pp.annotations, true);
    if (!diags.empty()) {
        json d = json::array();
        for (const auto& x : diags) d.push_back(x.render(f.file));
        j["diagnostics"] = d;
        j["check"] = {{"verdict", "rejected"}, {"reason", diags.front().message}};
        emit(j, f, "rejected: " + diags.front().render(f.file), out);
        return CheckRejected;
    }
    auto r = logic::check_program(l.pp.program, l.pp.annotations, check_options());
    j["check"] = check_json(r, l, true);
    if (r.accepted() && std::any_of(l.set.begin(), l.set.end(), [](const auto& v) { return v.has_value(); }))
        j["bound"] = rational_json(logic::bound_at(r, l.init_exact));
    emit(j, f, std::string(logic::to_string(r.verdict)) + (r.accepted() ? "" : ": " + r.reason), out);
    return check_exit(r, f.assume_entailments);
}

int cmd_simulate(const Flags& f, std::ostream& out) {
    Loaded l = load(f);
    require_precondition(l);
    auto s = simulate::run_traces(l.pp.program, sim_options(f, l, 2));
    json j = header("appl-simulate/1", f, l);
    j["stats"] = stats_json(s);
    try {
        j["tail"] = tail_json(simulate::estimate_tail(s));
    } catch (const std::invalid_argument& e) {
        j["tail"] = {{"hint", "insufficient"}, {"reason", e.what()}};
    }
    j["tail_curve"] = tail_curve_json(s);
    if (!f.csv_out.empty()) {
        std::ofstream csv(f.csv_out, std::ios::binary);
        if (!csv) throw UsageError("cannot write " + f.csv_out);
        csv << "n,p,count\n";
        for (const auto& t : s.tail_curve) csv << t.n << "," << ordered_json(t.p).dump() << "," << t.count << "\n";
    }
    std::ostringstream sum;
    sum << "mean cost " << s.mean_cost << " +- " << s.ci95 << ", terminated " << s.termination_fraction;
    emit(j, f, sum.str(), out);
    return Ok;
}

int cmd_oracle(const Flags& f, std::ostream& out, std::ostream& err) {
    Loaded l = load(f);
    require_precondition(l);
    json j = header("appl-oracle/1", f, l);
    oracle::OracleOptions oo;
    oo.node_budget = f.node_budget;
    try {
        auto r = oracle::exact_run(l.pp.program, f.horizon, l.init_exact, oo);
        j["horizon"] = r.horizon;
        j["expected_cost"] = rational_json(r.expected_cost);
        j["terminated"] = rational_json(r.terminated);
        j["expected_time_terminated"] = rational_json(r.expected_time);
        j["alive"] = rational_json(r.alive);
        j["peak_nodes"] = r.peak_nodes;
        emit(j, f, "E[A] = " + appl::to_string(r.expected_cost) + ", P[T <= H] = " + appl::to_string(r.terminated),
             out);
        return Ok;
    } catch (const oracle::OracleError& e) {
        err << f.file << ": oracle: " << e.what() << "\n";
        j["error"] = e.what();
        emit(j, f, std::string("oracle infeasible: ") + e.what(), out);
        return OracleInfeasible;
    }
}

int cmd_diagnose(const Flags& f, std::ostream& out, std::ostream& err) {
    Loaded l = load(f);
    require_precondition(l);
    auto r = logic::check_program(l.pp.program, l.pp.annotations, check_options());
    json j = header("appl-diagnose/1", f, l);
    j["check"] = check_json(r, l, false);
    if (!r.accepted() && !f.unchecked) {
        err << f.file << ": annotations not accepted: " << r.reason << "\n";
        emit(j, f, std::string(logic::to_string(r.verdict)) + ": " + r.reason, out);
        return r.verdict == logic::Verdict::Rejected ? CheckRejected : CheckUnknown;
    }
    logic::AnnotatedKernel k(l.pp.program, l.pp.annotations, r);
    auto cps = f.checkpoints.empty() ? simulate::default_checkpoints(f.horizon) : f.checkpoints;
    auto d = simulate::diagnose(k, cps, sim_options(f, l, 2), f.unchecked);
    json pts = json::array();
    for (const auto& p : d.points)
        pts.push_back({{"n", p.n},
                       {"mean_y", p.mean_y},
                       {"ci_y", p.ci_y},
                       {"mean_a", p.mean_a},
                       {"mean_phi", p.mean_phi},
                       {"alive", p.alive},
                       {"gap", p.gap}});
    j["diagnostics"] = {{"traces", d.n_traces}, {"horizon", d.horizon}, {"mean_final_cost", d.mean_final_cost},
                        {"points", pts}};
    simulate::OneStepOptions so;
    so.configs = f.configs;
    so.draws = f.draws;
    so.seed = f.seed;
    so.init = l.init;
    so.threads = f.threads;
    auto os = simulate::one_step_check(k, so, f.unchecked);
    json viol = json::array();
    for (const auto& v : os.sites)
        viol.push_back({{"context", v.ctx},
                        {"site", v.site},
                        {"loc", loc_json(v.loc)},
                        {"potential", v.potential},
                        {"estimate", v.estimate},
                        {"stderr", v.stderr_}});
    j["one_step"] = {{"configs", os.configs},           {"draws", f.draws},
                     {"violations", os.violations},     {"context_violations", os.context_violations},
                     {"min_potential", os.min_potential}, {"sites", viol}};
    emit(j, f, std::to_string(os.violations) + " one-step violations over " + std::to_string(os.configs) +
                   " configurations",
         out);
    return Ok;
}

int cmd_certify(const Flags& f, std::ostream& out) {
    Loaded l = load(f);
    require_precondition(l);
    json j = header("appl-cert/1", f, l);
    auto finish = [&](const std::string& status, int code, const std::string& detail) {
        j["status"] = status;
        emit(j, f, status + (detail.empty() ? "" : ": " + detail), out);
        return code;
    };

    auto diags = validate(l.pp.program, l.pp.annotations, true);
    if (!diags.empty()) {
        json d = json::array();
        for (const auto& x : diags) d.push_back(x.render(f.file));
        j["diagnostics"] = d;
        return finish("CHECK-FAILED", CheckRejected, diags.front().render(f.file));
    }
    auto r = logic::check_program(l.pp.program, l.pp.annotations, check_options());
    j["check"] = check_json(r, l, true);
    bool downgraded = false;
    if (r.verdict == logic::Verdict::Rejected) return finish("CHECK-FAILED", CheckRejected, r.reason);
    if (r.verdict == logic::Verdict::Unknown) {
        if (!f.assume_entailments) return finish("CHECK-FAILED", CheckUnknown, r.reason);
        downgraded = true;
    }
    Rational bound = logic::bound_at(r, l.init_exact);
    j["bound"] = rational_json(bound);

    auto stats = simulate::run_traces(l.pp.program, sim_options(f, l, std::max(1, logic::derivation_degree(r.derivation))));
    auto box = ost::initial_box(l.pp.program, l.set);
    auto v = ost::verify(l.pp.program, l.pp.annotations, r, &stats, box, l.init_exact);
    j["ost"] = ost_json(v, l);
    json sim = stats_json(stats);
    double b = bound.get_d();
    sim["consistent_with_bound"] = stats.mean_cost <= b + 3 * stats.ci95;
    j["simulation"] = sim;
    j["assumed_entailments"] = downgraded;

    std::string bound_text = "bound " + appl::to_string(bound);
    switch (v.level) {
    case ost::Level::CertifiedBoundedTime:
    case ost::Level::CertifiedNonnegative:
        return finish(downgraded ? "CONDITIONAL-BOUND" : "SOUND-BOUND", Ok, bound_text);
    case ost::Level::ConditionallyCertified: return finish("CONDITIONAL-BOUND", Ok, bound_text);
    case ost::Level::Rejected: break;
    }
    return finish("OST-FAILED", OstFailed, v.reason);
}

void add_common(CLI::App* c, Flags& f) {
    c->add_option("file", f.file, "APPL source file")->required();
    c->add_option("--set", f.sets, "initial value var=value (repeatable)");
    c->add_option("--json", f.json_out, "write the JSON report to this file");
}

void add_sim(CLI::App* c, Flags& f) {
    c->add_option("--traces", f.traces, "number of simulated traces")->check(CLI::PositiveNumber);
    c->add_option("--horizon", f.horizon, "step horizon H")->check(CLI::PositiveNumber);
    c->add_option("--seed", f.seed, "master seed");
    c->add_option("--threads", f.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Expected-cost analysis for APPL programs", "appl"};
    app.require_subcommand(1);
    Flags f;

    auto* parse_cmd = app.add_subcommand("parse", "parse and validate a program");
    add_common(parse_cmd, f);

    auto* check_cmd = app.add_subcommand("check", "check annotations against the program logic");
    add_common(check_cmd, f);
    check_cmd->add_flag("--assume-entailments", f.assume_entailments, "exit 0 on unproved entailments");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo cost and stopping-time statistics");
    add_common(sim_cmd, f);
    add_sim(sim_cmd, f);
    sim_cmd->add_option("--csv", f.csv_out, "write the tail curve as CSV");

    auto* oracle_cmd = app.add_subcommand("oracle", "exact finite-horizon expected cost");
    add_common(oracle_cmd, f);
    oracle_cmd->add_option("--horizon", f.horizon, "step horizon H");
    oracle_cmd->add_option("--budget", f.node_budget, "configuration budget per step");

    auto* diag_cmd = app.add_subcommand("diagnose", "supermartingale diagnostics along annotated traces");
    add_common(diag_cmd, f);
    add_sim(diag_cmd, f);
    diag_cmd->add_option("--checkpoints", f.checkpoints, "steps at which Y_n is estimated");
    diag_cmd->add_option("--configs", f.configs, "configurations for the one-step check");
    diag_cmd->add_option("--draws", f.draws, "draws per configuration");
    diag_cmd->add_flag("--unchecked", f.unchecked, "run even if the checker rejects the annotations");

    auto* cert_cmd = app.add_subcommand("certify", "check, verify stopping conditions, and report the bound");
    add_common(cert_cmd, f);
    add_sim(cert_cmd, f);
    cert_cmd->add_flag("--assume-entailments", f.assume_entailments,
                       "accept unproved entailments, reporting a conditional bound");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (f.threads > 0) omp_set_num_threads(f.threads);
        if (*parse_cmd) return cmd_parse(f, out);
        if (*check_cmd) return cmd_check(f, out);
        if (*sim_cmd) return cmd_simulate(f, out);
        if (*oracle_cmd) return cmd_oracle(f, out, err);
        if (*diag_cmd) return cmd_diagnose(f, out, err);
        if (*cert_cmd) return cmd_certify(f, out);
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return ParseFailed;
    } catch (const UsageError& e) {
        err << "appl: " << e.what() << "\n";
        return Usage;
    }
    return Usage;
}

} // namespace appl::cli
