#include "appl/program.hpp"
#include "appl/simulate.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <string>

using namespace appl;

namespace {

const ParsedProgram& program(const std::string& name) {
    static std::map<std::string, ParsedProgram> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, parse_file(std::string(APPL_CORPUS_DIR) + "/" + name + ".appl")).first;
    return it->second;
}

simulate::SimOptions options(const Program& p, std::size_t traces) {
    simulate::SimOptions o;
    o.traces = traces;
    o.horizon = 10000;
    o.init.assign(p.num_vars(), 0.0);
    o.init[static_cast<std::size_t>(p.var_index("d"))] = 10;
    return o;
}

void BM_TracesSerial(benchmark::State& state) {
    const auto& pp = program("rdwalk");
    auto o = options(pp.program, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate::run_traces_serial(pp.program, o).mean_cost);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TracesParallel(benchmark::State& state) {
    const auto& pp = program("rdwalk");
    auto o = options(pp.program, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate::run_traces(pp.program, o).mean_cost);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_TracesSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TracesParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
