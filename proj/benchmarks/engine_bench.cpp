// Desk-scale overhead of monitoring: the same Task workload run sequentially, in partial-state
// form, and transformed with the homogeneity monitor attached.

#include <benchmark/benchmark.h>

#include "cbsrv/cbsrv.hpp"

using namespace cbsrv;

namespace {

const CompositeSystem& task() {
  static const CompositeSystem s = builtin_task();
  return s;
}

const CompositeSystem& partial() {
  static const CompositeSystem s = to_partial(task());
  return s;
}

const CompositeSystem& monitored() {
  static const CompositeSystem s = [] {
    const MonitorSpec m = builtin_task_monitor();
    const auto support = monitor_support(m);
    return attach_monitor(transform_system(partial(), std::vector<std::string>(support.begin(), support.end())), m);
  }();
  return s;
}

EngineConfig config(benchmark::State& state) {
  EngineConfig cfg;
  cfg.policy = SeededRandom{42};
  cfg.max_steps = static_cast<std::size_t>(state.range(0));
  return cfg;
}

void report(benchmark::State& state, const RunResult& r) {
  state.counters["interactions"] = static_cast<double>(r.counts.gamma);
  state.counters["extra"] = static_cast<double>(r.counts.extra());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.counts.gamma));
}

void BM_GlobalMonitored(benchmark::State& state) {
  EngineConfig cfg = config(state);
  cfg.monitor = std::make_shared<MonitorSpec>(builtin_task_monitor());
  RunResult r;
  for (auto _ : state) r = run_global(task(), cfg);
  report(state, r);
}
BENCHMARK(BM_GlobalMonitored)->Arg(1000)->Arg(10000);

void BM_Partial(benchmark::State& state) {
  const EngineConfig cfg = config(state);
  RunResult r;
  for (auto _ : state) r = run_partial_concurrent(partial(), cfg);
  report(state, r);
}
BENCHMARK(BM_Partial)->Arg(1000)->Arg(10000);

void BM_Monitored(benchmark::State& state) {
  const EngineConfig cfg = config(state);
  RunResult r;
  for (auto _ : state) r = run_partial_concurrent(monitored(), cfg);
  report(state, r);
}
BENCHMARK(BM_Monitored)->Arg(1000)->Arg(10000);

// Real threads: arg 0 is the step budget, arg 1 the worker count. Busy steps take 20-80 us.
void BM_RealTime(benchmark::State& state) {
  EngineConfig cfg = config(state);
  cfg.real_time = true;
  cfg.threads = static_cast<std::size_t>(state.range(1));
  cfg.busy_delay = {std::chrono::microseconds(20), std::chrono::microseconds(80)};
  const CompositeSystem& sys = state.range(2) ? monitored() : partial();
  RunResult r;
  for (auto _ : state) r = run_partial_concurrent(sys, cfg);
  report(state, r);
}
BENCHMARK(BM_RealTime)
    ->ArgsProduct({{500}, {1, 2, 4}, {0, 1}})
    ->ArgNames({"steps", "threads", "monitored"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_RgtStream(benchmark::State& state) {
  EngineConfig cfg = config(state);
  const Trace t = run_partial_concurrent(partial(), cfg).trace;
  for (auto _ : state) {
    RgtStream s(t.initial);
    std::size_t n = s.start().size();
    for (const auto& [l, q] : t.steps) n += s.push(l, q).size();
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.steps.size()));
}
BENCHMARK(BM_RgtStream)->Arg(1000)->Arg(10000);

void BM_BisimReadersWriters(benchmark::State& state) {
  const CompositeSystem p = to_partial(builtin_readers_writers());
  const CompositeSystem r = transform_system(p, std::nullopt);
  const auto none = [](std::string_view) { return false; };
  for (auto _ : state) {
    const ExplicitLts lp = explore(p, 10'000'000, none);
    const ExplicitLts lr = explore(r, 10'000'000, is_delivery_label);
    benchmark::DoNotOptimize(weak_bisimilar(lp, lr).equivalent);
  }
}
BENCHMARK(BM_BisimReadersWriters)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
