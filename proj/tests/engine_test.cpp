#include <gtest/gtest.h>

#include "cbsrv/cbsrv.hpp"
#include "support.hpp"

using namespace cbsrv;
using cbsrv::testing::loc_tuple;

namespace {

EngineConfig seeded(std::uint64_t seed, std::size_t steps) {
  EngineConfig cfg;
  cfg.policy = SeededRandom{seed};
  cfg.max_steps = steps;
  return cfg;
}

CompositeSystem stuck() {
  return parse_model(R"(
    component A { ports p; locations a, b; initial a; transition a -p-> b; }
    interaction once { ports: A.p; }
  )");
}

}  // namespace

TEST(GlobalEngine, FixedSequenceGolden) {
  EngineConfig cfg;
  cfg.policy = FixedSequence{{Label::interaction("ex12"), Label::interaction("nt")}};
  const RunResult r = run_global(cbsrv::testing::task(), cfg);
  EXPECT_EQ(loc_tuple(r.trace.last()), "(done,done,free,ready)");
  EXPECT_EQ(r.counts.gamma, 2u);
  EXPECT_EQ(r.counts.fired, 2u);
}

TEST(GlobalEngine, FixedSequenceRejectsDisabledLabel) {
  EngineConfig cfg;
  cfg.policy = FixedSequence{{Label::interaction("nt")}};
  try {
    run_global(cbsrv::testing::task(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_enabled);
  }
}

TEST(GlobalEngine, DeadlockIsReported) {
  const RunResult r = run_global(stuck(), seeded(1, 10));
  EXPECT_EQ(r.outcome, Outcome::deadlock);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(GlobalEngine, MonitorJudgesInitialAndEveryState) {
  EngineConfig cfg = seeded(4, 25);
  cfg.monitor = std::make_shared<MonitorSpec>(cbsrv::testing::task_monitor());
  const RunResult r = run_global(cbsrv::testing::task(), cfg);
  EXPECT_EQ(r.verdicts.size(), 26u);
}

TEST(PartialEngine, SameSeedSameRun) {
  const RunResult a = run_partial_concurrent(cbsrv::testing::task_monitored(), seeded(9, 40));
  const RunResult b = run_partial_concurrent(cbsrv::testing::task_monitored(), seeded(9, 40));
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.verdicts, b.verdicts);
  EXPECT_EQ(a.counts.fired, b.counts.fired);
  const RunResult c = run_partial_concurrent(cbsrv::testing::task_monitored(), seeded(10, 40));
  EXPECT_NE(a.trace, c.trace);
}

TEST(PartialEngine, ZeroStepsLeavesInitialState) {
  const RunResult r = run_partial_concurrent(cbsrv::testing::task_partial(), seeded(1, 0));
  EXPECT_TRUE(r.trace.steps.empty());
  EXPECT_EQ(r.trace.initial, initial_state(cbsrv::testing::task_partial()));
}

TEST(PartialEngine, DrainLeavesGlobalStateAndNoPendingDelivery) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RunResult r = run_partial_concurrent(cbsrv::testing::task_monitored(), seeded(seed, 15));
    EXPECT_EQ(r.counts.gamma, 15u);
    EXPECT_TRUE(is_global(r.trace.last()));
    ASSERT_TRUE(r.final_state.rgt);
    EXPECT_TRUE(is_stable(*r.final_state.rgt));
    EXPECT_EQ(r.counts.delivered, r.counts.gamma);
  }
}

TEST(PartialEngine, NoDrainMayStopMidComputation) {
  bool saw_busy = false;
  for (std::uint64_t seed = 1; seed <= 20 && !saw_busy; ++seed) {
    EngineConfig cfg = seeded(seed, 10);
    cfg.drain = false;
    saw_busy = !is_global(run_partial_concurrent(cbsrv::testing::task_partial(), cfg).trace.last());
  }
  EXPECT_TRUE(saw_busy);
}

TEST(PartialEngine, InteractivePolicyChoosesMoves) {
  EngineConfig cfg;
  cfg.max_steps = 3;
  std::size_t calls = 0;
  cfg.policy = Interactive{[&](const std::vector<Move>& moves) {
    ++calls;
    EXPECT_FALSE(moves.empty());
    return moves.size() - 1;
  }};
  const RunResult r = run_partial_concurrent(cbsrv::testing::task_partial(), cfg);
  EXPECT_EQ(r.counts.gamma, 3u);
  EXPECT_GE(calls, 3u);
}

TEST(PartialEngine, ObserverSeesEveryMove) {
  EngineConfig cfg = seeded(2, 12);
  std::size_t seen = 0;
  cfg.observer = [&](const Move&, const RunState&) { ++seen; };
  const RunResult r = run_partial_concurrent(cbsrv::testing::task_monitored(), cfg);
  EXPECT_EQ(seen, r.counts.fired);
  EXPECT_EQ(r.counts.fired, r.counts.gamma + r.counts.beta + r.counts.delivered);
}

TEST(PartialEngine, GlobalMonitorConfigIsRejected) {
  EngineConfig cfg = seeded(1, 5);
  cfg.monitor = std::make_shared<MonitorSpec>(cbsrv::testing::task_monitor());
  EXPECT_THROW(run_partial_concurrent(cbsrv::testing::task_partial(), cfg), Error);
}

TEST(RealTimeEngine, CompletesWithWorkers) {
  EngineConfig cfg = seeded(5, 200);
  cfg.real_time = true;
  cfg.threads = 3;
  cfg.busy_delay = {std::chrono::microseconds(1), std::chrono::microseconds(20)};
  cfg.busy_delay_for["Generator"] = {std::chrono::microseconds(30), std::chrono::microseconds(60)};
  const RunResult r = run_partial_concurrent(cbsrv::testing::task_monitored(), cfg);
  EXPECT_EQ(r.outcome, Outcome::completed);
  EXPECT_EQ(r.counts.gamma, 200u);
  EXPECT_EQ(r.counts.delivered, 200u);
  const Trace plain = strip_var(r.trace, kLocVar);
  EXPECT_EQ(rgt(plain).trace, witness_oracle(cbsrv::testing::task(), plain));
}

TEST(RealTimeEngine, RequiresSeededPolicy) {
  EngineConfig cfg;
  cfg.real_time = true;
  cfg.policy = FixedSequence{{Label::interaction("ex12")}};
  EXPECT_THROW(run_partial_concurrent(cbsrv::testing::task_partial(), cfg), Error);
}
