#include <gtest/gtest.h>

#include <random>

#include "cbsrv/cbsrv.hpp"
#include "support.hpp"

using namespace cbsrv;
using cbsrv::testing::loc_tuple;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::invalid_argument;
}

// Transfer swaps two exported values; guards read the pre-transfer values.
CompositeSystem swapper() {
  return parse_model(R"(
    component A {
      vars v = 1;
      ports p(v);
      locations s, t;
      initial s;
      transition s -p-> t [v == 1] / [v := v * 10];
      transition s -p-> s / [v := 0];
    }
    component B {
      vars w = 2;
      ports q(w);
      locations s;
      initial s;
      transition s -q-> s [w == 2];
    }
    interaction x { ports: A.p, B.q; transfer: [A.v := B.w; B.w := A.v]; }
  )");
}

}  // namespace

TEST(Semantics, InitialStateOfTask) {
  EXPECT_EQ(loc_tuple(initial_state(cbsrv::testing::task())), "(free,free,free,ready)");
  EXPECT_EQ(locations_string(initial_state(cbsrv::testing::task())), "(free, free, free, ready)");
}

TEST(Semantics, GuardsBeforeSequentialTransferThenStep) {
  const CompositeSystem s = swapper();
  const SystemState q = step_global(s, initial_state(s), "x");
  // Guard v == 1 held before transfer; transfer is sequential, so B.w reads the new A.v = 2.
  EXPECT_EQ(q[0].location, "t");
  EXPECT_EQ(q[0].vars.at("v"), Value(20));
  EXPECT_EQ(q[1].vars.at("w"), Value(2));
}

TEST(Semantics, FirstEnabledTransitionInDeclarationOrderFires) {
  CompositeSystem s = swapper();
  std::swap(s.components[0].transitions[0], s.components[0].transitions[1]);
  const SystemState q = step_global(s, initial_state(s), "x");
  EXPECT_EQ(q[0].location, "s");
  EXPECT_EQ(q[0].vars.at("v"), Value(0));
}

TEST(Semantics, EnabledInteractionsOfTask) {
  const auto& task = cbsrv::testing::task();
  EXPECT_EQ(enabled_interactions(task, initial_state(task)), (std::vector<std::string>{"ex12", "ex13", "ex23"}));
  const SystemState q = step_global(task, initial_state(task), "ex12");
  EXPECT_EQ(enabled_interactions(task, q), (std::vector<std::string>{"f1", "f2", "nt"}));
  EXPECT_EQ(code_of([&] { step_global(task, q, "ex13"); }), Errc::not_enabled);
}

TEST(Semantics, MaintenanceAfterElevenTasks) {
  const auto& task = cbsrv::testing::task();
  SystemState q = initial_state(task);
  for (int i = 0; i < 11; ++i) {
    q = step_global(task, q, "ex12");
    q = step_global(task, q, "nt");
    if (i < 10) {
      q = step_global(task, q, "f1");
      q = step_global(task, q, "f2");
    }
  }
  EXPECT_EQ(q[0].vars.at("x"), Value(11));
  EXPECT_EQ(enabled_interactions(task, q), (std::vector<std::string>{"r1", "r2"}));
  q = step_global(task, q, "r1");
  EXPECT_EQ(q[0].vars.at("x"), Value(0));
}

TEST(Semantics, PartialStepsThroughBusyLocation) {
  const auto& p = cbsrv::testing::task_partial();
  SystemState q = step_partial(p, initial_state(p), Label::interaction("ex12"));
  EXPECT_EQ(loc_tuple(q), "(⊥,⊥,free,⊥)");
  EXPECT_FALSE(is_global(q));
  EXPECT_EQ(q[0].vars.at("x"), Value(0)) << "the step runs in the β half";
  q = step_partial(p, q, Label::beta(0));
  EXPECT_EQ(q[0].vars.at("x"), Value(1));
  EXPECT_EQ(code_of([&] { step_partial(p, q, Label::beta(0)); }), Errc::not_enabled);
}

TEST(Semantics, WorkerAndCoordinatorHalvesMatchFire) {
  const Semantics sem(cbsrv::testing::task_partial());
  RunState q = sem.fire(sem.initial(), *sem.interaction_index("ex12"));
  const std::size_t b0 = *sem.beta_interaction(0);
  const RunState direct = sem.fire(q, b0);
  const ComponentState next = sem.execute_step(0, q.comps[0]);
  sem.complete_beta(q, 0, next);
  EXPECT_EQ(q, direct);
  EXPECT_EQ(code_of([&] { sem.execute_step(0, q.comps[0]); }), Errc::not_busy);
  EXPECT_EQ(code_of([&] { sem.complete_beta(q, 0, next); }), Errc::not_enabled);
}

TEST(Semantics, InteractionKindsOfTransformedSystem) {
  const Semantics sem(cbsrv::testing::task_monitored());
  EXPECT_EQ(sem.kind(*sem.interaction_index("ex12")), InteractionKind::gamma);
  EXPECT_EQ(sem.kind(*sem.interaction_index("beta_Worker1")), InteractionKind::beta);
  EXPECT_EQ(sem.kind(*sem.interaction_index("out_ex12")), InteractionKind::delivery);
  EXPECT_EQ(sem.label_of(*sem.interaction_index("beta_Generator")), Label::beta(3));
  EXPECT_EQ(sem.participants(*sem.interaction_index("ex12")), (std::vector<std::size_t>{3, 0, 1}));
}

TEST(Property, SemanticsAgreesWithReferenceInterpreter) {
  std::mt19937_64 rng(99);
  std::size_t steps = 0;
  for (int i = 0; i < 300; ++i) {
    const CompositeSystem s = cbsrv::testing::random_system(rng);
    const Semantics sem(s);
    SystemState q = initial_state(s);
    for (int k = 0; k < 40; ++k) {
      std::vector<std::string> ref_enabled;
      for (const auto& a : s.interactions) {
        if (cbsrv::testing::ref_step(s, q, a)) ref_enabled.push_back(a.name);
      }
      ASSERT_EQ(enabled_interactions(s, q), ref_enabled) << render_model(s);
      if (ref_enabled.empty()) break;
      const std::string& a = ref_enabled[rng() % ref_enabled.size()];
      const SystemState next = step_global(s, q, a);
      ASSERT_EQ(next, *cbsrv::testing::ref_step(s, q, *s.find_interaction(a))) << render_model(s) << a;
      q = next;
      ++steps;
    }
  }
  EXPECT_GT(steps, 1000u);
}

TEST(Property, PartialRunsReachOnlyStatesWhoseStabilizationIsGlobal) {
  // Firing every pending β from a reachable partial state yields a global state.
  std::mt19937_64 rng(3);
  const Semantics sem(cbsrv::testing::task_partial());
  RunState q = sem.initial();
  for (int k = 0; k < 2000; ++k) {
    const auto en = sem.enabled_interactions(q);
    ASSERT_FALSE(en.empty());
    q = sem.fire(q, en[rng() % en.size()]);
    RunState flushed = q;
    for (std::size_t c = 0; c < flushed.comps.size(); ++c) {
      if (flushed.comps[c].busy()) flushed = sem.fire(flushed, *sem.beta_interaction(c));
    }
    EXPECT_TRUE(is_global(flushed.comps));
  }
}
