#include <gtest/gtest.h>

#include "cbsrv/cbsrv.hpp"
#include "support.hpp"

using namespace cbsrv;

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

SystemState task_with(int x1, int x2, int x3) {
  SystemState q = initial_state(cbsrv::testing::task());
  q[0].vars.set("x", Value(x1));
  q[1].vars.set("x", Value(x2));
  q[2].vars.set("x", Value(x3));
  return q;
}

const char* kLatch = R"(
  monitor latch {
    event hi = Worker1.x > 2;
    event busy = Worker1@done;
    state low initial currently_false;
    state up currently_true;
    state dead false;
    transition low -> up [hi];
    transition up -> dead [hi and busy];
  }
)";

}  // namespace

TEST(Verdicts, NamesRoundTrip) {
  for (Verdict v : {Verdict::true_, Verdict::currently_true, Verdict::currently_false, Verdict::false_}) {
    EXPECT_EQ(parse_verdict(verdict_name(v)), v);
  }
  EXPECT_TRUE(is_terminal(Verdict::false_));
  EXPECT_FALSE(is_terminal(Verdict::currently_true));
}

TEST(Monitor, HomogeneityJudgesDifferences) {
  const MonitorSpec& m = cbsrv::testing::task_monitor();
  const auto names = component_names(cbsrv::testing::task());
  MonitorRun run = monitor_start(m);
  EXPECT_EQ(monitor_step(run, m, names, task_with(0, 0, 0)), Verdict::currently_true);
  EXPECT_EQ(monitor_step(run, m, names, task_with(2, 2, 0)), Verdict::currently_true);
  EXPECT_EQ(monitor_step(run, m, names, task_with(3, 2, 0)), Verdict::false_);
  EXPECT_EQ(monitor_step(run, m, names, task_with(0, 0, 0)), Verdict::false_) << "false absorbs";
  EXPECT_EQ(run.verdicts.size(), 4u);
}

TEST(Monitor, ImplicitSelfLoopAndStrictMode) {
  MonitorSpec m = parse_monitor(kLatch);
  const auto names = component_names(cbsrv::testing::task());
  EXPECT_EQ(monitor_next(m, m.initial, names, task_with(0, 0, 0)), m.initial);
  m.strict = true;
  EXPECT_EQ(code_of([&] { monitor_next(m, m.initial, names, task_with(0, 0, 0)); }), Errc::guard_violated);
}

TEST(Monitor, LocationEvents) {
  const MonitorSpec m = parse_monitor(kLatch);
  const auto names = component_names(cbsrv::testing::task());
  SystemState q = task_with(5, 0, 0);
  const std::size_t up = monitor_next(m, m.initial, names, q);
  EXPECT_EQ(m.states[up].name, "up");
  EXPECT_EQ(monitor_next(m, up, names, q), up);
  q[0].location = "done";
  EXPECT_EQ(m.states[monitor_next(m, up, names, q)].name, "dead");
}

TEST(Monitor, RejectsBusySupport) {
  const MonitorSpec& m = cbsrv::testing::task_monitor();
  const auto& p = cbsrv::testing::task_partial();
  const SystemState q = step_partial(p, initial_state(p), Label::interaction("ex12"));
  EXPECT_EQ(code_of([&] { monitor_next(m, m.initial, component_names(p), q); }), Errc::partial_state_rejected);
}

TEST(Monitor, ParseErrors) {
  EXPECT_EQ(code_of([] {
              parse_monitor("monitor m { event e = true; state s initial true; transition s -> s [nope]; }");
            }),
            Errc::unknown_variable);
  EXPECT_EQ(code_of([] {
              parse_monitor(
                  "monitor m { event e = true; state s initial true; state t false; "
                  "transition s -> s [e]; transition s -> t [e or not e]; }");
            }),
            Errc::nondeterministic_transition);
  EXPECT_THROW(parse_monitor("monitor m { state s initial maybe; }"), SyntaxError);
  EXPECT_THROW(parse_monitor("monitor m { transition a -> b; }"), SyntaxError);
}

TEST(Monitor, CheckAgainstSystem) {
  const MonitorSpec m = parse_monitor(kLatch);
  EXPECT_NO_THROW(check_against(m, cbsrv::testing::task()));
  const MonitorSpec bad = parse_monitor("monitor m { event e = Worker7.x > 1; state s initial true; }");
  EXPECT_EQ(code_of([&] { check_against(bad, cbsrv::testing::task()); }), Errc::unknown_variable);
  const MonitorSpec typed = parse_monitor("monitor m { event e = Worker1.x + 1; state s initial true; }");
  EXPECT_EQ(code_of([&] { check_against(typed, cbsrv::testing::task()); }), Errc::type_mismatch);
}

TEST(Monitor, SupportAndRenderRoundTrip) {
  const MonitorSpec m = parse_monitor(kLatch);
  EXPECT_EQ(monitor_support(m), (std::set<std::string>{"Worker1.loc", "Worker1.x"}));
  EXPECT_EQ(support_components(m), (std::set<std::string>{"Worker1"}));
  EXPECT_EQ(parse_monitor(render_monitor(m)), m);
  EXPECT_EQ(parse_monitor(render_monitor(cbsrv::testing::task_monitor())), cbsrv::testing::task_monitor());
}
