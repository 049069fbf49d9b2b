#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <random>
#include <set>

#include "cbsrv/cbsrv.hpp"
#include "support.hpp"

using namespace cbsrv;

namespace {

// Hand-built LTS; label "tau" is hidden.
ExplicitLts lts(std::size_t n, const std::vector<std::tuple<std::uint32_t, std::string, std::uint32_t>>& edges) {
  ExplicitLts l;
  l.num_states = n;
  std::map<std::string, std::uint32_t> ids;
  for (const auto& [s, a, d] : edges) {
    auto [it, fresh] = ids.emplace(a, static_cast<std::uint32_t>(l.labels.size()));
    if (fresh) {
      l.labels.push_back(a);
      l.hidden.push_back(a == "tau");
    }
    l.edges.push_back({s, it->second, d});
  }
  return l;
}

// Reference: does the LTS accept `word` as a weak trace from the initial state?
bool accepts(const ExplicitLts& l, const std::vector<std::string>& word) {
  auto close = [&](std::set<std::uint32_t> s) {
    std::deque<std::uint32_t> todo(s.begin(), s.end());
    while (!todo.empty()) {
      const auto u = todo.front();
      todo.pop_front();
      for (const auto& e : l.edges) {
        if (e.src == u && l.hidden[e.label] && s.insert(e.dst).second) todo.push_back(e.dst);
      }
    }
    return s;
  };
  std::set<std::uint32_t> cur = close({0});
  for (const auto& a : word) {
    std::set<std::uint32_t> next;
    for (const auto& e : l.edges) {
      if (cur.count(e.src) && !l.hidden[e.label] && l.labels[e.label] == a) next.insert(e.dst);
    }
    cur = close(next);
    if (cur.empty()) return false;
  }
  return true;
}

ExplicitLts random_lts(std::mt19937_64& rng) {
  const std::size_t n = 1 + rng() % 5;
  const char* names[] = {"a", "b", "tau"};
  std::vector<std::tuple<std::uint32_t, std::string, std::uint32_t>> edges;
  const std::size_t m = rng() % 8;
  for (std::size_t i = 0; i < m; ++i) {
    edges.emplace_back(rng() % n, names[rng() % 3], rng() % n);
  }
  return lts(n, edges);
}

std::size_t count_global_states(const CompositeSystem& sys) {
  std::set<SystemState> seen{initial_state(sys)};
  std::deque<SystemState> todo{initial_state(sys)};
  while (!todo.empty()) {
    const SystemState q = todo.front();
    todo.pop_front();
    for (const auto& a : sys.interactions) {
      if (auto n = cbsrv::testing::ref_step(sys, q, a); n && seen.insert(*n).second) todo.push_back(*n);
    }
  }
  return seen.size();
}

const auto kNone = [](std::string_view) { return false; };

ExplicitLts hiding(ExplicitLts l, bool (*hide)(std::string_view) noexcept) {
  for (std::size_t i = 0; i < l.labels.size(); ++i) l.hidden[i] = hide(l.labels[i]);
  return l;
}

}  // namespace

TEST(Bisim, IdenticalLtsAreEquivalent) {
  const ExplicitLts l = lts(3, {{0, "a", 1}, {1, "b", 2}, {2, "a", 0}});
  const BisimResult r = weak_bisimilar(l, l);
  EXPECT_TRUE(r.equivalent);
  for (std::uint32_t s = 0; s < 3; ++s) EXPECT_TRUE(r.related(s, s));
}

TEST(Bisim, HiddenStepsAreAbsorbed) {
  const ExplicitLts l = lts(3, {{0, "a", 1}, {1, "b", 2}});
  const ExplicitLts r = lts(5, {{0, "tau", 1}, {1, "a", 2}, {2, "tau", 3}, {3, "b", 4}});
  EXPECT_TRUE(weak_bisimilar(l, r).equivalent);
}

TEST(Bisim, BranchingMatters) {
  // a.(b + c) against a.b + a.c: same traces, not bisimilar.
  const ExplicitLts l = lts(4, {{0, "a", 1}, {1, "b", 2}, {1, "c", 3}});
  const ExplicitLts r = lts(5, {{0, "a", 1}, {0, "a", 2}, {1, "b", 3}, {2, "c", 4}});
  const BisimResult res = weak_bisimilar(l, r);
  EXPECT_FALSE(res.equivalent);
  EXPECT_TRUE(res.counterexample.empty());
  EXPECT_FALSE(find_distinguishing_trace(l, r));
}

TEST(Bisim, CounterexampleNamesTheDivergingSide) {
  const ExplicitLts l = lts(3, {{0, "a", 1}, {1, "b", 2}});
  const ExplicitLts r = lts(3, {{0, "a", 1}, {1, "c", 2}});
  const BisimResult res = weak_bisimilar(l, r);
  ASSERT_FALSE(res.equivalent);
  ASSERT_EQ(res.counterexample.size(), 2u);
  EXPECT_EQ(res.counterexample[0], "a");
  EXPECT_EQ(accepts(l, res.counterexample), res.counterexample_in_left);
  EXPECT_NE(accepts(l, res.counterexample), accepts(r, res.counterexample));
}

TEST(Explore, TaskMatchesIndependentEnumeration) {
  const ExplicitLts l = explore(cbsrv::testing::task(), 1'000'000, kNone);
  EXPECT_EQ(l.num_states, count_global_states(cbsrv::testing::task()));
  EXPECT_EQ(l.labels.size(), 10u);
  EXPECT_EQ(l.components(l.initial()), initial_state(cbsrv::testing::task()));
  EXPECT_EQ(l.find(initial_state(cbsrv::testing::task())), 0u);
}

TEST(Explore, BoundAndEmptySystems) {
  try {
    explore(cbsrv::testing::task(), 1, kNone);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::bound_exceeded);
  }
  const CompositeSystem idle =
      parse_model("component A { ports p; locations l; initial l; transition l -p-> l; }");
  const ExplicitLts l = explore(idle, 10, kNone);
  EXPECT_EQ(l.num_states, 1u);
  EXPECT_TRUE(l.edges.empty());
}

TEST(Explore, RejectsMonitoredSystems) {
  EXPECT_THROW(explore(cbsrv::testing::task_monitored(), 10, kNone), Error);
}

TEST(Equivalence, ReadersWritersAllStages) {
  const CompositeSystem g = builtin_readers_writers();
  const CompositeSystem p = to_partial(g);
  const ExplicitLts lg = explore(g, 1'000'000, kNone);
  const ExplicitLts lp = explore(p, 1'000'000, kNone);
  EXPECT_EQ(lg.num_states, count_global_states(g));
  EXPECT_TRUE(weak_bisimilar(lg, hiding(lp, is_beta_label)).equivalent);
  for (RgtVariant v : {RgtVariant::guarded, RgtVariant::unguarded_both}) {
    const ExplicitLts lr = explore(transform_system(p, std::nullopt, v), 5'000'000, is_delivery_label);
    EXPECT_TRUE(weak_bisimilar(lp, lr).equivalent) << rgt_variant_name(v);
  }
}

TEST(Equivalence, ProofRelationIsContainedInComputedOne) {
  // Pairs (q, r) where r reaches, through deliveries only, a stable state whose components equal q.
  const CompositeSystem p = to_partial(builtin_readers_writers());
  const ExplicitLts lp = explore(p, 1'000'000, kNone);
  const ExplicitLts lr = explore(transform_system(p, std::nullopt), 5'000'000, is_delivery_label);
  const BisimResult res = weak_bisimilar(lp, lr);
  ASSERT_TRUE(res.equivalent);
  std::vector<std::vector<std::uint32_t>> out(lr.num_states);
  for (const auto& e : lr.edges) {
    if (is_delivery_label(lr.labels[e.label])) out[e.src].push_back(e.dst);
  }
  std::size_t checked = 0;
  for (std::uint32_t r = 0; r < lr.num_states; ++r) {
    std::uint32_t z = r;
    for (std::size_t guard = 0; !lr.stable(z) && guard < lr.num_states; ++guard) {
      ASSERT_EQ(out[z].size(), 1u) << "exactly one delivery is enabled when unstable";
      z = out[z][0];
    }
    ASSERT_TRUE(lr.stable(z));
    const auto q = lp.find(strip_var(lr.components(z), kLocVar));
    ASSERT_TRUE(q);
    EXPECT_TRUE(res.related(*q, r));
    ++checked;
  }
  EXPECT_EQ(checked, lr.num_states);
}

TEST(Property, SymmetryAndCounterexampleSoundness) {
  std::mt19937_64 rng(17);
  std::size_t refuted = 0;
  for (int i = 0; i < 500; ++i) {
    const ExplicitLts a = random_lts(rng);
    const ExplicitLts b = random_lts(rng);
    const BisimResult ab = weak_bisimilar(a, b);
    const BisimResult ba = weak_bisimilar(b, a);
    ASSERT_EQ(ab.equivalent, ba.equivalent);
    EXPECT_TRUE(weak_bisimilar(a, a).equivalent);
    if (!ab.equivalent && !ab.counterexample.empty()) {
      ++refuted;
      EXPECT_NE(accepts(a, ab.counterexample), accepts(b, ab.counterexample));
      EXPECT_EQ(accepts(a, ab.counterexample), ab.counterexample_in_left);
    }
  }
  EXPECT_GT(refuted, 50u);
}
