#include "cbsrv/engine.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "cbsrv/error.hpp"

namespace cbsrv {

namespace {

using Clock = std::chrono::steady_clock;

Move::Kind move_kind(InteractionKind k) {
  switch (k) {
    case InteractionKind::gamma: return Move::Kind::interaction;
    case InteractionKind::beta: return Move::Kind::beta;
    case InteractionKind::delivery: return Move::Kind::delivery;
  }
  return Move::Kind::interaction;
}

/// Bookkeeping shared by both engines: trace, counters, deliveries, verdicts.
class Recorder {
 public:
  Recorder(const Semantics& sem, const EngineConfig& cfg, RunResult& out) : sem_(sem), cfg_(cfg), out_(out) {}

  void start(RunState& q, const MonitorSpec* monitor) {
    out_.trace.initial = q.comps;
    if (monitor && monitor->emit_initial) {
      std::size_t ms = q.monitor ? *q.monitor : monitor->initial;
      ms = monitor_next(*monitor, ms, sem_.names(), q.comps);
      if (q.monitor) q.monitor = ms;
      initial_monitor_state_ = ms;
      verdict(monitor->states[ms].verdict, {}, q.comps, "");
    }
  }

  std::optional<std::size_t> initial_monitor_state() const { return initial_monitor_state_; }

  /// Records a fired move; `fx` carries delivery and verdict effects.
  void fired(std::size_t a, const RunState& q, const StepEffects& fx) {
    const Move m{move_kind(sem_.kind(a)), a, sem_.interaction_name(a)};
    ++out_.counts.fired;
    switch (sem_.kind(a)) {
      case InteractionKind::gamma:
        ++out_.counts.gamma;
        out_.trace.steps.emplace_back(sem_.label_of(a), q.comps);
        break;
      case InteractionKind::beta:
        ++out_.counts.beta;
        out_.trace.steps.emplace_back(sem_.label_of(a), q.comps);
        break;
      case InteractionKind::delivery:
        ++out_.counts.delivered;
        if (fx.delivered) {
          const auto& tags = sem_.rgt_context()->tags;
          DeliveryRecord rec{out_.trace.steps.size(), fx.delivered->to_state(), tags.at(fx.delivered->tag), {}};
          if (fx.verdict) {
            rec.verdict = fx.verdict;
            out_.verdicts.push_back(*fx.verdict);
            ++out_.counts.verdicts[*fx.verdict];
          }
          out_.deliveries.push_back(std::move(rec));
        }
        break;
    }
    if (cfg_.observer) cfg_.observer(m, q);
  }

  /// Verdict on a state that is not an RGT delivery (global runs, the initial state).
  void verdict(Verdict v, std::optional<std::size_t> after, const SystemState& q, std::string tag) {
    out_.deliveries.push_back({after.value_or(out_.trace.steps.size()), q, std::move(tag), v});
    out_.verdicts.push_back(v);
    ++out_.counts.verdicts[v];
  }

 private:
  const Semantics& sem_;
  const EngineConfig& cfg_;
  RunResult& out_;
  std::optional<std::size_t> initial_monitor_state_;
};

std::vector<Move> moves_of(const Semantics& sem, const std::vector<std::size_t>& enabled) {
  std::vector<Move> out;
  out.reserve(enabled.size());
  for (std::size_t a : enabled) out.push_back({move_kind(sem.kind(a)), a, sem.interaction_name(a)});
  return out;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::size_t resolve_enabled(const Semantics& sem, const RunState& q, const Label& l) {
  auto a = sem.resolve(l);
  if (!a || !sem.enabled(q, *a)) {
    throw Error(Errc::not_enabled, "scheduled label '" + l.to_string() + "' is not enabled");
  }
  return *a;
}

}  // namespace

// ---------------------------------------------------------------------------
// global-state engine

RunResult run_global(const CompositeSystem& sys, const EngineConfig& cfg) {
  const auto t0 = Clock::now();
  Semantics sem(sys);
  if (cfg.monitor) check_against(*cfg.monitor, sem.system());
  RunResult out;
  Recorder rec(sem, cfg, out);
  RunState q = sem.initial();
  const MonitorSpec* monitor = cfg.monitor.get();
  std::optional<std::size_t> mstate;
  rec.start(q, monitor);
  if (monitor) mstate = rec.initial_monitor_state().value_or(monitor->initial);

  std::mt19937_64 rng(std::holds_alternative<SeededRandom>(cfg.policy) ? std::get<SeededRandom>(cfg.policy).seed : 0);
  const auto* fixed = std::get_if<FixedSequence>(&cfg.policy);
  std::size_t next_label = 0;

  for (;;) {
    std::size_t a = 0;
    if (fixed) {
      if (next_label == fixed->labels.size()) break;
      a = resolve_enabled(sem, q, fixed->labels[next_label++]);
    } else {
      if (out.counts.gamma >= cfg.max_steps) break;
      const auto enabled = sem.enabled_interactions(q);
      if (enabled.empty()) {
        out.outcome = Outcome::deadlock;
        break;
      }
      if (const auto* inter = std::get_if<Interactive>(&cfg.policy)) {
        const std::size_t k = inter->choose(moves_of(sem, enabled));
        if (k >= enabled.size()) throw Error(Errc::invalid_argument, "interactive choice out of range");
        a = enabled[k];
      } else {
        a = enabled[pick(rng, enabled.size())];
      }
    }
    StepEffects fx;
    sem.fire_into(q, a, &fx);
    // In global mode every interaction is an observable step of the system.
    ++out.counts.fired;
    ++out.counts.gamma;
    out.trace.steps.emplace_back(sem.label_of(a), q.comps);
    if (monitor) {
      mstate = monitor_next(*monitor, *mstate, sem.names(), q.comps);
      rec.verdict(monitor->states[*mstate].verdict, {}, q.comps, "");
    }
    if (cfg.observer) cfg.observer(Move{move_kind(sem.kind(a)), a, sem.interaction_name(a)}, q);
  }
  out.final_state = std::move(q);
  out.wall = Clock::now() - t0;
  return out;
}

// ---------------------------------------------------------------------------
// partial-state engine, virtual time

namespace {

RunResult run_virtual(const Semantics& sem, const EngineConfig& cfg) {
  RunResult out;
  Recorder rec(sem, cfg, out);
  RunState q = sem.initial(cfg.retain_delivered);
  rec.start(q, sem.system().monitor.get());

  std::mt19937_64 rng(std::holds_alternative<SeededRandom>(cfg.policy) ? std::get<SeededRandom>(cfg.policy).seed : 0);
  const auto* fixed = std::get_if<FixedSequence>(&cfg.policy);
  const auto* inter = std::get_if<Interactive>(&cfg.policy);
  std::size_t next_label = 0;

  auto fire = [&](std::size_t a) {
    StepEffects fx;
    sem.fire_into(q, a, &fx);
    rec.fired(a, q, fx);
  };
  // First enabled delivery, else first enabled β; used for eager deliveries and draining.
  auto flush_one = [&](bool with_beta) {
    std::optional<std::size_t> beta;
    for (std::size_t a : sem.enabled_interactions(q)) {
      if (sem.kind(a) == InteractionKind::delivery) {
        fire(a);
        return true;
      }
      if (with_beta && !beta && sem.kind(a) == InteractionKind::beta) beta = a;
    }
    if (beta) fire(*beta);
    return beta.has_value();
  };

  for (;;) {
    if (fixed) {
      while (flush_one(false)) {
      }
      if (next_label == fixed->labels.size()) break;
      fire(resolve_enabled(sem, q, fixed->labels[next_label++]));
      continue;
    }
    const bool budget = out.counts.gamma < cfg.max_steps;
    if (!budget && !cfg.drain) break;
    std::vector<std::size_t> cand;
    for (std::size_t a : sem.enabled_interactions(q)) {
      if (budget || sem.kind(a) != InteractionKind::gamma) cand.push_back(a);
    }
    if (cand.empty()) {
      if (budget) out.outcome = Outcome::deadlock;
      break;
    }
    std::size_t k = 0;
    if (inter) {
      k = inter->choose(moves_of(sem, cand));
      if (k >= cand.size()) throw Error(Errc::invalid_argument, "interactive choice out of range");
    } else {
      k = pick(rng, cand.size());
    }
    fire(cand[k]);
  }
  if (fixed && cfg.drain) {
    while (flush_one(true)) {
    }
  }
  out.final_state = std::move(q);
  return out;
}

// ---------------------------------------------------------------------------
// partial-state engine, real time

struct Job {
  std::size_t component;
  ComponentState busy;
  std::chrono::microseconds delay;
};

struct Done {
  std::size_t component;
  ComponentState next;
};

/// Workers run computation steps; the coordinator owns RunState and applies results.
class WorkerPool {
 public:
  WorkerPool(const Semantics& sem, std::size_t threads) : sem_(sem) {
    for (std::size_t i = 0; i < std::max<std::size_t>(threads, 1); ++i) {
      threads_.emplace_back([this] { loop(); });
    }
  }
  ~WorkerPool() {
    {
      std::lock_guard lk(mu_);
      stop_ = true;
    }
    jobs_cv_.notify_all();
    for (auto& t : threads_) t.join();
  }
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(Job j) {
    {
      std::lock_guard lk(mu_);
      jobs_.push_back(std::move(j));
      ++outstanding_;
    }
    jobs_cv_.notify_one();
  }

  /// Jobs whose result has not been collected yet.
  std::size_t outstanding() const {
    std::lock_guard lk(mu_);
    return outstanding_;
  }

  /// Takes every finished result; blocks until at least one is available when `wait`.
  std::vector<Done> collect(bool wait) {
    std::unique_lock lk(mu_);
    if (wait) done_cv_.wait(lk, [this] { return !done_.empty() || failure_; });
    if (failure_) {
      std::string what = failure_msg_;
      throw Error(Errc::worker_panicked, "worker failed: " + what);
    }
    std::vector<Done> out(std::make_move_iterator(done_.begin()), std::make_move_iterator(done_.end()));
    done_.clear();
    outstanding_ -= out.size();
    return out;
  }

 private:
  void loop() {
    for (;;) {
      Job j;
      {
        std::unique_lock lk(mu_);
        jobs_cv_.wait(lk, [this] { return stop_ || !jobs_.empty(); });
        if (stop_) return;
        j = std::move(jobs_.front());
        jobs_.pop_front();
      }
      try {
        if (j.delay.count() > 0) std::this_thread::sleep_for(j.delay);
        ComponentState next = sem_.execute_step(j.component, j.busy);
        std::lock_guard lk(mu_);
        done_.push_back({j.component, std::move(next)});
      } catch (const std::exception& e) {
        std::lock_guard lk(mu_);
        failure_ = true;
        failure_msg_ = e.what();
        --outstanding_;
      }
      done_cv_.notify_all();
    }
  }

  const Semantics& sem_;
  mutable std::mutex mu_;
  std::condition_variable jobs_cv_;
  std::condition_variable done_cv_;
  std::deque<Job> jobs_;
  std::vector<Done> done_;
  std::size_t outstanding_ = 0;
  bool stop_ = false;
  bool failure_ = false;
  std::string failure_msg_;
  std::vector<std::thread> threads_;
};

RunResult run_real_time(const Semantics& sem, const EngineConfig& cfg) {
  const auto* seeded = std::get_if<SeededRandom>(&cfg.policy);
  if (!seeded) throw Error(Errc::invalid_argument, "real-time mode supports the seeded random policy only");
  RunResult out;
  Recorder rec(sem, cfg, out);
  RunState q = sem.initial(cfg.retain_delivered);
  rec.start(q, sem.system().monitor.get());
  std::mt19937_64 rng(seeded->seed);
  const std::size_t n = q.comps.size();

  std::vector<BusyDelay> delays(n, cfg.busy_delay);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = cfg.busy_delay_for.find(sem.names()[i]);
    if (it != cfg.busy_delay_for.end()) delays[i] = it->second;
  }
  auto draw_delay = [&](std::size_t c) {
    const auto lo = delays[c].min.count();
    const auto hi = std::max(lo, delays[c].max.count());
    return std::chrono::microseconds(std::uniform_int_distribution<std::int64_t>(lo, hi)(rng));
  };

  WorkerPool pool(sem, cfg.threads);
  std::vector<bool> dispatched(n, false);
  std::vector<std::optional<Done>> ready(n);  // results waiting for their β to become enabled

  auto dispatch = [&] {
    for (std::size_t c = 0; c < n; ++c) {
      if (q.comps[c].busy() && !dispatched[c] && sem.beta_interaction(c)) {
        dispatched[c] = true;
        pool.submit({c, q.comps[c], draw_delay(c)});
      }
    }
  };
  auto deliver_all = [&] {
    bool any = false;
    for (bool again = true; again;) {
      again = false;
      for (std::size_t a : sem.enabled_interactions(q)) {
        if (sem.kind(a) != InteractionKind::delivery) continue;
        StepEffects fx;
        sem.fire_into(q, a, &fx);
        rec.fired(a, q, fx);
        again = any = true;
        break;
      }
    }
    return any;
  };
  auto apply_ready = [&] {
    bool any = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (!ready[c]) continue;
      const std::size_t a = *sem.beta_interaction(c);
      if (!sem.enabled(q, a)) continue;  // RGT may hold upd until the pending state is delivered
      StepEffects fx;
      sem.complete_beta(q, c, std::move(ready[c]->next), &fx);
      ready[c].reset();
      dispatched[c] = false;
      rec.fired(a, q, fx);
      deliver_all();
      any = true;
    }
    return any;
  };
  auto take = [&](std::vector<Done> results) {
    for (auto& d : results) ready[d.component] = std::move(d);
  };

  dispatch();
  for (;;) {
    take(pool.collect(false));
    bool progress = deliver_all();
    progress = apply_ready() || progress;
    dispatch();

    const bool budget = out.counts.gamma < cfg.max_steps;
    if (budget) {
      std::vector<std::size_t> cand;
      for (std::size_t a : sem.enabled_interactions(q)) {
        if (sem.kind(a) == InteractionKind::gamma) cand.push_back(a);
      }
      if (!cand.empty()) {
        const std::size_t a = cand[pick(rng, cand.size())];
        StepEffects fx;
        sem.fire_into(q, a, &fx);
        rec.fired(a, q, fx);
        dispatch();
        continue;
      }
    } else if (!cfg.drain) {
      break;
    }
    if (progress) continue;
    const bool pending = pool.outstanding() > 0 ||
                         std::any_of(ready.begin(), ready.end(), [](const auto& r) { return r.has_value(); });
    if (!pending) {
      // Unmonitored components reach β without RGT; anything enabled here is a β of a
      // component whose step was never dispatched, which dispatch() rules out.
      if (budget) out.outcome = Outcome::deadlock;
      break;
    }
    if (pool.outstanding() == 0) {
      throw Error(Errc::worker_panicked, "results are stuck behind a disabled β");
    }
    take(pool.collect(true));
  }
  out.final_state = std::move(q);
  return out;
}

}  // namespace

RunResult run_partial_concurrent(const CompositeSystem& partial, const EngineConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.monitor) {
    throw Error(Errc::invalid_argument, "partial-state runs take their monitor from the system (attach_monitor)");
  }
  Semantics sem(partial);
  RunResult out = cfg.real_time ? run_real_time(sem, cfg) : run_virtual(sem, cfg);
  out.wall = Clock::now() - t0;
  return out;
}

}  // namespace cbsrv
