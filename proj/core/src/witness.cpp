#include "cbsrv/witness.hpp"

#include "cbsrv/error.hpp"
#include "cbsrv/semantics.hpp"

namespace cbsrv {

AccSeq acc_init(const SystemState& init) {
  if (!is_global(init)) {
    throw Error(Errc::partial_state_rejected, "the initial state must be global");
  }
  AccSeq s;
  s.states.push_back(init);
  s.first_partial = 1;
  return s;
}

SystemState upd(const SystemState& incoming, const SystemState& stored) {
  if (incoming.size() != stored.size()) {
    throw Error(Errc::arity_mismatch, "upd over states of different arity");
  }
  SystemState out = stored;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].busy() && !incoming[i].busy()) out[i] = incoming[i];
  }
  return out;
}

void acc_step(AccSeq& s, const Label& label, const SystemState& q) {
  if (s.states.empty()) throw Error(Errc::malformed_stream, "accumulator was not initialised");
  if (q.size() != s.states.front().size()) {
    throw Error(Errc::malformed_stream, "state arity changed mid-stream");
  }
  if (!label.is_beta()) {
    s.labels.push_back(label.name());
    s.states.push_back(q);
    return;
  }
  if (label.component() >= q.size()) {
    throw Error(Errc::malformed_stream, "β of an unknown component " + label.to_string());
  }
  // Only slots from first_partial on can be busy; the global prefix is stable under upd.
  for (std::size_t j = s.first_partial; j < s.states.size(); ++j) s.states[j] = upd(q, s.states[j]);
  while (s.first_partial < s.states.size() && is_global(s.states[s.first_partial])) ++s.first_partial;
}

WitnessPrefix discriminant(const AccSeq& s) {
  WitnessPrefix w;
  if (s.states.empty()) return w;
  std::size_t k = s.first_partial;
  while (k < s.states.size() && is_global(s.states[k])) ++k;
  w.trace.initial = s.states[0];
  for (std::size_t j = 1; j < k; ++j) w.trace.steps.emplace_back(Label::interaction(s.labels[j - 1]), s.states[j]);
  if (k - 1 < s.labels.size()) w.trailing = s.labels[k - 1];
  return w;
}

std::vector<WitnessElement> flatten(const WitnessPrefix& w) {
  std::vector<WitnessElement> out;
  out.reserve(w.element_count());
  out.emplace_back(w.trace.initial);
  for (const auto& [l, q] : w.trace.steps) {
    out.emplace_back(l.name());
    out.emplace_back(q);
  }
  if (w.trailing) out.emplace_back(*w.trailing);
  return out;
}

RgtStream::RgtStream(SystemState init) : acc_(acc_init(init)) {}

std::vector<WitnessElement> RgtStream::start() { return emit_new(); }

std::vector<WitnessElement> RgtStream::push(const Label& label, const SystemState& q) {
  acc_step(acc_, label, q);
  return emit_new();
}

std::vector<WitnessElement> RgtStream::emit_new() {
  // Element e of the flattened prefix: even e is state e/2, odd e is label (e-1)/2.
  const std::size_t k = acc_.first_partial;
  const std::size_t total = 2 * k - 1 + (k - 1 < acc_.labels.size() ? 1 : 0);
  std::vector<WitnessElement> out;
  for (; emitted_ < total; ++emitted_) {
    if (emitted_ % 2 == 0) {
      out.emplace_back(acc_.states[emitted_ / 2]);
    } else {
      out.emplace_back(acc_.labels[(emitted_ - 1) / 2]);
    }
  }
  return out;
}

WitnessPrefix rgt(const Trace& partial_trace) {
  AccSeq s = acc_init(partial_trace.initial);
  for (const auto& [l, q] : partial_trace.steps) acc_step(s, l, q);
  return discriminant(s);
}

Trace witness_oracle(const CompositeSystem& global, const Trace& partial_trace) {
  Semantics sem(global);
  RunState q = sem.initial();
  Trace out;
  out.initial = q.comps;
  for (const auto& name : interactions_of(partial_trace)) {
    auto a = sem.interaction_index(name);
    if (!a || !sem.enabled(q, *a)) {
      throw Error(Errc::replay_failed, "interaction '" + name + "' cannot be replayed in the global system");
    }
    sem.fire_into(q, *a);
    out.steps.emplace_back(Label::interaction(name), q.comps);
  }
  return out;
}

SystemState strip_var(const SystemState& q, std::string_view var) {
  SystemState out = q;
  for (auto& c : out) c.vars.erase(var);
  return out;
}

Trace strip_var(const Trace& t, std::string_view var) {
  Trace out;
  out.initial = strip_var(t.initial, var);
  for (const auto& [l, q] : t.steps) out.steps.emplace_back(l, strip_var(q, var));
  return out;
}

}  // namespace cbsrv
