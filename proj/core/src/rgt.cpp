#include "cbsrv/rgt.hpp"

#include <algorithm>

#include "cbsrv/error.hpp"

namespace cbsrv {

bool RgtTuple::complete() const noexcept {
  return std::none_of(slots.begin(), slots.end(),
                      [](const RgtSlot& s) { return s.kind == RgtSlot::Kind::null; });
}

RgtContext RgtContext::from(const CompositeSystem& transformed) {
  if (!transformed.rgt) throw Error(Errc::invalid_argument, "system has no RGT component");
  RgtContext ctx;
  ctx.n = transformed.components.size();
  ctx.monitored.assign(ctx.n, false);
  for (const auto& m : transformed.rgt->monitored) {
    if (auto i = transformed.component_index(m)) ctx.monitored[*i] = true;
  }
  ctx.tags = transformed.rgt->tags;
  ctx.variant = transformed.rgt->variant;
  return ctx;
}

std::optional<std::size_t> RgtContext::tag_index(std::string_view tag) const noexcept {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag) return i;
  }
  return std::nullopt;
}

RgtState rgt_init(const RgtContext& ctx, const SystemState& init, bool retain_delivered) {
  RgtState s;
  s.gs.assign(ctx.tags.size(), false);
  s.z.assign(ctx.n, false);
  s.mirror = init;
  s.delivered.assign(ctx.n, RgtSlot::null_slot());
  s.retain_delivered = retain_delivered;
  return s;
}

bool is_stable(const RgtState& s) noexcept {
  return std::none_of(s.gs.begin(), s.gs.end(), [](bool b) { return b; });
}

void rgt_new(RgtState& s, const RgtContext& ctx, std::size_t tag, const std::vector<bool>& involved) {
  if (ctx.new_guarded() && !is_stable(s)) {
    throw Error(Errc::guard_violated, "new(" + ctx.tags.at(tag) + ") while a state awaits delivery");
  }
  RgtTuple v;
  v.tag = tag;
  v.slots.reserve(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    if (!ctx.monitored[i]) {
      v.slots.push_back(RgtSlot::unmonitored());
    } else if (involved[i]) {
      s.z[i] = true;
      v.slots.push_back(RgtSlot::null_slot());
    } else if (s.z[i]) {
      v.slots.push_back(RgtSlot::null_slot());
    } else {
      v.slots.push_back(RgtSlot::defined(s.mirror[i]));
    }
  }
  s.V.push_back(std::move(v));
  rgt_check(s, ctx);
}

void rgt_upd(RgtState& s, const RgtContext& ctx, std::size_t i, const ComponentState& exported) {
  if (ctx.upd_guarded() && !is_stable(s)) {
    throw Error(Errc::guard_violated, "upd while a state awaits delivery");
  }
  if (i >= ctx.n || !ctx.monitored[i] || !s.z[i]) {
    throw Error(Errc::not_busy, "upd(" + std::to_string(i + 1) + ") on a component that is not busy");
  }
  s.z[i] = false;
  s.mirror[i] = exported;
  for (auto& t : s.V) {
    if (t.slots[i].kind == RgtSlot::Kind::null) t.slots[i] = RgtSlot::defined(exported);
  }
  rgt_check(s, ctx);
}

void rgt_check(RgtState& s, const RgtContext& /*ctx*/) {
  for (std::size_t j = s.m; j <= s.length(); ++j) {
    const RgtTuple& t = s.at(j);
    if (!s.gs[t.tag]) s.gs[t.tag] = t.complete();
  }
}

std::optional<std::size_t> rgt_deliverable(const RgtState& s) noexcept {
  if (s.m > s.length()) return std::nullopt;
  const RgtTuple& t = s.at(s.m);
  if (!s.gs[t.tag] || !t.complete()) return std::nullopt;
  return t.tag;
}

SystemState RgtDelivery::to_state() const {
  SystemState q;
  q.reserve(slots.size());
  for (const auto& sl : slots) {
    switch (sl.kind) {
      case RgtSlot::Kind::defined: q.push_back(sl.state); break;
      case RgtSlot::Kind::unmonitored: q.push_back({"-", {}}); break;
      case RgtSlot::Kind::null: q.push_back({"null", {}}); break;
    }
  }
  return q;
}

RgtDelivery rgt_get(RgtState& s, const RgtContext& ctx) {
  if (!rgt_deliverable(s)) throw Error(Errc::nothing_to_deliver, "no reconstructed state to deliver");
  RgtDelivery d{s.at(s.m).slots, s.at(s.m).tag};
  s.delivered = d.slots;
  s.delivered_tag = d.tag;
  s.gs[d.tag] = false;
  ++s.m;
  if (!s.retain_delivered) {
    const std::size_t drop = s.m - 1 - s.base;
    s.V.erase(s.V.begin(), s.V.begin() + static_cast<std::ptrdiff_t>(drop));
    s.base = s.m - 1;
  }
  rgt_check(s, ctx);
  return d;
}

bool rgt_equivalent(const RgtTuple& v, const SystemState& q, const std::vector<bool>& monitored) {
  if (v.slots.size() != q.size()) return false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const RgtSlot& sl = v.slots[i];
    if (!monitored[i]) {
      if (sl.kind != RgtSlot::Kind::unmonitored) return false;
    } else if (q[i].busy()) {
      if (sl.kind != RgtSlot::Kind::null) return false;
    } else if (sl.kind != RgtSlot::Kind::defined || sl.state != q[i]) {
      return false;
    }
  }
  return true;
}

RgtState rgt_abstract(const RgtState& s, const RgtContext& ctx) {
  RgtState a;
  a.gs.assign(ctx.tags.size(), false);
  a.z = s.z;
  a.mirror.assign(ctx.n, ComponentState{});
  a.delivered.assign(ctx.n, RgtSlot::null_slot());

  auto blank = [&](const RgtTuple& t) {
    RgtTuple b;
    b.tag = t.tag;
    b.slots.reserve(ctx.n);
    for (const auto& sl : t.slots) {
      b.slots.push_back(sl.kind == RgtSlot::Kind::defined ? RgtSlot::defined({}) : RgtSlot{sl.kind, {}});
    }
    return b;
  };
  auto same_mask = [](const RgtTuple& x, const RgtTuple& y) {
    for (std::size_t i = 0; i < x.slots.size(); ++i) {
      if ((x.slots[i].kind == RgtSlot::Kind::null) != (y.slots[i].kind == RgtSlot::Kind::null)) return false;
    }
    return true;
  };

  std::size_t j = s.m;
  if (j <= s.length() && s.at(j).complete()) {
    a.V.push_back(blank(s.at(j)));
    while (j <= s.length() && s.at(j).complete()) ++j;
  }
  for (; j <= s.length(); ++j) {
    const RgtTuple& t = s.at(j);
    if (!a.V.empty() && !a.V.back().complete() && same_mask(a.V.back(), t)) continue;
    a.V.push_back(blank(t));
  }
  rgt_check(a, ctx);
  return a;
}

}  // namespace cbsrv
