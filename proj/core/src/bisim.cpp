#include "cbsrv/bisim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "cbsrv/error.hpp"
#include "cbsrv/semantics.hpp"

namespace cbsrv {

// ---------------------------------------------------------------------------
// state codec

/// Flat integer encoding of RunState. Components: location index then variable values
/// in valuation order. With RGT: gs bit words, z bit words, |V|, then one word per tuple
/// (tag in the low 16 bits, two bits of slot kind per component above).
struct StateCodec {
  struct Comp {
    std::vector<std::string> locations;
    std::unordered_map<std::string, std::int64_t> loc_index;
    std::vector<std::string> vars;  // valuation order
    std::vector<bool> is_bool;
  };
  std::vector<Comp> comps;
  bool has_rgt = false;
  std::size_t n = 0;
  std::size_t tags = 0;
  std::vector<std::uint32_t> sorted;  // state ids ordered by key, for find()

  static std::size_t words(std::size_t bits) { return (bits + 63) / 64; }

  void encode(const RunState& q, std::vector<std::int64_t>& out) const {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const Comp& c = comps[i];
      const ComponentState& s = q.comps[i];
      out.push_back(c.loc_index.at(s.location));
      std::size_t k = 0;
      for (const auto& [name, v] : s.vars) {
        (void)name;
        out.push_back(c.is_bool[k++] ? static_cast<std::int64_t>(v.as_bool()) : v.as_int());
      }
    }
    if (!has_rgt) return;
    const RgtState& r = *q.rgt;
    auto bits = [&](const std::vector<bool>& b) {
      for (std::size_t w = 0; w < words(b.size()); ++w) {
        std::int64_t word = 0;
        for (std::size_t j = w * 64; j < std::min(b.size(), w * 64 + 64); ++j) {
          if (b[j]) word |= std::int64_t{1} << (j - w * 64);
        }
        out.push_back(word);
      }
    };
    bits(r.gs);
    bits(r.z);
    out.push_back(static_cast<std::int64_t>(r.V.size()));
    for (const auto& t : r.V) {
      std::int64_t w = static_cast<std::int64_t>(t.tag);
      for (std::size_t i = 0; i < n; ++i) w |= static_cast<std::int64_t>(t.slots[i].kind) << (16 + 2 * i);
      out.push_back(w);
    }
  }

  SystemState decode_comps(const std::int64_t* k, std::size_t* used = nullptr) const {
    SystemState q;
    q.reserve(comps.size());
    std::size_t p = 0;
    for (const Comp& c : comps) {
      ComponentState s;
      s.location = c.locations[static_cast<std::size_t>(k[p++])];
      for (std::size_t j = 0; j < c.vars.size(); ++j) {
        const std::int64_t v = k[p++];
        s.vars.set(c.vars[j], c.is_bool[j] ? Value(v != 0) : Value(v));
      }
      q.push_back(std::move(s));
    }
    if (used) *used = p;
    return q;
  }

  RunState decode(const std::int64_t* k) const {
    RunState q;
    std::size_t p = 0;
    q.comps = decode_comps(k, &p);
    if (!has_rgt) return q;
    RgtState r;
    auto bits = [&](std::size_t count) {
      std::vector<bool> b(count);
      for (std::size_t w = 0; w < words(count); ++w) {
        const std::int64_t word = k[p++];
        for (std::size_t j = w * 64; j < std::min(count, w * 64 + 64); ++j) b[j] = ((word >> (j - w * 64)) & 1) != 0;
      }
      return b;
    };
    r.gs = bits(tags);
    r.z = bits(n);
    const auto len = static_cast<std::size_t>(k[p++]);
    for (std::size_t j = 0; j < len; ++j) {
      const std::int64_t w = k[p++];
      RgtTuple t;
      t.tag = static_cast<std::size_t>(w & 0xFFFF);
      for (std::size_t i = 0; i < n; ++i) {
        t.slots.push_back({static_cast<RgtSlot::Kind>((w >> (16 + 2 * i)) & 3), {}});
      }
      r.V.push_back(std::move(t));
    }
    r.mirror.assign(n, ComponentState{});
    r.delivered.assign(n, RgtSlot::null_slot());
    q.rgt = std::move(r);
    return q;
  }

  // Stable iff no gs flag is set.
  bool stable(const std::int64_t* k) const {
    if (!has_rgt) return true;
    std::size_t p = 0;
    for (const Comp& c : comps) p += 1 + c.vars.size();
    for (std::size_t w = 0; w < words(tags); ++w) {
      if (k[p + w] != 0) return false;
    }
    return true;
  }
};

std::optional<std::uint32_t> ExplicitLts::label_index(std::string_view name) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

SystemState ExplicitLts::components(std::uint32_t state) const {
  if (!codec) throw Error(Errc::invalid_argument, "LTS has no state codec");
  return codec->decode_comps(keys.data() + key_offsets.at(state));
}

bool ExplicitLts::stable(std::uint32_t state) const {
  if (!codec) throw Error(Errc::invalid_argument, "LTS has no state codec");
  return codec->stable(keys.data() + key_offsets.at(state));
}

std::optional<std::uint32_t> ExplicitLts::find(const SystemState& comps) const {
  if (!codec) throw Error(Errc::invalid_argument, "LTS has no state codec");
  if (codec->has_rgt) throw Error(Errc::invalid_argument, "find() needs a system without RGT");
  std::vector<std::int64_t> key;
  codec->encode(RunState{comps, std::nullopt, std::nullopt}, key);
  auto less = [&](std::uint32_t id, const std::vector<std::int64_t>& k) {
    return std::lexicographical_compare(keys.begin() + static_cast<std::ptrdiff_t>(key_offsets[id]),
                                        keys.begin() + static_cast<std::ptrdiff_t>(key_offsets[id + 1]),
                                        k.begin(), k.end());
  };
  auto it = std::lower_bound(codec->sorted.begin(), codec->sorted.end(), key, less);
  if (it == codec->sorted.end()) return std::nullopt;
  const auto b = keys.begin() + static_cast<std::ptrdiff_t>(key_offsets[*it]);
  const auto e = keys.begin() + static_cast<std::ptrdiff_t>(key_offsets[*it + 1]);
  if (!std::equal(b, e, key.begin(), key.end())) return std::nullopt;
  return *it;
}

bool is_beta_label(std::string_view label) noexcept { return label.rfind("beta_", 0) == 0; }
bool is_delivery_label(std::string_view label) noexcept { return label.rfind("out_", 0) == 0; }

// ---------------------------------------------------------------------------
// exploration

namespace {

struct KeyHash {
  const std::vector<std::int64_t>* keys;
  const std::vector<std::size_t>* offs;
  std::size_t operator()(std::uint32_t id) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (std::size_t i = (*offs)[id]; i < (*offs)[id + 1]; ++i) {
      h ^= static_cast<std::size_t>((*keys)[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct KeyEq {
  const std::vector<std::int64_t>* keys;
  const std::vector<std::size_t>* offs;
  bool operator()(std::uint32_t a, std::uint32_t b) const noexcept {
    const auto ka = keys->begin() + static_cast<std::ptrdiff_t>((*offs)[a]);
    const auto kb = keys->begin() + static_cast<std::ptrdiff_t>((*offs)[b]);
    return std::equal(ka, keys->begin() + static_cast<std::ptrdiff_t>((*offs)[a + 1]), kb,
                      keys->begin() + static_cast<std::ptrdiff_t>((*offs)[b + 1]));
  }
};

std::shared_ptr<StateCodec> make_codec(const Semantics& sem, const RunState& init) {
  auto codec = std::make_shared<StateCodec>();
  const CompositeSystem& sys = sem.system();
  for (std::size_t i = 0; i < sys.components.size(); ++i) {
    StateCodec::Comp c;
    c.locations = sys.components[i].locations;
    for (std::size_t l = 0; l < c.locations.size(); ++l) c.loc_index.emplace(c.locations[l], static_cast<std::int64_t>(l));
    for (const auto& [name, v] : init.comps[i].vars) {
      c.vars.push_back(name);
      c.is_bool.push_back(v.is_bool());
    }
    codec->comps.push_back(std::move(c));
  }
  codec->n = sys.components.size();
  if (sem.rgt_context()) {
    codec->has_rgt = true;
    codec->tags = sem.rgt_context()->tags.size();
    if (codec->n > 23 || codec->tags > 0xFFFF) {
      throw Error(Errc::invalid_argument, "system too large for the compact state encoding");
    }
  }
  return codec;
}

}  // namespace

ExplicitLts explore(const CompositeSystem& sys, std::size_t state_bound, const HidePredicate& hide) {
  if (sys.monitor) throw Error(Errc::invalid_argument, "explore() expects a system without a monitor");
  Semantics sem(sys);
  ExplicitLts lts;
  for (std::size_t a = 0; a < sem.interaction_count(); ++a) {
    lts.labels.push_back(sem.interaction_name(a));
    lts.hidden.push_back(hide && hide(sem.interaction_name(a)));
  }
  RunState init = sem.initial();
  if (init.rgt) init.rgt = rgt_abstract(*init.rgt, *sem.rgt_context());
  auto codec = make_codec(sem, init);

  lts.key_offsets.push_back(0);
  std::unordered_set<std::uint32_t, KeyHash, KeyEq> index(
      1024, KeyHash{&lts.keys, &lts.key_offsets}, KeyEq{&lts.keys, &lts.key_offsets});

  // Appends the candidate key as a tentative state and drops it again if already known.
  auto intern = [&](const RunState& q) -> std::uint32_t {
    codec->encode(q, lts.keys);
    const auto id = static_cast<std::uint32_t>(lts.key_offsets.size() - 1);
    lts.key_offsets.push_back(lts.keys.size());
    auto it = index.find(id);
    if (it != index.end()) {
      lts.key_offsets.pop_back();
      lts.keys.resize(lts.key_offsets.back());
      return *it;
    }
    if (id >= state_bound) {
      throw Error(Errc::bound_exceeded, "state space exceeds " + std::to_string(state_bound) + " states");
    }
    index.insert(id);
    return id;
  };

  intern(init);
  for (std::uint32_t s = 0; s + 1 < lts.key_offsets.size(); ++s) {
    const RunState q = codec->decode(lts.keys.data() + lts.key_offsets[s]);
    for (std::size_t a : sem.enabled_interactions(q)) {
      RunState next = sem.fire(q, a);
      if (next.rgt) next.rgt = rgt_abstract(*next.rgt, *sem.rgt_context());
      const std::uint32_t t = intern(next);
      lts.edges.push_back({s, static_cast<std::uint32_t>(a), t});
    }
  }
  lts.num_states = lts.key_offsets.size() - 1;
  if (!codec->has_rgt) {
    codec->sorted.resize(lts.num_states);
    std::iota(codec->sorted.begin(), codec->sorted.end(), 0U);
    std::sort(codec->sorted.begin(), codec->sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(
          lts.keys.begin() + static_cast<std::ptrdiff_t>(lts.key_offsets[a]),
          lts.keys.begin() + static_cast<std::ptrdiff_t>(lts.key_offsets[a + 1]),
          lts.keys.begin() + static_cast<std::ptrdiff_t>(lts.key_offsets[b]),
          lts.keys.begin() + static_cast<std::ptrdiff_t>(lts.key_offsets[b + 1]));
    });
  }
  lts.codec = std::move(codec);
  return lts;
}

// ---------------------------------------------------------------------------
// weak bisimulation

namespace {

constexpr std::uint32_t kTau = 0;

/// CSR adjacency with global label ids (kTau for hidden moves) and τ-closures.
struct Graph {
  std::size_t n = 0;
  std::vector<std::size_t> off;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;  // (label, dst)
  std::vector<std::size_t> tau_off;
  std::vector<std::uint32_t> tau;  // τ*(s), s included

  void build(std::size_t states, std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> edges) {
    n = states;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    off.assign(n + 1, 0);
    for (const auto& [s, l, t] : edges) ++off[s + 1];
    std::partial_sum(off.begin(), off.end(), off.begin());
    out.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) out[i] = {std::get<1>(edges[i]), std::get<2>(edges[i])};

    tau_off.assign(1, 0);
    std::vector<std::uint32_t> seen_at(n, UINT32_MAX);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t s = 0; s < n; ++s) {
      stack.assign(1, s);
      seen_at[s] = s;
      while (!stack.empty()) {
        const std::uint32_t u = stack.back();
        stack.pop_back();
        tau.push_back(u);
        for (std::size_t e = off[u]; e < off[u + 1]; ++e) {
          if (out[e].first != kTau) continue;
          const std::uint32_t v = out[e].second;
          if (seen_at[v] != s) {
            seen_at[v] = s;
            stack.push_back(v);
          }
        }
      }
      tau_off.push_back(tau.size());
    }
  }
};

/// Label ids shared by both LTSs; 0 is τ.
std::vector<std::uint32_t> label_map(const ExplicitLts& l, std::map<std::string, std::uint32_t>& names) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < l.labels.size(); ++i) {
    if (l.hidden[i]) {
      out.push_back(kTau);
      continue;
    }
    auto [it, fresh] = names.emplace(l.labels[i], static_cast<std::uint32_t>(names.size() + 1));
    (void)fresh;
    out.push_back(it->second);
  }
  return out;
}

struct VecHash {
  std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h ^= std::hash<std::uint64_t>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

Graph union_graph(const ExplicitLts& l1, const ExplicitLts& l2, std::map<std::string, std::uint32_t>& names) {
  const auto m1 = label_map(l1, names);
  const auto m2 = label_map(l2, names);
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> edges;
  edges.reserve(l1.edges.size() + l2.edges.size());
  for (const auto& e : l1.edges) edges.emplace_back(e.src, m1[e.label], e.dst);
  const auto shift = static_cast<std::uint32_t>(l1.num_states);
  for (const auto& e : l2.edges) edges.emplace_back(e.src + shift, m2[e.label], e.dst + shift);
  Graph g;
  g.build(l1.num_states + l2.num_states, std::move(edges));
  return g;
}

}  // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>> BisimResult::relation() const {
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> right_of;
  for (std::uint32_t r = 0; r < block_right.size(); ++r) right_of[block_right[r]].push_back(r);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t l = 0; l < block_left.size(); ++l) {
    auto it = right_of.find(block_left[l]);
    if (it == right_of.end()) continue;
    for (std::uint32_t r : it->second) out.emplace_back(l, r);
  }
  return out;
}

BisimResult weak_bisimilar(const ExplicitLts& l1, const ExplicitLts& l2) {
  std::map<std::string, std::uint32_t> names;
  const Graph g = union_graph(l1, l2, names);
  const std::size_t n = g.n;

  std::vector<std::uint32_t> block(n, 0);
  std::size_t blocks = 1;
  std::vector<std::size_t> r_off(n + 1, 0);
  std::vector<std::uint32_t> r;  // R(s): blocks τ-reachable from s
  std::vector<std::uint64_t> sig;
  for (;;) {
    r.clear();
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t start = r.size();
      for (std::size_t k = g.tau_off[s]; k < g.tau_off[s + 1]; ++k) r.push_back(block[g.tau[k]]);
      std::sort(r.begin() + static_cast<std::ptrdiff_t>(start), r.end());
      r.erase(std::unique(r.begin() + static_cast<std::ptrdiff_t>(start), r.end()), r.end());
      r_off[s + 1] = r.size();
    }
    // sig(s) = {(τ, b) | b ∈ R(s)} ∪ {(a, b) | s ⇒ u -a-> t, b ∈ R(t)}, keyed by the old block.
    std::unordered_map<std::vector<std::uint64_t>, std::uint32_t, VecHash> ids;
    std::vector<std::uint32_t> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      sig.clear();
      sig.push_back(block[s]);
      for (std::size_t k = r_off[s]; k < r_off[s + 1]; ++k) sig.push_back((std::uint64_t{kTau} << 32) | r[k]);
      for (std::size_t k = g.tau_off[s]; k < g.tau_off[s + 1]; ++k) {
        const std::uint32_t u = g.tau[k];
        for (std::size_t e = g.off[u]; e < g.off[u + 1]; ++e) {
          const auto [label, t] = g.out[e];
          if (label == kTau) continue;
          for (std::size_t j = r_off[t]; j < r_off[t + 1]; ++j) sig.push_back((std::uint64_t{label} << 32) | r[j]);
        }
      }
      std::sort(sig.begin() + 1, sig.end());
      sig.erase(std::unique(sig.begin() + 1, sig.end()), sig.end());
      auto [it, fresh] = ids.emplace(sig, static_cast<std::uint32_t>(ids.size()));
      (void)fresh;
      next[s] = it->second;
    }
    const std::size_t count = ids.size();
    block.swap(next);
    if (count == blocks) break;
    blocks = count;
  }

  BisimResult res;
  res.blocks = blocks;
  res.block_left.assign(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(l1.num_states));
  res.block_right.assign(block.begin() + static_cast<std::ptrdiff_t>(l1.num_states), block.end());
  res.equivalent = l1.num_states > 0 && l2.num_states > 0 && res.related(l1.initial(), l2.initial());
  if (!res.equivalent) {
    if (auto cx = find_distinguishing_trace(l1, l2)) {
      res.counterexample = std::move(cx->first);
      res.counterexample_in_left = cx->second;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// distinguishing traces

namespace {

using StateSet = std::vector<std::uint32_t>;

StateSet closure(const Graph& g, const StateSet& s) {
  StateSet out;
  for (std::uint32_t u : s) out.insert(out.end(), g.tau.begin() + static_cast<std::ptrdiff_t>(g.tau_off[u]),
                                       g.tau.begin() + static_cast<std::ptrdiff_t>(g.tau_off[u + 1]));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StateSet after(const Graph& g, const StateSet& s, std::uint32_t label) {
  StateSet out;
  for (std::uint32_t u : s) {
    for (std::size_t e = g.off[u]; e < g.off[u + 1]; ++e) {
      if (g.out[e].first == label) out.push_back(g.out[e].second);
    }
  }
  return closure(g, out);
}

Graph single_graph(const ExplicitLts& l, const std::vector<std::uint32_t>& map) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> edges;
  edges.reserve(l.edges.size());
  for (const auto& e : l.edges) edges.emplace_back(e.src, map[e.label], e.dst);
  Graph g;
  g.build(l.num_states, std::move(edges));
  return g;
}

std::string set_key(const StateSet& a, const StateSet& b) {
  std::string k;
  k.reserve((a.size() + b.size() + 1) * 4);
  auto put = [&](std::uint32_t x) { k.append(reinterpret_cast<const char*>(&x), sizeof x); };
  for (auto x : a) put(x);
  put(UINT32_MAX);
  for (auto x : b) put(x);
  return k;
}

}  // namespace

std::optional<std::pair<std::vector<std::string>, bool>> find_distinguishing_trace(
    const ExplicitLts& l1, const ExplicitLts& l2, std::size_t max_depth) {
  if (l1.num_states == 0 || l2.num_states == 0) return std::nullopt;
  std::map<std::string, std::uint32_t> names;
  const Graph g1 = single_graph(l1, label_map(l1, names));
  const Graph g2 = single_graph(l2, label_map(l2, names));
  std::vector<std::string> label_name(names.size() + 1);
  for (const auto& [name, id] : names) label_name[id] = name;

  struct Node {
    StateSet a, b;
    std::size_t parent;
    std::uint32_t label;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_set<std::string> seen;
  constexpr std::size_t kMaxNodes = 2'000'000;
  nodes.push_back({closure(g1, {l1.initial()}), closure(g2, {l2.initial()}), SIZE_MAX, 0, 0});
  seen.insert(set_key(nodes[0].a, nodes[0].b));
  for (std::size_t i = 0; i < nodes.size() && nodes.size() < kMaxNodes; ++i) {
    if (nodes[i].depth >= max_depth) continue;
    for (std::uint32_t label = 1; label < label_name.size(); ++label) {
      StateSet a = after(g1, nodes[i].a, label);
      StateSet b = after(g2, nodes[i].b, label);
      if (a.empty() && b.empty()) continue;
      if (a.empty() != b.empty()) {
        std::vector<std::string> trace{label_name[label]};
        for (std::size_t p = i; nodes[p].parent != SIZE_MAX; p = nodes[p].parent) trace.push_back(label_name[nodes[p].label]);
        std::reverse(trace.begin(), trace.end());
        return std::make_pair(std::move(trace), !a.empty());
      }
      if (seen.insert(set_key(a, b)).second) {
        nodes.push_back({std::move(a), std::move(b), i, label, nodes[i].depth + 1});
      }
    }
  }
  return std::nullopt;
}

}  // namespace cbsrv
