#include "cbsrv/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbsrv/error.hpp"
#include "cbsrv/monitor.hpp"
#include "parsers.hpp"

namespace cbsrv {

using detail::Tok;
using detail::TokenStream;
using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// RGT builtin actions

struct RgtLine {
  std::string port;
  std::string guard;
  std::string action;

  std::string text() const { return port + " [" + guard + "] / " + action; }
};

std::vector<RgtLine> rgt_lines(const RgtSpec& r) {
  const bool new_guarded = r.variant == RgtVariant::guarded || r.variant == RgtVariant::unguarded_upd;
  const bool upd_guarded = r.variant == RgtVariant::guarded || r.variant == RgtVariant::unguarded_new;
  std::vector<RgtLine> out;
  for (const auto& t : r.tags) {
    out.push_back({RgtSpec::new_port(t), new_guarded ? "stable" : "true", "new(" + t + ")"});
  }
  for (const auto& c : r.monitored) {
    out.push_back({RgtSpec::beta_port(c), upd_guarded ? "stable" : "true", "upd(" + c + ")"});
  }
  for (const auto& t : r.tags) out.push_back({RgtSpec::out_port(t), "ready(" + t + ")", "get"});
  return out;
}

// Optional "(name)" after a builtin word.
std::string builtin_call(TokenStream& ts) {
  std::string word = ts.expect_name();
  if (ts.accept_punct("(")) {
    word += "(" + ts.expect_name() + ")";
    ts.expect_punct(")");
  }
  return word;
}

RgtSpec parse_rgt_block(TokenStream& ts) {
  RgtSpec r;
  ts.expect_ident("rgt");
  const detail::Token start = ts.peek();
  r.name = ts.expect_name();
  ts.expect_punct("{");
  std::vector<std::string> seen;
  while (!ts.accept_punct("}")) {
    if (ts.accept_ident("variant")) {
      const detail::Token at = ts.peek();
      std::string v = ts.expect_name();
      // Variant names contain '-', which the tokenizer splits.
      while (ts.accept_punct("-")) v += "-" + ts.expect_name();
      auto pv = parse_rgt_variant(v);
      if (!pv) ts.fail_at(at, "unknown RGT variant '" + v + "'");
      r.variant = *pv;
    } else if (ts.accept_ident("monitored")) {
      if (!ts.is_punct(";")) {
        do {
          r.monitored.push_back(ts.expect_name());
        } while (ts.accept_punct(","));
      }
    } else if (ts.accept_ident("transition")) {
      RgtLine l;
      l.port = ts.expect_name();
      ts.expect_punct("[");
      l.guard = builtin_call(ts);
      ts.expect_punct("]");
      ts.expect_punct("/");
      l.action = builtin_call(ts);
      if (l.action.rfind("new(", 0) == 0) r.tags.push_back(l.action.substr(4, l.action.size() - 5));
      seen.push_back(l.text());
    } else {
      ts.fail("expected variant, monitored or transition");
    }
    ts.expect_punct(";");
  }
  std::vector<std::string> expected;
  for (const auto& l : rgt_lines(r)) expected.push_back(l.text());
  if (seen != expected) {
    throw SyntaxError("RGT transitions do not match the derived set for variant " +
                          std::string(rgt_variant_name(r.variant)),
                      start.line, start.column);
  }
  return r;
}

// ---------------------------------------------------------------------------
// text form

Value parse_literal(TokenStream& ts) {
  Expr e = detail::parse_expression(ts);
  const auto* lit = std::get_if<ExprNode::Literal>(&e->node);
  if (!lit) ts.fail("expected a literal initial value");
  return lit->value;
}

void parse_component_body(TokenStream& ts, AtomicComponent& c) {
  bool have_initial = false;
  while (!ts.accept_punct("}")) {
    if (ts.accept_ident("vars")) {
      if (!ts.is_punct(";")) {
        do {
          std::string name = ts.expect_name();
          ts.expect_punct("=");
          c.vars.push_back({std::move(name), parse_literal(ts)});
        } while (ts.accept_punct(","));
      }
    } else if (ts.accept_ident("ports")) {
      if (!ts.is_punct(";")) {
        do {
          Port p{ts.expect_name(), {}};
          if (ts.accept_punct("(")) {
            if (!ts.is_punct(")")) {
              do {
                p.vars.push_back(ts.expect_name());
              } while (ts.accept_punct(","));
            }
            ts.expect_punct(")");
          }
          c.ports.push_back(std::move(p));
        } while (ts.accept_punct(","));
      }
    } else if (ts.accept_ident("locations")) {
      if (!ts.is_punct(";")) {
        do {
          c.locations.push_back(ts.expect_location());
        } while (ts.accept_punct(","));
      }
    } else if (ts.accept_ident("initial")) {
      if (have_initial) ts.fail("second initial declaration");
      c.initial = ts.expect_location();
      have_initial = true;
    } else if (ts.accept_ident("transition")) {
      Transition t;
      t.from = ts.expect_location();
      ts.expect_punct("-");
      t.port = ts.expect_name();
      ts.expect_punct("->");
      t.to = ts.expect_location();
      t.guard = ex::lit(true);
      if (ts.accept_punct("[")) {
        t.guard = detail::parse_expression(ts);
        ts.expect_punct("]");
      }
      if (ts.accept_punct("/")) {
        ts.expect_punct("[");
        t.step = detail::parse_assignments(ts, "]");
        ts.expect_punct("]");
      }
      c.transitions.push_back(std::move(t));
    } else {
      ts.fail("expected vars, ports, locations, initial or transition");
    }
    ts.expect_punct(";");
  }
  if (!have_initial) ts.fail("component " + c.name + " has no initial location");
}

Interaction parse_interaction_body(TokenStream& ts, std::string name) {
  Interaction in{std::move(name), {}, {}};
  while (!ts.accept_punct("}")) {
    if (ts.accept_ident("ports")) {
      ts.expect_punct(":");
      if (!ts.is_punct(";")) {
        do {
          PortRef r;
          r.component = ts.expect_name();
          ts.expect_punct(".");
          r.port = ts.expect_name();
          in.ports.push_back(std::move(r));
        } while (ts.accept_punct(","));
      }
    } else if (ts.accept_ident("transfer")) {
      ts.expect_punct(":");
      ts.expect_punct("[");
      in.transfer = detail::parse_assignments(ts, "]");
      ts.expect_punct("]");
    } else {
      ts.fail("expected ports or transfer");
    }
    ts.expect_punct(";");
  }
  return in;
}

CompositeSystem parse_text(std::string_view text) {
  TokenStream ts(detail::tokenize(text));
  CompositeSystem sys;
  if (ts.accept_ident("system")) {
    sys.name = ts.expect_name();
    ts.expect_punct(";");
  }
  while (!ts.at_end()) {
    if (ts.accept_ident("component")) {
      AtomicComponent c;
      c.name = ts.expect_name();
      ts.expect_punct("{");
      parse_component_body(ts, c);
      sys.components.push_back(std::move(c));
    } else if (ts.accept_ident("interaction")) {
      std::string name = ts.expect_name();
      ts.expect_punct("{");
      sys.interactions.push_back(parse_interaction_body(ts, std::move(name)));
    } else if (ts.is_ident("rgt")) {
      if (sys.rgt) ts.fail("second rgt block");
      sys.rgt = parse_rgt_block(ts);
    } else if (ts.is_ident("monitor")) {
      if (sys.monitor) ts.fail("second monitor block");
      sys.monitor = std::make_shared<const MonitorSpec>(detail::parse_monitor_block(ts));
    } else {
      ts.fail("expected component, interaction, rgt or monitor");
    }
  }
  return sys;
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string render_assignments(const std::vector<Assignment>& as) {
  std::vector<std::string> parts;
  for (const auto& a : as) parts.push_back(a.target + " := " + to_string(a.source));
  return join(parts, "; ");
}

bool is_true_literal(const Expr& e) {
  const auto* lit = std::get_if<ExprNode::Literal>(&e->node);
  return lit && lit->value == Value(true);
}

// ---------------------------------------------------------------------------
// JSON form

[[noreturn]] void json_fail(const std::string& message) { throw SyntaxError(message, 1, 1); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) json_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string str_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) json_fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> str_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (!v.is_array()) json_fail(std::string("field '") + key + "' must be an array");
  for (const auto& x : v) {
    if (!x.is_string()) json_fail(std::string("field '") + key + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json value_json(const Value& v) { return v.is_int() ? json(v.as_int()) : json(v.as_bool()); }

Value value_from_json(const json& j) {
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  json_fail("initial values must be integers or booleans");
}

json assignments_json(const std::vector<Assignment>& as) {
  json out = json::array();
  for (const auto& a : as) out.push_back({{"target", a.target}, {"expr", to_string(a.source)}});
  return out;
}

std::vector<Assignment> assignments_from_json(const json& j, const char* key) {
  std::vector<Assignment> out;
  if (!j.contains(key)) return out;
  for (const auto& a : j.at(key)) out.push_back({str_field(a, "target"), parse_expr(str_field(a, "expr"))});
  return out;
}

json monitor_json(const MonitorSpec& m) {
  json events = json::array();
  for (const auto& e : m.events) events.push_back({{"name", e.name}, {"condition", to_string(e.condition)}});
  json states = json::array();
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    states.push_back({{"name", m.states[i].name},
                      {"verdict", std::string(verdict_name(m.states[i].verdict))},
                      {"initial", i == m.initial}});
  }
  json transitions = json::array();
  for (const auto& t : m.transitions) {
    transitions.push_back(
        {{"from", m.states[t.from].name}, {"to", m.states[t.to].name}, {"guard", to_string(t.guard)}});
  }
  return {{"name", m.name},       {"emit_initial", m.emit_initial}, {"strict", m.strict},
          {"events", events},     {"states", states},               {"transitions", transitions}};
}

MonitorSpec monitor_from_json(const json& j) {
  // Rebuilt through the text grammar so both forms share one set of checks.
  MonitorSpec m;
  m.name = str_field(j, "name");
  std::string text = "monitor " + m.name + " {\n";
  if (j.value("emit_initial", false)) text += "emit initial;\n";
  if (j.value("strict", false)) text += "strict;\n";
  for (const auto& e : field(j, "events")) text += "event " + str_field(e, "name") + " = " + str_field(e, "condition") + ";\n";
  for (const auto& s : field(j, "states")) {
    text += "state " + str_field(s, "name") + (s.value("initial", false) ? " initial " : " ") +
            str_field(s, "verdict") + ";\n";
  }
  for (const auto& t : field(j, "transitions")) {
    text += "transition " + str_field(t, "from") + " -> " + str_field(t, "to") + " [" + str_field(t, "guard") + "];\n";
  }
  return parse_monitor(text + "}\n");
}

}  // namespace

CompositeSystem parse_model_unchecked(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_model_json(text);
  return parse_text(text);
}

CompositeSystem parse_model(std::string_view text) {
  CompositeSystem sys = parse_model_unchecked(text);
  require_valid(sys);
  return sys;
}

std::string render_model(const CompositeSystem& sys) {
  std::string out = "system " + sys.name + ";\n";
  for (const auto& c : sys.components) {
    out += "\ncomponent " + c.name + " {\n";
    if (!c.vars.empty()) {
      std::vector<std::string> vs;
      for (const auto& v : c.vars) vs.push_back(v.name + " = " + v.init.to_string());
      out += "  vars " + join(vs, ", ") + ";\n";
    }
    std::vector<std::string> ps;
    for (const auto& p : c.ports) ps.push_back(p.vars.empty() ? p.name : p.name + "(" + join(p.vars, ", ") + ")");
    out += "  ports " + join(ps, ", ") + ";\n";
    out += "  locations " + join(c.locations, ", ") + ";\n";
    out += "  initial " + c.initial + ";\n";
    for (const auto& t : c.transitions) {
      out += "  transition " + t.from + " -" + t.port + "-> " + t.to;
      if (!is_true_literal(t.guard)) out += " [" + to_string(t.guard) + "]";
      if (!t.step.empty()) out += " / [" + render_assignments(t.step) + "]";
      out += ";\n";
    }
    out += "}\n";
  }
  for (const auto& in : sys.interactions) {
    std::vector<std::string> ps;
    for (const auto& p : in.ports) ps.push_back(p.to_string());
    out += "\ninteraction " + in.name + " {\n  ports: " + join(ps, ", ") + ";\n";
    if (!in.transfer.empty()) out += "  transfer: [" + render_assignments(in.transfer) + "];\n";
    out += "}\n";
  }
  if (sys.rgt) {
    out += "\nrgt " + sys.rgt->name + " {\n";
    out += "  variant " + std::string(rgt_variant_name(sys.rgt->variant)) + ";\n";
    out += "  monitored " + join(sys.rgt->monitored, ", ") + ";\n";
    for (const auto& l : rgt_lines(*sys.rgt)) out += "  transition " + l.text() + ";\n";
    out += "}\n";
  }
  if (sys.monitor) out += "\n" + render_monitor(*sys.monitor, 0);
  return out;
}

std::string render_model_json(const CompositeSystem& sys) {
  json j;
  j["system"] = sys.name;
  json comps = json::array();
  for (const auto& c : sys.components) {
    json vars = json::array();
    for (const auto& v : c.vars) vars.push_back({{"name", v.name}, {"init", value_json(v.init)}});
    json ports = json::array();
    for (const auto& p : c.ports) ports.push_back({{"name", p.name}, {"vars", p.vars}});
    json ts = json::array();
    for (const auto& t : c.transitions) {
      ts.push_back({{"from", t.from},
                    {"port", t.port},
                    {"to", t.to},
                    {"guard", to_string(t.guard)},
                    {"step", assignments_json(t.step)}});
    }
    comps.push_back({{"name", c.name},
                     {"vars", vars},
                     {"ports", ports},
                     {"locations", c.locations},
                     {"initial", c.initial},
                     {"transitions", ts}});
  }
  j["components"] = comps;
  json ints = json::array();
  for (const auto& in : sys.interactions) {
    json ps = json::array();
    for (const auto& p : in.ports) ps.push_back(p.to_string());
    ints.push_back({{"name", in.name}, {"ports", ps}, {"transfer", assignments_json(in.transfer)}});
  }
  j["interactions"] = ints;
  if (sys.rgt) {
    j["rgt"] = {{"name", sys.rgt->name},
                {"variant", std::string(rgt_variant_name(sys.rgt->variant))},
                {"monitored", sys.rgt->monitored},
                {"tags", sys.rgt->tags}};
  }
  if (sys.monitor) j["monitor"] = monitor_json(*sys.monitor);
  return j.dump(2) + "\n";
}

CompositeSystem parse_model_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    json_fail(std::string("invalid JSON: ") + e.what());
  }
  try {
    CompositeSystem sys;
    if (j.contains("system")) sys.name = str_field(j, "system");
    for (const auto& jc : field(j, "components")) {
      AtomicComponent c;
      c.name = str_field(jc, "name");
      if (jc.contains("vars")) {
        for (const auto& v : jc.at("vars")) c.vars.push_back({str_field(v, "name"), value_from_json(field(v, "init"))});
      }
      if (jc.contains("ports")) {
        for (const auto& p : jc.at("ports")) c.ports.push_back({str_field(p, "name"), str_list(p, "vars")});
      }
      c.locations = str_list(jc, "locations");
      c.initial = str_field(jc, "initial");
      if (jc.contains("transitions")) {
        for (const auto& t : jc.at("transitions")) {
          Transition tr;
          tr.from = str_field(t, "from");
          tr.port = str_field(t, "port");
          tr.to = str_field(t, "to");
          tr.guard = t.contains("guard") ? parse_expr(str_field(t, "guard")) : ex::lit(true);
          tr.step = assignments_from_json(t, "step");
          c.transitions.push_back(std::move(tr));
        }
      }
      sys.components.push_back(std::move(c));
    }
    if (j.contains("interactions")) {
      for (const auto& ji : j.at("interactions")) {
        Interaction in;
        in.name = str_field(ji, "name");
        for (const auto& p : str_list(ji, "ports")) {
          const auto dot = p.find('.');
          if (dot == std::string::npos) json_fail("port reference '" + p + "' is not Comp.port");
          in.ports.push_back({p.substr(0, dot), p.substr(dot + 1)});
        }
        in.transfer = assignments_from_json(ji, "transfer");
        sys.interactions.push_back(std::move(in));
      }
    }
    if (j.contains("rgt")) {
      const json& jr = j.at("rgt");
      RgtSpec r;
      if (jr.contains("name")) r.name = str_field(jr, "name");
      if (jr.contains("variant")) {
        auto v = parse_rgt_variant(str_field(jr, "variant"));
        if (!v) json_fail("unknown RGT variant");
        r.variant = *v;
      }
      r.monitored = str_list(jr, "monitored");
      r.tags = str_list(jr, "tags");
      sys.rgt = std::move(r);
    }
    if (j.contains("monitor")) sys.monitor = std::make_shared<const MonitorSpec>(monitor_from_json(j.at("monitor")));
    return sys;
  } catch (const json::exception& e) {
    json_fail(std::string("malformed model JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_argument, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CompositeSystem load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace cbsrv
