#include "cbsrv/trace_io.hpp"

#include <sstream>

#include <json.hpp>

#include "cbsrv/error.hpp"

namespace cbsrv {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void malformed(const std::string& message) { throw Error(Errc::malformed_trace, message); }

json state_json(const SystemState& q) {
  json out = json::array();
  for (const auto& c : q) {
    json vars = json::object();
    for (const auto& [name, v] : c.vars) vars[name] = v.is_int() ? json(v.as_int()) : json(v.as_bool());
    out.push_back({{"loc", c.location}, {"vars", vars}});
  }
  return out;
}

SystemState state_from(const json& j) {
  if (!j.is_array()) malformed("a state must be a JSON array");
  SystemState q;
  for (const auto& c : j) {
    if (!c.is_object() || !c.contains("loc") || !c.at("loc").is_string()) {
      malformed("a component state needs a string field 'loc'");
    }
    ComponentState s;
    s.location = c.at("loc").get<std::string>();
    if (c.contains("vars")) {
      if (!c.at("vars").is_object()) malformed("'vars' must be an object");
      for (const auto& [name, v] : c.at("vars").items()) {
        if (v.is_boolean()) {
          s.vars.set(name, Value(v.get<bool>()));
        } else if (v.is_number_integer()) {
          s.vars.set(name, Value(v.get<std::int64_t>()));
        } else {
          malformed("variable '" + name + "' must be an integer or a boolean");
        }
      }
    }
    q.push_back(std::move(s));
  }
  return q;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
}

std::string state_line(const SystemState& q) { return "STATE " + state_json(q).dump() + "\n"; }

Trace read_json_form(std::string_view text) {
  json j = parse_json(text);
  if (!j.is_array() || j.empty()) malformed("a trace must be a non-empty JSON array");
  Trace t;
  t.initial = state_from(j[0]);
  if (j.size() % 2 == 0) malformed("a trace must end with a state");
  for (std::size_t i = 1; i + 1 < j.size(); i += 2) {
    if (!j[i].is_string()) malformed("labels must be strings");
    t.steps.emplace_back(Label::parse(j[i].get<std::string>()), state_from(j[i + 1]));
  }
  return t;
}

Trace read_line_form(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<SystemState> initial;
  std::optional<Label> pending;
  Trace t;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    const std::string kw = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? std::string() : line.substr(sp + 1);
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (kw == "STATE") {
      SystemState q = state_from(parse_json(rest));
      if (!initial) {
        initial = std::move(q);
      } else if (pending) {
        t.steps.emplace_back(std::move(*pending), std::move(q));
        pending.reset();
      } else {
        malformed("two STATE lines without a LABEL between them" + where);
      }
    } else if (kw == "LABEL") {
      if (!initial || pending) malformed("LABEL out of place" + where);
      pending = Label::parse(rest);
    } else if (kw != "DELIVER" && kw != "VERDICT") {
      malformed("unknown line kind '" + kw + "'" + where);
    }
  }
  if (!initial) malformed("trace has no STATE line");
  if (pending) malformed("trace ends with a LABEL");
  t.initial = std::move(*initial);
  return t;
}

}  // namespace

std::string state_to_json(const SystemState& q) { return state_json(q).dump(); }

SystemState state_from_json(std::string_view text) { return state_from(parse_json(text)); }

std::string write_trace_lines(const Trace& t) {
  std::string out = state_line(t.initial);
  for (const auto& [l, q] : t.steps) out += "LABEL " + l.to_string() + "\n" + state_line(q);
  return out;
}

std::string write_run_lines(const RunResult& r) {
  std::string out;
  std::size_t d = 0;
  auto annotations = [&](std::size_t upto) {
    for (; d < r.deliveries.size() && r.deliveries[d].after_step <= upto; ++d) {
      const DeliveryRecord& rec = r.deliveries[d];
      if (!rec.tag.empty()) out += "DELIVER " + rec.tag + " " + state_json(rec.state).dump() + "\n";
      if (rec.verdict) out += "VERDICT " + std::string(verdict_name(*rec.verdict)) + "\n";
    }
  };
  out += state_line(r.trace.initial);
  annotations(0);
  for (std::size_t k = 0; k < r.trace.steps.size(); ++k) {
    out += "LABEL " + r.trace.steps[k].first.to_string() + "\n" + state_line(r.trace.steps[k].second);
    annotations(k + 1);
  }
  annotations(static_cast<std::size_t>(-1));
  return out;
}

std::string write_trace_json(const Trace& t) {
  json out = json::array();
  out.push_back(state_json(t.initial));
  for (const auto& [l, q] : t.steps) {
    out.push_back(l.to_string());
    out.push_back(state_json(q));
  }
  return out.dump();
}

Trace read_trace(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) malformed("empty trace");
  return text[first] == '[' ? read_json_form(text) : read_line_form(text);
}

std::string write_witness_lines(const WitnessPrefix& w) {
  std::string out = write_trace_lines(w.trace);
  if (w.trailing) out += "LABEL " + *w.trailing + "\n";
  return out;
}

std::string write_witness_json(const WitnessPrefix& w) {
  json out = json::array();
  for (const auto& e : flatten(w)) {
    if (const auto* q = std::get_if<SystemState>(&e)) {
      out.push_back(state_json(*q));
    } else {
      out.push_back(std::get<std::string>(e));
    }
  }
  return out.dump();
}

}  // namespace cbsrv
