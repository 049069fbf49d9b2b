#include "cbsrv/state.hpp"

#include <algorithm>
#include <charconv>

#include "cbsrv/error.hpp"

namespace cbsrv {

std::string ComponentState::to_string() const {
  if (vars.empty()) return location;
  return location + vars.to_string();
}

bool is_global(const SystemState& q) noexcept {
  return std::none_of(q.begin(), q.end(), [](const ComponentState& s) { return s.busy(); });
}

std::string to_string(const SystemState& q) {
  std::string out = "(";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ", ";
    out += q[i].to_string();
  }
  return out + ")";
}

std::string locations_string(const SystemState& q) {
  std::string out = "(";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ", ";
    out += q[i].busy() ? "\xE2\x8A\xA5" : q[i].location;
  }
  return out + ")";
}

SystemState initial_state(const CompositeSystem& sys) {
  SystemState q;
  q.reserve(sys.components.size());
  for (const auto& c : sys.components) q.push_back({c.initial, c.initial_valuation()});
  return q;
}

std::string Label::to_string() const {
  if (kind_ == Kind::interaction) return name_;
  return "beta(" + std::to_string(component_ + 1) + ")";
}

Label Label::parse(std::string_view text) {
  if (text.substr(0, 5) == "beta(" && text.size() > 6 && text.back() == ')') {
    std::string_view digits = text.substr(5, text.size() - 6);
    std::size_t i = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (ec != std::errc{} || p != digits.data() + digits.size() || i == 0) {
      throw Error(Errc::malformed_trace, "bad beta label '" + std::string(text) + "'");
    }
    return beta(i - 1);
  }
  if (text.empty() || text.find_first_of(" \t\r\n") != std::string_view::npos) {
    throw Error(Errc::malformed_trace, "bad label '" + std::string(text) + "'");
  }
  return interaction(std::string(text));
}

Trace Trace::prefix(std::size_t k) const {
  Trace t;
  t.initial = initial;
  t.steps.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(std::min(k, steps.size())));
  return t;
}

std::vector<std::string> interactions_of(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& [l, q] : t.steps) {
    if (!l.is_beta()) out.push_back(l.name());
  }
  return out;
}

}  // namespace cbsrv
