#include "cbsrv/expr.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "cbsrv/error.hpp"
#include "lexer.hpp"

namespace cbsrv {

std::string_view type_name(Type t) noexcept { return t == Type::integer ? "int" : "bool"; }

std::int64_t Value::as_int() const {
  if (const auto* p = std::get_if<std::int64_t>(&v_)) return *p;
  throw Error(Errc::type_mismatch, "expected int, got bool");
}

bool Value::as_bool() const {
  if (const auto* p = std::get_if<bool>(&v_)) return *p;
  throw Error(Errc::type_mismatch, "expected bool, got int");
}

std::string Value::to_string() const {
  if (is_bool()) return std::get<bool>(v_) ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v_));
}

// ---------------------------------------------------------------------------

Valuation::Valuation(std::initializer_list<Entry> entries) {
  for (const auto& [k, v] : entries) set(k, v);
}

const Value* Valuation::find(std::string_view name) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const Entry& e, std::string_view n) { return e.first < n; });
  if (it == entries_.end() || it->first != name) return nullptr;
  return &it->second;
}

const Value& Valuation::at(std::string_view name) const {
  if (const Value* v = find(name)) return *v;
  throw Error(Errc::unbound_variable, "unbound variable '" + std::string(name) + "'");
}

void Valuation::set(std::string_view name, Value value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const Entry& e, std::string_view n) { return e.first < n; });
  if (it != entries_.end() && it->first == name) {
    it->second = value;
  } else {
    entries_.insert(it, Entry{std::string(name), value});
  }
}

bool Valuation::erase(std::string_view name) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const Entry& e, std::string_view n) { return e.first < n; });
  if (it == entries_.end() || it->first != name) return false;
  entries_.erase(it);
  return true;
}

std::string Valuation::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : entries_) {
    if (!first) out += ", ";
    first = false;
    out += k + ":" + v.to_string();
  }
  return out + "}";
}

Valuation override_with(const Valuation& v, const Valuation& w) {
  Valuation out = v;
  for (const auto& [k, val] : w) out.set(k, val);
  return out;
}

// ---------------------------------------------------------------------------

namespace ex {
Expr lit(Value v) { return std::make_shared<const ExprNode>(ExprNode{ExprNode::Literal{v}}); }
Expr var(std::string name) {
  return std::make_shared<const ExprNode>(ExprNode{ExprNode::Var{std::move(name)}});
}
Expr at(std::string component, std::string location) {
  return std::make_shared<const ExprNode>(
      ExprNode{ExprNode::At{std::move(component), std::move(location)}});
}
Expr unary(UnaryOp op, Expr e) {
  return std::make_shared<const ExprNode>(ExprNode{ExprNode::Unary{op, std::move(e)}});
}
Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
  return std::make_shared<const ExprNode>(
      ExprNode{ExprNode::Binary{op, std::move(lhs), std::move(rhs)}});
}
}  // namespace ex

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, ExprNode::Literal>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, ExprNode::Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, ExprNode::At>) {
          return x.component == y.component && x.location == y.location;
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          return x.op == y.op && structurally_equal(x.operand, y.operand);
        } else {
          return x.op == y.op && structurally_equal(x.lhs, y.lhs) &&
                 structurally_equal(x.rhs, y.rhs);
        }
      },
      a->node);
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

[[noreturn]] void overflow(std::string_view what) {
  throw Error(Errc::overflow, "integer overflow in " + std::string(what));
}

std::int64_t checked(BinaryOp op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  switch (op) {
    case BinaryOp::add:
      if (__builtin_add_overflow(a, b, &r)) overflow("addition");
      return r;
    case BinaryOp::sub:
      if (__builtin_sub_overflow(a, b, &r)) overflow("subtraction");
      return r;
    case BinaryOp::mul:
      if (__builtin_mul_overflow(a, b, &r)) overflow("multiplication");
      return r;
    default:
      break;
  }
  return r;
}

Value eval_node(const ExprNode& n, const Env& env);

Value eval_unary(const ExprNode::Unary& u, const Env& env) {
  Value v = eval_node(*u.operand, env);
  switch (u.op) {
    case UnaryOp::logical_not:
      return !v.as_bool();
    case UnaryOp::negate: {
      std::int64_t i = v.as_int();
      if (i == std::numeric_limits<std::int64_t>::min()) overflow("negation");
      return -i;
    }
    case UnaryOp::abs: {
      std::int64_t i = v.as_int();
      if (i == std::numeric_limits<std::int64_t>::min()) overflow("abs");
      return i < 0 ? -i : i;
    }
  }
  return v;
}

Value eval_binary(const ExprNode::Binary& b, const Env& env) {
  if (b.op == BinaryOp::logical_and) {
    // Both sides are evaluated so type errors surface regardless of values.
    bool l = eval_node(*b.lhs, env).as_bool();
    bool r = eval_node(*b.rhs, env).as_bool();
    return l && r;
  }
  if (b.op == BinaryOp::logical_or) {
    bool l = eval_node(*b.lhs, env).as_bool();
    bool r = eval_node(*b.rhs, env).as_bool();
    return l || r;
  }
  Value l = eval_node(*b.lhs, env);
  Value r = eval_node(*b.rhs, env);
  switch (b.op) {
    case BinaryOp::add:
    case BinaryOp::sub:
    case BinaryOp::mul:
      return checked(b.op, l.as_int(), r.as_int());
    case BinaryOp::lt: return l.as_int() < r.as_int();
    case BinaryOp::le: return l.as_int() <= r.as_int();
    case BinaryOp::gt: return l.as_int() > r.as_int();
    case BinaryOp::ge: return l.as_int() >= r.as_int();
    case BinaryOp::eq:
    case BinaryOp::ne: {
      if (l.type() != r.type()) throw Error(Errc::type_mismatch, "comparison of int with bool");
      return (l == r) == (b.op == BinaryOp::eq);
    }
    default:
      break;
  }
  return false;
}

Value eval_node(const ExprNode& n, const Env& env) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprNode::Literal>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, ExprNode::Var>) {
          if (const Value* v = env.lookup(x.name)) return *v;
          throw Error(Errc::unbound_variable, "unbound variable '" + x.name + "'");
        } else if constexpr (std::is_same_v<T, ExprNode::At>) {
          if (auto r = env.at_location(x.component, x.location)) return *r;
          throw Error(Errc::unbound_variable, "unknown component '" + x.component + "'");
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          return eval_unary(x, env);
        } else {
          return eval_binary(x, env);
        }
      },
      n.node);
}

}  // namespace

Value eval(const Expr& e, const Env& env) { return eval_node(*e, env); }

Value eval(const Expr& e, const Valuation& v) { return eval_node(*e, ValuationEnv(v)); }

Valuation apply_assignments(const std::vector<Assignment>& f, Valuation v) {
  for (const auto& a : f) {
    if (!v.contains(a.target)) {
      throw Error(Errc::unbound_variable, "assignment to undeclared '" + a.target + "'");
    }
    Value val = eval(a.source, v);
    v.set(a.target, val);
  }
  return v;
}

// ---------------------------------------------------------------------------
// typing

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw Error(Errc::type_mismatch, what); }

void expect(Type got, Type want, std::string_view ctx) {
  if (got != want) {
    mismatch(std::string(ctx) + " expects " + std::string(type_name(want)) + ", got " +
             std::string(type_name(got)));
  }
}

}  // namespace

Type type_check(const Expr& e, const TypeEnv& env) {
  return std::visit(
      [&](const auto& x) -> Type {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprNode::Literal>) {
          return x.value.type();
        } else if constexpr (std::is_same_v<T, ExprNode::Var>) {
          if (auto t = env.type_of(x.name)) return *t;
          throw Error(Errc::unbound_variable, "unbound variable '" + x.name + "'");
        } else if constexpr (std::is_same_v<T, ExprNode::At>) {
          if (!env.has_location(x.component, x.location)) {
            throw Error(Errc::unbound_variable,
                        "unknown location '" + x.component + "@" + x.location + "'");
          }
          return Type::boolean;
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          Type t = type_check(x.operand, env);
          if (x.op == UnaryOp::logical_not) {
            expect(t, Type::boolean, "not");
            return Type::boolean;
          }
          expect(t, Type::integer, x.op == UnaryOp::abs ? "abs" : "negation");
          return Type::integer;
        } else {
          Type l = type_check(x.lhs, env);
          Type r = type_check(x.rhs, env);
          switch (x.op) {
            case BinaryOp::add:
            case BinaryOp::sub:
            case BinaryOp::mul:
              expect(l, Type::integer, "arithmetic");
              expect(r, Type::integer, "arithmetic");
              return Type::integer;
            case BinaryOp::lt:
            case BinaryOp::le:
            case BinaryOp::gt:
            case BinaryOp::ge:
              expect(l, Type::integer, "ordering");
              expect(r, Type::integer, "ordering");
              return Type::boolean;
            case BinaryOp::eq:
            case BinaryOp::ne:
              if (l != r) mismatch("equality between int and bool");
              return Type::boolean;
            case BinaryOp::logical_and:
            case BinaryOp::logical_or:
              expect(l, Type::boolean, "boolean operator");
              expect(r, Type::boolean, "boolean operator");
              return Type::boolean;
          }
          return Type::boolean;
        }
      },
      e->node);
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprNode::Var>) {
          if (std::find(out.begin(), out.end(), x.name) == out.end()) out.push_back(x.name);
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          collect_vars(x.operand, out);
        } else if constexpr (std::is_same_v<T, ExprNode::Binary>) {
          collect_vars(x.lhs, out);
          collect_vars(x.rhs, out);
        }
      },
      e->node);
}

void collect_locations(const Expr& e, std::vector<std::pair<std::string, std::string>>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprNode::At>) {
          out.emplace_back(x.component, x.location);
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          collect_locations(x.operand, out);
        } else if constexpr (std::is_same_v<T, ExprNode::Binary>) {
          collect_locations(x.lhs, out);
          collect_locations(x.rhs, out);
        }
      },
      e->node);
}

// ---------------------------------------------------------------------------
// rendering

namespace {

// Binding strength; higher binds tighter.
int precedence(const ExprNode& n) {
  if (const auto* b = std::get_if<ExprNode::Binary>(&n.node)) {
    switch (b->op) {
      case BinaryOp::logical_or: return 1;
      case BinaryOp::logical_and: return 2;
      case BinaryOp::add:
      case BinaryOp::sub: return 4;
      case BinaryOp::mul: return 5;
      default: return 3;
    }
  }
  if (std::holds_alternative<ExprNode::Unary>(n.node)) return 6;
  if (const auto* l = std::get_if<ExprNode::Literal>(&n.node)) {
    // A negative literal prints with a leading minus, so it only stands alone as an operand.
    if (l->value.is_int() && l->value.as_int() < 0) return 6;
  }
  return 7;
}

std::string_view op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::logical_and: return "and";
    case BinaryOp::logical_or: return "or";
  }
  return "?";
}

std::string render(const ExprNode& n);

std::string wrap(const ExprNode& child, bool parens) {
  std::string s = render(child);
  return parens ? "(" + s + ")" : s;
}

std::string render(const ExprNode& n) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExprNode::Literal>) {
          return x.value.to_string();
        } else if constexpr (std::is_same_v<T, ExprNode::Var>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, ExprNode::At>) {
          return x.component + "@" + x.location;
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          if (x.op == UnaryOp::abs) return "abs(" + render(*x.operand) + ")";
          if (x.op == UnaryOp::logical_not) {
            return "not " + wrap(*x.operand, precedence(*x.operand) < 6);
          }
          // "-5" would read back as a literal, so literal operands keep their parentheses.
          bool lit = std::holds_alternative<ExprNode::Literal>(x.operand->node);
          return "-" + wrap(*x.operand, lit || precedence(*x.operand) < 6);
        } else {
          int p = precedence(n);
          bool cmp = p == 3;
          std::string l = wrap(*x.lhs, cmp ? precedence(*x.lhs) <= p : precedence(*x.lhs) < p);
          std::string r = wrap(*x.rhs, precedence(*x.rhs) <= p);
          return l + " " + std::string(op_text(x.op)) + " " + r;
        }
      },
      n.node);
}

}  // namespace

std::string to_string(const Expr& e) { return render(*e); }

Expr parse_expr(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  Expr e = detail::parse_expression(ts);
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return e;
}

}  // namespace cbsrv
