#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cbsrv {

enum class Type { integer, boolean };

std::string_view type_name(Type t) noexcept;

/// An Int (64-bit, overflow is an error) or a Bool.
class Value {
 public:
  Value() : v_(std::int64_t{0}) {}
  Value(std::int64_t i) : v_(i) {}  // NOLINT(google-explicit-constructor)
  Value(int i) : v_(std::int64_t{i}) {}  // NOLINT(google-explicit-constructor)
  Value(bool b) : v_(b) {}  // NOLINT(google-explicit-constructor)

  Type type() const noexcept { return is_int() ? Type::integer : Type::boolean; }
  bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(v_); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(v_); }

  /// Throws Error(type_mismatch) on the wrong alternative.
  std::int64_t as_int() const;
  bool as_bool() const;

  std::string to_string() const;

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  std::variant<std::int64_t, bool> v_;
};

/// Total map from declared variable names to values; iteration order is by name.
class Valuation {
 public:
  using Entry = std::pair<std::string, Value>;

  Valuation() = default;
  Valuation(std::initializer_list<Entry> entries);

  const Value* find(std::string_view name) const noexcept;
  bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }
  /// Throws Error(unbound_variable).
  const Value& at(std::string_view name) const;
  /// Inserts or replaces.
  void set(std::string_view name, Value value);
  bool erase(std::string_view name);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::string to_string() const;

  friend bool operator==(const Valuation&, const Valuation&) = default;
  friend auto operator<=>(const Valuation&, const Valuation&) = default;

 private:
  std::vector<Entry> entries_;  // sorted by name
};

/// Result maps x to w(x) when x is in w's domain, else to v(x).
Valuation override_with(const Valuation& v, const Valuation& w);

enum class UnaryOp { logical_not, negate, abs };
enum class BinaryOp { add, sub, mul, lt, le, eq, ne, gt, ge, logical_and, logical_or };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Variable names may be plain ("x") or qualified ("Worker1.x").
/// `at` tests the current location of a component ("Generator@ready").
struct ExprNode {
  struct Literal { Value value; };
  struct Var { std::string name; };
  struct At { std::string component; std::string location; };
  struct Unary { UnaryOp op; Expr operand; };
  struct Binary { BinaryOp op; Expr lhs; Expr rhs; };

  std::variant<Literal, Var, At, Unary, Binary> node;
};

namespace ex {
Expr lit(Value v);
Expr var(std::string name);
Expr at(std::string component, std::string location);
Expr unary(UnaryOp op, Expr e);
Expr binary(BinaryOp op, Expr lhs, Expr rhs);
inline Expr not_(Expr e) { return unary(UnaryOp::logical_not, std::move(e)); }
inline Expr abs(Expr e) { return unary(UnaryOp::abs, std::move(e)); }
inline Expr add(Expr a, Expr b) { return binary(BinaryOp::add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return binary(BinaryOp::sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return binary(BinaryOp::mul, std::move(a), std::move(b)); }
inline Expr lt(Expr a, Expr b) { return binary(BinaryOp::lt, std::move(a), std::move(b)); }
inline Expr le(Expr a, Expr b) { return binary(BinaryOp::le, std::move(a), std::move(b)); }
inline Expr gt(Expr a, Expr b) { return binary(BinaryOp::gt, std::move(a), std::move(b)); }
inline Expr ge(Expr a, Expr b) { return binary(BinaryOp::ge, std::move(a), std::move(b)); }
inline Expr eq(Expr a, Expr b) { return binary(BinaryOp::eq, std::move(a), std::move(b)); }
inline Expr and_(Expr a, Expr b) { return binary(BinaryOp::logical_and, std::move(a), std::move(b)); }
inline Expr or_(Expr a, Expr b) { return binary(BinaryOp::logical_or, std::move(a), std::move(b)); }
}  // namespace ex

bool structurally_equal(const Expr& a, const Expr& b);

struct Assignment {
  std::string target;
  Expr source;

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.target == b.target && structurally_equal(a.source, b.source);
  }
};

/// Where expressions look up names.
class Env {
 public:
  virtual ~Env() = default;
  virtual const Value* lookup(std::string_view name) const = 0;
  /// Empty when the component is unknown in this scope.
  virtual std::optional<bool> at_location(std::string_view /*component*/,
                                          std::string_view /*location*/) const {
    return std::nullopt;
  }
};

class ValuationEnv final : public Env {
 public:
  explicit ValuationEnv(const Valuation& v) : v_(v) {}
  const Value* lookup(std::string_view name) const override { return v_.find(name); }

 private:
  const Valuation& v_;
};

/// Errors: unbound_variable, type_mismatch, overflow.
Value eval(const Expr& e, const Env& env);
Value eval(const Expr& e, const Valuation& v);

/// Left to right; each assignment sees the effect of the previous ones.
/// Every target must already be bound in `v`.
Valuation apply_assignments(const std::vector<Assignment>& f, Valuation v);

/// Static typing: resolves each name through `lookup` (empty = unbound).
class TypeEnv {
 public:
  virtual ~TypeEnv() = default;
  virtual std::optional<Type> type_of(std::string_view name) const = 0;
  virtual bool has_location(std::string_view /*component*/, std::string_view /*location*/) const {
    return false;
  }
};

/// Throws Error(unbound_variable) or Error(type_mismatch).
Type type_check(const Expr& e, const TypeEnv& env);

/// Every variable name referenced by `e`.
void collect_vars(const Expr& e, std::vector<std::string>& out);
/// Every component referenced by an `at` test.
void collect_locations(const Expr& e, std::vector<std::pair<std::string, std::string>>& out);

/// Infix rendering that parse_expr reads back to a structurally equal tree.
std::string to_string(const Expr& e);

Expr parse_expr(std::string_view text);

}  // namespace cbsrv
