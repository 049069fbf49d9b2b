#include "lexer.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace cbsrv::detail {

namespace {

constexpr std::string_view kBottom = "\xE2\x8A\xA5";  // U+22A5

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool busy_char(char c) { return ident_char(c) || c == '@' || c == '-' || c == '#'; }

}  // namespace

bool is_plain_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int tl = line;
    const int tc = col;
    if (src.substr(i, kBottom.size()) == kBottom) {
      std::size_t j = i + kBottom.size();
      while (j < src.size() && busy_char(src[j])) ++j;
      out.push_back({Tok::busy_ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::integer, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    static constexpr std::string_view two[] = {":=", "<=", ">=", "==", "!=", "->"};
    bool matched = false;
    for (auto p : two) {
      if (src.substr(i, 2) == p) {
        out.push_back({Tok::punct, std::string(p), tl, tc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one = "(){}[],;:.@/=+-*<>";
    if (one.find(c) != std::string_view::npos) {
      out.push_back({Tok::punct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t p = pos_ + ahead;
  return p < toks_.size() ? toks_[p] : toks_.back();
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::is_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Tok::punct && t.text == p;
}

bool TokenStream::is_ident(std::string_view word, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Tok::ident && t.text == word;
}

bool TokenStream::accept_punct(std::string_view p) {
  if (!is_punct(p)) return false;
  next();
  return true;
}

bool TokenStream::accept_ident(std::string_view word) {
  if (!is_ident(word)) return false;
  next();
  return true;
}

void TokenStream::expect_punct(std::string_view p) {
  if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
}

void TokenStream::expect_ident(std::string_view word) {
  if (!accept_ident(word)) fail("expected '" + std::string(word) + "'");
}

std::string TokenStream::expect_name() {
  if (peek().kind != Tok::ident) fail("expected identifier");
  return next().text;
}

std::string TokenStream::expect_location() {
  if (peek().kind != Tok::ident && peek().kind != Tok::busy_ident) fail("expected location");
  return next().text;
}

void TokenStream::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenStream::fail_at(const Token& t, const std::string& message) const {
  std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
  throw SyntaxError(message + ", found " + found, t.line, t.column);
}

// ---------------------------------------------------------------------------
// expressions

namespace {

Expr parse_or(TokenStream& ts);

std::int64_t parse_int_token(TokenStream& ts, const Token& t, bool negative) {
  std::uint64_t mag = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
  constexpr auto max = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  if (ec != std::errc{} || mag > max + (negative ? 1 : 0)) {
    ts.fail_at(t, "integer literal out of 64-bit range");
  }
  if (negative) return mag == max + 1 ? std::numeric_limits<std::int64_t>::min()
                                       : -static_cast<std::int64_t>(mag);
  return static_cast<std::int64_t>(mag);
}

Expr parse_primary(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind == Tok::integer) {
    ts.next();
    return ex::lit(parse_int_token(ts, t, false));
  }
  if (ts.accept_ident("true")) return ex::lit(true);
  if (ts.accept_ident("false")) return ex::lit(false);
  if (ts.is_ident("abs") && ts.is_punct("(", 1)) {
    ts.next();
    ts.next();
    Expr inner = parse_or(ts);
    ts.expect_punct(")");
    return ex::abs(std::move(inner));
  }
  if (ts.accept_punct("(")) {
    Expr inner = parse_or(ts);
    ts.expect_punct(")");
    return inner;
  }
  if (t.kind == Tok::ident) {
    if (t.text == "and" || t.text == "or" || t.text == "not") ts.fail("expected operand");
    std::string name = parse_var_name(ts);
    if (ts.accept_punct("@")) {
      std::string loc = ts.expect_location();
      return ex::at(std::move(name), std::move(loc));
    }
    return ex::var(std::move(name));
  }
  ts.fail("expected expression");
}

Expr parse_unary(TokenStream& ts) {
  if (ts.accept_ident("not")) return ex::not_(parse_unary(ts));
  if (ts.is_punct("-")) {
    ts.next();
    if (ts.peek().kind == Tok::integer) {
      const Token& t = ts.next();
      return ex::lit(parse_int_token(ts, t, true));
    }
    return ex::unary(UnaryOp::negate, parse_unary(ts));
  }
  return parse_primary(ts);
}

Expr parse_mul(TokenStream& ts) {
  Expr lhs = parse_unary(ts);
  while (ts.accept_punct("*")) lhs = ex::mul(std::move(lhs), parse_unary(ts));
  return lhs;
}

Expr parse_add(TokenStream& ts) {
  Expr lhs = parse_mul(ts);
  for (;;) {
    if (ts.accept_punct("+")) {
      lhs = ex::add(std::move(lhs), parse_mul(ts));
    } else if (ts.accept_punct("-")) {
      lhs = ex::sub(std::move(lhs), parse_mul(ts));
    } else {
      return lhs;
    }
  }
}

Expr parse_cmp(TokenStream& ts) {
  Expr lhs = parse_add(ts);
  static const std::pair<std::string_view, BinaryOp> ops[] = {
      {"<", BinaryOp::lt},  {"<=", BinaryOp::le}, {"==", BinaryOp::eq},
      {"!=", BinaryOp::ne}, {">", BinaryOp::gt},  {">=", BinaryOp::ge},
  };
  for (const auto& [text, op] : ops) {
    if (ts.accept_punct(text)) return ex::binary(op, std::move(lhs), parse_add(ts));
  }
  return lhs;
}

Expr parse_and(TokenStream& ts) {
  Expr lhs = parse_cmp(ts);
  while (ts.accept_ident("and")) lhs = ex::and_(std::move(lhs), parse_cmp(ts));
  return lhs;
}

Expr parse_or(TokenStream& ts) {
  Expr lhs = parse_and(ts);
  while (ts.accept_ident("or")) lhs = ex::or_(std::move(lhs), parse_and(ts));
  return lhs;
}

}  // namespace

std::string parse_var_name(TokenStream& ts) {
  std::string name = ts.expect_name();
  if (ts.is_punct(".") && ts.peek(1).kind == Tok::ident) {
    ts.next();
    name += '.';
    name += ts.next().text;
  }
  return name;
}

Expr parse_expression(TokenStream& ts) { return parse_or(ts); }

std::vector<Assignment> parse_assignments(TokenStream& ts, std::string_view close) {
  std::vector<Assignment> out;
  while (!ts.is_punct(close)) {
    std::string target = parse_var_name(ts);
    ts.expect_punct(":=");
    out.push_back({std::move(target), parse_expression(ts)});
    if (!ts.accept_punct(";")) break;
  }
  return out;
}

}  // namespace cbsrv::detail
