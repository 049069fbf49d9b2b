#pragma once

// Shared tokenizer for the model, monitor and expression grammars.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cbsrv/error.hpp"
#include "cbsrv/expr.hpp"

namespace cbsrv::detail {

enum class Tok {
  ident,
  busy_ident,  // location names starting with "⊥"
  integer,
  punct,
  end,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(std::string_view src);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == Tok::end; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const;
  bool is_ident(std::string_view word, std::size_t ahead = 0) const;
  bool accept_punct(std::string_view p);
  bool accept_ident(std::string_view word);
  void expect_punct(std::string_view p);
  void expect_ident(std::string_view word);
  std::string expect_name();      // plain identifier
  std::string expect_location();  // identifier or busy identifier

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& message) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

/// Expression grammar, precedence from loosest: or, and, comparisons, + -, *, unary.
Expr parse_expression(TokenStream& ts);

/// Assignment list body "t := e; t := e" up to (not including) `close`.
std::vector<Assignment> parse_assignments(TokenStream& ts, std::string_view close);

/// Name that may be qualified: "x" or "Comp.x".
std::string parse_var_name(TokenStream& ts);

bool is_plain_identifier(std::string_view s);

}  // namespace cbsrv::detail
