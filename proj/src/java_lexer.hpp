#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace secrit::java {

enum class TokKind { Ident, Keyword, Number, String, Char, Op };

struct Token {
  TokKind kind;
  std::string_view text;
  std::size_t offset;  // byte offset of the first character
  std::size_t line;    // 1-based line of the first character
};

struct LexResult {
  std::vector<Token> tokens;
  bool unterminated = false;  // string, char or comment ran off the end
};

// Comments are dropped. Every '>' is emitted as its own token so nested
// generic closers never merge into shift operators.
LexResult lex(std::string_view src);

bool is_keyword(std::string_view word);
bool is_primitive(std::string_view word);

}  // namespace secrit::java
