#include "java_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace secrit::java {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",       "case",     "catch",
    "char",     "class",      "const",     "continue",  "default",    "do",       "double",
    "else",     "enum",       "extends",   "final",     "finally",    "float",    "for",
    "goto",     "if",         "implements", "import",   "instanceof", "int",      "interface",
    "long",     "native",     "new",       "package",   "private",    "protected", "public",
    "return",   "short",      "static",    "strictfp",  "super",      "switch",   "synchronized",
    "this",     "throw",      "throws",    "transient", "try",        "void",     "volatile",
    "while",    "true",       "false",     "null"};

const std::unordered_set<std::string_view> kPrimitives = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void"};

// Longest first within each leading character.
constexpr std::array<std::string_view, 38> kOperators = {
    ">>>=", "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", "+=",
    "-=",   "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", "(",  ")",  "{",  "}",  "[",
    "]",    ";",   ",",   ".",  "@",  "=",  "<",  "!",  "~",  "?",  ":",  "+"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

}  // namespace

bool is_keyword(std::string_view word) { return kKeywords.contains(word); }
bool is_primitive(std::string_view word) { return kPrimitives.contains(word); }

LexResult lex(std::string_view src) {
  LexResult out;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = src.size();

  auto advance_over = [&](std::size_t end) {
    for (; i < end && i < n; ++i) {
      if (src[i] == '\n') ++line;
    }
  };

  while (i < n) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      const auto close = src.find("*/", i + 2);
      if (close == std::string_view::npos) {
        out.unterminated = true;
        advance_over(n);
      } else {
        advance_over(close + 2);
      }
      continue;
    }

    const std::size_t start = i;
    const std::size_t startLine = line;

    if (src.substr(i, 3) == "\"\"\"") {
      std::size_t j = i + 3;
      std::size_t end = n;
      bool closed = false;
      while (j < n) {
        if (src[j] == '\\') {
          j += 2;
          continue;
        }
        if (src.substr(j, 3) == "\"\"\"") {
          end = j + 3;
          closed = true;
          break;
        }
        ++j;
      }
      if (!closed) out.unterminated = true;
      advance_over(end);
      out.tokens.push_back({TokKind::String, src.substr(start, i - start), start, startLine});
      continue;
    }

    if (c == '"' || c == '\'') {
      ++i;
      bool closed = false;
      while (i < n && src[i] != '\n') {
        if (src[i] == '\\') {
          i += 2;
          continue;
        }
        if (src[i] == c) {
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) {
        out.unterminated = true;
        i = std::min(i, n);
      }
      out.tokens.push_back({c == '"' ? TokKind::String : TokKind::Char, src.substr(start, i - start), start, startLine});
      continue;
    }

    if (ident_start(static_cast<unsigned char>(c))) {
      while (i < n && ident_part(static_cast<unsigned char>(src[i]))) ++i;
      const auto word = src.substr(start, i - start);
      out.tokens.push_back({is_keyword(word) ? TokKind::Keyword : TokKind::Ident, word, start, startLine});
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      ++i;
      while (i < n) {
        const char d = src[i];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          ++i;
        } else if ((d == '+' || d == '-') && (src[i - 1] == 'e' || src[i - 1] == 'E' || src[i - 1] == 'p' ||
                                              src[i - 1] == 'P')) {
          ++i;
        } else {
          break;
        }
      }
      out.tokens.push_back({TokKind::Number, src.substr(start, i - start), start, startLine});
      continue;
    }

    if (c == '>') {
      ++i;
      out.tokens.push_back({TokKind::Op, src.substr(start, 1), start, startLine});
      continue;
    }

    std::size_t len = 0;
    for (auto op : kOperators) {
      if (src.substr(i, op.size()) == op) {
        len = op.size();
        break;
      }
    }
    if (len == 0) len = 1;
    i += len;
    out.tokens.push_back({TokKind::Op, src.substr(start, len), start, startLine});
  }
  return out;
}

}  // namespace secrit::java
