#include <algorithm>
#include <cctype>
#include <iterator>
#include <string>
#include <unordered_set>

#include "java_lexer.hpp"
#include "secrit/source_model.hpp"

namespace secrit {

namespace {

using java::TokKind;
using java::Token;

const std::unordered_set<std::string_view> kModifiers = {
    "public",   "protected",    "private", "static",   "final",    "abstract", "native",
    "synchronized", "transient", "volatile", "strictfp", "default", "sealed"};

struct MethodDraft {
  std::size_t classIndex;
  MethodUnit unit;
  std::set<std::string> candidates;
};

class JavaParser {
 public:
  JavaParser(SourceFilePtr file, std::string_view src) : file_(std::move(file)), src_(src) {
    lineStarts_.push_back(0);
    for (std::size_t i = 0; i < src_.size(); ++i) {
      if (src_[i] == '\n') lineStarts_.push_back(i + 1);
    }
  }

  ParseResult run() {
    auto lexed = java::lex(src_);
    toks_ = std::move(lexed.tokens);
    if (lexed.unterminated) diag(toks_.empty() ? 1 : toks_.back().line, "unterminated literal or comment");

    std::string package;
    std::size_t i = 0;
    while (i < toks_.size()) {
      if (is(i, "package")) {
        std::size_t j = i + 1;
        while (j < toks_.size() && !is(j, ";")) {
          package += toks_[j].text;
          ++j;
        }
        i = j + 1;
        continue;
      }
      if (is(i, "import")) {
        while (i < toks_.size() && !is(i, ";")) ++i;
        ++i;
        continue;
      }
      if (is(i, ";")) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      i = skipModifiers(i);
      if (isTypeDecl(i)) {
        i = parseTypeDecl(i, package, start);
      } else {
        diag(tok(start).line, "unexpected token '" + std::string(tok(start).text) + "' at top level");
        i = std::max(i, start + 1);
      }
    }
    return finish();
  }

 private:
  const Token& tok(std::size_t i) const {
    static const Token kEof{TokKind::Op, std::string_view{}, 0, 0};
    return i < toks_.size() ? toks_[i] : kEof;
  }

  bool is(std::size_t i, std::string_view text) const {
    if (i >= toks_.size()) return false;
    const auto& t = toks_[i];
    return t.kind != TokKind::String && t.kind != TokKind::Char && t.text == text;
  }

  bool isIdent(std::size_t i) const { return i < toks_.size() && toks_[i].kind == TokKind::Ident; }

  void diag(std::size_t line, std::string message) { diagnostics_.push_back({line, std::move(message)}); }

  // i at an opening bracket; returns the index just past its closer.
  std::size_t skipBalanced(std::size_t i) const {
    const auto open = tok(i).text;
    const std::string_view close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      if (is(i, open)) {
        ++depth;
      } else if (is(i, close)) {
        if (--depth == 0) return i + 1;
      }
    }
    return toks_.size();
  }

  std::size_t skipTypeParams(std::size_t i) const {
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      if (is(i, "<")) {
        ++depth;
      } else if (is(i, ">")) {
        if (--depth == 0) return i + 1;
      } else if (is(i, ";") || is(i, "{") || is(i, "}")) {
        return i;
      }
    }
    return i;
  }

  std::size_t skipAnnotation(std::size_t i) const {
    ++i;  // '@'
    if (isIdent(i)) ++i;
    while (is(i, ".") && isIdent(i + 1)) i += 2;
    if (is(i, "(")) i = skipBalanced(i);
    return i;
  }

  std::size_t skipModifiers(std::size_t i) const {
    while (i < toks_.size()) {
      if (is(i, "@") && !is(i + 1, "interface")) {
        i = skipAnnotation(i);
      } else if (kModifiers.contains(tok(i).text) && tok(i).kind != TokKind::String) {
        ++i;
      } else if (is(i, "non") && is(i + 1, "-") && is(i + 2, "sealed")) {
        i += 3;
      } else {
        break;
      }
    }
    return i;
  }

  bool isTypeDecl(std::size_t i) const {
    if (is(i, "class") || is(i, "interface") || is(i, "enum")) return isIdent(i + 1);
    if (is(i, "@") && is(i + 1, "interface")) return isIdent(i + 2);
    if (is(i, "record") && isIdent(i + 1)) return is(i + 2, "(") || is(i + 2, "<");
    return false;
  }

  std::size_t parseTypeDecl(std::size_t i, std::string outer, std::size_t declStart) {
    if (is(i, "@")) ++i;
    const bool isEnum = is(i, "enum");
    const bool isRecord = is(i, "record");
    const std::string name(tok(i + 1).text);
    ClassModel cls;
    cls.qualifiedName = outer.empty() ? name : outer + "." + name;
    cls.file = file_;
    const std::size_t ci = classes_.size();
    classes_.push_back(std::move(cls));

    std::size_t j = i + 2;
    if (isRecord) {
      if (is(j, "<")) j = skipTypeParams(j);
      if (is(j, "(")) {
        const std::size_t end = skipBalanced(j);
        for (const auto& p : splitParams(j + 1, end - 1)) {
          if (!p.second.empty()) classes_[ci].fields.insert(p.second);
        }
        j = end;
      }
    }
    while (j < toks_.size() && !is(j, "{")) {
      if (is(j, ";") || is(j, "}")) break;
      if (is(j, "(")) {
        j = skipBalanced(j);
        continue;
      }
      ++j;
    }
    if (!is(j, "{")) {
      diag(tok(declStart).line, "type '" + name + "' has no body");
      return std::max(j, i + 1);
    }
    return parseBody(j, ci, isEnum, /*anonymous=*/false);
  }

  // open at '{'. Returns the index just past the matching '}'.
  std::size_t parseBody(std::size_t open, std::size_t ci, bool isEnum, bool anonymous) {
    std::size_t i = open + 1;
    if (isEnum) {
      while (i < toks_.size()) {
        if (is(i, ";")) {
          ++i;
          break;
        }
        if (is(i, "}")) break;
        if (is(i, "@")) {
          i = skipAnnotation(i);
          continue;
        }
        if (isIdent(i)) {
          ++i;
          if (is(i, "(")) i = skipBalanced(i);
          if (is(i, "{")) i = parseBody(i, ci, false, /*anonymous=*/true);
          if (is(i, ",")) ++i;
          continue;
        }
        break;  // malformed constant list; fall through to members
      }
    }
    while (i < toks_.size() && !is(i, "}")) {
      const std::size_t next = parseMember(i, ci, anonymous);
      i = next > i ? next : i + 1;
    }
    if (i >= toks_.size()) {
      diag(tok(open).line, "unterminated body of '" + classes_[ci].qualifiedName + "'");
      return toks_.size();
    }
    return i + 1;
  }

  std::size_t parseMember(std::size_t start, std::size_t ci, bool anonymous) {
    if (is(start, ";")) return start + 1;
    std::size_t i = skipModifiers(start);
    if (is(i, "{")) return skipBalanced(i);  // initializer block
    if (isTypeDecl(i)) return parseTypeDecl(i, classes_[ci].qualifiedName, start);
    if (is(i, "<")) i = skipTypeParams(i);
    const std::size_t afterMods = i;

    std::size_t j = i;
    int angle = 0;
    for (;; ++j) {
      if (j >= toks_.size()) {
        diag(tok(start).line, "unexpected end of file in member declaration");
        return j;
      }
      if (is(j, "<")) {
        ++angle;
      } else if (is(j, ">")) {
        if (angle > 0) --angle;
      }
      if (angle > 0) continue;
      if (is(j, "(")) return parseMethod(start, afterMods, j, ci);
      if (is(j, "=") || is(j, ";") || is(j, ",")) return parseField(j, ci, anonymous);
      if (is(j, "[")) {
        j = skipBalanced(j) - 1;
        continue;
      }
      if (is(j, "{")) {
        diag(tok(j).line, "unrecognized member declaration");
        return skipBalanced(j);
      }
      if (is(j, "}")) {
        diag(tok(j).line, "unrecognized member declaration");
        return j;
      }
    }
  }

  // Parameter list tokens [begin, end). Returns (erased type, name) pairs.
  std::vector<std::pair<std::string, std::string>> splitParams(std::size_t begin, std::size_t end) const {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t i = begin;
    while (i < end) {
      std::size_t j = i;
      int depth = 0;
      for (; j < end; ++j) {
        if (is(j, "<") || is(j, "(") || is(j, "[")) ++depth;
        if (is(j, ">") || is(j, ")") || is(j, "]")) --depth;
        if (depth == 0 && is(j, ",")) break;
      }
      std::vector<std::size_t> parts;
      for (std::size_t k = i; k < j;) {
        if (is(k, "@")) {
          k = skipAnnotation(k);
        } else if (is(k, "final")) {
          ++k;
        } else {
          parts.push_back(k++);
        }
      }
      std::size_t nameAt = parts.size();
      std::string dims;
      for (std::size_t p = parts.size(); p-- > 0;) {
        if (tok(parts[p]).kind == TokKind::Ident || is(parts[p], "this")) {
          nameAt = p;
          break;
        }
        dims.insert(0, tok(parts[p]).text);
      }
      if (nameAt < parts.size() && !is(parts[nameAt], "this")) {
        std::string type;
        int angle = 0;
        for (std::size_t p = 0; p < nameAt; ++p) {
          const auto k = parts[p];
          if (is(k, "<")) {
            ++angle;
          } else if (is(k, ">")) {
            --angle;
          } else if (angle == 0) {
            type += tok(k).text;
          }
        }
        out.emplace_back(type + dims, std::string(tok(parts[nameAt]).text));
      }
      i = j + 1;
    }
    return out;
  }

  std::size_t parseMethod(std::size_t start, std::size_t afterMods, std::size_t paren, std::size_t ci) {
    if (paren == 0 || !isIdent(paren - 1)) {
      diag(tok(paren).line, "malformed method declaration");
      return recoverTo(paren);
    }
    const std::size_t nameIdx = paren - 1;
    const std::size_t closeParen = skipBalanced(paren);
    const auto params = splitParams(paren + 1, closeParen - 1);

    std::size_t k = closeParen;
    while (is(k, "[")) k = skipBalanced(k);
    if (is(k, "throws")) {
      while (k < toks_.size() && !is(k, "{") && !is(k, ";")) ++k;
    }
    if (is(k, "default")) {
      while (k < toks_.size() && !is(k, ";")) k = is(k, "{") || is(k, "(") ? skipBalanced(k) : k + 1;
    }

    MethodDraft draft;
    draft.classIndex = ci;
    auto& m = draft.unit;
    m.name = std::string(tok(nameIdx).text);
    m.className = classes_[ci].qualifiedName;
    m.file = file_;
    m.isConstructor = nameIdx == afterMods;
    std::string sig;
    for (const auto& [type, pname] : params) {
      if (!sig.empty()) sig += ",";
      sig += type;
    }
    m.fqn = m.className + "." + m.name + "(" + sig + ")";

    std::size_t endTok;
    std::size_t next;
    if (is(k, "{")) {
      next = skipBalanced(k);
      if (next >= toks_.size() && !is(toks_.size() - 1, "}")) {
        diag(tok(start).line, "unterminated body of method '" + m.name + "'");
        return toks_.size();
      }
      endTok = next - 1;
      m.isConcrete = true;
      m.bodyBegin = tok(k).offset;
      m.bodyEnd = tok(endTok).offset + 1;
      std::set<std::string> declared;
      for (const auto& p : params) declared.insert(p.second);
      collectCandidates(k, endTok, declared, draft.candidates);
    } else if (is(k, ";")) {
      endTok = k;
      next = k + 1;
    } else {
      diag(tok(nameIdx).line, "malformed declaration of method '" + m.name + "'");
      return recoverTo(k);
    }

    m.span = {tok(start).line, tok(endTok).line};
    const std::size_t sliceBegin = lineStarts_[m.span.startLine - 1];
    std::size_t sliceEnd = m.span.endLine < lineStarts_.size() ? lineStarts_[m.span.endLine] - 1 : src_.size();
    if (sliceEnd > sliceBegin && src_[sliceEnd - 1] == '\r') --sliceEnd;
    m.bodyText = std::string(src_.substr(sliceBegin, sliceEnd - sliceBegin));

    const std::size_t slot = drafts_.size();
    drafts_.push_back(std::move(draft));
    if (drafts_[slot].unit.isConcrete) scanNested(k, endTok, ci);
    return next;
  }

  std::size_t parseField(std::size_t j, std::size_t ci, bool anonymous) {
    auto declare = [&](std::size_t stop) {
      std::size_t p = stop;
      while (p > 0 && (is(p - 1, "]") || is(p - 1, "["))) --p;
      if (p > 0 && isIdent(p - 1) && !anonymous) classes_[ci].fields.insert(std::string(tok(p - 1).text));
    };
    while (j < toks_.size()) {
      declare(j);
      if (is(j, ";")) return j + 1;
      if (is(j, "=")) {
        const std::size_t exprBegin = j + 1;
        int angle = 0;
        ++j;
        while (j < toks_.size()) {
          if (is(j, "(") || is(j, "[") || is(j, "{")) {
            j = skipBalanced(j);
            continue;
          }
          if (is(j, "<") && j > 0 && isIdent(j - 1) && std::isupper(static_cast<unsigned char>(tok(j - 1).text[0]))) {
            ++angle;
          } else if (is(j, ">") && angle > 0) {
            --angle;
          } else if (angle == 0 && (is(j, ",") || is(j, ";"))) {
            break;
          } else if (is(j, "}")) {
            break;
          }
          ++j;
        }
        scanNested(exprBegin - 1, j, ci);
      }
      if (is(j, ",")) {
        ++j;
        while (j < toks_.size() && !is(j, "=") && !is(j, ",") && !is(j, ";")) {
          if (is(j, "[")) {
            j = skipBalanced(j);
            continue;
          }
          ++j;
        }
        continue;
      }
      if (is(j, ";")) return j + 1;
      diag(tok(j).line, "malformed field declaration");
      return j;
    }
    return j;
  }

  std::size_t recoverTo(std::size_t i) {
    while (i < toks_.size()) {
      if (is(i, ";")) return i + 1;
      if (is(i, "{")) return skipBalanced(i);
      if (is(i, "}")) return i;
      ++i;
    }
    return i;
  }

  // Anonymous and local classes inside (open, close).
  void scanNested(std::size_t open, std::size_t close, std::size_t ci) {
    for (std::size_t i = open + 1; i < close;) {
      if (is(i, "new")) {
        std::size_t k = i + 1;
        while (k < close) {
          if (is(k, "@")) {
            k = skipAnnotation(k);
          } else if (isIdent(k) || is(k, ".")) {
            ++k;
          } else if (is(k, "<")) {
            k = skipTypeParams(k);
          } else {
            break;
          }
        }
        if (is(k, "(")) {
          const std::size_t after = skipBalanced(k);
          if (is(after, "{") && after < close) {
            i = parseBody(after, ci, false, /*anonymous=*/true);
            continue;
          }
        }
        i = k;
        continue;
      }
      if (isTypeDecl(i) && !(i > 0 && is(i - 1, "."))) {
        i = parseTypeDecl(i, classes_[ci].qualifiedName, i);
        continue;
      }
      ++i;
    }
  }

  void collectCandidates(std::size_t open, std::size_t close, std::set<std::string>& declared,
                         std::set<std::string>& candidates) const {
    auto typeEnd = [&](std::size_t p) {
      const auto& t = tok(p);
      if (t.kind == TokKind::Ident) return true;
      if (t.kind == TokKind::Keyword) return java::is_primitive(t.text);
      return is(p, ">") || is(p, "]");
    };
    for (std::size_t i = open + 1; i < close; ++i) {
      if (!isIdent(i)) continue;
      const bool follows = is(i + 1, "=") || is(i + 1, ";") || is(i + 1, ",") || is(i + 1, ":") || is(i + 1, ")");
      if ((typeEnd(i - 1) && follows) || is(i + 1, "->")) declared.insert(std::string(tok(i).text));
    }
    // Parenthesized lambda parameters: (a, b) ->
    for (std::size_t i = open + 1; i < close; ++i) {
      if (!(is(i, ")") && is(i + 1, "->"))) continue;
      std::size_t p = i;
      while (p > open && !is(p, "(")) --p;
      for (std::size_t q = p + 1; q < i; ++q) {
        if (isIdent(q) && (is(q + 1, ",") || is(q + 1, ")"))) declared.insert(std::string(tok(q).text));
      }
    }
    for (std::size_t i = open + 1; i < close; ++i) {
      if (!isIdent(i)) continue;
      const std::string name(tok(i).text);
      if (is(i - 1, ".")) {
        if (is(i - 2, "this") && !is(i - 3, ".") && !is(i + 1, "(")) candidates.insert(name);
        continue;
      }
      if (is(i - 1, "@") || is(i + 1, "(") || is(i - 1, "::")) continue;
      if (declared.contains(name)) continue;
      candidates.insert(name);
    }
  }

  ParseResult finish() {
    ParseResult out;
    std::set<std::string> seen;
    for (auto& d : drafts_) {
      auto& cls = classes_[d.classIndex];
      std::string fqn = d.unit.fqn;
      for (int n = 1; seen.contains(fqn); ++n) fqn = d.unit.fqn + "$" + std::to_string(n);
      seen.insert(fqn);
      d.unit.fqn = fqn;
      if (d.unit.isConcrete) {
        auto& access = cls.fieldAccess[fqn];
        std::set_intersection(d.candidates.begin(), d.candidates.end(), cls.fields.begin(), cls.fields.end(),
                              std::inserter(access, access.end()));
      }
      cls.methods.push_back(std::move(d.unit));
    }
    // Keep each class's methods in source order.
    for (auto& cls : classes_) {
      std::stable_sort(cls.methods.begin(), cls.methods.end(), [](const MethodUnit& a, const MethodUnit& b) {
        return a.span.startLine < b.span.startLine;
      });
    }
    out.classes = std::move(classes_);
    out.diagnostics = std::move(diagnostics_);
    return out;
  }

  SourceFilePtr file_;
  std::string_view src_;
  std::vector<std::size_t> lineStarts_;
  std::vector<Token> toks_;
  std::vector<ClassModel> classes_;
  std::vector<MethodDraft> drafts_;
  std::vector<ParseDiagnostic> diagnostics_;
};

class JavaAdapter final : public GrammarAdapter {
 public:
  std::string languageTag() const override { return "java"; }

  ParseResult parse(const SourceFilePtr& file, std::string_view content) const override {
    JavaParser parser(file, content);
    auto result = parser.run();
    if (result.classes.empty() && !result.diagnostics.empty()) {
      throw Error(ErrorCode::ParseFailure, (file ? file->path.generic_string() : std::string("<memory>")) +
                                               ": no declaration could be recovered (" +
                                               result.diagnostics.front().message + ")");
    }
    return result;
  }
};

}  // namespace

std::unique_ptr<GrammarAdapter> make_java_adapter() { return std::make_unique<JavaAdapter>(); }

}  // namespace secrit
