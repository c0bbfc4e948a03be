#include "secrit/metrics.hpp"

#include <algorithm>
#include <cctype>

#include "java_lexer.hpp"

namespace secrit {

std::string_view metric_id(MetricKind kind) {
  switch (kind) {
    case MetricKind::CC:
      return "cc";
    case MetricKind::LOC:
      return "loc";
    case MetricKind::LCOM:
      return "lcom";
  }
  return "?";
}

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::CC:
      return "cyclomatic complexity";
    case MetricKind::LOC:
      return "lines of code";
    case MetricKind::LCOM:
      return "lack of cohesion of methods";
  }
  return "?";
}

std::string_view metric_interpretation(MetricKind) { return "higher values indicate higher security criticality"; }

std::optional<MetricKind> parse_metric_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto kind : kAllMetricKinds) {
    if (lower == metric_id(kind)) return kind;
  }
  return std::nullopt;
}

std::int64_t count_code_lines(const std::vector<std::string>& lines, std::size_t first, std::size_t last) {
  bool inBlock = false;
  bool inTextBlock = false;
  std::int64_t count = 0;
  for (std::size_t l = first; l <= last && l < lines.size(); ++l) {
    const std::string& s = lines[l];
    bool code = false;
    std::size_t i = 0;
    while (i < s.size()) {
      if (inBlock) {
        const auto close = s.find("*/", i);
        if (close == std::string::npos) break;
        inBlock = false;
        i = close + 2;
        continue;
      }
      if (inTextBlock) {
        code = true;
        const auto close = s.find("\"\"\"", i);
        if (close == std::string::npos) break;
        inTextBlock = false;
        i = close + 3;
        continue;
      }
      const char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (s.compare(i, 2, "//") == 0) {
        break;
      } else if (s.compare(i, 2, "/*") == 0) {
        inBlock = true;
        i += 2;
      } else if (s.compare(i, 3, "\"\"\"") == 0) {
        code = true;
        inTextBlock = true;
        i += 3;
      } else if (c == '"' || c == '\'') {
        code = true;
        ++i;
        while (i < s.size() && s[i] != c) i += s[i] == '\\' ? 2 : 1;
        ++i;
      } else {
        code = true;
        ++i;
      }
    }
    if (code) ++count;
  }
  return count;
}

std::int64_t compute_loc(const MethodUnit& method, const std::vector<std::string>& fileLines) {
  const auto& span = method.span;
  if (span.startLine == 0 || span.startLine > span.endLine || span.endLine > fileLines.size()) {
    throw Error(ErrorCode::SpanOutOfRange, "span " + std::to_string(span.startLine) + "-" +
                                               std::to_string(span.endLine) + " of " + method.fqn +
                                               " is outside the file (" + std::to_string(fileLines.size()) +
                                               " lines)");
  }
  return count_code_lines(fileLines, span.startLine - 1, span.endLine - 1);
}

std::int64_t compute_cc(const MethodUnit& method) {
  if (!method.isConcrete) throw Error(ErrorCode::NotConcrete, method.fqn + " has no body");
  const auto toks = java::lex(method.bodyText).tokens;
  std::int64_t cc = 1;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.kind == java::TokKind::Keyword) {
      if (t.text == "if" || t.text == "for" || t.text == "while" || t.text == "case" || t.text == "catch") ++cc;
    } else if (t.kind == java::TokKind::Op) {
      if (t.text == "&&" || t.text == "||") {
        ++cc;
      } else if (t.text == "?") {
        // Wildcards in type arguments: <?>, <?, ...>, <? extends T>, <? super T>
        const auto next = i + 1 < toks.size() ? toks[i + 1].text : std::string_view{};
        if (next != ">" && next != "," && next != "extends" && next != "super") ++cc;
      }
    }
  }
  return cc;
}

std::int64_t compute_lcom(const ClassModel& cls) {
  std::vector<const std::set<std::string>*> access;
  static const std::set<std::string> kNone;
  for (const auto& m : cls.methods) {
    if (!m.isConcrete) continue;
    const auto it = cls.fieldAccess.find(m.fqn);
    access.push_back(it == cls.fieldAccess.end() ? &kNone : &it->second);
  }
  std::int64_t p = 0;
  std::int64_t q = 0;
  for (std::size_t a = 0; a < access.size(); ++a) {
    for (std::size_t b = a + 1; b < access.size(); ++b) {
      const bool shared = std::any_of(access[a]->begin(), access[a]->end(),
                                      [&](const std::string& f) { return access[b]->contains(f); });
      shared ? ++q : ++p;
    }
  }
  return std::max<std::int64_t>(p - q, 0);
}

std::vector<MetricRecord> attribute_metric(const std::vector<ClassModel>& classes, MetricKind kind) {
  std::vector<MetricRecord> out;
  for (const auto& cls : classes) {
    const std::int64_t lcom = kind == MetricKind::LCOM ? compute_lcom(cls) : 0;
    for (const auto& m : cls.methods) {
      if (!m.isConcrete) continue;
      MetricRecord r;
      r.fqn = m.fqn;
      r.file = m.file ? m.file->path.generic_string() : std::string();
      r.span = m.span;
      r.kind = kind;
      switch (kind) {
        case MetricKind::CC:
          r.value = compute_cc(m);
          break;
        case MetricKind::LOC: {
          const auto lines = split_lines(m.bodyText);
          r.value = lines.empty() ? 0 : count_code_lines(lines, 0, lines.size() - 1);
          break;
        }
        case MetricKind::LCOM:
          r.value = lcom;
          break;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace secrit
