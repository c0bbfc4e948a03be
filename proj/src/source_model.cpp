#include "secrit/source_model.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace secrit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RootNotFound:
      return "RootNotFound";
    case ErrorCode::UnreadablePath:
      return "UnreadablePath";
    case ErrorCode::ParseFailure:
      return "ParseFailure";
    case ErrorCode::SpanOutOfRange:
      return "SpanOutOfRange";
    case ErrorCode::NotConcrete:
      return "NotConcrete";
    case ErrorCode::EmptyInput:
      return "EmptyInput";
    case ErrorCode::EmptyBody:
      return "EmptyBody";
    case ErrorCode::InvalidConfig:
      return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

bool match_from(std::string_view p, std::string_view s) {
  while (!p.empty()) {
    if (p.starts_with("**")) {
      auto rest = p.substr(2);
      if (rest.starts_with("/")) {
        // "**/" also matches zero directories.
        if (match_from(rest.substr(1), s)) return true;
      }
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (match_from(rest, s.substr(i))) return true;
      }
      return false;
    }
    if (p.front() == '*') {
      auto rest = p.substr(1);
      for (std::size_t i = 0; i <= s.size(); ++i) {
        if (match_from(rest, s.substr(i))) return true;
        if (i < s.size() && s[i] == '/') break;
      }
      return false;
    }
    if (s.empty()) return false;
    if (p.front() == '?') {
      if (s.front() == '/') return false;
    } else if (p.front() != s.front()) {
      return false;
    }
    p.remove_prefix(1);
    s.remove_prefix(1);
  }
  return s.empty();
}

std::string language_for(const std::filesystem::path& path) {
  return path.extension() == ".java" ? "java" : "unknown";
}

std::size_t count_lines(std::string_view bytes) {
  if (bytes.empty()) return 0;
  auto n = static_cast<std::size_t>(std::count(bytes.begin(), bytes.end(), '\n'));
  return bytes.back() == '\n' ? n : n + 1;
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) { return match_from(pattern, path); }

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadablePath, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::UnreadablePath, "cannot read " + path.string());
  return std::move(ss).str();
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

bool sanitize_utf8(std::string& content) {
  std::string out;
  bool replaced = false;
  out.reserve(content.size());
  const auto* s = reinterpret_cast<const unsigned char*>(content.data());
  const std::size_t n = content.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = s[i];
    std::size_t len = 0;
    if (c < 0x80) {
      len = 1;
    } else if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
    } else if (c >= 0xE0 && c <= 0xEF) {
      len = 3;
    } else if (c >= 0xF0 && c <= 0xF4) {
      len = 4;
    }
    bool ok = len > 0 && i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) ok = (s[i + k] & 0xC0) == 0x80;
    if (ok && len == 3) {
      ok = !(c == 0xE0 && s[i + 1] < 0xA0) && !(c == 0xED && s[i + 1] > 0x9F);
    } else if (ok && len == 4) {
      ok = !(c == 0xF0 && s[i + 1] < 0x90) && !(c == 0xF4 && s[i + 1] > 0x8F);
    }
    if (ok) {
      out.append(content, i, len);
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      replaced = true;
      ++i;
    }
  }
  if (replaced) content = std::move(out);
  return replaced;
}

ScanResult scan_project(const std::filesystem::path& root, const ScanOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::RootNotFound, "project root not found: " + root.string());

  ScanResult result;
  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
  if (ec) throw Error(ErrorCode::RootNotFound, "cannot open project root " + root.string() + ": " + ec.message());

  for (const fs::recursive_directory_iterator end; it != end;) {
    const fs::path abs = it->path();
    std::error_code fileEc;
    const bool regular = it->is_regular_file(fileEc);
    if (regular) {
      const std::string rel = abs.lexically_relative(root).generic_string();
      const auto hit = [&](const std::vector<std::string>& globs) {
        return std::any_of(globs.begin(), globs.end(), [&](const std::string& g) { return glob_match(g, rel); });
      };
      if (hit(options.includeGlobs) && !hit(options.excludeGlobs)) {
        try {
          const auto bytes = read_file_bytes(abs);
          result.files.push_back({rel, abs, language_for(abs), sha256_hex(bytes), count_lines(bytes)});
        } catch (const Error& e) {
          result.errors.push_back({rel, e.what()});
        }
      }
    }
    it.increment(ec);
    if (ec) {
      result.errors.push_back({abs, ec.message()});
      ec.clear();
    }
  }
  std::sort(result.files.begin(), result.files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path.generic_string() < b.path.generic_string(); });
  return result;
}

ParseResult parse_source(const SourceFilePtr& file, std::string_view content) {
  const std::string tag = !file ? "java" : file->languageTag.empty() ? language_for(file->path) : file->languageTag;
  if (tag != "java") {
    ParseResult r;
    r.diagnostics.push_back({0, "no grammar adapter for language '" + tag + "'"});
    return r;
  }
  return make_java_adapter()->parse(file, content);
}

std::vector<MethodUnit> extract_methods(const std::vector<ClassModel>& classes) {
  std::vector<MethodUnit> out;
  for (const auto& cls : classes) {
    std::copy_if(cls.methods.begin(), cls.methods.end(), std::back_inserter(out),
                 [](const MethodUnit& m) { return m.isConcrete; });
  }
  return out;
}

Project load_project(const std::filesystem::path& root, const ScanOptions& options) {
  Project project;
  project.root = root;
  auto scan = scan_project(root, options);
  project.scanErrors = std::move(scan.errors);

  std::set<std::string> seen;
  for (auto& sf : scan.files) {
    auto file = std::make_shared<const SourceFile>(std::move(sf));
    project.files.push_back(file);
    std::string content;
    try {
      content = read_file_bytes(file->absolute);
    } catch (const Error& e) {
      project.scanErrors.push_back({file->path, e.what()});
      continue;
    }
    if (sanitize_utf8(content)) {
      project.parseDiagnostics.push_back({file->path, {0, "invalid UTF-8 replaced with U+FFFD"}});
    }
    project.fileLines[file->path.generic_string()] = split_lines(content);
    try {
      auto parsed = parse_source(file, content);
      for (auto& d : parsed.diagnostics) project.parseDiagnostics.push_back({file->path, std::move(d)});
      for (auto& cls : parsed.classes) {
        for (auto& m : cls.methods) {
          if (!seen.insert(m.fqn).second) {
            const std::string old = m.fqn;
            for (int n = 1; seen.contains(m.fqn); ++n) m.fqn = old + "$" + std::to_string(n);
            seen.insert(m.fqn);
            if (auto node = cls.fieldAccess.extract(old)) {
              node.key() = m.fqn;
              cls.fieldAccess.insert(std::move(node));
            }
          }
        }
        project.classes.push_back(std::move(cls));
      }
    } catch (const Error& e) {
      project.parseDiagnostics.push_back({file->path, {0, e.what()}});
    }
  }
  return project;
}

}  // namespace secrit
