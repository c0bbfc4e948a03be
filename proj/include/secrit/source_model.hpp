#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace secrit {

enum class ErrorCode {
  RootNotFound,
  UnreadablePath,
  ParseFailure,
  SpanOutOfRange,
  NotConcrete,
  EmptyInput,
  EmptyBody,
  InvalidConfig,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct SourceFile {
  std::filesystem::path path;      // as scanned (root-relative when produced by scan_project)
  std::filesystem::path absolute;  // where the bytes live
  std::string languageTag;
  std::string contentHash;  // lowercase hex sha-256 of the file bytes
  std::size_t lineCount = 0;

  bool operator==(const SourceFile&) const = default;
};

using SourceFilePtr = std::shared_ptr<const SourceFile>;

struct LineSpan {
  std::size_t startLine = 0;  // 1-based, inclusive
  std::size_t endLine = 0;

  bool operator==(const LineSpan&) const = default;
};

struct MethodUnit {
  std::string fqn;  // pkg.Class.name(ParamType,...)
  std::string className;
  std::string name;
  SourceFilePtr file;
  LineSpan span;
  std::string bodyText;
  bool isConcrete = false;
  bool isConstructor = false;
  // Byte range of the body braces within the file, used by the metric passes.
  std::size_t bodyBegin = 0;
  std::size_t bodyEnd = 0;

  bool operator==(const MethodUnit& o) const {
    return fqn == o.fqn && span == o.span && bodyText == o.bodyText && isConcrete == o.isConcrete;
  }
};

struct ClassModel {
  std::string qualifiedName;
  SourceFilePtr file;
  std::set<std::string> fields;
  std::vector<MethodUnit> methods;
  std::map<std::string, std::set<std::string>> fieldAccess;  // method fqn -> accessed fields
};

struct ScanDiagnostic {
  std::filesystem::path path;
  std::string message;
};

struct ScanResult {
  std::vector<SourceFile> files;
  std::vector<ScanDiagnostic> errors;  // UnreadablePath entries
};

struct ScanOptions {
  std::vector<std::string> includeGlobs{"**/*.java"};
  std::vector<std::string> excludeGlobs{"**/target/**", "**/build/**", "**/test/**"};
};

// Glob over '/'-separated relative paths. '**' spans directories, '*' and '?'
// stay within one segment.
bool glob_match(std::string_view pattern, std::string_view path);

// Throws Error(RootNotFound) when root is missing. Unreadable entries are
// collected in ScanResult::errors.
ScanResult scan_project(const std::filesystem::path& root, const ScanOptions& options = {});

struct ParseDiagnostic {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<ClassModel> classes;
  std::vector<ParseDiagnostic> diagnostics;
};

// Grammar adapter boundary. The Java adapter is the only one shipped.
class GrammarAdapter {
 public:
  virtual ~GrammarAdapter() = default;
  virtual std::string languageTag() const = 0;
  virtual ParseResult parse(const SourceFilePtr& file, std::string_view content) const = 0;
};

std::unique_ptr<GrammarAdapter> make_java_adapter();

// Decodes content as UTF-8, replacing invalid sequences with U+FFFD. Returns
// true when a replacement happened.
bool sanitize_utf8(std::string& content);

ParseResult parse_source(const SourceFilePtr& file, std::string_view content);

std::vector<MethodUnit> extract_methods(const std::vector<ClassModel>& classes);

std::string read_file_bytes(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

std::vector<std::string> split_lines(std::string_view text);

// A parsed project snapshot.
struct Project {
  std::filesystem::path root;
  std::vector<SourceFilePtr> files;
  std::vector<ClassModel> classes;
  std::vector<ScanDiagnostic> scanErrors;
  std::vector<std::pair<std::filesystem::path, ParseDiagnostic>> parseDiagnostics;
  // Lines of each file keyed by SourceFile::path string.
  std::map<std::string, std::vector<std::string>> fileLines;
};

Project load_project(const std::filesystem::path& root, const ScanOptions& options = {});

}  // namespace secrit
