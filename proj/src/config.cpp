#include "secrit/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>
#include <variant>

namespace secrit {

namespace {

using Value = std::variant<std::string, bool, double, std::vector<std::string>>;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line) + ": " + msg);
}

// Drops a trailing # comment that is not inside a string.
std::string strip_comment(std::string_view s) {
  bool inString = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) inString = !inString;
    if (s[i] == '#' && !inString) return std::string(s.substr(0, i));
  }
  return std::string(s);
}

std::string parse_string(std::string_view raw, std::size_t line) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') fail(line, "expected a quoted string");
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) {
      const char c = raw[++i];
      out.push_back(c == 'n' ? '\n' : c == 't' ? '\t' : c);
    } else {
      out.push_back(raw[i]);
    }
  }
  return out;
}

Value parse_value(const std::string& raw, std::size_t line) {
  if (raw.empty()) fail(line, "missing value");
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '"') return parse_string(raw, line);
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array");
    std::vector<std::string> items;
    std::string inner = trim(std::string_view(raw).substr(1, raw.size() - 2));
    std::size_t i = 0;
    while (i < inner.size()) {
      while (i < inner.size() && (std::isspace(static_cast<unsigned char>(inner[i])) || inner[i] == ',')) ++i;
      if (i >= inner.size()) break;
      if (inner[i] != '"') fail(line, "arrays may only hold strings");
      std::size_t j = i + 1;
      while (j < inner.size() && !(inner[j] == '"' && inner[j - 1] != '\\')) ++j;
      if (j >= inner.size()) fail(line, "unterminated string in array");
      items.push_back(parse_string(std::string_view(inner).substr(i, j - i + 1), line));
      i = j + 1;
    }
    return items;
  }
  double d = 0;
  const auto* end = raw.data() + raw.size();
  const auto [ptr, ec] = std::from_chars(raw.data(), end, d);
  if (ec != std::errc() || ptr != end) fail(line, "cannot parse value '" + raw + "'");
  return d;
}

template <typename T>
const T& expect(const Value& v, std::size_t line, const std::string& key) {
  if (const auto* p = std::get_if<T>(&v)) return *p;
  fail(line, "wrong value type for '" + key + "'");
}

std::size_t as_count(const Value& v, std::size_t line, const std::string& key, std::size_t min) {
  const double d = expect<double>(v, line, key);
  if (d < static_cast<double>(min) || d != static_cast<double>(static_cast<std::size_t>(d))) {
    fail(line, "'" + key + "' must be an integer >= " + std::to_string(min));
  }
  return static_cast<std::size_t>(d);
}

}  // namespace

ToolConfig parse_config(std::string_view text, ToolConfig cfg) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string rawLine;
  std::size_t lineNo = 0;
  while (std::getline(in, rawLine)) {
    ++lineNo;
    const std::string line = trim(strip_comment(rawLine));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineNo, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "backend" && section != "scan") fail(lineNo, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineNo, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const Value value = parse_value(trim(std::string_view(line).substr(eq + 1)), lineNo);
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "metric") {
      const auto k = parse_metric_kind(expect<std::string>(value, lineNo, full));
      if (!k) fail(lineNo, "metric must be one of cc, loc, lcom");
      cfg.metricKind = *k;
    } else if (full == "tie_rule") {
      const auto r = parse_tie_rule(expect<std::string>(value, lineNo, full));
      if (!r) fail(lineNo, "unknown tie rule");
      cfg.tieRule = *r;
    } else if (full == "show_low") {
      cfg.showLow = expect<bool>(value, lineNo, full);
    } else if (full == "explain") {
      cfg.explain = expect<bool>(value, lineNo, full);
    } else if (full == "concurrency") {
      cfg.concurrencyLimit = as_count(value, lineNo, full, 1);
    } else if (full == "state_dir") {
      cfg.stateDir = expect<std::string>(value, lineNo, full);
    } else if (full == "cache") {
      cfg.useCache = expect<bool>(value, lineNo, full);
    } else if (full == "backend.mode") {
      const auto& m = expect<std::string>(value, lineNo, full);
      if (m != "live" && m != "mock") fail(lineNo, "backend.mode must be live or mock");
      cfg.backend.kind = m == "live" ? BackendKind::Live : BackendKind::Mock;
    } else if (full == "backend.endpoint") {
      cfg.backend.endpointUrl = expect<std::string>(value, lineNo, full);
    } else if (full == "backend.model") {
      cfg.backend.modelName = expect<std::string>(value, lineNo, full);
    } else if (full == "backend.api_key_env") {
      cfg.backend.apiKeyEnvVar = expect<std::string>(value, lineNo, full);
    } else if (full == "backend.temperature") {
      cfg.backend.temperature = expect<double>(value, lineNo, full);
    } else if (full == "backend.reasoning_effort") {
      const auto& e = expect<std::string>(value, lineNo, full);
      if (e != "minimal" && e != "low" && e != "medium" && e != "high") {
        fail(lineNo, "reasoning_effort must be minimal, low, medium or high");
      }
      cfg.backend.reasoningEffort = e;
    } else if (full == "backend.timeout") {
      cfg.backend.timeoutSeconds = expect<double>(value, lineNo, full);
      if (cfg.backend.timeoutSeconds <= 0) fail(lineNo, "timeout must be positive");
    } else if (full == "backend.max_retries") {
      cfg.backend.maxRetries = static_cast<unsigned>(as_count(value, lineNo, full, 0));
    } else if (full == "backend.api_key" || full == "api_key") {
      fail(lineNo, "API keys are read from the environment variable named by backend.api_key_env, never from the "
                   "config file");
    } else if (full == "scan.include") {
      cfg.scan.includeGlobs = expect<std::vector<std::string>>(value, lineNo, full);
    } else if (full == "scan.exclude") {
      cfg.scan.excludeGlobs = expect<std::vector<std::string>>(value, lineNo, full);
    } else {
      fail(lineNo, "unknown key '" + full + "'");
    }
  }
  return cfg;
}

ToolConfig load_config_file(const std::filesystem::path& path, ToolConfig base) {
  std::string text;
  try {
    text = read_file_bytes(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  try {
    return parse_config(text, std::move(base));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

ToolConfig apply_env(ToolConfig cfg, const EnvLookup& env) {
  auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = env ? env(name) : nullptr;
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("SECRIT_METRIC")) {
    const auto k = parse_metric_kind(*v);
    if (!k) throw Error(ErrorCode::InvalidConfig, "SECRIT_METRIC must be one of cc, loc, lcom");
    cfg.metricKind = *k;
  }
  if (auto v = get("SECRIT_TIE_RULE")) {
    const auto r = parse_tie_rule(*v);
    if (!r) throw Error(ErrorCode::InvalidConfig, "SECRIT_TIE_RULE is not a known tie rule");
    cfg.tieRule = *r;
  }
  if (auto v = get("SECRIT_BACKEND")) {
    if (*v != "live" && *v != "mock") throw Error(ErrorCode::InvalidConfig, "SECRIT_BACKEND must be live or mock");
    cfg.backend.kind = *v == "live" ? BackendKind::Live : BackendKind::Mock;
  }
  if (auto v = get("SECRIT_MODEL")) cfg.backend.modelName = *v;
  if (auto v = get("SECRIT_ENDPOINT")) cfg.backend.endpointUrl = *v;
  return cfg;
}

ToolConfig resolve_config(const std::filesystem::path& root, const std::optional<std::filesystem::path>& explicitFile,
                          const EnvLookup& env) {
  ToolConfig cfg;
  if (explicitFile) {
    cfg = load_config_file(*explicitFile, cfg);
  } else {
    std::error_code ec;
    const auto implicit = root / kConfigFileName;
    if (std::filesystem::is_regular_file(implicit, ec)) cfg = load_config_file(implicit, cfg);
  }
  return apply_env(std::move(cfg), env);
}

std::string describe_config(const ToolConfig& c) {
  auto quote = [](const std::string& s) { return "\"" + s + "\""; };
  auto list = [&](const std::vector<std::string>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + quote(v[i]);
    return out + "]";
  };
  std::ostringstream out;
  out << "metric = " << quote(std::string(metric_id(c.metricKind))) << "\n"
      << "tie_rule = " << quote(std::string(tie_rule_id(c.tieRule))) << "\n"
      << "show_low = " << (c.showLow ? "true" : "false") << "\n"
      << "explain = " << (c.explain ? "true" : "false") << "\n"
      << "concurrency = " << c.concurrencyLimit << "\n"
      << "cache = " << (c.useCache ? "true" : "false") << "\n";
  if (c.stateDir) out << "state_dir = " << quote(c.stateDir->generic_string()) << "\n";
  out << "\n[backend]\n"
      << "mode = " << quote(c.backend.kind == BackendKind::Live ? "live" : "mock") << "\n"
      << "endpoint = " << quote(c.backend.endpointUrl) << "\n"
      << "model = " << quote(c.backend.modelName) << "\n"
      << "api_key_env = " << quote(c.backend.apiKeyEnvVar) << "\n";
  if (c.backend.temperature) out << "temperature = " << *c.backend.temperature << "\n";
  if (c.backend.reasoningEffort) out << "reasoning_effort = " << quote(*c.backend.reasoningEffort) << "\n";
  out << "timeout = " << c.backend.timeoutSeconds << "\n"
      << "max_retries = " << c.backend.maxRetries << "\n"
      << "\n[scan]\n"
      << "include = " << list(c.scan.includeGlobs) << "\n"
      << "exclude = " << list(c.scan.excludeGlobs) << "\n";
  return std::move(out).str();
}

std::filesystem::path state_directory(const ToolConfig& config, const std::filesystem::path& root) {
  return config.stateDir ? *config.stateDir : root / ".secrit";
}

}  // namespace secrit
