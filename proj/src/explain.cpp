#include "secrit/explain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace secrit {

using nlohmann::json;

const std::string_view kSystemPromptRole =
    "You are an assistant with expertise in explaining the security criticality of software in regard to the "
    "system’s confidentiality, integrity, and availability. For a given code snippet, you will be provided with "
    "the name of a software metric that measures its criticality, the interpretation of the metric value, and the "
    "value of the metric. One of the following metrics will be provided: cyclomatic complexity, lines of code, or "
    "lack of cohesion of methods. Your task is to explain why the code snippet is security critical using the "
    "provided metric and give steps to prevent possible security exploits due to mistakes in the code snippet.";

const std::string_view kResponseGuidelines =
    "Guidelines:\n"
    "- Ground every statement in the given code snippet; avoid generic advice that does not follow from it.\n"
    "- Refer to the concrete operations, parameters and data flows of the snippet where they matter.\n"
    "- Answer in exactly two labelled sections and nothing else.\n"
    "\n"
    "Response format:\n"
    "WHY_CRITICAL: <at most 120 words on why this code is security critical given the metric>\n"
    "PRECAUTIONS:\n"
    "1. <first precautionary step>\n"
    "2. <second precautionary step>\n"
    "3. <third precautionary step>\n"
    "(3 to 7 numbered steps)";

const std::string_view kUserPromptInstruction =
    "Explain why the code snippet is security critical based on the metric and provide concise steps to prevent "
    "security exploits.";

const std::string_view kPlaceholderText = "Generating explanation, please wait";

const std::string& system_prompt() {
  static const std::string prompt = std::string(kSystemPromptRole) + "\n\n" + std::string(kResponseGuidelines);
  return prompt;
}

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

PromptPair build_prompt(const MethodUnit& method, MetricKind kind, std::int64_t value) {
  if (blank(method.bodyText)) throw Error(ErrorCode::EmptyBody, "method " + method.fqn + " has an empty body");
  PromptPair p;
  p.systemPrompt = system_prompt();
  std::ostringstream user;
  user << kUserPromptInstruction << "\n"
       << "Code Snippet:\n"
       << method.bodyText << "\n"
       << "Metric: " << metric_name(kind) << " (" << metric_interpretation(kind) << "): " << value;
  p.userPrompt = std::move(user).str();
  std::string both = p.systemPrompt;
  both.push_back('\0');
  both += p.userPrompt;
  p.promptHash = sha256_hex(both);
  return p;
}

std::string_view status_name(ExplanationStatus s) {
  switch (s) {
    case ExplanationStatus::Pending:
      return "pending";
    case ExplanationStatus::Ready:
      return "ready";
    case ExplanationStatus::Failed:
      return "failed";
  }
  return "?";
}

std::string_view reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::None:
      return "none";
    case FailureReason::BackendUnreachable:
      return "BackendUnreachable";
    case FailureReason::AuthFailure:
      return "AuthFailure";
    case FailureReason::MalformedResponse:
      return "MalformedResponse";
  }
  return "?";
}

ExplanationResult pending_result(const std::string& model, const std::string& promptHash) {
  ExplanationResult r;
  r.status = ExplanationStatus::Pending;
  r.message = std::string(kPlaceholderText);
  r.model = model;
  r.promptHash = promptHash;
  return r;
}

std::tuple<int, std::size_t> ExplanationJob::priorityKey() const {
  const int level = static_cast<int>(assessment.level.value_or(CriticalityLevel::Low));
  return {-level, assessment.rank};
}

ExplanationJob make_job(const MethodUnit& method, const CriticalityAssessment& assessment) {
  ExplanationJob job;
  job.fqn = method.fqn;
  job.assessment = assessment;
  job.prompt = build_prompt(method, assessment.record.kind, assessment.record.value);
  job.bodyDigest = sha256_hex(method.bodyText);
  return job;
}

std::vector<ExplanationJob> make_jobs(const std::vector<CriticalityAssessment>& assessments,
                                      const std::vector<MethodUnit>& methods) {
  std::map<std::string_view, const MethodUnit*> byFqn;
  for (const auto& m : methods) byFqn.emplace(m.fqn, &m);
  std::vector<ExplanationJob> jobs;
  for (const auto& a : assessments) {
    const auto it = byFqn.find(a.record.fqn);
    if (it != byFqn.end()) jobs.push_back(make_job(*it->second, a));
  }
  return jobs;
}

std::string MockBackend::complete(const ExplanationJob& job) {
  const auto& a = job.assessment;
  const auto level = level_name(a.level.value_or(CriticalityLevel::Low));
  std::ostringstream out;
  out << "WHY_CRITICAL: " << job.fqn << " is rated " << level << " because its " << metric_name(a.record.kind)
      << " is " << a.record.value << " (rank " << a.rank << " in this project). Code with a high "
      << metric_name(a.record.kind)
      << " is harder to review, so mistakes that affect confidentiality, integrity, or availability are easier to "
         "miss.\n"
      << "PRECAUTIONS:\n"
      << "1. Validate and sanitize every external input before it reaches queries, files, or templates.\n"
      << "2. Keep the method small and single-purpose so that each security-relevant branch can be reviewed.\n"
      << "3. Add tests for malicious and boundary inputs covering every branch of the method.\n";
  return std::move(out).str();
}

HttpChatBackend::HttpChatBackend(BackendConfig config) : config_(std::move(config)) {}

std::string HttpChatBackend::requestBody(const PromptPair& prompt) const {
  json body;
  body["model"] = config_.modelName;
  body["messages"] = json::array({
      {{"role", "system"}, {"content", prompt.systemPrompt}},
      {{"role", "user"}, {"content", prompt.userPrompt}},
  });
  if (config_.temperature) body["temperature"] = *config_.temperature;
  if (config_.reasoningEffort) body["reasoning_effort"] = *config_.reasoningEffort;
  return body.dump();
}

std::string HttpChatBackend::complete(const ExplanationJob& job) {
  static const std::regex kUrl(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpointUrl, m, kUrl)) {
    throw BackendFailure(FailureReason::BackendUnreachable, false, "invalid endpoint URL '" + config_.endpointUrl + "'");
  }
  const std::string schemeHost =
      m[1].str() + "://" + m[2].str() + (m[3].matched ? ":" + m[3].str() : std::string());
  const std::string path = m[4].matched ? m[4].str() : "/";

  httplib::Client client(schemeHost);
  const auto secs = static_cast<time_t>(config_.timeoutSeconds);
  const auto usecs = static_cast<time_t>((config_.timeoutSeconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.apiKeyEnvVar.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
    headers.emplace("api-key", key);
  }
  auto res = client.Post(path, headers, requestBody(job.prompt), "application/json");
  if (!res) {
    throw BackendFailure(FailureReason::BackendUnreachable, true,
                         "cannot reach " + config_.endpointUrl + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw BackendFailure(FailureReason::AuthFailure, false,
                         "backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status == 408 || res->status == 429 || res->status >= 500) {
    throw BackendFailure(FailureReason::BackendUnreachable, true, "backend returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw BackendFailure(FailureReason::MalformedResponse, false, "unexpected HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendFailure(FailureReason::MalformedResponse, false, std::string("unexpected response body: ") + e.what());
  }
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::Mock) return std::make_shared<MockBackend>();
  return std::make_shared<HttpChatBackend>(config);
}

std::optional<ParsedExplanation> parse_explanation(std::string_view reply) {
  const auto why = reply.find("WHY_CRITICAL:");
  const auto pre = reply.find("PRECAUTIONS:");
  if (why == std::string_view::npos || pre == std::string_view::npos || pre < why) return std::nullopt;
  ParsedExplanation out;
  const auto whyStart = why + std::string_view("WHY_CRITICAL:").size();
  out.whyCritical = trim(reply.substr(whyStart, pre - whyStart));

  static const std::regex kStep(R"(^\s*(?:\d+[.)]|[-*])\s+(.*\S)\s*$)");
  std::istringstream lines(std::string(reply.substr(pre + std::string_view("PRECAUTIONS:").size())));
  std::string line;
  while (std::getline(lines, line)) {
    std::smatch m;
    if (std::regex_match(line, m, kStep)) {
      out.precautions.push_back(m[1].str());
    } else if (!blank(line) && !out.precautions.empty()) {
      out.precautions.back() += " " + trim(line);  // wrapped step
    }
  }
  if (out.whyCritical.empty() || out.precautions.empty()) return std::nullopt;
  return out;
}

ExplanationResult generate(const ExplanationJob& job, ChatBackend& backend, const BackendConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  ExplanationResult result;
  result.model = backend.modelName();
  result.promptHash = job.prompt.promptHash;

  auto finish = [&](ExplanationResult r) {
    r.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
  };

  for (unsigned attempt = 0;; ++attempt) {
    try {
      const auto reply = backend.complete(job);
      auto parsed = parse_explanation(reply);
      if (!parsed) {
        result.status = ExplanationStatus::Failed;
        result.reason = FailureReason::MalformedResponse;
        result.message = "response lacks WHY_CRITICAL or PRECAUTIONS section";
        return finish(result);
      }
      result.status = ExplanationStatus::Ready;
      result.whyCritical = std::move(parsed->whyCritical);
      result.precautions = std::move(parsed->precautions);
      return finish(result);
    } catch (const BackendFailure& e) {
      if (!e.transient() || attempt >= config.maxRetries) {
        result.status = ExplanationStatus::Failed;
        result.reason = e.reason();
        result.message = e.what();
        return finish(result);
      }
    }
    const double delay = config.backoffSeconds * std::pow(2.0, attempt);
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }
}

// ---- cache ----------------------------------------------------------------

namespace {

constexpr int kCacheVersion = 1;
constexpr std::string_view kCacheFormat = "secrit-explanation-cache";

json key_json(const CacheKey& k) {
  return {{"bodyDigest", k.bodyDigest},
          {"metric", std::string(metric_id(k.kind))},
          {"value", k.value},
          {"model", k.modelName},
          {"promptHash", k.promptHash}};
}

json result_json(const ExplanationResult& r) {
  return {{"status", std::string(status_name(r.status))},
          {"whyCritical", r.whyCritical},
          {"precautions", r.precautions},
          {"model", r.model},
          {"promptHash", r.promptHash},
          {"elapsed", r.elapsed}};
}

}  // namespace

std::string CacheKey::fileStem() const { return sha256_hex(key_json(*this).dump()); }

CacheKey cache_key(const ExplanationJob& job, const std::string& modelName) {
  return {job.bodyDigest, job.assessment.record.kind, job.assessment.record.value, modelName, job.prompt.promptHash};
}

ExplanationCache::ExplanationCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<ExplanationResult> ExplanationCache::lookup(const CacheKey& key) {
  std::lock_guard lock(mutex_);
  const auto path = dir_ / (key.fileStem() + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    const auto doc = json::parse(read_file_bytes(path));
    if (doc.at("format") != kCacheFormat || doc.at("version") != kCacheVersion || doc.at("key") != key_json(key)) {
      throw std::runtime_error("header mismatch");
    }
    const auto& r = doc.at("result");
    ExplanationResult out;
    if (r.at("status") != "ready") throw std::runtime_error("non-ready entry");
    out.status = ExplanationStatus::Ready;
    out.whyCritical = r.at("whyCritical").get<std::string>();
    out.precautions = r.at("precautions").get<std::vector<std::string>>();
    out.model = r.at("model").get<std::string>();
    out.promptHash = r.at("promptHash").get<std::string>();
    out.elapsed = r.at("elapsed").get<double>();
    if (out.whyCritical.empty() || out.precautions.empty()) throw std::runtime_error("empty sections");
    return out;
  } catch (const std::exception&) {
    ++corrupt_;
    std::filesystem::remove(path, ec);
    return std::nullopt;
  }
}

void ExplanationCache::store(const CacheKey& key, const ExplanationResult& result) {
  if (result.status != ExplanationStatus::Ready) return;
  std::lock_guard lock(mutex_);
  const json doc = {{"format", kCacheFormat}, {"version", kCacheVersion}, {"key", key_json(key)},
                    {"result", result_json(result)}};
  const auto path = dir_ / (key.fileStem() + ".json");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

// ---- scheduler --------------------------------------------------------------

ExplanationScheduler::ExplanationScheduler(std::vector<ExplanationJob> jobs, std::shared_ptr<ChatBackend> backend,
                                           BackendConfig config, std::size_t concurrencyLimit,
                                           std::shared_ptr<ExplanationCache> cache, DispatchHook onDispatch)
    : jobs_(std::move(jobs)),
      backend_(std::move(backend)),
      config_(std::move(config)),
      cache_(std::move(cache)),
      onDispatch_(std::move(onDispatch)) {
  if (concurrencyLimit == 0) throw std::invalid_argument("concurrencyLimit must be at least 1");
  std::stable_sort(jobs_.begin(), jobs_.end(),
                   [](const ExplanationJob& a, const ExplanationJob& b) { return a.priorityKey() < b.priorityKey(); });
  const auto model = backend_ ? backend_->modelName() : std::string();
  for (const auto& job : jobs_) events_.push_back({job.fqn, pending_result(model, job.prompt.promptHash)});
  outstanding_ = jobs_.size();
  const std::size_t workers = std::min(concurrencyLimit, jobs_.size());
  for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { worker(); });
}

ExplanationScheduler::~ExplanationScheduler() {
  cancel();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
}

void ExplanationScheduler::cancel() {
  std::lock_guard lock(mutex_);
  if (cancelled_) return;
  cancelled_ = true;
  outstanding_ -= jobs_.size() - nextJob_;
  nextJob_ = jobs_.size();
  ready_.notify_all();
}

void ExplanationScheduler::push(ExplanationEvent event) {
  std::lock_guard lock(mutex_);
  events_.push_back(std::move(event));
  --outstanding_;
  ready_.notify_all();
}

void ExplanationScheduler::worker() {
  for (;;) {
    const ExplanationJob* job = nullptr;
    {
      std::lock_guard lock(mutex_);
      if (nextJob_ >= jobs_.size()) return;
      job = &jobs_[nextJob_++];
      dispatched_.push_back(job->fqn);
    }
    if (onDispatch_) onDispatch_(*job);

    const auto key = cache_key(*job, backend_->modelName());
    std::optional<ExplanationResult> result;
    if (cache_) result = cache_->lookup(key);
    if (!result) {
      result = generate(*job, *backend_, config_);
      if (cache_) cache_->store(key, *result);
    }
    push({job->fqn, std::move(*result)});
  }
}

std::optional<ExplanationEvent> ExplanationScheduler::next() {
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [this] { return cancelled_ || !events_.empty() || outstanding_ == 0; });
  if (cancelled_ || events_.empty()) return std::nullopt;
  auto ev = std::move(events_.front());
  events_.pop_front();
  return ev;
}

bool ExplanationScheduler::idle() const {
  std::lock_guard lock(mutex_);
  return outstanding_ == 0;
}

std::vector<std::string> ExplanationScheduler::dispatchOrder() const {
  std::lock_guard lock(mutex_);
  return dispatched_;
}

std::unique_ptr<ExplanationScheduler> schedule(std::vector<ExplanationJob> jobs, std::shared_ptr<ChatBackend> backend,
                                               const BackendConfig& config, std::size_t concurrencyLimit,
                                               std::shared_ptr<ExplanationCache> cache) {
  return std::make_unique<ExplanationScheduler>(std::move(jobs), std::move(backend), config, concurrencyLimit,
                                                std::move(cache));
}

}  // namespace secrit
