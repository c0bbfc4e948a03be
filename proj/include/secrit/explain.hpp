#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "secrit/criticality.hpp"

namespace secrit {

extern const std::string_view kSystemPromptRole;
extern const std::string_view kResponseGuidelines;
extern const std::string_view kUserPromptInstruction;
extern const std::string_view kPlaceholderText;

// kSystemPromptRole + "\n\n" + kResponseGuidelines
const std::string& system_prompt();

struct PromptPair {
  std::string systemPrompt;
  std::string userPrompt;
  std::string promptHash;

  bool operator==(const PromptPair&) const = default;
};

// Throws Error(EmptyBody) when the method text is blank.
PromptPair build_prompt(const MethodUnit& method, MetricKind kind, std::int64_t value);

enum class ExplanationStatus { Pending, Ready, Failed };
std::string_view status_name(ExplanationStatus s);  // "pending", "ready", "failed"

enum class FailureReason { None, BackendUnreachable, AuthFailure, MalformedResponse };
std::string_view reason_name(FailureReason r);

struct ExplanationResult {
  ExplanationStatus status = ExplanationStatus::Pending;
  std::string message;  // placeholder while Pending, error text when Failed
  std::string whyCritical;
  std::vector<std::string> precautions;
  FailureReason reason = FailureReason::None;
  std::string model;
  std::string promptHash;
  double elapsed = 0.0;

  bool operator==(const ExplanationResult&) const = default;
};

ExplanationResult pending_result(const std::string& model = {}, const std::string& promptHash = {});

enum class BackendKind { Live, Mock };

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string endpointUrl;  // full chat-completions URL
  std::string modelName = "mock";
  std::string apiKeyEnvVar = "SECRIT_API_KEY";
  std::optional<double> temperature;
  std::optional<std::string> reasoningEffort;  // minimal, low, medium, high
  double timeoutSeconds = 60.0;
  unsigned maxRetries = 2;
  double backoffSeconds = 0.5;  // first retry delay; doubles per attempt
};

struct ExplanationJob {
  std::string fqn;
  CriticalityAssessment assessment;
  PromptPair prompt;
  std::string bodyDigest;

  // Smaller sorts first: higher level, then lower rank.
  std::tuple<int, std::size_t> priorityKey() const;
};

ExplanationJob make_job(const MethodUnit& method, const CriticalityAssessment& assessment);

// Jobs for every assessment whose method is present in `methods`.
std::vector<ExplanationJob> make_jobs(const std::vector<CriticalityAssessment>& assessments,
                                      const std::vector<MethodUnit>& methods);

class BackendFailure : public std::runtime_error {
 public:
  BackendFailure(FailureReason reason, bool transient, const std::string& what)
      : std::runtime_error(what), reason_(reason), transient_(transient) {}
  FailureReason reason() const noexcept { return reason_; }
  bool transient() const noexcept { return transient_; }

 private:
  FailureReason reason_;
  bool transient_;
};

// A chat-completion service. complete() returns the raw assistant text or
// throws BackendFailure.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string modelName() const = 0;
  virtual std::string complete(const ExplanationJob& job) = 0;
};

// Offline, deterministic replies in the labelled two-section format.
class MockBackend : public ChatBackend {
 public:
  std::string modelName() const override { return "mock"; }
  std::string complete(const ExplanationJob& job) override;
};

// OpenAI/Azure-style chat-completions endpoint over HTTP(S).
class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(BackendConfig config);
  std::string modelName() const override { return config_.modelName; }
  std::string complete(const ExplanationJob& job) override;

  // Request body sent for a prompt (exposed for wire-format tests).
  std::string requestBody(const PromptPair& prompt) const;

 private:
  BackendConfig config_;
};

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config);

struct ParsedExplanation {
  std::string whyCritical;
  std::vector<std::string> precautions;
};

// Parses WHY_CRITICAL / PRECAUTIONS sections; nullopt when either is missing.
std::optional<ParsedExplanation> parse_explanation(std::string_view reply);

ExplanationResult generate(const ExplanationJob& job, ChatBackend& backend, const BackendConfig& config);

struct CacheKey {
  std::string bodyDigest;
  MetricKind kind = MetricKind::LOC;
  std::int64_t value = 0;
  std::string modelName;
  std::string promptHash;

  std::string fileStem() const;
};

CacheKey cache_key(const ExplanationJob& job, const std::string& modelName);

// One JSON file per key under `dir`. Only Ready results are stored.
class ExplanationCache {
 public:
  explicit ExplanationCache(std::filesystem::path dir);

  std::optional<ExplanationResult> lookup(const CacheKey& key);
  void store(const CacheKey& key, const ExplanationResult& result);

  std::size_t corruptEntries() const { return corrupt_; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  std::size_t corrupt_ = 0;
};

struct ExplanationEvent {
  std::string fqn;
  ExplanationResult result;
};

// Emits Pending for every job up front, then dispatches jobs in priority order
// on at most `concurrencyLimit` workers. Events come out of next() in the order
// they were produced.
class ExplanationScheduler {
 public:
  using DispatchHook = std::function<void(const ExplanationJob&)>;

  ExplanationScheduler(std::vector<ExplanationJob> jobs, std::shared_ptr<ChatBackend> backend, BackendConfig config,
                       std::size_t concurrencyLimit, std::shared_ptr<ExplanationCache> cache = nullptr,
                       DispatchHook onDispatch = {});
  ~ExplanationScheduler();

  ExplanationScheduler(const ExplanationScheduler&) = delete;
  ExplanationScheduler& operator=(const ExplanationScheduler&) = delete;

  // Blocks until an event is available; nullopt once every job completed.
  std::optional<ExplanationEvent> next();

  // Stops dispatching queued jobs and ends the event stream. In-flight jobs
  // still run to completion but their results are dropped.
  void cancel();

  // True once no job is running or queued.
  bool idle() const;

  std::vector<std::string> dispatchOrder() const;

 private:
  void worker();
  void push(ExplanationEvent event);

  std::vector<ExplanationJob> jobs_;
  std::shared_ptr<ChatBackend> backend_;
  BackendConfig config_;
  std::shared_ptr<ExplanationCache> cache_;
  DispatchHook onDispatch_;

  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<ExplanationEvent> events_;
  std::size_t nextJob_ = 0;
  std::size_t outstanding_ = 0;  // jobs not yet completed
  bool cancelled_ = false;
  std::vector<std::string> dispatched_;
  std::vector<std::thread> workers_;
};

std::unique_ptr<ExplanationScheduler> schedule(std::vector<ExplanationJob> jobs, std::shared_ptr<ChatBackend> backend,
                                               const BackendConfig& config, std::size_t concurrencyLimit,
                                               std::shared_ptr<ExplanationCache> cache = nullptr);

}  // namespace secrit
