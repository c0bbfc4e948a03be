#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "secrit/report.hpp"

namespace secrit {

namespace rpc {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kNotInitialized = -32001;
inline constexpr int kAnalysisFailed = -32002;
}  // namespace rpc

// Line-delimited JSON-RPC 2.0 analysis service. One project per instance;
// initialize resets everything. Requests are handled in call order, while
// explanations are produced on background workers and announced with
// explanationReady notifications.
class AnalysisService {
 public:
  using Writer = std::function<void(const std::string& line)>;
  using BackendFactory = std::function<std::shared_ptr<ChatBackend>(const BackendConfig&)>;

  explicit AnalysisService(Writer writer, ToolConfig defaults = {}, BackendFactory backends = make_backend);
  ~AnalysisService();

  AnalysisService(const AnalysisService&) = delete;
  AnalysisService& operator=(const AnalysisService&) = delete;

  // Handles one input line. Returns false once shutdown was requested.
  bool handle(const std::string& line);

  // Blocks until the current explanation run (if any) has drained.
  void waitForExplanations();

 private:
  struct MethodState {
    CriticalityAssessment assessment;
    ExplanationResult explanation;
    bool explained = false;
  };

  nlohmann::json dispatch(const std::string& method, const nlohmann::json& params);
  nlohmann::json initialize(const nlohmann::json& params);
  nlohmann::json analyze(const nlohmann::json& params);
  nlohmann::json hover(const nlohmann::json& params);
  nlohmann::json assessmentsPayload() const;

  void send(const nlohmann::json& message);
  void notify(const std::string& method, nlohmann::json params);
  void stopExplanations();
  void startExplanations(const std::vector<MethodUnit>& methods);

  Writer writer_;
  std::mutex writeMutex_;
  ToolConfig defaults_;
  BackendFactory backends_;

  bool initialized_ = false;
  std::filesystem::path root_;
  ToolConfig config_;
  std::optional<AnalysisOutcome> outcome_;
  std::vector<std::string> order_;  // fqn by rank

  mutable std::mutex stateMutex_;
  std::map<std::string, MethodState> methods_;

  std::unique_ptr<ExplanationScheduler> scheduler_;
  std::vector<std::unique_ptr<ExplanationScheduler>> retired_;  // cancelled, may still have calls in flight
  std::thread drain_;
  std::function<void()> afterResponse_;
};

// Reads requests from `in` until EOF or shutdown; writes one JSON message per line.
int serve(std::istream& in, std::ostream& out, const ToolConfig& defaults);

}  // namespace secrit
