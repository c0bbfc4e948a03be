#include "secrit/service.hpp"

#include <istream>
#include <ostream>

namespace secrit {

using nlohmann::json;

namespace {

struct RpcError {
  int code;
  std::string message;
};

std::string opt_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw RpcError{rpc::kInvalidParams, std::string("'") + key + "' must be a string"};
  return obj.at(key).get<std::string>();
}

ToolConfig apply_params_config(ToolConfig cfg, const json& c) {
  if (!c.is_object()) throw RpcError{rpc::kInvalidParams, "config must be an object"};
  auto boolean = [&](const char* key, bool& target) {
    if (!c.contains(key)) return;
    if (!c.at(key).is_boolean()) throw RpcError{rpc::kInvalidParams, std::string("'") + key + "' must be a boolean"};
    target = c.at(key).get<bool>();
  };
  if (c.contains("metric")) {
    const auto k = parse_metric_kind(opt_string(c, "metric", ""));
    if (!k) throw RpcError{rpc::kInvalidParams, "metric must be one of cc, loc, lcom"};
    cfg.metricKind = *k;
  }
  if (c.contains("tieRule")) {
    const auto r = parse_tie_rule(opt_string(c, "tieRule", ""));
    if (!r) throw RpcError{rpc::kInvalidParams, "unknown tie rule"};
    cfg.tieRule = *r;
  }
  boolean("showLow", cfg.showLow);
  boolean("explain", cfg.explain);
  boolean("cache", cfg.useCache);
  if (c.contains("concurrency")) {
    if (!c.at("concurrency").is_number_unsigned() || c.at("concurrency").get<std::size_t>() == 0) {
      throw RpcError{rpc::kInvalidParams, "concurrency must be a positive integer"};
    }
    cfg.concurrencyLimit = c.at("concurrency").get<std::size_t>();
  }
  if (c.contains("stateDir")) cfg.stateDir = opt_string(c, "stateDir", "");
  if (c.contains("include")) cfg.scan.includeGlobs = c.at("include").get<std::vector<std::string>>();
  if (c.contains("exclude")) cfg.scan.excludeGlobs = c.at("exclude").get<std::vector<std::string>>();
  if (c.contains("backend")) {
    const auto& b = c.at("backend");
    if (!b.is_object()) throw RpcError{rpc::kInvalidParams, "backend must be an object"};
    if (b.contains("mode")) {
      const auto mode = opt_string(b, "mode", "");
      if (mode != "live" && mode != "mock") throw RpcError{rpc::kInvalidParams, "backend.mode must be live or mock"};
      cfg.backend.kind = mode == "live" ? BackendKind::Live : BackendKind::Mock;
    }
    cfg.backend.endpointUrl = opt_string(b, "endpoint", cfg.backend.endpointUrl);
    cfg.backend.modelName = opt_string(b, "model", cfg.backend.modelName);
    cfg.backend.apiKeyEnvVar = opt_string(b, "apiKeyEnv", cfg.backend.apiKeyEnvVar);
    if (b.contains("temperature")) cfg.backend.temperature = b.at("temperature").get<double>();
    if (b.contains("reasoningEffort")) cfg.backend.reasoningEffort = opt_string(b, "reasoningEffort", "");
    if (b.contains("timeout")) cfg.backend.timeoutSeconds = b.at("timeout").get<double>();
    if (b.contains("maxRetries")) cfg.backend.maxRetries = b.at("maxRetries").get<unsigned>();
  }
  return cfg;
}

json explanation_json(const std::string& fqn, const ExplanationResult& x) {
  json out = {{"fqn", fqn}, {"status", status_name(x.status)}, {"model", x.model}};
  if (x.status == ExplanationStatus::Ready) {
    out["whyCritical"] = x.whyCritical;
    out["precautions"] = x.precautions;
  } else {
    out["message"] = x.message;
    if (x.status == ExplanationStatus::Failed) out["failureReason"] = reason_name(x.reason);
  }
  return out;
}

}  // namespace

AnalysisService::AnalysisService(Writer writer, ToolConfig defaults, BackendFactory backends)
    : writer_(std::move(writer)), defaults_(std::move(defaults)), backends_(std::move(backends)) {}

AnalysisService::~AnalysisService() { stopExplanations(); }

void AnalysisService::send(const json& message) {
  const auto line = message.dump();
  std::lock_guard lock(writeMutex_);
  writer_(line);
}

void AnalysisService::notify(const std::string& method, json params) {
  send({{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}});
}

bool AnalysisService::handle(const std::string& line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error& e) {
    send({{"jsonrpc", "2.0"}, {"id", nullptr}, {"error", {{"code", rpc::kParseError}, {"message", e.what()}}}});
    return true;
  }

  const bool hasId = request.is_object() && request.contains("id");
  const json id = hasId ? request.at("id") : json(nullptr);
  auto reply_error = [&](int code, const std::string& message) {
    if (hasId) send({{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}});
  };

  if (!request.is_object() || request.value("jsonrpc", "") != "2.0" || !request.contains("method") ||
      !request.at("method").is_string() ||
      (hasId && !(id.is_string() || id.is_number_integer() || id.is_null()))) {
    send({{"jsonrpc", "2.0"},
          {"id", hasId && (id.is_string() || id.is_number_integer()) ? id : json(nullptr)},
          {"error", {{"code", rpc::kInvalidRequest}, {"message", "invalid JSON-RPC 2.0 request"}}}});
    return true;
  }
  const auto method = request.at("method").get<std::string>();
  const json params = request.contains("params") ? request.at("params") : json::object();
  if (!params.is_object()) {
    reply_error(rpc::kInvalidParams, "params must be an object");
    return true;
  }

  afterResponse_ = nullptr;
  try {
    json result = dispatch(method, params);
    if (hasId) send({{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}});
  } catch (const RpcError& e) {
    reply_error(e.code, e.message);
  } catch (const json::exception& e) {
    reply_error(rpc::kInvalidParams, e.what());
  }
  if (afterResponse_) {
    auto follow = std::move(afterResponse_);
    afterResponse_ = nullptr;
    follow();
  }
  return method != "shutdown";
}

json AnalysisService::dispatch(const std::string& method, const json& params) {
  if (method == "initialize") return initialize(params);
  if (method == "shutdown") {
    stopExplanations();
    return nullptr;
  }
  if (method != "analyze" && method != "setMetric" && method != "hover") {
    throw RpcError{rpc::kMethodNotFound, "unknown method '" + method + "'"};
  }
  if (!initialized_) throw RpcError{rpc::kNotInitialized, "service not initialized; call initialize first"};
  if (method == "hover") return hover(params);
  if (method == "setMetric" && !params.contains("metricKind")) {
    throw RpcError{rpc::kInvalidParams, "setMetric requires metricKind"};
  }
  return analyze(params);
}

json AnalysisService::initialize(const json& params) {
  stopExplanations();
  {
    std::lock_guard lock(stateMutex_);
    methods_.clear();
  }
  outcome_.reset();
  order_.clear();
  initialized_ = false;

  const auto root = opt_string(params, "projectRoot", "");
  if (root.empty()) throw RpcError{rpc::kInvalidParams, "initialize requires projectRoot"};
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    throw RpcError{rpc::kAnalysisFailed, "project root not found: " + root};
  }
  ToolConfig cfg = defaults_;
  try {
    const auto file = std::filesystem::path(root) / kConfigFileName;
    if (std::filesystem::is_regular_file(file, ec)) cfg = load_config_file(file, cfg);
  } catch (const Error& e) {
    throw RpcError{rpc::kAnalysisFailed, e.what()};
  }
  if (params.contains("config")) cfg = apply_params_config(std::move(cfg), params.at("config"));

  root_ = root;
  config_ = std::move(cfg);
  initialized_ = true;
  json metrics = json::array();
  for (auto k : kAllMetricKinds) metrics.push_back(metric_id(k));
  return {{"serverInfo", {{"name", kToolName}, {"version", kToolVersion}}},
          {"capabilities",
           {{"metrics", metrics},
            {"hover", true},
            {"explanations", config_.explain},
            {"placeholder", kPlaceholderText}}},
          {"config",
           {{"metric", metric_id(config_.metricKind)},
            {"tieRule", tie_rule_id(config_.tieRule)},
            {"showLow", config_.showLow},
            {"explain", config_.explain},
            {"backend", config_.backend.kind == BackendKind::Live ? "live" : "mock"}}}};
}

json AnalysisService::assessmentsPayload() const {
  json entries = json::array();
  LevelCounts counts;
  {
    std::lock_guard lock(stateMutex_);
    for (const auto& fqn : order_) {
      const auto& a = methods_.at(fqn).assessment;
      entries.push_back({{"fqn", fqn},
                         {"file", a.record.file},
                         {"startLine", a.record.span.startLine},
                         {"endLine", a.record.span.endLine},
                         {"value", a.record.value},
                         {"rank", a.rank},
                         {"level", level_name(a.level.value_or(CriticalityLevel::Low))}});
    }
  }
  if (outcome_) counts = count_levels(outcome_->assessments);
  return {{"metric", metric_id(config_.metricKind)},
          {"tieRule", tie_rule_id(config_.tieRule)},
          {"showLow", config_.showLow},
          {"counts", {{"High", counts.high}, {"Medium", counts.medium}, {"Low", counts.low}}},
          {"assessments", std::move(entries)}};
}

json AnalysisService::analyze(const json& params) {
  if (params.contains("metricKind")) {
    const auto k = parse_metric_kind(opt_string(params, "metricKind", ""));
    if (!k) throw RpcError{rpc::kInvalidParams, "metricKind must be one of cc, loc, lcom"};
    config_.metricKind = *k;
  }
  stopExplanations();
  try {
    outcome_ = analyze_project(root_, config_);
  } catch (const std::exception& e) {
    outcome_.reset();
    throw RpcError{rpc::kAnalysisFailed, std::string("analysis failed: ") + e.what()};
  }
  {
    std::lock_guard lock(stateMutex_);
    methods_.clear();
    order_.clear();
    for (const auto& a : outcome_->assessments) {
      MethodState st;
      st.assessment = a;
      st.explained = config_.explain;
      if (config_.explain) st.explanation = pending_result(config_.backend.modelName);
      methods_.emplace(a.record.fqn, std::move(st));
      order_.push_back(a.record.fqn);
    }
  }
  json payload = assessmentsPayload();
  afterResponse_ = [this, payload] {
    notify("assessmentsReady", payload);
    if (config_.explain) startExplanations(extract_methods(outcome_->project.classes));
  };
  return payload;
}

json AnalysisService::hover(const json& params) {
  const auto fqn = opt_string(params, "fqn", "");
  if (fqn.empty()) throw RpcError{rpc::kInvalidParams, "hover requires fqn"};
  std::lock_guard lock(stateMutex_);
  const auto it = methods_.find(fqn);
  if (it == methods_.end()) throw RpcError{rpc::kAnalysisFailed, "no assessment for method '" + fqn + "'"};
  const auto& st = it->second;
  const auto& a = st.assessment;
  json out = {{"fqn", fqn},
              {"metric", metric_id(a.record.kind)},
              {"metricName", metric_name(a.record.kind)},
              {"value", a.record.value},
              {"level", level_name(a.level.value_or(CriticalityLevel::Low))},
              {"rank", a.rank}};
  if (!st.explained) {
    out["explanationStatus"] = "disabled";
    out["explanation"] = nullptr;
    return out;
  }
  const auto& x = st.explanation;
  out["explanationStatus"] = status_name(x.status);
  out["explanation"] = x.status == ExplanationStatus::Ready ? x.whyCritical : x.message;
  out["precautions"] = x.status == ExplanationStatus::Ready ? x.precautions : std::vector<std::string>{};
  return out;
}

void AnalysisService::startExplanations(const std::vector<MethodUnit>& methods) {
  std::shared_ptr<ExplanationCache> cache;
  if (config_.useCache) {
    try {
      cache = std::make_shared<ExplanationCache>(state_directory(config_, root_) / "cache");
    } catch (const std::exception&) {
      cache = nullptr;  // read-only project tree; run without a cache
    }
  }
  std::vector<ExplanationJob> jobs;
  try {
    jobs = make_jobs(outcome_->assessments, methods);
  } catch (const Error& e) {
    notify("window/logMessage", {{"type", 1}, {"message", e.what()}});
    return;
  }
  scheduler_ = schedule(std::move(jobs), backends_(config_.backend), config_.backend, config_.concurrencyLimit, cache);
  drain_ = std::thread([this, scheduler = scheduler_.get()] {
    while (auto ev = scheduler->next()) {
      {
        std::lock_guard lock(stateMutex_);
        if (auto it = methods_.find(ev->fqn); it != methods_.end()) it->second.explanation = ev->result;
      }
      if (ev->result.status != ExplanationStatus::Pending) notify("explanationReady", explanation_json(ev->fqn, ev->result));
    }
  });
}

void AnalysisService::stopExplanations() {
  if (scheduler_) scheduler_->cancel();
  if (drain_.joinable()) drain_.join();
  std::erase_if(retired_, [](const auto& s) { return s->idle(); });
  if (scheduler_) retired_.push_back(std::move(scheduler_));
}

void AnalysisService::waitForExplanations() {
  if (drain_.joinable()) drain_.join();
}

int serve(std::istream& in, std::ostream& out, const ToolConfig& defaults) {
  AnalysisService service(
      [&out](const std::string& line) {
        out << line << '\n';
        out.flush();
      },
      defaults);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!service.handle(line)) break;
  }
  return 0;
}

}  // namespace secrit
