#include "secrit/report.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace secrit {

using nlohmann::ordered_json;

LevelCounts ProjectReport::counts() const {
  LevelCounts c;
  for (const auto& e : entries) {
    switch (e.level) {
      case CriticalityLevel::High:
        ++c.high;
        break;
      case CriticalityLevel::Medium:
        ++c.medium;
        break;
      case CriticalityLevel::Low:
        ++c.low;
        break;
    }
  }
  return c;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "json") return ReportFormat::Json;
  if (text == "sarif") return ReportFormat::Sarif;
  return std::nullopt;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return std::move(out).str();
}

namespace {

std::string plural(std::size_t n, std::string_view word) {
  return std::to_string(n) + " " + std::string(word) + (n == 1 ? "" : "s");
}

std::string render_text(const ProjectReport& report, const RenderOptions& options) {
  std::ostringstream out;
  const auto counts = report.counts();
  out << kToolName << " " << report.toolVersion << "  " << report.corpusRoot << "\n"
      << "metric: " << metric_name(report.metricKind) << " (" << metric_id(report.metricKind) << ")"
      << "  tie rule: " << tie_rule_id(report.tieRule);
  if (!report.generatedAt.empty()) out << "  generated: " << report.generatedAt;
  out << "\n"
      << plural(report.entries.size(), "method") << " assessed: " << counts.high << " High, " << counts.medium
      << " Medium, " << counts.low << " Low\n\n";

  std::size_t hidden = 0;
  std::size_t shown = 0;
  bool header = false;
  for (const auto& e : report.entries) {
    if (e.level == CriticalityLevel::Low && !options.showLow) {
      ++hidden;
      continue;
    }
    if (options.top && shown >= *options.top) continue;
    if (!header) {
      out << std::left << std::setw(6) << "RANK" << std::setw(10) << "LEVEL" << std::setw(8) << "VALUE"
          << "METHOD\n";
      header = true;
    }
    ++shown;
    out << std::left << std::setw(6) << e.rank << std::setw(10) << ("[" + std::string(level_name(e.level)) + "]")
        << std::setw(8) << e.value << e.fqn << "  " << e.file << ":" << e.startLine << "-" << e.endLine << "\n";
    if (e.explanation) {
      const auto& x = *e.explanation;
      if (x.status == ExplanationStatus::Ready) {
        out << "      Why critical: " << x.whyCritical << "\n      Precautions:\n";
        for (std::size_t i = 0; i < x.precautions.size(); ++i) {
          out << "        " << i + 1 << ". " << x.precautions[i] << "\n";
        }
      } else {
        out << "      " << (x.status == ExplanationStatus::Failed ? "Explanation failed: " : "") << x.message << "\n";
      }
    }
  }
  if (hidden > 0) out << "\n" << plural(hidden, "low-criticality method") << " hidden (use --show-low)\n";
  return std::move(out).str();
}

void explanation_fields(ordered_json& entry, const std::optional<ExplanationResult>& x) {
  if (!x) {
    entry["explanationStatus"] = "none";
    return;
  }
  entry["explanationStatus"] = status_name(x->status);
  if (x->status == ExplanationStatus::Ready) {
    entry["whyCritical"] = x->whyCritical;
    entry["precautions"] = x->precautions;
  } else {
    entry["message"] = x->message;
    if (x->status == ExplanationStatus::Failed) entry["failureReason"] = reason_name(x->reason);
  }
  entry["model"] = x->model;
  entry["promptHash"] = x->promptHash;
}

std::string render_json(const ProjectReport& report) {
  ordered_json doc;
  doc["version"] = kReportSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", report.toolVersion}};
  doc["corpusRoot"] = report.corpusRoot;
  doc["metric"] = metric_id(report.metricKind);
  doc["tieRule"] = tie_rule_id(report.tieRule);
  const auto c = report.counts();
  doc["counts"] = {{"High", c.high}, {"Medium", c.medium}, {"Low", c.low}};
  doc["entries"] = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json entry;
    entry["fqn"] = e.fqn;
    entry["file"] = e.file;
    entry["startLine"] = e.startLine;
    entry["endLine"] = e.endLine;
    entry["value"] = e.value;
    entry["rank"] = e.rank;
    entry["level"] = level_name(e.level);
    explanation_fields(entry, e.explanation);
    doc["entries"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::string_view sarif_level(CriticalityLevel level) {
  switch (level) {
    case CriticalityLevel::High:
      return "error";
    case CriticalityLevel::Medium:
      return "warning";
    case CriticalityLevel::Low:
      return "note";
  }
  return "none";
}

std::string render_sarif(const ProjectReport& report) {
  const std::string ruleId = std::string(kToolName) + "/" + std::string(metric_id(report.metricKind));
  ordered_json rule = {{"id", ruleId},
                       {"name", "SecurityCriticalMethod"},
                       {"shortDescription", {{"text", "Potentially security-critical method"}}},
                       {"fullDescription",
                        {{"text", "Method ranked by " + std::string(metric_name(report.metricKind)) + "; " +
                                      std::string(metric_interpretation(report.metricKind)) + "."}}}};
  ordered_json results = ordered_json::array();
  for (const auto& e : report.entries) {
    std::ostringstream msg;
    msg << e.fqn << ": " << level_name(e.level) << " security criticality (" << metric_name(report.metricKind)
        << " = " << e.value << ", rank " << e.rank << ").";
    if (e.explanation && e.explanation->status == ExplanationStatus::Ready) {
      msg << "\n" << e.explanation->whyCritical << "\nPrecautions:";
      for (std::size_t i = 0; i < e.explanation->precautions.size(); ++i) {
        msg << "\n" << i + 1 << ". " << e.explanation->precautions[i];
      }
    } else if (e.explanation) {
      msg << "\n" << e.explanation->message;
    }
    ordered_json result;
    result["ruleId"] = ruleId;
    result["level"] = sarif_level(e.level);
    result["message"] = {{"text", msg.str()}};
    result["locations"] = ordered_json::array(
        {{{"physicalLocation",
           {{"artifactLocation", {{"uri", e.file}, {"uriBaseId", "SRCROOT"}}},
            {"region", {{"startLine", e.startLine}, {"endLine", e.endLine}}}}},
          {"logicalLocations", ordered_json::array({{{"fullyQualifiedName", e.fqn}, {"kind", "function"}}})}}});
    result["properties"] = {{"criticality", level_name(e.level)}, {"rank", e.rank}, {"value", e.value}};
    results.push_back(std::move(result));
  }
  ordered_json run;
  run["tool"] = {{"driver",
                  {{"name", kToolName},
                   {"version", report.toolVersion},
                   {"rules", ordered_json::array({rule})}}}};
  run["originalUriBaseIds"] = {{"SRCROOT", {{"uri", report.corpusRoot}}}};
  run["results"] = std::move(results);
  ordered_json doc;
  doc["$schema"] = "https://json.schemastore.org/sarif-2.1.0.json";
  doc["version"] = "2.1.0";
  doc["runs"] = ordered_json::array({std::move(run)});
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_report(const ProjectReport& report, ReportFormat format, const RenderOptions& options) {
  switch (format) {
    case ReportFormat::Text:
      return render_text(report, options);
    case ReportFormat::Json:
      return render_json(report);
    case ReportFormat::Sarif:
      return render_sarif(report);
  }
  return {};
}

ProjectReport parse_report_json(std::string_view text) {
  const auto doc = ordered_json::parse(text);
  if (doc.at("version") != kReportSchemaVersion) {
    throw std::runtime_error("unsupported report schema version " + doc.at("version").dump());
  }
  ProjectReport r;
  r.toolVersion = doc.at("tool").at("version").get<std::string>();
  r.corpusRoot = doc.at("corpusRoot").get<std::string>();
  const auto kind = parse_metric_kind(doc.at("metric").get<std::string>());
  const auto rule = parse_tie_rule(doc.at("tieRule").get<std::string>());
  if (!kind || !rule) throw std::runtime_error("report has an unknown metric or tie rule");
  r.metricKind = *kind;
  r.tieRule = *rule;
  for (const auto& e : doc.at("entries")) {
    ReportEntry entry;
    entry.fqn = e.at("fqn").get<std::string>();
    entry.file = e.at("file").get<std::string>();
    entry.startLine = e.at("startLine").get<std::size_t>();
    entry.endLine = e.at("endLine").get<std::size_t>();
    entry.value = e.at("value").get<std::int64_t>();
    entry.rank = e.at("rank").get<std::size_t>();
    const auto level = parse_level(e.at("level").get<std::string>());
    if (!level) throw std::runtime_error("unknown level in report entry " + entry.fqn);
    entry.level = *level;
    const auto status = e.at("explanationStatus").get<std::string>();
    if (status != "none") {
      ExplanationResult x;
      if (status == "ready") {
        x.status = ExplanationStatus::Ready;
        x.whyCritical = e.at("whyCritical").get<std::string>();
        x.precautions = e.at("precautions").get<std::vector<std::string>>();
      } else {
        x.status = status == "failed" ? ExplanationStatus::Failed : ExplanationStatus::Pending;
        x.message = e.at("message").get<std::string>();
        if (x.status == ExplanationStatus::Failed) {
          const auto reason = e.value("failureReason", "none");
          for (auto fr : {FailureReason::BackendUnreachable, FailureReason::AuthFailure,
                          FailureReason::MalformedResponse}) {
            if (reason == reason_name(fr)) x.reason = fr;
          }
        }
      }
      x.model = e.at("model").get<std::string>();
      x.promptHash = e.at("promptHash").get<std::string>();
      entry.explanation = std::move(x);
    }
    r.entries.push_back(std::move(entry));
  }
  return r;
}

AnalysisOutcome analyze_project(const std::filesystem::path& root, const ToolConfig& config) {
  AnalysisOutcome out;
  out.project = load_project(root, config.scan);
  out.assessments = assess(out.project.classes, config.assessment());
  return out;
}

ProjectReport make_report(const AnalysisOutcome& outcome, const ToolConfig& config, std::string corpusRoot) {
  ProjectReport r;
  r.corpusRoot = std::move(corpusRoot);
  r.metricKind = config.metricKind;
  r.tieRule = config.tieRule;
  for (const auto& a : outcome.assessments) {
    ReportEntry e;
    e.fqn = a.record.fqn;
    e.file = a.record.file;
    e.startLine = a.record.span.startLine;
    e.endLine = a.record.span.endLine;
    e.value = a.record.value;
    e.rank = a.rank;
    e.level = a.level.value_or(CriticalityLevel::Low);
    r.entries.push_back(std::move(e));
  }
  return r;
}

void attach_explanations(ProjectReport& report, const AnalysisOutcome& outcome, const ToolConfig& config,
                         std::shared_ptr<ChatBackend> backend, std::shared_ptr<ExplanationCache> cache) {
  auto scheduler = schedule(make_jobs(outcome.assessments, extract_methods(outcome.project.classes)),
                            std::move(backend), config.backend, config.concurrencyLimit, std::move(cache));
  std::map<std::string, ExplanationResult> latest;
  while (auto ev = scheduler->next()) latest[ev->fqn] = std::move(ev->result);
  for (auto& e : report.entries) {
    if (auto it = latest.find(e.fqn); it != latest.end()) {
      e.explanation = it->second;
      e.explanation->elapsed = 0.0;  // timing is not report content
    }
  }
}

}  // namespace secrit
