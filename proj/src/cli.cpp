#include "secrit/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>

#include "secrit/report.hpp"
#include "secrit/service.hpp"

namespace secrit {

namespace {

const char* getenv_lookup(const char* name) { return std::getenv(name); }

struct CommonOptions {
  std::string configFile;
  std::string metric;
  std::string tieRule;
  std::string backend;
  std::string stateDir;
  bool noCache = false;
  std::size_t concurrency = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.configFile, "Config file (default: <path>/secrit.toml)");
  cmd->add_option("--metric", o.metric, "Metric used for ranking")
      ->check(CLI::IsMember({"cc", "loc", "lcom"}, CLI::ignore_case));
  cmd->add_option("--tie-rule", o.tieRule, "Tie handling at the tertile cuts")
      ->check(CLI::IsMember({"ties-join-higher", "ties-join-lower", "strict-threshold"}));
  cmd->add_option("--backend", o.backend, "Explanation backend")->check(CLI::IsMember({"live", "mock"}));
  cmd->add_option("--state-dir", o.stateDir, "Directory for the explanation cache (default: <path>/.secrit)");
  cmd->add_flag("--no-cache", o.noCache, "Do not read or write cached explanations");
  cmd->add_option("--concurrency", o.concurrency, "Parallel explanation requests")->check(CLI::PositiveNumber);
}

// CLI flags win over environment, config file and defaults.
ToolConfig effective_config(const std::filesystem::path& root, const CommonOptions& o) {
  auto cfg = resolve_config(root, o.configFile.empty() ? std::nullopt : std::optional<std::filesystem::path>(o.configFile),
                            getenv_lookup);
  if (!o.metric.empty()) cfg.metricKind = *parse_metric_kind(o.metric);
  if (!o.tieRule.empty()) cfg.tieRule = *parse_tie_rule(o.tieRule);
  if (!o.backend.empty()) cfg.backend.kind = o.backend == "live" ? BackendKind::Live : BackendKind::Mock;
  if (cfg.backend.kind == BackendKind::Mock) cfg.backend.modelName = "mock";
  if (!o.stateDir.empty()) cfg.stateDir = o.stateDir;
  if (o.noCache) cfg.useCache = false;
  if (o.concurrency > 0) cfg.concurrencyLimit = o.concurrency;
  return cfg;
}

std::shared_ptr<ExplanationCache> open_cache(const ToolConfig& cfg, const std::filesystem::path& root) {
  if (!cfg.useCache) return nullptr;
  return std::make_shared<ExplanationCache>(state_directory(cfg, root) / "cache");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"secrit: rank methods by security criticality and explain them", "secrit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // analyze
  CommonOptions analyzeOpts;
  std::string analyzePath;
  std::string format = "text";
  bool showLow = false;
  bool explain = false;
  std::optional<std::size_t> top;
  auto* analyze = app.add_subcommand("analyze", "Assess every method of a project");
  analyze->add_option("path", analyzePath, "Project root")->required();
  analyze->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json", "sarif"}));
  analyze->add_flag("--show-low", showLow, "Include Low methods in the text view");
  analyze->add_flag("--explain", explain, "Generate explanations for every assessed method");
  analyze->add_option("--top", top, "Limit the text view to the first N rows")->check(CLI::PositiveNumber);
  add_common(analyze, analyzeOpts);

  // explain
  CommonOptions explainOpts;
  std::string explainPath;
  std::string methodFqn;
  std::string explainFormat = "text";
  auto* explainCmd = app.add_subcommand("explain", "Explain one method");
  explainCmd->add_option("path", explainPath, "Project root")->required();
  explainCmd->add_option("--method", methodFqn, "Fully qualified method, e.g. pkg.Class.name(Type)")->required();
  explainCmd->add_option("--format", explainFormat, "Output format")->check(CLI::IsMember({"text", "json"}));
  add_common(explainCmd, explainOpts);

  // config check
  auto* configCmd = app.add_subcommand("config", "Configuration utilities");
  configCmd->require_subcommand(1);
  CommonOptions checkOpts;
  std::string checkRoot = ".";
  auto* check = configCmd->add_subcommand("check", "Validate and print the effective configuration");
  check->add_option("--root", checkRoot, "Project root whose secrit.toml is read");
  add_common(check, checkOpts);

  // serve
  CommonOptions serveOpts;
  bool noExplain = false;
  auto* serveCmd = app.add_subcommand("serve", "Run the JSON-RPC analysis service on stdin/stdout");
  serveCmd->add_flag("--no-explain", noExplain, "Do not generate explanations");
  add_common(serveCmd, serveOpts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*analyze) {
      const std::filesystem::path root(analyzePath);
      auto cfg = effective_config(root, analyzeOpts);
      if (showLow) cfg.showLow = true;
      if (explain) cfg.explain = true;
      const auto outcome = analyze_project(root, cfg);
      for (const auto& d : outcome.project.scanErrors) err << "warning: " << d.path.string() << ": " << d.message << "\n";
      for (const auto& [path, d] : outcome.project.parseDiagnostics) {
        err << "warning: " << path.generic_string() << ":" << d.line << ": " << d.message << "\n";
      }
      auto report = make_report(outcome, cfg, analyzePath);
      const auto fmt = *parse_report_format(format);
      if (fmt == ReportFormat::Text) report.generatedAt = utc_timestamp();
      if (cfg.explain) attach_explanations(report, outcome, cfg, make_backend(cfg.backend), open_cache(cfg, root));
      out << render_report(report, fmt, {cfg.showLow, top});
      return kExitOk;
    }

    if (*explainCmd) {
      const std::filesystem::path root(explainPath);
      const auto cfg = effective_config(root, explainOpts);
      const auto outcome = analyze_project(root, cfg);
      const auto methods = extract_methods(outcome.project.classes);
      const auto a = std::find_if(outcome.assessments.begin(), outcome.assessments.end(),
                                  [&](const CriticalityAssessment& x) { return x.record.fqn == methodFqn; });
      if (a == outcome.assessments.end()) {
        const bool known = std::any_of(methods.begin(), methods.end(), [&](const MethodUnit& m) { return m.fqn == methodFqn; });
        err << "error: " << (known ? "method has a zero " + std::string(metric_id(cfg.metricKind)) + " value and is not assessed: "
                                   : "no such method: ")
            << methodFqn << "\n";
        return kExitAnalysisError;
      }
      const auto m = std::find_if(methods.begin(), methods.end(), [&](const MethodUnit& x) { return x.fqn == methodFqn; });
      const auto job = make_job(*m, *a);
      auto backend = make_backend(cfg.backend);
      auto cache = open_cache(cfg, root);
      const auto key = cache_key(job, backend->modelName());
      std::optional<ExplanationResult> result = cache ? cache->lookup(key) : std::nullopt;
      if (!result) {
        result = generate(job, *backend, cfg.backend);
        if (cache) cache->store(key, *result);
      }
      if (explainFormat == "json") {
        nlohmann::ordered_json doc = {{"fqn", methodFqn},
                                      {"metric", metric_id(cfg.metricKind)},
                                      {"value", a->record.value},
                                      {"rank", a->rank},
                                      {"level", level_name(*a->level)},
                                      {"status", status_name(result->status)},
                                      {"model", result->model}};
        if (result->status == ExplanationStatus::Ready) {
          doc["whyCritical"] = result->whyCritical;
          doc["precautions"] = result->precautions;
        } else {
          doc["message"] = result->message;
          doc["failureReason"] = reason_name(result->reason);
        }
        out << doc.dump(2) << "\n";
      } else {
        out << methodFqn << "\n"
            << metric_name(cfg.metricKind) << ": " << a->record.value << "  level: " << level_name(*a->level)
            << "  rank: " << a->rank << "\n\n";
        if (result->status == ExplanationStatus::Ready) {
          out << "Why critical:\n  " << result->whyCritical << "\n\nPrecautions:\n";
          for (std::size_t i = 0; i < result->precautions.size(); ++i) {
            out << "  " << i + 1 << ". " << result->precautions[i] << "\n";
          }
        } else {
          out << "Explanation failed (" << reason_name(result->reason) << "): " << result->message << "\n";
        }
      }
      return result->status == ExplanationStatus::Ready ? kExitOk : kExitAnalysisError;
    }

    if (*check) {
      const auto cfg = effective_config(checkRoot, checkOpts);
      out << describe_config(cfg);
      if (cfg.backend.kind == BackendKind::Live) {
        if (cfg.backend.endpointUrl.empty()) {
          err << "error: backend.endpoint is required for the live backend\n";
          return kExitAnalysisError;
        }
        const char* key = std::getenv(cfg.backend.apiKeyEnvVar.c_str());
        if (key == nullptr || *key == '\0') {
          err << "warning: environment variable " << cfg.backend.apiKeyEnvVar << " is not set\n";
        }
      }
      return kExitOk;
    }

    if (*serveCmd) {
      auto cfg = effective_config(".", serveOpts);
      cfg.explain = !noExplain;
      return serve(in, out, cfg);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitAnalysisError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
  return kExitUsage;
}

}  // namespace secrit
