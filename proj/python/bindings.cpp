#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "secrit/config.hpp"
#include "secrit/metrics.hpp"
#include "secrit/report.hpp"

namespace py = pybind11;
using namespace secrit;

namespace {

MetricKind metric_arg(const std::string& id) {
  const auto k = parse_metric_kind(id);
  if (!k) throw py::value_error("metric must be one of cc, loc, lcom");
  return *k;
}

TieRule rule_arg(const std::optional<std::string>& id) {
  if (!id) return kDefaultTieRule;
  const auto r = parse_tie_rule(*id);
  if (!r) throw py::value_error("unknown tie rule '" + *id + "'");
  return *r;
}

py::dict assessment_dict(const CriticalityAssessment& a) {
  py::dict d;
  d["fqn"] = a.record.fqn;
  d["file"] = a.record.file;
  d["start_line"] = a.record.span.startLine;
  d["end_line"] = a.record.span.endLine;
  d["value"] = a.record.value;
  d["rank"] = a.rank;
  d["level"] = std::string(level_name(a.level.value_or(CriticalityLevel::Low)));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of secrit";
  m.attr("__version__") = std::string(kToolVersion);
  m.attr("PLACEHOLDER") = std::string(kPlaceholderText);
  m.attr("DEFAULT_TIE_RULE") = std::string(tie_rule_id(kDefaultTieRule));

  py::register_exception<Error>(m, "SecritError", PyExc_RuntimeError);

  m.def("system_prompt", [] { return system_prompt(); });

  m.def(
      "analyze",
      [](const std::filesystem::path& root, const std::string& metric, const std::optional<std::string>& tieRule) {
        ToolConfig cfg;
        cfg.metricKind = metric_arg(metric);
        cfg.tieRule = rule_arg(tieRule);
        AnalysisOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = analyze_project(root, cfg);
        }
        py::list out;
        for (const auto& a : outcome.assessments) out.append(assessment_dict(a));
        return out;
      },
      py::arg("root"), py::arg("metric") = "loc", py::arg("tie_rule") = py::none(),
      "Assess every concrete method under root; returns dicts in rank order.");

  m.def(
      "report",
      [](const std::filesystem::path& root, const std::string& metric, const std::string& format, bool explain) {
        ToolConfig cfg;
        cfg.metricKind = metric_arg(metric);
        const auto fmt = parse_report_format(format);
        if (!fmt) throw py::value_error("format must be text, json or sarif");
        py::gil_scoped_release release;
        const auto outcome = analyze_project(root, cfg);
        auto report = make_report(outcome, cfg, root.generic_string());
        if (explain) attach_explanations(report, outcome, cfg, std::make_shared<MockBackend>(), nullptr);
        return render_report(report, *fmt, {true, std::nullopt});
      },
      py::arg("root"), py::arg("metric") = "loc", py::arg("format") = "json", py::arg("explain") = false,
      "Render a report; explanations, when requested, come from the offline mock backend.");

  m.def(
      "method_metrics",
      [](const std::string& source) {
        auto file = std::make_shared<SourceFile>();
        file->path = "Snippet.java";
        file->languageTag = "java";
        const auto parsed = parse_source(file, source);
        const auto lines = split_lines(source);
        py::list out;
        for (const auto& cls : parsed.classes) {
          const auto lcom = compute_lcom(cls);
          for (const auto& mu : cls.methods) {
            if (!mu.isConcrete) continue;
            py::dict d;
            d["fqn"] = mu.fqn;
            d["cc"] = compute_cc(mu);
            d["loc"] = compute_loc(mu, lines);
            d["lcom"] = lcom;
            out.append(d);
          }
        }
        return out;
      },
      py::arg("source"), "CC, LOC and class LCOM for each concrete method of a Java source string.");

  m.def(
      "bin_values",
      [](const std::vector<std::int64_t>& values, const std::optional<std::string>& tieRule) {
        std::vector<MetricRecord> records;
        for (std::size_t i = 0; i < values.size(); ++i) {
          MetricRecord r;
          r.fqn = std::to_string(i);
          r.value = values[i];
          records.push_back(std::move(r));
        }
        const auto kept = filter_nonzero(records);
        std::vector<std::optional<std::string>> levels(values.size());
        if (kept.empty()) return levels;
        for (const auto& a : bin_levels(rank_descending(kept), rule_arg(tieRule))) {
          levels[std::stoul(a.record.fqn)] = std::string(level_name(*a.level));
        }
        return levels;
      },
      py::arg("values"), py::arg("tie_rule") = py::none(),
      "Level per input value; None for zero values, which are not assessed.");

  m.def(
      "build_prompt",
      [](const std::string& body, const std::string& metric, std::int64_t value) {
        MethodUnit mu;
        mu.bodyText = body;
        const auto p = build_prompt(mu, metric_arg(metric), value);
        return py::make_tuple(p.systemPrompt, p.userPrompt, p.promptHash);
      },
      py::arg("body"), py::arg("metric"), py::arg("value"), "Returns (system, user, prompt_hash).");
}
