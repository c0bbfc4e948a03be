#pragma once

// Prompt goldens under fixtures/goldens: <slug>.meta holds the fqn, metric id
// and value on three lines; <slug>.system.txt / .user.txt the expected bytes.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secrit/explain.hpp"

namespace secrit::goldens {

struct Golden {
  std::string slug;
  std::string fqn;
  MetricKind kind = MetricKind::LOC;
  std::int64_t value = 0;
  std::string systemPrompt;
  std::string userPrompt;
};

inline std::vector<Golden> load_goldens(const std::filesystem::path& dir) {
  std::vector<Golden> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".meta") continue;
    Golden g;
    g.slug = entry.path().stem().string();
    std::ifstream meta(entry.path());
    std::string metric;
    std::getline(meta, g.fqn);
    std::getline(meta, metric);
    meta >> g.value;
    const auto kind = parse_metric_kind(metric);
    if (!kind) throw std::runtime_error("bad metric in " + entry.path().string());
    g.kind = *kind;
    g.systemPrompt = read_file_bytes(dir / (g.slug + ".system.txt"));
    g.userPrompt = read_file_bytes(dir / (g.slug + ".user.txt"));
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const Golden& a, const Golden& b) { return a.slug < b.slug; });
  return out;
}

inline const MethodUnit* find_method(const std::vector<MethodUnit>& methods, const std::string& fqn) {
  for (const auto& m : methods) {
    if (m.fqn == fqn) return &m;
  }
  return nullptr;
}

}  // namespace secrit::goldens
