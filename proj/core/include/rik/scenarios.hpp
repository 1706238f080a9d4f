#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rik/measure.hpp"
#include "rik/operators.hpp"
#include "rik/spaces.hpp"

// Desk-scale experiment runner: each scenario reproduces the checkable
// content of one convergence statement, emits per-step CSV rows plus named
// verdicts, and is deterministic for a fixed (config, seed).

namespace rik {

enum class ScenarioKind {
  iukm_counterexample,
  sn_convergence,
  hn_convergence,
  proposition_combine,
  power_iteration,
  dukm_reconstruction,
  monotone_chain,
  compactness_approx,
};

const char* scenario_name(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from_name(const std::string& name);

struct ScenarioSizes {
  int levels = 10;       // hard cap 20
  int grid = 1024;       // hard cap 2^14
  int iterations = 100;  // hard cap 10^4
  double stop_tol = 0.0;
  double threshold = 1e-2;  // convergence target where a scenario needs one
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::iukm_counterexample;
  NormSpec space = NormSpec::l1();
  ScenarioSizes sizes;
  std::uint64_t seed = 1;
  std::string output = "out";
  // Optional overrides for the operator-driven scenarios.
  std::optional<OperatorExpr> op;
  std::optional<StepFunction> probe;
};

ScenarioConfig scenario_config_from_json(const std::string& text);
std::string to_json(const ScenarioConfig& config);

struct Verdict {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct ScenarioReport {
  std::string scenario;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Verdict> verdicts;
  std::string config_echo;  // JSON round-trip of the config
  // Extra artifacts (name -> file body) written alongside the CSV/JSON.
  std::vector<std::pair<std::string, std::string>> attachments;

  bool all_pass() const;
};

ScenarioReport run_scenario(const ScenarioConfig& config);

enum class ReportFormat { csv, json };

std::string render_csv(const ScenarioReport& report);
std::string render_json(const ScenarioReport& report);
// Writes <out>/<scenario>.csv and/or <out>/<scenario>.report.json plus any
// attachments; creates the directory.  Byte-stable for a fixed config.
void emit_report(const ScenarioReport& report, const std::string& out_dir,
                 ReportFormat format);

// Mass-corrected spike m * indicator([0, ~1/m)): a sliver of width 2^-40
// tops the computed mass up to exactly 1 so the profile comparisons along
// the spike chains hold with zero tolerance.
StepFunction unit_mass_spike(int m);

struct VerdictRegistryEntry {
  const char* verdict;
  const char* module;
  const char* invariant;
};

// Every verdict name a scenario can emit, mapped to the module invariant
// it instantiates.
std::span<const VerdictRegistryEntry> verdict_registry();

}  // namespace rik
