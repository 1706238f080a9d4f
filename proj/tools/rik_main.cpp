// rik: rearrangement-invariant kit command line.
//
//   rik <scenario> [--config cfg.json] [--seed N] [--out DIR]
//                  [--format csv|json|both]
//   rik check <operator.json> --probes N [--seed N] [--tol T]
//   rik norm <spec.json> <function.json>
//   rik major <f.json> <g.json> [--tol T]
//
// Scenario runs exit 0 exactly when every verdict passes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rik/generate.hpp"
#include "rik/majorization.hpp"
#include "rik/scenarios.hpp"
#include "rik/serialization.hpp"
#include "rik/spaces.hpp"
#include "rik/version.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_scenario_command(const std::string& name, const std::string& config,
                         std::uint64_t seed, bool seed_set,
                         const std::string& out, bool out_set,
                         const std::string& format) {
  rik::ScenarioConfig cfg;
  if (!config.empty()) cfg = rik::scenario_config_from_json(slurp(config));
  const auto kind = rik::scenario_kind_from_name(name);
  cfg.scenario = *kind;
  if (seed_set) cfg.seed = seed;
  if (out_set) cfg.output = out;

  const rik::ScenarioReport report = rik::run_scenario(cfg);
  if (format == "csv" || format == "both")
    rik::emit_report(report, cfg.output, rik::ReportFormat::csv);
  if (format == "json" || format == "both")
    rik::emit_report(report, cfg.output, rik::ReportFormat::json);

  for (const auto& v : report.verdicts)
    std::printf("[%s] %s (margin=%.6g)%s%s\n", v.pass ? "PASS" : "FAIL",
                v.name.c_str(), v.margin, v.detail.empty() ? "" : " ",
                v.detail.c_str());
  std::printf("%s: %zu rows, output in %s\n", report.scenario.c_str(),
              report.rows.size(), cfg.output.c_str());
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rik: exact rearrangement, majorization and substochastic "
               "operator toolkit"};
  app.set_version_flag("--version", rik::kVersion);
  app.require_subcommand(1);

  // Scenario subcommands.
  struct ScenarioArgs {
    std::string config, out = "out", format = "both";
    std::uint64_t seed = 1;
    bool seed_set = false, out_set = false;
  };
  auto scenario_args = std::make_shared<ScenarioArgs>();
  const char* scenario_names[] = {
      "iukm-counterexample", "sn-convergence",     "hn-convergence",
      "proposition-combine", "power-iteration",    "dukm-reconstruction",
      "monotone-chain",      "compactness-approx",
  };
  for (const char* name : scenario_names) {
    CLI::App* sub = app.add_subcommand(name, "run this scenario");
    sub->add_option("--config", scenario_args->config,
                    "scenario config JSON file");
    sub->add_option("--seed", scenario_args->seed, "PRNG seed override")
        ->each([scenario_args](const std::string&) {
          scenario_args->seed_set = true;
        });
    sub->add_option("--out", scenario_args->out, "output directory")
        ->each([scenario_args](const std::string&) {
          scenario_args->out_set = true;
        });
    sub->add_option("--format", scenario_args->format,
                    "csv, json or both (default both)")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }

  // check
  std::string check_path;
  int check_probes = 50;
  std::uint64_t check_seed = 1;
  double check_tol = 1e-10;
  CLI::App* check = app.add_subcommand(
      "check", "certify an operator JSON as substochastic on random probes");
  check->add_option("operator", check_path, "operator JSON file")->required();
  check->add_option("--probes", check_probes, "number of random probes");
  check->add_option("--seed", check_seed, "PRNG seed");
  check->add_option("--tol", check_tol, "certification tolerance");

  // norm
  std::string norm_spec_path, norm_fn_path;
  CLI::App* norm_cmd =
      app.add_subcommand("norm", "evaluate a symmetric-space norm");
  norm_cmd->add_option("spec", norm_spec_path, "norm spec JSON file")
      ->required();
  norm_cmd->add_option("function", norm_fn_path, "step function JSON file")
      ->required();

  // major
  std::string major_f, major_g;
  double major_tol = 0.0;
  CLI::App* major =
      app.add_subcommand("major", "decide the majorization relation f < g");
  major->add_option("f", major_f, "step function JSON file")->required();
  major->add_option("g", major_g, "step function JSON file")->required();
  major->add_option("--tol", major_tol, "profile tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const char* name : scenario_names)
      if (app.get_subcommand(name)->parsed())
        return run_scenario_command(name, scenario_args->config,
                                    scenario_args->seed,
                                    scenario_args->seed_set,
                                    scenario_args->out,
                                    scenario_args->out_set,
                                    scenario_args->format);

    if (check->parsed()) {
      const auto op = rik::operator_expr_from_json(slurp(check_path));
      rik::Rng rng(check_seed);
      const rik::Grid grid{64, 1.0 / 64.0};
      const auto probes = rik::random_probes(
          rng, grid, static_cast<std::size_t>(check_probes), false);
      const auto cert = rik::certify_substochastic(op, probes, check_tol);
      std::cout << rik::to_json(cert) << "\n";
      return cert.ok ? 0 : 1;
    }
    if (norm_cmd->parsed()) {
      const auto spec = rik::norm_spec_from_json(slurp(norm_spec_path));
      const auto fn = rik::step_function_from_json(slurp(norm_fn_path));
      std::printf("%.17g\n", rik::norm(spec, fn));
      return 0;
    }
    if (major->parsed()) {
      const auto f = rik::step_function_from_json(slurp(major_f));
      const auto g = rik::step_function_from_json(slurp(major_g));
      const auto cert = rik::hlp_leq(f, g, major_tol);
      std::cout << rik::to_json(cert) << "\n";
      return cert.holds ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
