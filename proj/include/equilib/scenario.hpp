#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "equilib/convergence.hpp"
#include "equilib/verifier.hpp"

namespace equilib {

/// Command exit codes shared by the CLI and the scenario runners.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 1,
  kExitNoConvergence = 2,
  kExitVerifyFailed = 3,
};

/// Optional command-line overrides applied on top of a scenario document.
struct ScenarioOverrides {
  std::optional<double> gap_tol;
  std::optional<std::string> algorithm;  // "cg" | "pg"
  std::optional<double> w;               // verify level override
};

/// Parses and validates a scenario document into a Problem. The built cloud
/// and kernel matrix stay alive through the Problem's shared matrix.
Problem problem_from_scenario(const nlohmann::json& doc, const ScenarioOverrides& ov);

SolverOptions solver_options_from_scenario(const nlohmann::json& doc,
                                           const ScenarioOverrides& ov);

/// Built-in scenario documents reproducing the two reference configurations.
nlohmann::json example1_scenario();
nlohmann::json example2_scenario();

/// Command runners. Each writes its fixed-name outputs under out_dir and
/// returns an ExitCode. Invalid inputs map to kExitInvalidInput, solver
/// non-convergence to kExitNoConvergence, failed checks to kExitVerifyFailed.
int cmd_solve(const nlohmann::json& doc, const std::string& out_dir,
              const ScenarioOverrides& ov = {});
int cmd_verify(const nlohmann::json& doc, const std::string& out_dir,
               const ScenarioOverrides& ov = {});
int cmd_capacity(const nlohmann::json& doc, const std::string& out_dir,
                 const ScenarioOverrides& ov = {});
int cmd_converge(const nlohmann::json& doc, const std::string& out_dir,
                 const ScenarioOverrides& ov = {});
int cmd_example(const std::string& name, const std::string& out_dir,
                const ScenarioOverrides& ov = {});

}  // namespace equilib
