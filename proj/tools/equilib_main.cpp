#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "equilib/io.hpp"
#include "equilib/scenario.hpp"

namespace {

nlohmann::json load_scenario(const std::string& path) {
  return nlohmann::json::parse(equilib::read_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilib - constrained minimal weighted-energy problems on point clouds"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string example_name;
  double gap_tol = -1.0;
  std::string algorithm;
  double w_level = std::numeric_limits<double>::quiet_NaN();

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario)
      cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--gap-tol", gap_tol, "override the solver gap tolerance");
    cmd->add_option("--algorithm", algorithm, "cg | pg")
        ->check(CLI::IsMember({"cg", "pg"}));
    cmd->add_option("--w", w_level, "override the verification level w");
  };

  CLI::App* c_solve = app.add_subcommand("solve", "solve the scenario problem");
  CLI::App* c_verify = app.add_subcommand("verify", "solve and check the variational inequalities");
  CLI::App* c_capacity = app.add_subcommand("capacity", "capacitary distribution of a subset");
  CLI::App* c_converge = app.add_subcommand("converge", "run a family of stage problems");
  CLI::App* c_example = app.add_subcommand("example", "run a built-in reference scenario");
  add_common(c_solve, true);
  add_common(c_verify, true);
  add_common(c_capacity, true);
  add_common(c_converge, true);
  add_common(c_example, false);
  c_example->add_option("name", example_name, "example1 | example2")->required();

  CLI11_PARSE(app, argc, argv);

  equilib::ScenarioOverrides ov;
  if (gap_tol > 0.0) ov.gap_tol = gap_tol;
  if (!algorithm.empty()) ov.algorithm = algorithm;
  if (w_level == w_level) ov.w = w_level;  // set iff not NaN

  try {
    if (app.got_subcommand(c_example))
      return equilib::cmd_example(example_name, out_dir, ov);
    const nlohmann::json doc = load_scenario(scenario_path);
    if (app.got_subcommand(c_solve)) return equilib::cmd_solve(doc, out_dir, ov);
    if (app.got_subcommand(c_verify)) return equilib::cmd_verify(doc, out_dir, ov);
    if (app.got_subcommand(c_capacity)) return equilib::cmd_capacity(doc, out_dir, ov);
    if (app.got_subcommand(c_converge)) return equilib::cmd_converge(doc, out_dir, ov);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return equilib::kExitInvalidInput;
  }
  return equilib::kExitInvalidInput;
}
