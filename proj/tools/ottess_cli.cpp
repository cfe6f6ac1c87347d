// Command-line front end: runs a scenario file through one of the pipelines
// (tessellate, solve, analyze, levelcurve, witness-convex, witness-bumps) and
// writes report.json plus figure.svg into the output directory.
//
// Exit codes: 0 all requested checks pass, 2 input error, 3 solver failure,
// 4 check failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ottess/ottess.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<int> resolution;
  std::optional<std::uint64_t> seed;
  bool dump_grid = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (default: out)");
  cmd->add_option("--resolution", args.resolution, "override the grid resolution");
  cmd->add_option("--seed", args.seed, "override the scenario seed");
  cmd->add_flag("--dump-grid", args.dump_grid, "also write the quadrature grid as grid.csv");
}

int run_mode(const CommonArgs& args, ottess::RunMode expected) {
  try {
    const ottess::Scenario scenario = ottess::load_scenario(args.scenario_path);
    if (scenario.mode != expected) {
      std::cerr << "error: scenario mode is \"" << ottess::mode_name(scenario.mode)
                << "\" but the \"" << ottess::mode_name(expected)
                << "\" subcommand was invoked\n";
      return ottess::kExitInputError;
    }
    ottess::RunOptions options;
    options.resolution_override = args.resolution;
    options.seed_override = args.seed;
    options.dump_grid = args.dump_grid;
    const ottess::RunResult result = ottess::run(scenario, args.out_dir, options);
    if (result.exit_code == ottess::kExitSolverFailure)
      std::cerr << "solver did not converge (report written)\n";
    if (result.exit_code == ottess::kExitCheckFailure)
      std::cerr << "one or more checks failed (see report.json)\n";
    return result.exit_code;
  } catch (const ottess::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return ottess::kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return ottess::kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ottess::kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-discrete optimal-transport tessellations on polygons and the sphere"};
  app.require_subcommand(1);

  const std::pair<const char*, ottess::RunMode> modes[] = {
      {"tessellate", ottess::RunMode::Tessellate},
      {"solve", ottess::RunMode::Solve},
      {"analyze", ottess::RunMode::Analyze},
      {"levelcurve", ottess::RunMode::LevelCurve},
      {"witness-convex", ottess::RunMode::WitnessConvex},
      {"witness-bumps", ottess::RunMode::WitnessBumps},
  };

  CommonArgs args[std::size(modes)];
  int selected = -1;
  for (std::size_t k = 0; k < std::size(modes); ++k) {
    CLI::App* cmd = app.add_subcommand(modes[k].first);
    add_common(cmd, args[k]);
    cmd->callback([&selected, k]() { selected = static_cast<int>(k); });
  }

  CLI11_PARSE(app, argc, argv);
  if (selected < 0) {
    std::cerr << app.help();
    return ottess::kExitInputError;
  }
  return run_mode(args[selected], modes[selected].second);
}
