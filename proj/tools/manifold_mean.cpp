#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "mmean/harness.hpp"

namespace {

struct SceneFlags {
  std::string scene_path;
  double tol = -1.0;
  int max_iter = -1;
  std::int64_t seed = -1;
  int threads = -1;
  std::string out_dir;
};

void add_scene_flags(CLI::App* cmd, SceneFlags& flags) {
  cmd->add_option("--scene", flags.scene_path, "scene JSON file")->required();
  cmd->add_option("--tol", flags.tol, "override solver tolerance");
  cmd->add_option("--max-iter", flags.max_iter, "override solver iteration cap");
  cmd->add_option("--seed", flags.seed, "override the scene seed");
  cmd->add_option("--threads", flags.threads, "worker threads (0 = library default)");
  cmd->add_option("--out-dir", flags.out_dir, "override the output directory");
}

mmean::SceneConfig load_scene(const SceneFlags& flags) {
  mmean::SceneConfig scene = mmean::parse_scene(flags.scene_path);
  if (flags.tol > 0) scene.solver.tol = flags.tol;
  if (flags.max_iter > 0) scene.solver.max_iter = flags.max_iter;
  if (flags.seed >= 0) scene.solver.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.threads >= 0) scene.solver.threads = flags.threads;
  if (!flags.out_dir.empty()) scene.out_dir = flags.out_dir;
  return scene;
}

void print_outcome(const mmean::RunOutcome& outcome) {
  for (const auto& row : outcome.report["contracts"]) {
    std::cout << (row["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << row["name"].get<std::string>()
              << "  measured=" << row["measured"].get<double>()
              << "  bound=" << row["bound"].get<double>()
              << (row["enforced"].get<bool>() ? "" : "  (advisory)") << "\n";
  }
  if (outcome.report.contains("epsilon")) {
    std::cout << "epsilon: c1=" << outcome.report["epsilon"]["c1"].get<double>()
              << " c0=" << outcome.report["epsilon"]["c0"].get<double>()
              << " angular=" << outcome.report["epsilon"]["angular"].get<double>() << "\n";
  }
  if (outcome.report.contains("distances")) {
    for (const auto& row : outcome.report["distances"]) {
      std::cout << "d(N" << row["from"].get<int>() << " -> N" << row["to"].get<int>()
                << ") = " << row["c1"].get<double>() << "\n";
    }
  }
  for (const auto& path : outcome.artifacts) {
    std::cout << "wrote " << path << "\n";
  }
  std::cout << (outcome.exit_code == 0 ? "OK" : "CONTRACT FAILURE") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"manifold-mean: center-of-mass averaging of nearby submanifolds"};
  app.require_subcommand(1);

  SceneFlags flags;
  int morph_depth = 3;

  CLI::App* cmd_average = app.add_subcommand("average", "average the scene family");
  CLI::App* cmd_midpoint = app.add_subcommand("midpoint", "midpoint of a two-member scene");
  CLI::App* cmd_morph = app.add_subcommand("morph", "dyadic morph between two members");
  CLI::App* cmd_distance = app.add_subcommand("distance", "pairwise C1 distances");
  CLI::App* cmd_diagnose = app.add_subcommand("diagnose", "tube estimate suite");
  for (CLI::App* cmd : {cmd_average, cmd_midpoint, cmd_morph, cmd_distance, cmd_diagnose}) {
    add_scene_flags(cmd, flags);
  }
  cmd_morph->add_option("--depth", morph_depth, "dyadic subdivision depth")
      ->check(CLI::PositiveNumber);

  CLI::App* cmd_selftest = app.add_subcommand("selftest", "grassmann identity suite");
  int n_max = 12, k_max = 4, trials = 1000;
  std::int64_t selftest_seed = 42;
  cmd_selftest->add_option("--n-max", n_max, "largest ambient dimension");
  cmd_selftest->add_option("--k-max", k_max, "largest subspace dimension");
  cmd_selftest->add_option("--trials", trials, "number of random trials");
  cmd_selftest->add_option("--seed", selftest_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_selftest->parsed()) {
      mmean::RunOutcome outcome = mmean::grassmann_selftest(
          n_max, k_max, trials, static_cast<std::uint64_t>(selftest_seed));
      print_outcome(outcome);
      return outcome.exit_code;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    mmean::RunOutcome outcome = mmean::run_command(name, load_scene(flags), morph_depth);
    print_outcome(outcome);
    return outcome.exit_code;
  } catch (const mmean::Error& e) {
    std::cerr << mmean::error_json(e).dump() << "\n";
    std::cout << "error: " << e.what() << "\n";
    return mmean::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << R"({"error":{"code":"Internal","message":")" << e.what() << "\"}}" << "\n";
    return 4;
  }
}
