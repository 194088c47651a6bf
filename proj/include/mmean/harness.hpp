#ifndef MMEAN_HARNESS_HPP
#define MMEAN_HARNESS_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "mmean/scene.hpp"

namespace mmean {

/// One verified inequality in a run report.
struct ContractRow {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string direction = "<=";
  bool pass = false;
  bool enforced = true;
};

struct RunOutcome {
  nlohmann::ordered_json report;
  int exit_code = 0;  // 0 pass, 2 contract failure
  std::vector<std::string> artifacts;
};

/// Runs average / midpoint / morph / distance / diagnose on a parsed scene,
/// writing meshes and report.json under the scene's output directory.
/// Input and solver errors propagate as Error.
RunOutcome run_command(const std::string& command, const SceneConfig& scene, int morph_depth = 3);

/// Seeded random verification of the Grassmann identities (sin-norm, graph,
/// duality, triangle, averaging bound, equivariance). Deterministic per seed.
RunOutcome grassmann_selftest(int n_max, int k_max, int trials, std::uint64_t seed);

/// CLI exit code for a thrown Error: 3 input, 4 solver.
int exit_code_for(ErrorCode code);
nlohmann::ordered_json error_json(const Error& error);

}  // namespace mmean

#endif
