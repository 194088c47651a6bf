// Times the slice sweep of average_family in its serial and OpenMP-parallel
// paths on a pair of perturbed concentric circles, and checks that both paths
// produce identical sections.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>

#include "mmean/averaging.hpp"

using namespace mmean;

namespace {

WeightedFamily make_family(int mesh) {
  const AmbientSpace plane = AmbientSpace::euclidean(2);
  Eigen::VectorXd rc = Eigen::VectorXd::Zero(3);
  rc(2) = 0.005;
  Eigen::VectorXd rs = Eigen::VectorXd::Zero(2);
  rs(1) = 0.005;
  WeightedFamily family;
  family.members.push_back({0.5, make_fourier_circle(plane, 1.0, rc, Eigen::VectorXd(),
                                                     Eigen::VectorXd(), Eigen::VectorXd(), mesh)});
  family.members.push_back({0.5, make_fourier_circle(plane, 1.1, Eigen::VectorXd(), rs,
                                                     Eigen::VectorXd(), Eigen::VectorXd(), mesh)});
  return family;
}

double time_run(const WeightedFamily& family, const SolverConfig& config, int repeat,
                AveragedSection& out) {
  double best = 1e300;
  for (int i = 0; i < repeat; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    out = average_family(family, config);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, dt);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark: serial vs OpenMP slice sweep"};
  int mesh = 256, repeat = 3, threads = 0;
  app.add_option("--mesh", mesh, "mesh resolution per member");
  app.add_option("--repeat", repeat, "repetitions (best time wins)");
  app.add_option("--threads", threads, "OpenMP threads (0 = default)");
  CLI11_PARSE(app, argc, argv);

  WeightedFamily family = make_family(mesh);

  SolverConfig serial;
  serial.parallel = false;
  SolverConfig parallel;
  parallel.parallel = true;
  parallel.threads = threads;

  AveragedSection serial_out, parallel_out;
  const double t_serial = time_run(family, serial, repeat, serial_out);
  const double t_parallel = time_run(family, parallel, repeat, parallel_out);

  double max_diff = 0.0;
  for (std::size_t i = 0; i < serial_out.points.size(); ++i) {
    max_diff = std::max(max_diff, (serial_out.points[i] - parallel_out.points[i]).norm());
  }

  std::printf("slices             : %zu\n", serial_out.points.size());
  std::printf("serial   best time : %.4f s\n", t_serial);
  std::printf("parallel best time : %.4f s\n", t_parallel);
  std::printf("speedup            : %.2fx\n", t_serial / t_parallel);
  std::printf("max point mismatch : %.3g\n", max_diff);
  return max_diff == 0.0 ? 0 : 1;
}
