#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pnp {

struct CliConfig {
  std::string example = "sech";
  std::string mode = "adaptive";
  double tol = 0.05;
  double theta = 0.5;
  std::size_t max_dof = 100000;
  int max_steps = 50;
  std::string weights = "area";
  int quad_order = 0;  // 0 keeps the example's own degree
  int threads = 1;
  std::filesystem::path out_dir = ".";
  bool verbose = false;
};

/// `pnp_afem run [flags]`: runs one study and writes convergence.csv,
/// step_<k>.vtk and rates.txt into out_dir. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pnp
