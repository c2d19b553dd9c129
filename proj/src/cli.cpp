#include "pnp/cli.hpp"

#include "pnp/afem.hpp"
#include "pnp/parallel.hpp"
#include "pnp/problem.hpp"
#include "pnp/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ostream>

namespace pnp {

namespace {

void execute(const CliConfig& c, std::ostream& out) {
  ManufacturedCase mc = make_case(c.example);
  if (c.quad_order != 0) {
    triangle_rule(c.quad_order);  // validates the degree
    mc.problem.quadrature_degree = c.quad_order;
  }
  LoopConfig loop;
  loop.tol = c.tol;
  loop.theta = c.theta;
  loop.max_dofs = c.max_dof;
  loop.max_steps = c.max_steps;
  loop.mode = parse_refinement_mode(c.mode);
  loop.weights = parse_weight_scheme(c.weights);
  loop.validate();
  set_num_threads(c.threads);

  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec || !std::filesystem::is_directory(c.out_dir))
    throw std::runtime_error("cannot create output directory '" + c.out_dir.string() + "'");

  const SolverConfig solver;
  const auto observer = [&](const StepView& v) {
    write_vtk(c.out_dir / ("step_" + std::to_string(v.record.step) + ".vtk"), v.mesh, v.state, v.report);
    if (c.verbose) {
      write_solver_log(v.state.log, c.out_dir / ("solver_log_" + std::to_string(v.record.step) + ".csv"));
      char line[200];
      std::snprintf(line, sizeof line, "step %d: dofs=%zu eta_phi=%.4e sweeps=%d marked=%zu (%.2fs)", v.record.step,
                    v.record.dofs, v.record.eta_phi, v.record.gummel_iterations, v.record.marked,
                    v.record.wall_seconds);
      out << line << '\n';
    }
  };
  const std::vector<RunRecord> records = run_study(mc, loop, solver, observer);
  write_convergence_csv(records, c.out_dir / "convergence.csv");
  std::map<std::string, double> rates;
  if (records.size() >= 3) rates = fit_rate(records);
  write_rates(rates, c.out_dir / "rates.txt");
  out << "wrote " << records.size() << " steps to " << c.out_dir.string() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive P1 finite elements for steady Poisson-Nernst-Planck systems", "pnp_afem"};
  app.require_subcommand(1);
  CliConfig c;
  CLI::App* run = app.add_subcommand("run", "Run a uniform or adaptive refinement study");
  run->add_option("--example", c.example, "sech | singular")->check(CLI::IsMember({"sech", "singular"}));
  run->add_option("--mode", c.mode, "uniform | adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
  run->add_option("--tol", c.tol, "Stop when every global indicator is at most this")->check(CLI::PositiveNumber);
  run->add_option("--theta", c.theta, "Maximum-marking parameter in (0,1)")->check(CLI::Range(0.0, 1.0));
  run->add_option("--max-dof", c.max_dof, "Never solve on a mesh with more vertices");
  run->add_option("--max-steps", c.max_steps, "Cap on the number of solve steps")->check(CLI::PositiveNumber);
  run->add_option("--weights", c.weights, "Recovery weights: area | uniform")->check(CLI::IsMember({"area", "uniform"}));
  run->add_option("--quad-order", c.quad_order, "Triangle quadrature degree (1, 2, 4 or 10)");
  run->add_option("--threads", c.threads, "Worker threads for element loops")->check(CLI::PositiveNumber);
  run->add_option("--out-dir", c.out_dir, "Output directory");
  run->add_flag("--verbose", c.verbose, "Print progress and write per-step solver logs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }
  try {
    execute(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args, out, err);
}

}  // namespace pnp
