#pragma once

#include "pnp/afem.hpp"
#include "pnp/estimator.hpp"
#include "pnp/mesh.hpp"
#include "pnp/solver.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pnp {

inline constexpr const char* kConvergenceCsvHeader =
    "step,dofs,h_max,e_phi,e_p1,e_p2,eta_phi,eta_p1,eta_p2,eff_phi,eff_p1,eff_p2";

/// Writes the header and one row per record (17 significant digits, empty
/// fields for values that are not available). Throws std::runtime_error on
/// I/O failure or an empty record list.
void write_convergence_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::string format_convergence_csv(const std::vector<RunRecord>& records);

/// Inverse of format_convergence_csv for two-species records.
std::vector<RunRecord> parse_convergence_csv(const std::string& text);

/// Legacy ASCII VTK unstructured grid with the fields as POINT_DATA and the
/// indicators as CELL_DATA.
void write_vtk(const std::filesystem::path& path, const Mesh& m, const CoupledState& state,
               const EstimatorReport& report);

/// One `quantity=slope` line per entry.
void write_rates(const std::map<std::string, double>& rates, const std::filesystem::path& path);

/// iteration,unknown,residual rows of a solver log.
void write_solver_log(const std::vector<ConvergenceEntry>& log, const std::filesystem::path& path);

}  // namespace pnp
