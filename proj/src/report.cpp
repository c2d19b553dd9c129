#include "pnp/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pnp {

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string format_convergence_csv(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::runtime_error("no records to write");
  std::string out = kConvergenceCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    const auto species = [](const auto& v, std::size_t i) {
      using T = std::decay_t<decltype(v[0])>;
      return i < v.size() ? v[i] : T{};
    };
    const std::vector<std::string> fields{
        std::to_string(r.step),
        std::to_string(r.dofs),
        number(r.h_max),
        optional_number(r.e_phi),
        optional_number(species(r.e_p, 0)),
        optional_number(species(r.e_p, 1)),
        number(r.eta_phi),
        r.eta_p.size() > 0 ? number(r.eta_p[0]) : "",
        r.eta_p.size() > 1 ? number(r.eta_p[1]) : "",
        optional_number(r.eff_phi),
        optional_number(species(r.eff_p, 0)),
        optional_number(species(r.eff_p, 1)),
    };
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k > 0) out += ',';
      out += fields[k];
    }
    out += '\n';
  }
  return out;
}

void write_convergence_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  const std::string text = format_convergence_csv(records);
  std::ofstream out = open_for_writing(path);
  out << text;
  finish(out, path);
}

std::vector<RunRecord> parse_convergence_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_fields(line) != split_fields(kConvergenceCsvHeader))
    throw std::invalid_argument("convergence CSV header mismatch");
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 12) throw std::invalid_argument("expected 12 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.step = std::stoi(f[0]);
    r.dofs = static_cast<std::size_t>(std::stoull(f[1]));
    r.h_max = *parse_optional(f[2]);
    r.e_phi = parse_optional(f[3]);
    r.e_p = {parse_optional(f[4]), parse_optional(f[5])};
    r.eta_phi = *parse_optional(f[6]);
    r.eta_p = {*parse_optional(f[7]), *parse_optional(f[8])};
    r.eff_phi = parse_optional(f[9]);
    r.eff_p = {parse_optional(f[10]), parse_optional(f[11])};
    records.push_back(std::move(r));
  }
  return records;
}

void write_vtk(const std::filesystem::path& path, const Mesh& m, const CoupledState& state,
               const EstimatorReport& report) {
  state.phi.check_mesh(m);
  std::ofstream out = open_for_writing(path);
  const std::size_t nv = m.num_vertices(), nt = m.num_triangles();
  out << "# vtk DataFile Version 3.0\npnp_afem step\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2& v : m.vertices()) out << number(v.x) << ' ' << number(v.y) << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const Triangle& t : m.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) out << "5\n";

  const auto scalars = [&](const std::string& name, const std::vector<double>& values) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) out << number(v) << '\n';
  };
  out << "POINT_DATA " << nv << '\n';
  scalars("phi", state.phi.coefficients());
  for (std::size_t i = 0; i < state.p.size(); ++i) scalars("p" + std::to_string(i + 1), state.p[i].coefficients());
  if (report.mesh_id == m.id() && report.eta_phi.size() == nt) {
    out << "CELL_DATA " << nt << '\n';
    scalars("eta_phi", report.eta_phi);
    for (std::size_t i = 0; i < report.eta_p.size(); ++i) scalars("eta_p" + std::to_string(i + 1), report.eta_p[i]);
  }
  finish(out, path);
}

void write_rates(const std::map<std::string, double>& rates, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  for (const auto& [key, slope] : rates) out << key << '=' << number(slope) << '\n';
  finish(out, path);
}

void write_solver_log(const std::vector<ConvergenceEntry>& log, const std::filesystem::path& path) {
  std::ofstream out = open_for_writing(path);
  out << "iteration,unknown,residual\n";
  for (const auto& e : log) out << e.iteration << ',' << e.unknown << ',' << number(e.residual) << '\n';
  finish(out, path);
}

}  // namespace pnp
