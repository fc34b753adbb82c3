#include "pfrac/output.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "pfrac/errors.hpp"
#include "pfrac/textio.hpp"

#ifndef PFRAC_VERSION
#define PFRAC_VERSION "0.0.0"
#endif

namespace pfrac {

const char* version() { return PFRAC_VERSION; }

std::string format_vtk(const Mesh& mesh, const Vector& u, const Vector& v, int step) {
  if (static_cast<std::size_t>(u.size()) != 2 * mesh.num_nodes() ||
      static_cast<std::size_t>(v.size()) != mesh.num_nodes()) {
    throw ValidationError("vtk", "field sizes do not match the mesh");
  }
  std::string s;
  s += "# vtk DataFile Version 3.0\n";
  s += "pfrac step " + std::to_string(step) + "\n";
  s += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  s += "POINTS " + std::to_string(mesh.num_nodes()) + " double\n";
  for (const auto& p : mesh.nodes()) s += format_double(p.x) + " " + format_double(p.y) + " 0\n";
  const std::size_t ne = mesh.num_elements();
  s += "CELLS " + std::to_string(ne) + " " + std::to_string(5 * ne) + "\n";
  for (const auto& q : mesh.elements()) {
    s += "4 " + std::to_string(q[0]) + " " + std::to_string(q[1]) + " " + std::to_string(q[2]) + " " +
         std::to_string(q[3]) + "\n";
  }
  s += "CELL_TYPES " + std::to_string(ne) + "\n";
  for (std::size_t e = 0; e < ne; ++e) s += "9\n";
  s += "POINT_DATA " + std::to_string(mesh.num_nodes()) + "\n";
  s += "VECTORS displacement double\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    s += format_double(u[2 * i]) + " " + format_double(u[2 * i + 1]) + " 0\n";
  }
  s += "SCALARS phase double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += format_double(std::clamp(v[i], 0.0, 1.0)) + "\n";
  return s;
}

std::filesystem::path write_vtk(const Mesh& mesh, const Vector& u, const Vector& v, int step,
                                const std::filesystem::path& dir) {
  char name[32];
  std::snprintf(name, sizeof name, "step_%04d.vtk", step);
  const auto path = dir / name;
  write_file_atomic(path, format_vtk(mesh, u, v, step));
  return path;
}

std::string iterations_csv_header() {
  return "step,iteration,load_factor,energy_d,energy_d_prev,energy_f,elastic_term,strength_term,"
         "regularization_term,energy_f_prev,energy_min,energy_g,dv_inf,v_iterations,v_converged,v_residual,"
         "d_monotone,f_monotone";
}

std::string format_csv_log(const std::vector<EnergyReport>& reports) {
  std::string s = iterations_csv_header() + "\n";
  const auto d = [](double x) { return format_double(x); };
  for (const auto& r : reports) {
    s += std::to_string(r.step) + "," + std::to_string(r.iteration) + "," + d(r.scale) + "," + d(r.energy_d) + "," +
         d(r.energy_d_prev) + "," + d(r.fracture.total()) + "," + d(r.fracture.elastic) + "," +
         d(r.fracture.strength) + "," + d(r.fracture.regularization) + "," + d(r.energy_f_prev) + "," +
         d(r.energy_min) + "," + d(r.energy_g) + "," + d(r.dv_inf) + "," + std::to_string(r.v_iterations) + "," +
         (r.v_converged ? "1" : "0") + "," + d(r.v_residual) + "," + (r.d_monotone ? "1" : "0") + "," +
         (r.f_monotone ? "1" : "0") + "\n";
  }
  return s;
}

std::filesystem::path write_csv_log(const std::vector<EnergyReport>& reports, const std::filesystem::path& dir) {
  const auto path = dir / "iterations.csv";
  write_file_atomic(path, format_csv_log(reports));
  return path;
}

std::string format_steps_csv(const std::vector<StepState>& steps, const std::vector<std::string>& tags) {
  std::string s =
      "step,load_factor,iterations,converged,min_v,damaged_measure,stationarity_free,stationarity_clamped,v_tolerance";
  for (const auto& t : tags) s += ",reaction_" + t + "_x,reaction_" + t + "_y";
  s += "\n";
  for (const auto& st : steps) {
    s += std::to_string(st.step) + "," + format_double(st.scale) + "," + std::to_string(st.iterations.size()) + "," +
         (st.converged ? "1" : "0") + "," + format_double(st.min_v) + "," + format_double(st.damaged_measure) + "," +
         format_double(st.stationarity.max_free_residual) + "," + format_double(st.stationarity.max_clamped_violation) +
         "," + format_double(st.v_tolerance);
    for (const auto& t : tags) {
      const auto it = st.reactions.find(t);
      const std::array<double, 2> r = it == st.reactions.end() ? std::array<double, 2>{0.0, 0.0} : it->second;
      s += "," + format_double(r[0]) + "," + format_double(r[1]);
    }
    s += "\n";
  }
  return s;
}

std::filesystem::path write_steps_csv(const std::vector<StepState>& steps, const std::vector<std::string>& tags,
                                      const std::filesystem::path& dir) {
  const auto path = dir / "steps.csv";
  write_file_atomic(path, format_steps_csv(steps, tags));
  return path;
}

std::string format_metadata(const RunConfig& c, const EpsCheck& eps) {
  std::string s;
  s += "# pfrac " + std::string(version()) + "\n";
  s += "# eps check: " + eps.message() + "\n";
  s += "# eps/eps_max = " + format_double(eps.ratio) + ", eps_max = " + format_double(eps.threshold) + "\n";
  s += "# resolved eps = " + format_double(c.material.eps) + ", delta_eps = " + format_double(c.material.delta_eps) +
       "\n";
  for (const auto& w : c.warnings) s += "# warning: " + w + "\n";
  s += "\n" + format_config(c);
  return s;
}

std::filesystem::path write_metadata(const RunConfig& c, const EpsCheck& eps, const std::filesystem::path& dir) {
  const auto path = dir / "metadata.cfg";
  write_file_atomic(path, format_metadata(c, eps));
  return path;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) throw ParseError("<csv>", t.rows.size() + 2, "column count mismatch");
    std::vector<double> row;
    for (const auto& c : cells) {
      double x = 0.0;
      if (!parse_double(c, x)) throw ParseError("<csv>", t.rows.size() + 2, "non-numeric cell '" + c + "'");
      row.push_back(x);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace pfrac
