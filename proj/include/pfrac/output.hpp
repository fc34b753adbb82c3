// Result files. Every write goes through a temporary file and a rename.
//
// iterations.csv columns, one row per staggered iteration:
//   step, iteration, load_factor, energy_d, energy_d_prev, energy_f, elastic_term,
//   strength_term, regularization_term, energy_f_prev, energy_min, energy_g,
//   dv_inf, v_iterations, v_converged, v_residual, d_monotone, f_monotone
// energy_f is the strength-mode functional and its three terms; energy_min
// is the functional the phase-field solve minimized (E_f or E_G by mode).
//
// steps.csv columns, one row per load step:
//   step, load_factor, iterations, converged, min_v, damaged_measure,
//   stationarity_free, stationarity_clamped, v_tolerance, then
//   reaction_<tag>_x, reaction_<tag>_y for each recorded tag.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pfrac/config.hpp"
#include "pfrac/driver.hpp"
#include "pfrac/mesh.hpp"

namespace pfrac {

std::string format_vtk(const Mesh& mesh, const Vector& u, const Vector& v, int step);
/// Writes `<dir>/step_<NNNN>.vtk` and returns the path.
std::filesystem::path write_vtk(const Mesh& mesh, const Vector& u, const Vector& v, int step,
                                const std::filesystem::path& dir);

std::string iterations_csv_header();
std::string format_csv_log(const std::vector<EnergyReport>& reports);
/// Writes `<dir>/iterations.csv`.
std::filesystem::path write_csv_log(const std::vector<EnergyReport>& reports, const std::filesystem::path& dir);

std::string format_steps_csv(const std::vector<StepState>& steps, const std::vector<std::string>& tags);
std::filesystem::path write_steps_csv(const std::vector<StepState>& steps, const std::vector<std::string>& tags,
                                      const std::filesystem::path& dir);

/// Resolved config, code version and eps check; the config part parses back
/// with parse_config.
std::string format_metadata(const RunConfig& c, const EpsCheck& eps);
std::filesystem::path write_metadata(const RunConfig& c, const EpsCheck& eps, const std::filesystem::path& dir);

/// Parsed numeric CSV: header names and rows of values (booleans read as 0/1).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text);

const char* version();

}  // namespace pfrac
