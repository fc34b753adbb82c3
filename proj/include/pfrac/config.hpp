// Run configuration: line-oriented `section.key = value` text with '#'
// comments. Parsing is strict (unknown or repeated keys are errors) and
// format_config writes a canonical form that parses back to an equal value.
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pfrac/driver.hpp"
#include "pfrac/material.hpp"
#include "pfrac/mesh.hpp"

namespace pfrac {

/// Axis-aligned box selecting nodes into a named node set.
struct NodeBox {
  std::string name;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  friend bool operator==(const NodeBox&, const NodeBox&) = default;
};

struct MeshConfig {
  std::string file;  ///< import path; when set, the generator keys are ignored
  double width = 1.0;
  double height = 1.0;
  int nx = 10;
  int ny = 10;
  std::vector<std::pair<double, int>> x_segments;  ///< (length, count); overrides width/nx
  std::vector<std::pair<double, int>> y_segments;
  std::vector<NodeBox> node_boxes;
  std::string notch_mode = "none";  ///< none | phase-field | slit
  Point2 notch_tip;
  Point2 notch_direction{1.0, 0.0};
  double notch_length = 0.0;
  double notch_band_width = 0.0;
  friend bool operator==(const MeshConfig&, const MeshConfig&) = default;
};

struct InitialConfig {
  /// Nodes inside the box start at v0 = defect_value (an imperfection).
  std::string defect_box;  ///< "x0:x1:y0:y1" or empty
  double defect_value = 1.0;
  friend bool operator==(const InitialConfig&, const InitialConfig&) = default;
};

struct LoadingConfig {
  std::vector<DirichletCondition> dirichlet;
  std::vector<Traction> tractions;
  std::array<double, 2> body_force{0.0, 0.0};
  double start = 0.0;
  double end = 1.0;
  int num_steps = 10;
  std::vector<double> scales;  ///< explicit program; overrides start/end/num_steps
  bool monotone = true;
  friend bool operator==(const LoadingConfig&, const LoadingConfig&) = default;
};

struct OutputConfig {
  std::string dir;  ///< empty: $PFRAC_OUTPUT_DIR/<config stem> or ./pfrac-output/<config stem>
  bool vtk = true;
  bool csv = true;
  int vtk_every = 1;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// Benchmark block read by the scenario runner. Loads are expressed as
/// multiples of the oracle load, so presets stay valid when the material changes.
struct ScenarioConfig {
  std::string kind;  ///< empty for plain runs
  double load_min = 0.8;
  double load_max = 1.3;
  int num_steps = 51;
  double nucleation_threshold = 0.05;
  double localization_fraction = 0.1;
  double tolerance = 0.1;
  double defect_value = 0.999;
  // notched specimens
  double notch_length = 0.0;
  double fine_size = 0.0;      ///< element size near the notch tip; 0: eps / 2
  double fine_behind = 0.0;    ///< fine zone extent behind the tip
  double fine_ahead = 0.0;     ///< fine zone extent ahead of the tip
  double fine_height = 0.0;    ///< fine zone extent above the crack plane
  double extension = 0.0;      ///< crack growth that counts as propagation
  std::vector<double> notch_lengths;  ///< notch-size sweep
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct RunConfig {
  MaterialParams material;
  double eps_factor = 0.0;  ///< > 0: eps = eps_factor * eps_recommended_max
  bool delta_eps_auto = true;
  MeshConfig mesh;
  InitialConfig initial;
  LoadingConfig loading;
  FractureModel mode = FractureModel::Strength;
  StaggerOptions solver;
  OutputConfig output;
  ScenarioConfig scenario;
  std::vector<std::string> warnings;  ///< non-fatal findings from validation
  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.material == b.material && a.eps_factor == b.eps_factor && a.delta_eps_auto == b.delta_eps_auto &&
           a.mesh == b.mesh && a.initial == b.initial && a.loading == b.loading && a.mode == b.mode &&
           a.solver == b.solver && a.output == b.output && a.scenario == b.scenario;
  }
};

/// Parses and validates. Throws ParseError (with line) for syntax, unknown or
/// repeated keys and malformed values; ValidationError (naming the field) for
/// violated constraints.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

/// Canonical text: every key, fixed order, round-trip-exact numbers.
std::string format_config(const RunConfig& c);

/// Resolves eps from eps_factor and delta_eps from the fallback, then checks
/// all constraints. Called by the parsers.
void resolve_and_validate(RunConfig& c);

/// Problem and load program described by a plain (non-scenario) config.
struct BuiltRun {
  Problem problem;
  LoadProgram program;
  std::vector<std::string> warnings;
};
BuiltRun build_run(const RunConfig& c, const std::filesystem::path& base_dir = {});

/// Output directory for a run: output.dir, else $PFRAC_OUTPUT_DIR/<stem>,
/// else pfrac-output/<stem>.
std::filesystem::path resolve_output_dir(const RunConfig& c, const std::string& stem);

std::string mode_name(FractureModel m);

}  // namespace pfrac
