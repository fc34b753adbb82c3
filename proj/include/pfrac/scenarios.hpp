// Benchmark problems with closed-form oracles: homogeneous nucleation under
// tension, compression, shear and equibiaxial stretch, and crack growth from
// a single-edge notch under tension.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pfrac/config.hpp"
#include "pfrac/driver.hpp"
#include "pfrac/material.hpp"

namespace pfrac {

enum class HomogeneousMode { UniaxialTension, UniaxialCompression, Shear, Biaxial };

std::string homogeneous_mode_name(HomogeneousMode mode);

struct NucleationSettings {
  double width = 1.0;
  double height = 1.0;
  int nx = 20;
  int ny = 20;
  /// Load program [0, load_min, ..., load_max] in multiples of the oracle
  /// load factor (the F = 0 root for tension, shear and biaxial; the load
  /// reaching sigma_cs for compression).
  double load_min = 0.8;
  double load_max = 1.3;
  int num_steps = 51;
  double nucleation_threshold = 0.05;
  double localization_fraction = 0.1;
  double defect_value = 0.999;  ///< v0 on the mid-width node column
  FractureModel model = FractureModel::Strength;
  StaggerOptions solver;
  bool stop_at_nucleation = true;
};

struct NucleationResult {
  HomogeneousMode mode = HomogeneousMode::UniaxialTension;
  SymTensor2 unit_stress;        ///< undamaged uniform stress per unit load factor
  double uniformity_error = 0.0;  ///< max |S - S_unit| over Gauss points, relative
  double oracle_factor = 0.0;    ///< load factor of the oracle state
  double oracle_stress = 0.0;    ///< loading component at the oracle state
  bool nucleated = false;        ///< min v < threshold at some step
  bool localized = false;        ///< damaged measure < fraction |Omega| at that step
  int step = -1;
  double critical_factor = 0.0;
  double critical_stress = 0.0;  ///< loading component of the undamaged stress at nucleation
  double f_before = 0.0;         ///< strength function at the last step before nucleation
  double f_at = 0.0;             ///< strength function at the nucleation step
  bool brackets = false;         ///< F < 0 earlier on the path and F >= 0 at nucleation
  double min_v = 1.0;            ///< over all steps
  ProgramResult program;
  std::string report() const;
};

/// Loading component of a stress state for the mode: sigma_xx, or -sigma_xx in compression.
double loading_component(const SymTensor2& s, HomogeneousMode mode);

/// Load factor at which F vanishes along t * unit_stress, by bisection on the
/// closed-form strength function. Returns 0 when F stays negative.
double strength_root_factor(const SymTensor2& unit_stress, const MaterialParams& m);

NucleationResult run_homogeneous(const MaterialParams& m, HomogeneousMode mode, const NucleationSettings& s);

/// Uniaxial plane-strain stretch with traction-free lateral edge.
NucleationResult uniaxial_tension_nucleation(MaterialParams m, double eps, int mesh_density,
                                             NucleationSettings s = {});
/// Shear, equibiaxial or compression programs.
NucleationResult hydrostatic_and_shear_nucleation(MaterialParams m, double eps, HomogeneousMode mode,
                                                  NucleationSettings s = {});

struct SentSettings {
  double width = 0.0;   ///< specimen width b
  double height = 0.0;  ///< half height of the symmetric specimen
  int nx = 100;
  int ny = 50;
  double fine_size = 0.0;  ///< 0: eps / 2
  double fine_behind = 0.0;
  double fine_ahead = 0.0;
  double fine_height = 0.0;
  double load_min = 0.6;  ///< multiples of the Griffith oracle load
  double load_max = 1.4;
  int num_steps = 41;
  double threshold = 0.05;
  double extension = 0.0;  ///< growth of the v < threshold set that counts as propagation
  FractureModel model = FractureModel::Strength;
  StaggerOptions solver;
};

struct PropagationResult {
  double notch_length = 0.0;
  double oracle_load = 0.0;
  bool propagated = false;
  int step = -1;
  double critical_load = 0.0;
  double previous_load = 0.0;  ///< last load without propagation
  double crack_extension = 0.0;
  double geometry_factor = 0.0;
  std::vector<std::string> warnings;
  ProgramResult program;
  std::string report() const;
};

/// Plane-strain Griffith load of a single-edge-notched strip in tension,
/// sigma_c = sqrt(E' g_c / (pi a)) / F(a/b), with the handbook polynomial
/// F = 1.12 - 0.231 r + 10.55 r^2 - 21.72 r^3 + 30.39 r^4 (valid for r <= 0.6).
double sent_geometry_factor(double a_over_b);
double sent_griffith_load(const MaterialParams& m, double notch_length, double width);

/// Graded half-specimen mesh, fine near the notch tip, with node sets
/// "ligament" (bottom edge from the tip on) and "anchor" (bottom right corner).
Mesh sent_mesh(double notch_length, const SentSettings& s, double eps, int nx, int ny);

/// Half specimen: symmetry on the ligament, traction-free notch faces on the
/// rest of the bottom edge, uniform traction on the top edge.
PropagationResult sent_griffith(MaterialParams m, double eps, double notch_length, int nx, int ny, SentSettings s);

/// Outcome of a bundled benchmark run from a config.
struct ScenarioOutcome {
  std::string name;
  bool pass = false;
  std::string report;
  std::vector<NucleationResult> nucleation;
  std::vector<PropagationResult> propagation;
};

NucleationSettings nucleation_settings(const RunConfig& c);
SentSettings sent_settings(const RunConfig& c);
ScenarioOutcome run_scenario(const RunConfig& c);

/// Directory holding the bundled presets: $PFRAC_SCENARIO_DIR or the source tree.
std::filesystem::path scenario_dir();

}  // namespace pfrac
