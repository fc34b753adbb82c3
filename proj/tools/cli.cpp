#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "pfrac/config.hpp"
#include "pfrac/errors.hpp"
#include "pfrac/output.hpp"
#include "pfrac/scenarios.hpp"
#include "pfrac/textio.hpp"
#include "pfrac/verification.hpp"

namespace pfrac {

namespace fs = std::filesystem;

namespace {

std::string num(double x) { return format_double(x); }

struct RunArgs {
  std::string config;
  std::string output_dir;
  bool quiet = false;
};

struct GradientArgs {
  std::string config;
  int samples = 50;
  int seed = 12345;
  int nx = 4;
  int ny = 4;
};

struct ScenarioArgs {
  std::string name;
  std::string scenario_dir;
  std::string output_dir;
  bool list = false;
};

void write_program_files(const RunConfig& c, const ProgramResult& r, const std::vector<std::string>& tags,
                         const fs::path& dir) {
  if (!c.output.csv) return;
  std::vector<EnergyReport> reports;
  for (const auto& st : r.steps) reports.insert(reports.end(), st.iterations.begin(), st.iterations.end());
  write_csv_log(reports, dir);
  write_steps_csv(r.steps, tags, dir);
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig c = parse_config(a.config);
  if (!c.scenario.kind.empty()) {
    err << "error: " << a.config << " describes a scenario; use `pfrac scenario` or remove the scenario block\n";
    return 1;
  }
  const fs::path base = fs::path(a.config).parent_path();
  if (!c.mesh.file.empty() && fs::path(c.mesh.file).is_relative()) {
    c.mesh.file = fs::absolute(base / c.mesh.file).lexically_normal().string();
  }
  BuiltRun built = build_run(c, base);
  const fs::path dir = a.output_dir.empty() ? resolve_output_dir(c, fs::path(a.config).stem().string())
                                            : fs::path(a.output_dir);
  fs::create_directories(dir);

  const Problem& p = built.problem;
  const EpsCheck eps = check_eps(p.material, p.derived);
  RunConfig meta = c;
  meta.warnings.insert(meta.warnings.end(), built.warnings.begin(), built.warnings.end());
  write_metadata(meta, eps, dir);
  for (const auto& w : meta.warnings) err << "warning: " << w << "\n";
  if (!eps.pass) err << "warning: eps check " << eps.message() << "\n";

  const auto& mesh = p.disc->mesh();
  std::set<int> written;
  const auto on_step = [&](const StepState& st) {
    if (c.output.vtk && st.step % c.output.vtk_every == 0) {
      write_vtk(mesh, st.u, st.v, st.step, dir);
      written.insert(st.step);
    }
    if (!a.quiet) {
      out << "step " << st.step << "  load " << num(st.scale) << "  iterations " << st.iterations.size()
          << (st.converged ? "" : " (not converged)") << "  min v " << num(st.min_v) << "\n";
    }
    return true;
  };
  ProgramResult r = run_program(p, built.program, c.solver, on_step);
  if (c.output.vtk && !r.steps.empty() && !written.count(r.steps.back().step)) {
    write_vtk(mesh, r.steps.back().u, r.steps.back().v, r.steps.back().step, dir);
  }
  write_program_files(c, r, reaction_tags(p), dir);

  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  for (const auto& v : r.violations) err << "violation: " << v << "\n";
  out << "output written to " << dir.string() << "\n";
  if (r.aborted) {
    err << "error: run aborted after step " << (r.steps.empty() ? 0 : r.steps.back().step)
        << " (staggered scheme did not converge)\n";
    return 1;
  }
  return r.violations.empty() ? 0 : 1;
}

int cmd_material_info(const std::string& config, std::ostream& out) {
  const RunConfig c = parse_config(config);
  const MaterialParams& m = c.material;
  const DerivedConstants d = derive_constants(m);
  const DerivedStrengths s = derived_strengths(m);
  const EpsCheck e = check_eps(m, d);
  out << "material\n";
  out << "  mu " << num(m.mu) << "  lambda " << num(m.lambda) << "\n";
  out << "  sigma_ts " << num(m.sigma_ts) << "  sigma_hs " << num(m.sigma_hs) << "  g_c " << num(m.g_c) << "\n";
  out << "  eps " << num(m.eps) << "  eta_eps " << num(m.eta_eps) << "  delta_eps " << num(m.delta_eps) << "\n";
  out << "derived constants\n";
  out << "  E " << num(d.young_e) << "\n";
  out << "  kappa " << num(d.kappa) << "\n";
  out << "  W_ts " << num(d.w_ts) << "\n";
  out << "  W_hs " << num(d.w_hs) << "\n";
  out << "  alpha1 " << num(d.alpha1) << "\n";
  out << "  alpha2 " << num(d.alpha2) << "\n";
  out << "  eps_max (3 g_c / (16 W_ts)) " << num(d.eps_recommended_max) << "\n";
  out << "derived strengths\n";
  out << "  sigma_ss " << num(s.shear) << "\n";
  out << "  sigma_bs " << num(s.biaxial) << "\n";
  out << "  sigma_cs " << num(s.compressive) << "\n";
  out << "eps check: " << e.message() << "\n";
  for (const auto& w : c.warnings) out << "warning: " << w << "\n";
  return 0;
}

int cmd_check_gradients(const GradientArgs& a, std::ostream& out) {
  const RunConfig c = parse_config(a.config);
  const Discretization disc(generate_rect(c.mesh.width, c.mesh.height, a.nx, a.ny));
  GradientCheckOptions opt;
  opt.samples = a.samples;
  opt.seed = static_cast<std::uint64_t>(a.seed);
  const GradientCheckReport r = check_gradients(disc, c.material, opt);
  out << r.summary() << "\n";
  return r.pass ? 0 : 1;
}

std::vector<std::string> available_scenarios(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".cfg") names.push_back(e.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

int cmd_scenario(const ScenarioArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path dir = a.scenario_dir.empty() ? scenario_dir() : fs::path(a.scenario_dir);
  const auto names = available_scenarios(dir);
  if (a.list) {
    for (const auto& n : names) out << n << "\n";
    return 0;
  }
  if (a.name.empty() || std::find(names.begin(), names.end(), a.name) == names.end()) {
    err << "error: unknown scenario '" << a.name << "'; available:";
    for (const auto& n : names) err << " " << n;
    err << "\n";
    return 2;
  }
  RunConfig c = parse_config(dir / (a.name + ".cfg"));
  const fs::path out_dir = a.output_dir.empty() ? resolve_output_dir(c, a.name) : fs::path(a.output_dir);
  fs::create_directories(out_dir);
  write_metadata(c, check_eps(c.material, derive_constants(c.material)), out_dir);

  const ScenarioOutcome o = run_scenario(c);
  out << o.report << "\n";
  std::vector<const ProgramResult*> programs;
  for (const auto& r : o.nucleation) programs.push_back(&r.program);
  for (const auto& r : o.propagation) programs.push_back(&r.program);
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const fs::path sub = programs.size() == 1 ? out_dir : out_dir / ("run_" + std::to_string(i));
    fs::create_directories(sub);
    std::vector<std::string> tags;
    if (!programs[i]->steps.empty()) {
      for (const auto& [t, r] : programs[i]->steps.back().reactions) tags.push_back(t);
    }
    write_program_files(c, *programs[i], tags, sub);
  }
  write_file_atomic(out_dir / "report.txt", o.report + "\n");
  return o.pass ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-field fracture with strength-based nucleation"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation described by a config file");
  run_cmd->add_option("config", run.config, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--output-dir", run.output_dir, "Output directory (overrides output.dir)");
  run_cmd->add_flag("-q,--quiet", run.quiet, "Do not print per-step progress");

  std::string info_config;
  auto* info_cmd = app.add_subcommand("material-info", "Print derived constants, strengths and the eps check");
  info_cmd->add_option("config", info_config, "Config file")->required()->check(CLI::ExistingFile);

  GradientArgs grad;
  auto* grad_cmd = app.add_subcommand("check-gradients", "Finite-difference check of residuals and tangents");
  grad_cmd->add_option("config", grad.config, "Config file")->required()->check(CLI::ExistingFile);
  grad_cmd->add_option("--samples", grad.samples, "Random (u, v) pairs")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--seed", grad.seed, "Random seed");
  grad_cmd->add_option("--nx", grad.nx, "Elements along x")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--ny", grad.ny, "Elements along y")->check(CLI::PositiveNumber);

  ScenarioArgs sc;
  auto* sc_cmd = app.add_subcommand("scenario", "Run a bundled benchmark and compare with its oracle");
  sc_cmd->add_option("name", sc.name, "Scenario name");
  sc_cmd->add_option("--scenario-dir", sc.scenario_dir, "Directory of scenario presets");
  sc_cmd->add_option("-o,--output-dir", sc.output_dir, "Output directory");
  sc_cmd->add_flag("--list", sc.list, "List the bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*info_cmd) return cmd_material_info(info_config, out);
    if (*grad_cmd) return cmd_check_gradients(grad, out);
    if (*sc_cmd) return cmd_scenario(sc, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace pfrac
