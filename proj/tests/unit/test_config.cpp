#include <doctest.h>

#include <string>

#include "pfrac/config.hpp"
#include "pfrac/errors.hpp"

using namespace pfrac;

namespace {

const std::string kMaterial =
    "material.mu = 1000\n"
    "material.lambda = 1500\n"
    "material.sigma_ts = 1\n"
    "material.sigma_hs = 1\n"
    "material.g_c = 2e-4\n";

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string validation_field(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_config_text(kMaterial + "material.eps = 0.01\n");
  CHECK(c.material.eta_eps == 1e-5);
  CHECK(c.solver.stagger_tol == 1e-4);
  CHECK(c.mode == FractureModel::Strength);
  CHECK(c.delta_eps_auto);
  CHECK(c.material.delta_eps == doctest::Approx(fallback_delta_eps(c.material)));
  CHECK(c.output.vtk);
  CHECK(c.mesh.nx == 10);
  CHECK(c.scenario.kind.empty());
}

TEST_CASE("eps from a multiple of the recommended maximum") {
  const RunConfig c = parse_config_text(kMaterial + "material.eps_factor = 0.5\n");
  CHECK(c.material.eps == doctest::Approx(0.5 * derive_constants(c.material).eps_recommended_max));
  CHECK(c.warnings.empty());

  const RunConfig big = parse_config_text(kMaterial + "material.eps_factor = 2\n");
  CHECK_FALSE(big.warnings.empty());

  CHECK(validation_field(kMaterial) == "eps");
  CHECK(validation_field(kMaterial + "material.eps = 0.01\nmaterial.eps_factor = 0.5\n") == "eps");
}

TEST_CASE("explicit delta_eps") {
  const RunConfig c = parse_config_text(kMaterial + "material.eps = 0.01\nmaterial.delta_eps = 2.5\n");
  CHECK_FALSE(c.delta_eps_auto);
  CHECK(c.material.delta_eps == 2.5);
}

TEST_CASE("validation errors name the field") {
  std::string text = kMaterial + "material.eps = 0.01\n";
  text.replace(text.find("2e-4"), 4, "-1");
  CHECK(validation_field(text) == "g_c");

  std::string missing = kMaterial + "material.eps = 0.01\n";
  missing.erase(missing.find("material.mu"), std::string("material.mu = 1000\n").size());
  CHECK(validation_field(missing) == "mu");

  CHECK(validation_field(kMaterial + "material.eps = 0.01\nsolver.stagger_tol = 0\n") == "solver.stagger_tol");
  CHECK(validation_field(kMaterial + "material.eps = 0.01\nloading.start = 1\nloading.end = 0\n") ==
        "loading.end");
}

TEST_CASE("degenerate strength surface is a hard error") {
  const std::string text =
      "material.mu = 1000\nmaterial.lambda = 1500\nmaterial.sigma_ts = 3\nmaterial.sigma_hs = 1\n"
      "material.g_c = 2e-4\nmaterial.eps = 0.01\n";
  try {
    parse_config_text(text);
    FAIL("degenerate surface accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Drucker-Prager") != std::string::npos);
  }
}

TEST_CASE("strict parsing") {
  const std::string base = kMaterial + "material.eps = 0.01\n";
  CHECK(parse_error_line(base + "material.typo = 1\n") == 7);
  CHECK(parse_error_line(base + "# comment\nmaterial.mu = 5\n") == 8);
  CHECK(parse_error_line(base + "mesh.nx = ten\n") == 7);
  CHECK(parse_error_line(base + "mesh.nx = 3.5\n") == 7);
  CHECK(parse_error_line(base + "just some words\n") == 7);
  CHECK(parse_error_line(base + "solver.mode = fancy\n") == 7);
  CHECK(parse_error_line(base + "loading.dirichlet = left:z:0\n") == 7);
  CHECK(parse_error_line(base + "output.vtk = maybe\n") == 7);
  CHECK_NOTHROW(parse_config_text(base + "   # indented comment\n\nmesh.nx = 3  # trailing comment\n"));
}

TEST_CASE("canonical writer round trip") {
  const std::string text = kMaterial +
                           "material.eps_factor = 0.3\n"
                           "mesh.width = 2\n"
                           "mesh.x_segments = 1:4, 1:8\n"
                           "mesh.ny = 3\n"
                           "mesh.node_sets = pin:0:0:0:0; mid:0.5:1.5:0:1\n"
                           "mesh.notch_mode = phase-field\n"
                           "mesh.notch_tip = 0.5, 0.5\n"
                           "mesh.notch_length = 0.5\n"
                           "mesh.notch_band_width = 0.1\n"
                           "initial.defect_box = 0.9:1.1:0:1\n"
                           "initial.defect_value = 0.99\n"
                           "loading.dirichlet = left:x:0; pin:y:0; right:x:0.1\n"
                           "loading.traction = top:0:0.25\n"
                           "loading.body_force = 0, -0.1\n"
                           "loading.scales = 0, 0.1, 0.30000000000000004, 1\n"
                           "solver.mode = griffith\n"
                           "solver.linear = cg\n"
                           "solver.v_tol = 1e-9\n"
                           "solver.on_nonconvergence = continue\n"
                           "output.dir = out/run\n"
                           "output.vtk_every = 3\n";
  const RunConfig a = parse_config_text(text);
  const std::string canonical = format_config(a);
  const RunConfig b = parse_config_text(canonical);
  CHECK(a == b);
  CHECK(format_config(b) == canonical);
  CHECK(canonical.find("material.eps_factor = 0.3") != std::string::npos);
  CHECK(canonical.find("0.30000000000000004") != std::string::npos);
  CHECK(b.loading.dirichlet.size() == 3);
  CHECK(b.mesh.node_boxes.size() == 2);

  const RunConfig d = parse_config_text(kMaterial + "material.eps = 0.0123\n");
  CHECK(parse_config_text(format_config(d)) == d);
}

TEST_CASE("scenario blocks") {
  const std::string base = kMaterial + "material.eps_factor = 0.5\n";
  const RunConfig c = parse_config_text(base + "scenario.kind = uniaxial-tension\nscenario.tolerance = 0.05\n");
  CHECK(c.scenario.kind == "uniaxial-tension");
  CHECK(validation_field(base + "scenario.kind = mystery\n") == "scenario.kind");
  CHECK(validation_field(base + "scenario.kind = sent\n") == "scenario.notch_length");
  CHECK(validation_field(base + "scenario.kind = shear\nloading.dirichlet = left:x:0\n") == "loading");
}

TEST_CASE("build_run assembles the problem") {
  const RunConfig c = parse_config_text(kMaterial +
                                        "material.eps = 0.05\n"
                                        "mesh.nx = 4\nmesh.ny = 4\n"
                                        "mesh.node_sets = pin:0:0:0:0\n"
                                        "initial.defect_box = 0.5:0.5:0:1\n"
                                        "initial.defect_value = 0.9\n"
                                        "loading.dirichlet = left:x:0; pin:y:0\n"
                                        "loading.traction = right:0.5:0\n"
                                        "loading.num_steps = 4\n");
  const BuiltRun r = build_run(c);
  CHECK(r.problem.disc->num_nodes() == 25);
  CHECK(r.program.scales.size() == 4);
  CHECK(r.problem.dirichlet.size() == 2);
  CHECK(r.problem.v0.minCoeff() == doctest::Approx(0.9));
  CHECK((r.problem.v0.array() < 1.0).count() == 5);

  const RunConfig bad = parse_config_text(kMaterial + "material.eps = 0.05\nloading.dirichlet = nowhere:x:0\n");
  CHECK_THROWS(build_run(bad));
}

TEST_CASE("output directory resolution") {
  RunConfig c = parse_config_text(kMaterial + "material.eps = 0.05\n");
  c.output.dir = "explicit";
  CHECK(resolve_output_dir(c, "stem") == std::filesystem::path("explicit"));
}
