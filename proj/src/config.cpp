#include "pfrac/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pfrac/errors.hpp"
#include "pfrac/textio.hpp"

namespace pfrac {

namespace {

// Raised by value parsers; the caller attaches source, line and key.
struct BadValue {
  std::string what;
};

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

// Items of a ';'-separated list, dropping empty entries.
std::vector<std::string> items(std::string_view s) {
  std::vector<std::string> out;
  for (auto& it : split(s, ';')) {
    if (!it.empty()) out.push_back(std::move(it));
  }
  return out;
}

double to_double(std::string_view s) {
  double v = 0.0;
  if (!parse_double(trim(s), v)) throw BadValue{"expected a number, got '" + std::string(s) + "'"};
  return v;
}

int to_int(std::string_view s) {
  long long v = 0;
  if (!parse_int(trim(s), v) || v < -2147483647LL || v > 2147483647LL) {
    throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
  }
  return static_cast<int>(v);
}

bool to_bool(std::string_view s) {
  const auto t = trim(s);
  if (t == "true") return true;
  if (t == "false") return false;
  throw BadValue{"expected true or false, got '" + std::string(s) + "'"};
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::vector<double> to_doubles(std::string_view s) {
  std::vector<double> out;
  std::string t(s);
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok));
  return out;
}

std::string from_doubles(const std::vector<double>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + format_double(v[i]);
  return out;
}

std::vector<std::pair<double, int>> to_segments(std::string_view s) {
  std::vector<std::pair<double, int>> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw BadValue{"segment '" + item + "' is not length:count"};
    out.emplace_back(to_double(parts[0]), to_int(parts[1]));
  }
  return out;
}

std::string from_segments(const std::vector<std::pair<double, int>>& segs) {
  std::string out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    out += (i ? ", " : "") + format_double(segs[i].first) + ":" + std::to_string(segs[i].second);
  }
  return out;
}

int to_component(std::string_view s) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  throw BadValue{"component must be x or y, got '" + std::string(s) + "'"};
}

Point2 to_point(std::string_view s) {
  const auto v = to_doubles(s);
  if (v.size() != 2) throw BadValue{"expected two numbers"};
  return {v[0], v[1]};
}

std::string from_point(const Point2& p) { return format_double(p.x) + ", " + format_double(p.y); }

std::string tolerance_or_auto(double v) { return v > 0.0 ? format_double(v) : "auto"; }

double parse_tolerance_or_auto(std::string_view s) {
  if (trim(s) == "auto") return 0.0;
  const double v = to_double(s);
  if (!(v > 0.0)) throw BadValue{"must be positive or auto"};
  return v;
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PFRAC_DOUBLE(key, member)                                                              \
  Key {                                                                                        \
    key, [](RunConfig& c, const std::string& s) { c.member = to_double(s); },                 \
        [](const RunConfig& c) { return format_double(c.member); }                             \
  }
#define PFRAC_INT(key, member)                                                                 \
  Key {                                                                                        \
    key, [](RunConfig& c, const std::string& s) { c.member = to_int(s); },                    \
        [](const RunConfig& c) { return std::to_string(c.member); }                            \
  }
#define PFRAC_BOOL(key, member)                                                                \
  Key {                                                                                        \
    key, [](RunConfig& c, const std::string& s) { c.member = to_bool(s); },                   \
        [](const RunConfig& c) { return from_bool(c.member); }                                 \
  }
#define PFRAC_STRING(key, member)                                                              \
  Key {                                                                                        \
    key, [](RunConfig& c, const std::string& s) { c.member = s; },                             \
        [](const RunConfig& c) { return c.member; }                                            \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      PFRAC_DOUBLE("material.mu", material.mu),
      PFRAC_DOUBLE("material.lambda", material.lambda),
      PFRAC_DOUBLE("material.sigma_ts", material.sigma_ts),
      PFRAC_DOUBLE("material.sigma_hs", material.sigma_hs),
      PFRAC_DOUBLE("material.g_c", material.g_c),
      // eps and eps_factor are alternatives; the writer emits whichever is in use.
      PFRAC_DOUBLE("material.eps", material.eps),
      PFRAC_DOUBLE("material.eps_factor", eps_factor),
      PFRAC_DOUBLE("material.eta_eps", material.eta_eps),
      Key{"material.delta_eps",
          [](RunConfig& c, const std::string& s) {
            if (s == "auto") {
              c.delta_eps_auto = true;
            } else {
              c.delta_eps_auto = false;
              c.material.delta_eps = to_double(s);
            }
          },
          [](const RunConfig& c) { return c.delta_eps_auto ? std::string("auto") : format_double(c.material.delta_eps); }},

      PFRAC_STRING("mesh.file", mesh.file),
      PFRAC_DOUBLE("mesh.width", mesh.width),
      PFRAC_DOUBLE("mesh.height", mesh.height),
      PFRAC_INT("mesh.nx", mesh.nx),
      PFRAC_INT("mesh.ny", mesh.ny),
      Key{"mesh.x_segments", [](RunConfig& c, const std::string& s) { c.mesh.x_segments = to_segments(s); },
          [](const RunConfig& c) { return from_segments(c.mesh.x_segments); }},
      Key{"mesh.y_segments", [](RunConfig& c, const std::string& s) { c.mesh.y_segments = to_segments(s); },
          [](const RunConfig& c) { return from_segments(c.mesh.y_segments); }},
      Key{"mesh.node_sets",
          [](RunConfig& c, const std::string& s) {
            c.mesh.node_boxes.clear();
            for (const auto& item : items(s)) {
              const auto p = split(item, ':');
              if (p.size() != 5 || p[0].empty()) throw BadValue{"node set '" + item + "' is not name:x0:x1:y0:y1"};
              c.mesh.node_boxes.push_back({p[0], to_double(p[1]), to_double(p[2]), to_double(p[3]), to_double(p[4])});
            }
          },
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.mesh.node_boxes.size(); ++i) {
              const auto& b = c.mesh.node_boxes[i];
              out += (i ? "; " : "") + b.name + ":" + format_double(b.x0) + ":" + format_double(b.x1) + ":" +
                     format_double(b.y0) + ":" + format_double(b.y1);
            }
            return out;
          }},
      PFRAC_STRING("mesh.notch_mode", mesh.notch_mode),
      Key{"mesh.notch_tip", [](RunConfig& c, const std::string& s) { c.mesh.notch_tip = to_point(s); },
          [](const RunConfig& c) { return from_point(c.mesh.notch_tip); }},
      Key{"mesh.notch_direction", [](RunConfig& c, const std::string& s) { c.mesh.notch_direction = to_point(s); },
          [](const RunConfig& c) { return from_point(c.mesh.notch_direction); }},
      PFRAC_DOUBLE("mesh.notch_length", mesh.notch_length),
      PFRAC_DOUBLE("mesh.notch_band_width", mesh.notch_band_width),

      PFRAC_STRING("initial.defect_box", initial.defect_box),
      PFRAC_DOUBLE("initial.defect_value", initial.defect_value),

      Key{"loading.dirichlet",
          [](RunConfig& c, const std::string& s) {
            c.loading.dirichlet.clear();
            for (const auto& item : items(s)) {
              const auto p = split(item, ':');
              if (p.size() != 3 || p[0].empty()) throw BadValue{"condition '" + item + "' is not tag:x|y:value"};
              c.loading.dirichlet.push_back({p[0], to_component(p[1]), to_double(p[2])});
            }
          },
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.loading.dirichlet.size(); ++i) {
              const auto& d = c.loading.dirichlet[i];
              out += (i ? "; " : "") + d.tag + ":" + (d.component == 0 ? "x" : "y") + ":" + format_double(d.value);
            }
            return out;
          }},
      Key{"loading.traction",
          [](RunConfig& c, const std::string& s) {
            c.loading.tractions.clear();
            for (const auto& item : items(s)) {
              const auto p = split(item, ':');
              if (p.size() != 3 || p[0].empty()) throw BadValue{"traction '" + item + "' is not tag:tx:ty"};
              c.loading.tractions.push_back({p[0], to_double(p[1]), to_double(p[2])});
            }
          },
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.loading.tractions.size(); ++i) {
              const auto& t = c.loading.tractions[i];
              out += (i ? "; " : "") + t.tag + ":" + format_double(t.tx) + ":" + format_double(t.ty);
            }
            return out;
          }},
      Key{"loading.body_force",
          [](RunConfig& c, const std::string& s) {
            const auto v = to_doubles(s);
            if (v.size() != 2) throw BadValue{"expected two numbers"};
            c.loading.body_force = {v[0], v[1]};
          },
          [](const RunConfig& c) {
            return format_double(c.loading.body_force[0]) + ", " + format_double(c.loading.body_force[1]);
          }},
      PFRAC_DOUBLE("loading.start", loading.start),
      PFRAC_DOUBLE("loading.end", loading.end),
      PFRAC_INT("loading.num_steps", loading.num_steps),
      Key{"loading.scales", [](RunConfig& c, const std::string& s) { c.loading.scales = to_doubles(s); },
          [](const RunConfig& c) { return from_doubles(c.loading.scales); }},
      PFRAC_BOOL("loading.monotone", loading.monotone),

      Key{"solver.mode",
          [](RunConfig& c, const std::string& s) {
            if (s == "strength") {
              c.mode = FractureModel::Strength;
            } else if (s == "griffith") {
              c.mode = FractureModel::Griffith;
            } else {
              throw BadValue{"mode must be strength or griffith"};
            }
          },
          [](const RunConfig& c) { return mode_name(c.mode); }},
      PFRAC_DOUBLE("solver.stagger_tol", solver.stagger_tol),
      PFRAC_DOUBLE("solver.energy_rel_tol", solver.energy_rel_tol),
      PFRAC_INT("solver.max_stagger", solver.max_stagger),
      PFRAC_DOUBLE("solver.u_tol", solver.u_tol),
      Key{"solver.linear",
          [](RunConfig& c, const std::string& s) {
            if (s == "cholesky") {
              c.solver.linear = LinearSolverKind::Cholesky;
            } else if (s == "cg") {
              c.solver.linear = LinearSolverKind::ConjugateGradient;
            } else {
              throw BadValue{"linear must be cholesky or cg"};
            }
          },
          [](const RunConfig& c) {
            return std::string(c.solver.linear == LinearSolverKind::Cholesky ? "cholesky" : "cg");
          }},
      Key{"solver.v_tol", [](RunConfig& c, const std::string& s) { c.solver.v_tol = parse_tolerance_or_auto(s); },
          [](const RunConfig& c) { return tolerance_or_auto(c.solver.v_tol); }},
      PFRAC_INT("solver.v_max_iter", solver.v_max_iter),
      PFRAC_DOUBLE("solver.damage_threshold", solver.damage_threshold),
      PFRAC_DOUBLE("solver.monotone_rel_tol", solver.monotone_rel_tol),
      Key{"solver.on_nonconvergence",
          [](RunConfig& c, const std::string& s) {
            if (s == "abort") {
              c.solver.on_nonconvergence = NonConvergencePolicy::Abort;
            } else if (s == "continue") {
              c.solver.on_nonconvergence = NonConvergencePolicy::Continue;
            } else {
              throw BadValue{"on_nonconvergence must be abort or continue"};
            }
          },
          [](const RunConfig& c) {
            return std::string(c.solver.on_nonconvergence == NonConvergencePolicy::Abort ? "abort" : "continue");
          }},

      PFRAC_STRING("output.dir", output.dir),
      PFRAC_BOOL("output.vtk", output.vtk),
      PFRAC_BOOL("output.csv", output.csv),
      PFRAC_INT("output.vtk_every", output.vtk_every),

      PFRAC_STRING("scenario.kind", scenario.kind),
      PFRAC_DOUBLE("scenario.load_min", scenario.load_min),
      PFRAC_DOUBLE("scenario.load_max", scenario.load_max),
      PFRAC_INT("scenario.num_steps", scenario.num_steps),
      PFRAC_DOUBLE("scenario.nucleation_threshold", scenario.nucleation_threshold),
      PFRAC_DOUBLE("scenario.localization_fraction", scenario.localization_fraction),
      PFRAC_DOUBLE("scenario.tolerance", scenario.tolerance),
      PFRAC_DOUBLE("scenario.defect_value", scenario.defect_value),
      PFRAC_DOUBLE("scenario.notch_length", scenario.notch_length),
      PFRAC_DOUBLE("scenario.fine_size", scenario.fine_size),
      PFRAC_DOUBLE("scenario.fine_behind", scenario.fine_behind),
      PFRAC_DOUBLE("scenario.fine_ahead", scenario.fine_ahead),
      PFRAC_DOUBLE("scenario.fine_height", scenario.fine_height),
      PFRAC_DOUBLE("scenario.extension", scenario.extension),
      Key{"scenario.notch_lengths", [](RunConfig& c, const std::string& s) { c.scenario.notch_lengths = to_doubles(s); },
          [](const RunConfig& c) { return from_doubles(c.scenario.notch_lengths); }},
  };
  return table;
}

#undef PFRAC_DOUBLE
#undef PFRAC_INT
#undef PFRAC_BOOL
#undef PFRAC_STRING

const std::set<std::string> kScenarioKinds = {"uniaxial-tension", "compression", "shear", "biaxial", "sent",
                                              "notch-sweep"};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

std::array<double, 4> parse_box(const std::string& s) {
  const auto p = split(s, ':');
  if (p.size() != 4) throw ValidationError("initial.defect_box", "expected x0:x1:y0:y1");
  std::array<double, 4> b{};
  for (int i = 0; i < 4; ++i) {
    if (!parse_double(p[i], b[i])) throw ValidationError("initial.defect_box", "expected x0:x1:y0:y1");
  }
  return b;
}

}  // namespace

std::string mode_name(FractureModel m) { return m == FractureModel::Strength ? "strength" : "griffith"; }

void resolve_and_validate(RunConfig& c) {
  c.warnings.clear();
  MaterialParams& m = c.material;
  if (c.eps_factor != 0.0) {
    require(c.eps_factor > 0.0 && std::isfinite(c.eps_factor), "material.eps_factor", "must be positive");
    require(m.g_c > 0.0 && std::isfinite(m.g_c), "g_c", "must be positive and finite");
    // eps_recommended_max does not depend on eps; any positive placeholder works.
    MaterialParams probe = m;
    probe.eps = 1.0;
    probe.delta_eps = 1.0;
    validate(probe);
    m.eps = c.eps_factor * derive_constants(probe).eps_recommended_max;
  }
  if (c.delta_eps_auto) {
    MaterialParams probe = m;
    probe.delta_eps = 1.0;
    validate(probe);
    m.delta_eps = fallback_delta_eps(m);
  }
  for (auto& w : validate(m)) c.warnings.push_back(std::move(w));
  const EpsCheck eps = check_eps(m, derive_constants(m));
  if (!eps.pass) c.warnings.push_back(eps.message());

  const MeshConfig& mc = c.mesh;
  if (mc.file.empty()) {
    if (mc.x_segments.empty()) {
      require(mc.width > 0.0 && std::isfinite(mc.width), "mesh.width", "must be positive");
      require(mc.nx >= 1, "mesh.nx", "must be at least 1");
    }
    if (mc.y_segments.empty()) {
      require(mc.height > 0.0 && std::isfinite(mc.height), "mesh.height", "must be positive");
      require(mc.ny >= 1, "mesh.ny", "must be at least 1");
    }
    for (const auto& [len, n] : mc.x_segments) require(len > 0.0 && n >= 1, "mesh.x_segments", "need length > 0, count >= 1");
    for (const auto& [len, n] : mc.y_segments) require(len > 0.0 && n >= 1, "mesh.y_segments", "need length > 0, count >= 1");
  }
  for (const auto& b : mc.node_boxes) {
    require(b.x0 <= b.x1 && b.y0 <= b.y1, "mesh.node_sets", "box '" + b.name + "' has inverted bounds");
  }
  require(mc.notch_mode == "none" || mc.notch_mode == "phase-field" || mc.notch_mode == "slit", "mesh.notch_mode",
          "must be none, phase-field or slit");
  if (mc.notch_mode != "none") {
    require(mc.notch_length > 0.0, "mesh.notch_length", "must be positive");
    require(std::hypot(mc.notch_direction.x, mc.notch_direction.y) > 0.0, "mesh.notch_direction", "must be nonzero");
    if (mc.notch_mode == "phase-field") {
      require(mc.notch_band_width > 0.0, "mesh.notch_band_width", "must be positive for a phase-field notch");
    }
  }
  if (!c.initial.defect_box.empty()) parse_box(c.initial.defect_box);
  require(c.initial.defect_value >= 0.0 && c.initial.defect_value <= 1.0, "initial.defect_value", "must lie in [0, 1]");

  const LoadingConfig& l = c.loading;
  for (const auto& d : l.dirichlet) require(d.component == 0 || d.component == 1, "loading.dirichlet", "bad component");
  require(std::isfinite(l.body_force[0]) && std::isfinite(l.body_force[1]), "loading.body_force", "must be finite");
  if (l.scales.empty()) {
    require(l.num_steps >= 1, "loading.num_steps", "must be at least 1");
    require(std::isfinite(l.start) && std::isfinite(l.end), "loading", "start and end must be finite");
    if (l.monotone) require(l.end >= l.start, "loading.end", "must not be below loading.start for a monotone program");
  } else {
    LoadProgram p;
    p.scales = l.scales;
    p.monotone = l.monotone;
    p.validate();
  }

  const StaggerOptions& s = c.solver;
  require(s.stagger_tol > 0.0, "solver.stagger_tol", "must be positive");
  require(s.energy_rel_tol > 0.0, "solver.energy_rel_tol", "must be positive");
  require(s.max_stagger >= 1, "solver.max_stagger", "must be at least 1");
  require(s.u_tol > 0.0, "solver.u_tol", "must be positive");
  require(s.v_max_iter >= 1, "solver.v_max_iter", "must be at least 1");
  require(s.damage_threshold > 0.0 && s.damage_threshold < 1.0, "solver.damage_threshold", "must lie in (0, 1)");
  require(s.monotone_rel_tol >= 0.0, "solver.monotone_rel_tol", "must be non-negative");
  require(c.output.vtk_every >= 1, "output.vtk_every", "must be at least 1");

  const ScenarioConfig& sc = c.scenario;
  if (!sc.kind.empty()) {
    require(kScenarioKinds.count(sc.kind) > 0, "scenario.kind", "unknown scenario kind '" + sc.kind + "'");
    require(sc.load_min >= 0.0 && sc.load_max > sc.load_min, "scenario.load_max", "need 0 <= load_min < load_max");
    require(sc.num_steps >= 2, "scenario.num_steps", "must be at least 2");
    require(sc.nucleation_threshold > 0.0 && sc.nucleation_threshold < 1.0, "scenario.nucleation_threshold",
            "must lie in (0, 1)");
    require(sc.localization_fraction > 0.0 && sc.localization_fraction <= 1.0, "scenario.localization_fraction",
            "must lie in (0, 1]");
    require(sc.tolerance > 0.0, "scenario.tolerance", "must be positive");
    require(sc.defect_value > 0.0 && sc.defect_value <= 1.0, "scenario.defect_value", "must lie in (0, 1]");
    if (sc.kind == "sent") {
      require(sc.notch_length > 0.0, "scenario.notch_length", "must be positive");
      require(sc.extension > 0.0, "scenario.extension", "must be positive");
    }
    if (sc.kind == "notch-sweep") {
      require(sc.notch_lengths.size() >= 2, "scenario.notch_lengths", "need at least two notch lengths");
      require(sc.extension > 0.0, "scenario.extension", "must be positive");
    }
    require(c.loading.dirichlet.empty() && c.loading.tractions.empty(), "loading",
            "scenario configs generate their own boundary conditions");
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  std::map<std::string, const Key*> index;
  for (const auto& k : keys()) index[k.name] = &k;

  RunConfig c;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line, "expected 'section.key = value'");
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    const auto it = index.find(key);
    if (it == index.end()) throw ParseError(source, line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(source, line, "key '" + key + "' given twice");
    try {
      it->second->set(c, value);
    } catch (const BadValue& e) {
      throw ParseError(source, line, key + ": " + e.what);
    }
  }

  for (const char* k : {"mu", "lambda", "sigma_ts", "sigma_hs", "g_c"}) {
    if (!seen.count(std::string("material.") + k)) throw ValidationError(k, "missing required key material." + std::string(k));
  }
  const bool has_eps = seen.count("material.eps") > 0;
  const bool has_factor = seen.count("material.eps_factor") > 0;
  if (has_eps == has_factor) throw ValidationError("eps", "give exactly one of material.eps and material.eps_factor");
  resolve_and_validate(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path.string());
  return parse_config_text(read_file(path), path.string());
}

std::string format_config(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (k.name == "material.eps" && c.eps_factor > 0.0) continue;
    if (k.name == "material.eps_factor" && !(c.eps_factor > 0.0)) continue;
    const std::string sec = k.name.substr(0, k.name.find('.'));
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "# " + sec + "\n";
      section = sec;
    }
    const std::string value = k.get(c);
    out += k.name + " =" + (value.empty() ? "" : " " + value) + "\n";
  }
  return out;
}

BuiltRun build_run(const RunConfig& c, const std::filesystem::path& base_dir) {
  BuiltRun run;
  const MeshConfig& mc = c.mesh;
  Mesh mesh = [&] {
    if (!mc.file.empty()) {
      std::filesystem::path p = mc.file;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      return import_mesh(p);
    }
    const auto xs = mc.x_segments.empty() ? segmented_coordinates(0.0, {{mc.width, mc.nx}})
                                          : segmented_coordinates(0.0, mc.x_segments);
    const auto ys = mc.y_segments.empty() ? segmented_coordinates(0.0, {{mc.height, mc.ny}})
                                          : segmented_coordinates(0.0, mc.y_segments);
    return generate_grid(xs, ys);
  }();

  std::vector<double> v0(mesh.num_nodes(), 1.0);
  if (mc.notch_mode != "none") {
    NotchSpec spec;
    spec.tip = mc.notch_tip;
    spec.direction = mc.notch_direction;
    spec.length = mc.notch_length;
    spec.mode = mc.notch_mode == "slit" ? NotchMode::Slit : NotchMode::PhaseField;
    spec.band_width = mc.notch_band_width;
    NotchedMesh nm = apply_notch(mesh, spec, c.material.eps);
    mesh = std::move(nm.mesh);
    v0 = std::move(nm.v0);
    for (auto& w : nm.warnings) run.warnings.push_back(std::move(w));
  }
  if (!mc.node_boxes.empty()) {
    NodeSets extra;
    for (const auto& b : mc.node_boxes) {
      extra[b.name] = nodes_in_box(mesh, b.x0, b.x1, b.y0, b.y1);
      if (extra[b.name].empty()) throw ValidationError("mesh.node_sets", "node set '" + b.name + "' selects no nodes");
    }
    mesh = with_node_sets(mesh, extra);
  }
  if (!c.initial.defect_box.empty()) {
    const auto b = parse_box(c.initial.defect_box);
    for (int i : nodes_in_box(mesh, b[0], b[1], b[2], b[3])) v0[i] = std::min(v0[i], c.initial.defect_value);
  }

  Problem& p = run.problem;
  p.disc = std::make_shared<Discretization>(std::move(mesh));
  p.material = c.material;
  p.derived = derive_constants(c.material);
  p.model = c.mode;
  p.dirichlet = c.loading.dirichlet;
  p.loads.tractions = c.loading.tractions;
  if (c.loading.body_force[0] != 0.0 || c.loading.body_force[1] != 0.0) {
    const auto b = c.loading.body_force;
    p.loads.body_force = [b](const Point2&) { return b; };
  }
  p.v0 = Eigen::Map<const Vector>(v0.data(), static_cast<Eigen::Index>(v0.size()));
  for (const auto& d : p.dirichlet) {
    if (!p.disc->mesh().has_tag(d.tag)) throw ValidationError("loading.dirichlet", "unknown tag '" + d.tag + "'");
  }
  for (const auto& t : p.loads.tractions) {
    if (!p.disc->mesh().has_tag(t.tag)) throw ValidationError("loading.traction", "unknown tag '" + t.tag + "'");
  }

  if (c.loading.scales.empty()) {
    run.program = LoadProgram::ramp(c.loading.start, c.loading.end, c.loading.num_steps);
  } else {
    run.program.scales = c.loading.scales;
  }
  run.program.monotone = c.loading.monotone;
  return run;
}

std::filesystem::path resolve_output_dir(const RunConfig& c, const std::string& stem) {
  if (!c.output.dir.empty()) return c.output.dir;
  if (const char* root = std::getenv("PFRAC_OUTPUT_DIR"); root && *root) return std::filesystem::path(root) / stem;
  return std::filesystem::path("pfrac-output") / stem;
}

}  // namespace pfrac
