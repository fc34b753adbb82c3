#include "pfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "pfrac/errors.hpp"
#include "pfrac/textio.hpp"

namespace pfrac {

namespace {

double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
Point2 sub(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }

using EdgeKey = std::pair<int, int>;
EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Element indices adjacent to each undirected edge.
std::map<EdgeKey, std::vector<int>> edge_elements(const std::vector<Quad>& elements) {
  std::map<EdgeKey, std::vector<int>> edges;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const Quad& q = elements[e];
    for (int i = 0; i < 4; ++i) {
      edges[edge_key(q[i], q[(i + 1) % 4])].push_back(static_cast<int>(e));
    }
  }
  return edges;
}

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = sub(b, a);
  const Point2 ap = sub(p, a);
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = len2 > 0.0 ? (ap.x * ab.x + ap.y * ab.y) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = ap.x - t * ab.x;
  const double dy = ap.y - t * ab.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Convex quads (guaranteed by the corner-Jacobian check): inside or on edge.
bool point_in_quad(const Point2& p, const std::array<Point2, 4>& c, double tol) {
  for (int i = 0; i < 4; ++i) {
    const Point2 edge = sub(c[(i + 1) % 4], c[i]);
    const double len = std::hypot(edge.x, edge.y);
    if (cross(edge, sub(p, c[i])) < -tol * len) return false;
  }
  return true;
}

double mesh_extent(const std::vector<Point2>& nodes) {
  if (nodes.empty()) return 1.0;
  double xmin = nodes[0].x, xmax = nodes[0].x, ymin = nodes[0].y, ymax = nodes[0].y;
  for (const auto& p : nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::max({xmax - xmin, ymax - ymin, 1e-300});
}

std::array<Point2, 4> corners(const Mesh& mesh, const Quad& q) {
  const auto& n = mesh.nodes();
  return {n[q[0]], n[q[1]], n[q[2]], n[q[3]]};
}

bool inside_mesh(const Mesh& mesh, const Point2& p) {
  const double tol = 1e-10 * mesh_extent(mesh.nodes());
  for (const auto& q : mesh.elements()) {
    if (point_in_quad(p, corners(mesh, q), tol)) return true;
  }
  return false;
}

}  // namespace

Mesh::Mesh(std::vector<Point2> nodes, std::vector<Quad> elements, std::vector<Facet> facets, NodeSets node_sets)
    : nodes_(std::move(nodes)), elements_(std::move(elements)), facets_(std::move(facets)),
      node_sets_(std::move(node_sets)) {
  const int n = static_cast<int>(nodes_.size());
  auto in_range = [n](int i) { return i >= 0 && i < n; };

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].y)) {
      throw MeshError("node " + std::to_string(i) + " has non-finite coordinates");
    }
  }
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Quad& q = elements_[e];
    for (int i = 0; i < 4; ++i) {
      if (!in_range(q[i])) throw MeshError("element " + std::to_string(e) + " references node out of range");
    }
    for (int i = 0; i < 4; ++i) {
      const Point2& p = nodes_[q[i]];
      const Point2 next = sub(nodes_[q[(i + 1) % 4]], p);
      const Point2 prev = sub(nodes_[q[(i + 3) % 4]], p);
      if (!(cross(next, prev) > 0.0)) {
        throw MeshError("element " + std::to_string(e) + " has a non-positive Jacobian at corner " +
                        std::to_string(i) + " (inverted or degenerate)");
      }
    }
  }

  const auto edges = edge_elements(elements_);
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    const Facet& fc = facets_[f];
    if (!in_range(fc.n0) || !in_range(fc.n1)) {
      throw MeshError("facet " + std::to_string(f) + " references node out of range");
    }
    if (fc.tag.empty()) throw MeshError("facet " + std::to_string(f) + " has an empty tag");
    const auto it = edges.find(edge_key(fc.n0, fc.n1));
    if (it == edges.end()) throw MeshError("facet " + std::to_string(f) + " is not an element edge");
    if (it->second.size() != 1) throw MeshError("facet " + std::to_string(f) + " is not on the boundary");
  }
  for (const auto& [name, ids] : node_sets_) {
    if (name.empty()) throw MeshError("node set with empty name");
    for (int i : ids) {
      if (!in_range(i)) throw MeshError("node set '" + name + "' references node out of range");
    }
  }
}

bool Mesh::has_tag(const std::string& tag) const {
  if (node_sets_.count(tag)) return true;
  return std::any_of(facets_.begin(), facets_.end(), [&](const Facet& f) { return f.tag == tag; });
}

std::vector<int> Mesh::nodes_on(const std::string& tag) const {
  if (const auto it = node_sets_.find(tag); it != node_sets_.end()) return it->second;
  std::set<int> ids;
  for (const auto& f : facets_) {
    if (f.tag == tag) {
      ids.insert(f.n0);
      ids.insert(f.n1);
    }
  }
  if (ids.empty()) throw MeshError("unknown boundary tag '" + tag + "'");
  return {ids.begin(), ids.end()};
}

double Mesh::area() const {
  double a = 0.0;
  for (const auto& q : elements_) {
    // shoelace
    for (int i = 0; i < 4; ++i) a += 0.5 * cross(nodes_[q[i]], nodes_[q[(i + 1) % 4]]);
  }
  return a;
}

std::vector<double> segmented_coordinates(double origin, const std::vector<std::pair<double, int>>& segments) {
  std::vector<double> xs{origin};
  double start = origin;
  for (const auto& [length, count] : segments) {
    if (!(length > 0.0) || count < 1) throw ValidationError("mesh.segments", "segments need length > 0 and count >= 1");
    for (int i = 1; i <= count; ++i) xs.push_back(start + length * i / count);
    start += length;
  }
  return xs;
}

Mesh generate_grid(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2 || ys.size() < 2) throw ValidationError("mesh", "need at least one element per direction");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ValidationError("mesh", "x coordinates must be strictly increasing");
  }
  for (std::size_t j = 1; j < ys.size(); ++j) {
    if (!(ys[j] > ys[j - 1])) throw ValidationError("mesh", "y coordinates must be strictly increasing");
  }
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<Point2> nodes;
  nodes.reserve(xs.size() * ys.size());
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) nodes.push_back({xs[i], ys[j]});
  }
  std::vector<Quad> elements;
  elements.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  }

  std::vector<Facet> facets;
  NodeSets sets;
  for (int i = 0; i < nx; ++i) facets.push_back({id(i, 0), id(i + 1, 0), "bottom"});
  for (int j = 0; j < ny; ++j) facets.push_back({id(nx, j), id(nx, j + 1), "right"});
  for (int i = nx; i > 0; --i) facets.push_back({id(i, ny), id(i - 1, ny), "top"});
  for (int j = ny; j > 0; --j) facets.push_back({id(0, j), id(0, j - 1), "left"});
  for (int i = 0; i <= nx; ++i) {
    sets["bottom"].push_back(id(i, 0));
    sets["top"].push_back(id(i, ny));
  }
  for (int j = 0; j <= ny; ++j) {
    sets["left"].push_back(id(0, j));
    sets["right"].push_back(id(nx, j));
  }
  return Mesh(std::move(nodes), std::move(elements), std::move(facets), std::move(sets));
}

Mesh generate_rect(double width, double height, int nx, int ny) {
  if (!(width > 0.0)) throw ValidationError("mesh.width", "must be positive");
  if (!(height > 0.0)) throw ValidationError("mesh.height", "must be positive");
  if (nx < 1) throw ValidationError("mesh.nx", "must be at least 1");
  if (ny < 1) throw ValidationError("mesh.ny", "must be at least 1");
  return generate_grid(segmented_coordinates(0.0, {{width, nx}}), segmented_coordinates(0.0, {{height, ny}}));
}

Mesh with_node_sets(const Mesh& mesh, const NodeSets& extra) {
  NodeSets sets = mesh.node_sets();
  for (const auto& [name, ids] : extra) sets[name] = ids;
  return Mesh(mesh.nodes(), mesh.elements(), mesh.facets(), std::move(sets));
}

std::vector<int> nodes_in_box(const Mesh& mesh, double x0, double x1, double y0, double y1) {
  const double tol = 1e-9 * mesh_extent(mesh.nodes());
  std::vector<int> ids;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Point2& p = mesh.nodes()[i];
    if (p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

NotchedMesh apply_notch(const Mesh& mesh, const NotchSpec& spec, double eps) {
  const double dlen = std::hypot(spec.direction.x, spec.direction.y);
  if (!(dlen > 0.0)) throw ValidationError("notch.direction", "must be a non-zero vector");
  if (!(spec.length >= 0.0)) throw ValidationError("notch.length", "must be non-negative");
  const Point2 dir{spec.direction.x / dlen, spec.direction.y / dlen};
  const Point2 tip = spec.tip;
  const Point2 mouth{tip.x - spec.length * dir.x, tip.y - spec.length * dir.y};
  if (!inside_mesh(mesh, tip) || !inside_mesh(mesh, mouth)) {
    throw ValidationError("notch", "notch segment leaves the domain");
  }

  NotchedMesh out{mesh, std::vector<double>(mesh.num_nodes(), 1.0), {}};
  const auto& nodes = mesh.nodes();

  if (spec.mode == NotchMode::PhaseField) {
    if (!(spec.band_width > 0.0)) throw ValidationError("notch.band_width", "must be positive in phase-field mode");
    if (spec.band_width < 2.0 * eps) {
      out.warnings.emplace_back("notch band width is below 2 eps; the initial crack is under-resolved");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (distance_to_segment(nodes[i], mouth, tip) <= 0.5 * spec.band_width) out.v0[i] = 0.0;
    }
    return out;
  }

  // Slit mode.
  if (spec.length == 0.0) return out;
  const double tol = 1e-9 * mesh_extent(nodes);
  std::vector<bool> on_cut(nodes.size(), false);
  for (std::size_t i = 0; i < nodes.size(); ++i) on_cut[i] = distance_to_segment(nodes[i], mouth, tip) <= tol;

  const auto edges = edge_elements(mesh.elements());
  std::vector<EdgeKey> cut_edges;
  double covered = 0.0;
  for (const auto& [key, elems] : edges) {
    if (on_cut[key.first] && on_cut[key.second]) {
      if (elems.size() != 2) throw MeshError("slit notch runs along the domain boundary");
      cut_edges.push_back(key);
      covered += std::hypot(nodes[key.first].x - nodes[key.second].x, nodes[key.first].y - nodes[key.second].y);
    }
  }
  if (std::abs(covered - spec.length) > 1e-6 * spec.length) {
    throw MeshError("slit notch does not follow mesh lines");
  }

  std::set<int> boundary_nodes;
  for (const auto& [key, elems] : edges) {
    if (elems.size() == 1) {
      boundary_nodes.insert(key.first);
      boundary_nodes.insert(key.second);
    }
  }
  auto is_tip = [&](const Point2& p) { return std::hypot(p.x - tip.x, p.y - tip.y) <= tol; };
  auto is_mouth = [&](const Point2& p) { return std::hypot(p.x - mouth.x, p.y - mouth.y) <= tol; };

  std::vector<Point2> new_nodes = nodes;
  std::map<int, int> duplicate;  // original -> copy
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!on_cut[i] || is_tip(nodes[i])) continue;
    if (is_mouth(nodes[i]) && !boundary_nodes.count(static_cast<int>(i))) continue;  // interior slit end
    duplicate[static_cast<int>(i)] = static_cast<int>(new_nodes.size());
    new_nodes.push_back(nodes[i]);
  }

  auto upper_side = [&](int e) {
    const Quad& q = mesh.elements()[e];
    Point2 c{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
      c.x += 0.25 * nodes[q[k]].x;
      c.y += 0.25 * nodes[q[k]].y;
    }
    return cross(dir, sub(c, mouth)) > 0.0;
  };

  std::vector<Quad> elements = mesh.elements();
  for (std::size_t e = 0; e < elements.size(); ++e) {
    if (!upper_side(static_cast<int>(e))) continue;
    for (auto& n : elements[e]) {
      if (const auto it = duplicate.find(n); it != duplicate.end()) n = it->second;
    }
  }

  std::vector<Facet> facets;
  for (const auto& f : mesh.facets()) {
    Facet g = f;
    const int owner = edges.at(edge_key(f.n0, f.n1)).front();
    if (upper_side(owner)) {
      if (const auto it = duplicate.find(g.n0); it != duplicate.end()) g.n0 = it->second;
      if (const auto it = duplicate.find(g.n1); it != duplicate.end()) g.n1 = it->second;
    }
    facets.push_back(g);
  }
  std::set<int> notch_nodes;
  for (const auto& key : cut_edges) {
    facets.push_back({key.first, key.second, "notch"});
    auto up = [&](int n) {
      const auto it = duplicate.find(n);
      return it == duplicate.end() ? n : it->second;
    };
    facets.push_back({up(key.second), up(key.first), "notch"});
    for (int n : {key.first, key.second}) {
      notch_nodes.insert(n);
      notch_nodes.insert(up(n));
    }
  }

  NodeSets sets = mesh.node_sets();
  for (auto& [name, ids] : sets) {
    std::vector<int> extra;
    for (int i : ids) {
      if (const auto it = duplicate.find(i); it != duplicate.end()) extra.push_back(it->second);
    }
    ids.insert(ids.end(), extra.begin(), extra.end());
  }
  sets["notch"] = {notch_nodes.begin(), notch_nodes.end()};

  const std::size_t n_total = new_nodes.size();
  out.mesh = Mesh(std::move(new_nodes), std::move(elements), std::move(facets), std::move(sets));
  out.v0.assign(n_total, 1.0);
  return out;
}

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream os;
  os << "pfrac-mesh v1\n";
  os << "nodes " << mesh.num_nodes() << "\n";
  for (const auto& p : mesh.nodes()) os << format_double(p.x) << ' ' << format_double(p.y) << "\n";
  os << "elements " << mesh.num_elements() << "\n";
  for (const auto& q : mesh.elements()) os << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << "\n";
  os << "facets " << mesh.facets().size() << "\n";
  for (const auto& f : mesh.facets()) os << f.n0 << ' ' << f.n1 << ' ' << f.tag << "\n";
  for (const auto& [name, ids] : mesh.node_sets()) {
    os << "nodeset " << name << ' ' << ids.size() << "\n";
    for (int i : ids) os << i << "\n";
  }
  return os.str();
}

void export_mesh(const Mesh& mesh, const std::filesystem::path& path) { write_file_atomic(path, format_mesh(mesh)); }

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

class TokenStream {
 public:
  TokenStream(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, lineno});
    }
    last_line_ = lineno;
  }

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& next(const char* expecting) {
    if (done()) throw ParseError(source_, last_line_, std::string("unexpected end of file, expected ") + expecting);
    return tokens_[pos_++];
  }

  const Token& peek() const { return tokens_[pos_]; }

  void expect(const char* word) {
    const Token& t = next(word);
    if (t.text != word) throw ParseError(source_, t.line, std::string("expected '") + word + "', got '" + t.text + "'");
  }

  double number() {
    const Token& t = next("a number");
    double v = 0.0;
    if (!parse_double(t.text, v)) throw ParseError(source_, t.line, "invalid number '" + t.text + "'");
    return v;
  }

  long long integer(const char* what) {
    const Token& t = next(what);
    long long v = 0;
    if (!parse_int(t.text, v)) throw ParseError(source_, t.line, std::string("invalid ") + what + " '" + t.text + "'");
    return v;
  }

  std::size_t count(const char* what) {
    const std::size_t line = done() ? last_line_ : peek().line;
    const long long v = integer(what);
    if (v < 0) throw ParseError(source_, line, std::string("negative ") + what);
    return static_cast<std::size_t>(v);
  }

  const std::string& source() const { return source_; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 0;
  std::string source_;
};

}  // namespace

Mesh parse_mesh(const std::string& text, const std::string& source) {
  TokenStream ts(text, source);
  ts.expect("pfrac-mesh");
  ts.expect("v1");
  ts.expect("nodes");
  const std::size_t n = ts.count("node count");
  std::vector<Point2> nodes(n);
  for (auto& p : nodes) {
    p.x = ts.number();
    p.y = ts.number();
  }
  ts.expect("elements");
  const std::size_t m = ts.count("element count");
  std::vector<Quad> elements(m);
  for (auto& q : elements) {
    for (auto& i : q) i = static_cast<int>(ts.integer("node index"));
  }
  ts.expect("facets");
  const std::size_t k = ts.count("facet count");
  std::vector<Facet> facets(k);
  for (auto& f : facets) {
    f.n0 = static_cast<int>(ts.integer("node index"));
    f.n1 = static_cast<int>(ts.integer("node index"));
    f.tag = ts.next("facet tag").text;
  }
  NodeSets sets;
  while (!ts.done()) {
    ts.expect("nodeset");
    const std::string name = ts.next("node set name").text;
    const std::size_t c = ts.count("node set size");
    std::vector<int> ids(c);
    for (auto& i : ids) i = static_cast<int>(ts.integer("node index"));
    sets[name] = std::move(ids);
  }
  return Mesh(std::move(nodes), std::move(elements), std::move(facets), std::move(sets));
}

Mesh import_mesh(const std::filesystem::path& path) { return parse_mesh(read_file(path), path.string()); }

}  // namespace pfrac
