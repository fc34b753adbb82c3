// 2D meshes of 4-node bilinear quadrilaterals with tagged boundary facets.
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pfrac {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

using Quad = std::array<int, 4>;  // counter-clockwise node indices

struct Facet {
  int n0 = 0;
  int n1 = 0;
  std::string tag;
  friend bool operator==(const Facet&, const Facet&) = default;
};

using NodeSets = std::map<std::string, std::vector<int>>;

/// Validated, immutable mesh. The constructor checks index ranges, positive
/// corner Jacobians and that every facet is a boundary edge of one element.
class Mesh {
 public:
  Mesh(std::vector<Point2> nodes, std::vector<Quad> elements, std::vector<Facet> facets, NodeSets node_sets);

  const std::vector<Point2>& nodes() const { return nodes_; }
  const std::vector<Quad>& elements() const { return elements_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const NodeSets& node_sets() const { return node_sets_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return elements_.size(); }

  bool has_tag(const std::string& tag) const;
  /// Nodes of the named node set, or of the facets carrying `tag` when no
  /// node set with that name exists. Throws MeshError for unknown names.
  std::vector<int> nodes_on(const std::string& tag) const;

  double area() const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  std::vector<Point2> nodes_;
  std::vector<Quad> elements_;
  std::vector<Facet> facets_;
  NodeSets node_sets_;
};

/// Structured grid from explicit, strictly increasing coordinate lines.
/// Sides are tagged "left", "right", "bottom", "top" both as facets and node sets.
Mesh generate_grid(const std::vector<double>& xs, const std::vector<double>& ys);

/// Copy of `mesh` with extra node sets; existing sets of the same name are replaced.
Mesh with_node_sets(const Mesh& mesh, const NodeSets& extra);

/// Nodes with x0 <= x <= x1 and y0 <= y <= y1, up to a small relative tolerance.
std::vector<int> nodes_in_box(const Mesh& mesh, double x0, double x1, double y0, double y1);

/// Uniform nx-by-ny grid on [0, width] x [0, height].
Mesh generate_rect(double width, double height, int nx, int ny);

/// Coordinate line made of consecutive uniform segments given as (length, count).
std::vector<double> segmented_coordinates(double origin, const std::vector<std::pair<double, int>>& segments);

enum class NotchMode { PhaseField, Slit };

struct NotchSpec {
  Point2 tip;
  Point2 direction{1.0, 0.0};  ///< from the mouth towards the tip
  double length = 0.0;
  NotchMode mode = NotchMode::PhaseField;
  double band_width = 0.0;  ///< phase-field mode only: full width of the v0 = 0 band
};

struct NotchedMesh {
  Mesh mesh;
  std::vector<double> v0;  ///< initial phase field, one value per node
  std::vector<std::string> warnings;
};

/// Inserts a notch. Phase-field mode sets v0 = 0 within band_width/2 of the
/// notch segment; slit mode duplicates the nodes along the cut (all but the
/// tip) and tags the new crack faces "notch". `eps` is used only for the
/// band-width warning.
NotchedMesh apply_notch(const Mesh& mesh, const NotchSpec& spec, double eps);

/// Plain-text `pfrac-mesh v1` format.
void export_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const Mesh& mesh);
Mesh import_mesh(const std::filesystem::path& path);
Mesh parse_mesh(const std::string& text, const std::string& source = "<mesh>");

}  // namespace pfrac
