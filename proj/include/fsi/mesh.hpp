// SPDX-License-Identifier: Apache-2.0
//
// Structured 2D quadrilateral meshes with fluid/solid region tags and
// boundary groups, plus the nested hierarchy obtained by midpoint
// refinement. The fluid/solid decomposition is identical on every level.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace fsi {

enum class Region : std::uint8_t { Fluid = 0, Solid = 1, Clot = 2 };

inline bool region_is_solid(Region r) { return r != Region::Fluid; }

struct BoundaryFace {
  int element;
  int edge;  // local edge e: nodes (e, (e+1)%4)
  int group;
};

struct Mesh {
  std::vector<std::array<double, 2>> nodes;   // corner nodes
  std::vector<std::array<int, 4>> elements;   // counterclockwise corners
  std::vector<Region> element_region;
  std::vector<BoundaryFace> boundary_faces;
  std::vector<std::string> group_names;
  std::map<std::string, std::vector<int>> element_sets;  // named sets, e.g. "cavity"
  int level = 0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int group_id(const std::string& name) const;  // -1 when absent

  // Quadrature-validated element checks; throw on violations.
  void audit() const;
};

// Origin of a fine node in its coarse parent mesh.
struct NodeOrigin {
  enum class Kind : std::uint8_t { Corner, EdgeMidpoint, ElementCenter };
  Kind kind;
  int a = -1, b = -1;  // corner: a = coarse node; edge: (a,b) coarse nodes; center: a = coarse element
};

struct MeshHierarchy {
  std::vector<Mesh> levels;  // coarse -> fine
  // per level l >= 1: fine element -> coarse parent, fine node origin
  std::vector<std::vector<int>> parent_map;
  std::vector<std::vector<NodeOrigin>> node_origin;

  const Mesh& finest() const { return levels.back(); }
  int n_levels() const { return static_cast<int>(levels.size()); }
};

// Parametric coarse geometries. All lengths in meters.
struct GeometryCase {
  std::string name = "channel";  // channel | bulge | unit_square

  // channel / bulge
  double length = 0.01;
  double lumen_height = 0.002;
  double wall_thickness = 0.00025;
  int nx = 8;         // coarse elements along the channel
  int ny_fluid = 4;   // coarse element rows across the lumen
  int ny_wall = 1;    // coarse element rows per wall

  // circular-arc bulge of the upper wall (bulge only; 0 reduces to channel)
  double bulge_height = 0.0;
  double bulge_width = 0.004;
  double bulge_center = 0.005;

  // unit_square
  int unit_n = 2;
};

Mesh build_case(const GeometryCase& geo);
MeshHierarchy make_hierarchy(const GeometryCase& geo, int levels);

// Appends one midpoint-refined level.
void refine(MeshHierarchy& h);

// Area by 3x3 Gauss quadrature of the geometry Jacobian; throws
// ElementInversionError when the Jacobian is not positive everywhere.
double element_volume(const Mesh& mesh, int element);

// Same, with corner coordinates displaced by the given per-node offsets
// (used for deformed-configuration volumes).
double element_volume_displaced(const Mesh& mesh, int element,
                                const std::vector<std::array<double, 2>>& displacement);

// Legacy ASCII VTK export (unstructured grid). Optional per-node vector
// fields and per-element scalar fields are written as point/cell data.
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<std::array<double, 2>>>>&
                   point_vectors = {},
               const std::vector<std::pair<std::string, std::vector<double>>>& cell_scalars = {});

}  // namespace fsi
