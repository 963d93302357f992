// SPDX-License-Identifier: Apache-2.0

#include "fsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

constexpr double kGauss3Pts[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGauss3Wts[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// Bilinear geometry Jacobian determinant at (xi, eta) from 4 corners.
double bilinear_detj(const std::array<std::array<double, 2>, 4>& c, double xi, double eta) {
  // dN/dxi, dN/deta for N_i = 1/4 (1 +- xi)(1 +- eta), corners CCW from (-1,-1)
  const double dxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const double deta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};
  double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
  for (int i = 0; i < 4; ++i) {
    j00 += c[i][0] * dxi[i];
    j01 += c[i][0] * deta[i];
    j10 += c[i][1] * dxi[i];
    j11 += c[i][1] * deta[i];
  }
  return j00 * j11 - j01 * j10;
}

double quad_area(const std::array<std::array<double, 2>, 4>& c, int element) {
  double area = 0.0;
  for (int q = 0; q < 3; ++q) {
    for (int r = 0; r < 3; ++r) {
      const double dj = bilinear_detj(c, kGauss3Pts[q], kGauss3Pts[r]);
      if (dj <= 0.0) throw ElementInversionError(element);
      area += kGauss3Wts[q] * kGauss3Wts[r] * dj;
    }
  }
  return area;
}

std::array<std::array<double, 2>, 4> corner_coords(const Mesh& mesh, int e) {
  std::array<std::array<double, 2>, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = mesh.nodes[mesh.elements[e][i]];
  return c;
}

}  // namespace

int Mesh::group_id(const std::string& name) const {
  for (std::size_t g = 0; g < group_names.size(); ++g)
    if (group_names[g] == name) return static_cast<int>(g);
  return -1;
}

void Mesh::audit() const {
  if (element_region.size() != elements.size())
    throw std::logic_error("mesh: region tags do not partition the elements");
  for (int e = 0; e < n_elements(); ++e) quad_area(corner_coords(*this, e), e);  // throws on inversion
  std::map<std::pair<int, int>, int> seen;
  for (const auto& f : boundary_faces) {
    if (f.element < 0 || f.element >= n_elements() || f.edge < 0 || f.edge > 3 || f.group < 0 ||
        f.group >= static_cast<int>(group_names.size()))
      throw std::logic_error("mesh: malformed boundary face");
    if (!seen.emplace(std::make_pair(f.element, f.edge), f.group).second)
      throw std::logic_error("mesh: boundary face in more than one group");
  }
}

double element_volume(const Mesh& mesh, int element) {
  return quad_area(corner_coords(mesh, element), element);
}

double element_volume_displaced(const Mesh& mesh, int element,
                                const std::vector<std::array<double, 2>>& displacement) {
  auto c = corner_coords(mesh, element);
  for (int i = 0; i < 4; ++i) {
    const int n = mesh.elements[element][i];
    c[i][0] += displacement[n][0];
    c[i][1] += displacement[n][1];
  }
  return quad_area(c, element);
}

namespace {

// Structured grid helper: builds an (nx x ny) grid of quads over given x/y
// breakpoints, rows bottom to top, CCW elements.
struct Grid {
  std::vector<double> xs, ys;
  int nx() const { return static_cast<int>(xs.size()) - 1; }
  int ny() const { return static_cast<int>(ys.size()) - 1; }
  int node(int i, int j) const { return j * static_cast<int>(xs.size()) + i; }
};

void emit_grid(const Grid& g, Mesh& mesh) {
  mesh.nodes.clear();
  mesh.elements.clear();
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) mesh.nodes.push_back({g.xs[i], g.ys[j]});
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      mesh.elements.push_back({g.node(i, j), g.node(i + 1, j), g.node(i + 1, j + 1), g.node(i, j + 1)});
    }
  }
}

std::vector<double> linspace(double a, double b, int n_cells) {
  std::vector<double> v(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) v[i] = a + (b - a) * static_cast<double>(i) / n_cells;
  v.back() = b;
  return v;
}

Mesh build_unit_square(const GeometryCase& geo) {
  if (geo.unit_n < 1) throw ConfigError("unit_square: n must be >= 1");
  Grid g;
  g.xs = linspace(0.0, 1.0, geo.unit_n);
  g.ys = linspace(0.0, 1.0, geo.unit_n);
  Mesh mesh;
  emit_grid(g, mesh);
  mesh.element_region.assign(mesh.n_elements(), Region::Fluid);
  mesh.group_names = {"left", "right", "bottom", "top"};
  const int n = geo.unit_n;
  for (int j = 0; j < n; ++j) {
    mesh.boundary_faces.push_back({j * n, 3, 0});            // left edge of first column
    mesh.boundary_faces.push_back({j * n + n - 1, 1, 1});    // right
  }
  for (int i = 0; i < n; ++i) {
    mesh.boundary_faces.push_back({i, 0, 2});                // bottom row
    mesh.boundary_faces.push_back({(n - 1) * n + i, 2, 3});  // top row
  }
  return mesh;
}

Mesh build_channel(const GeometryCase& geo) {
  if (geo.length <= 0 || geo.lumen_height <= 0 || geo.wall_thickness <= 0)
    throw ConfigError("channel: dimensions must be positive");
  if (geo.wall_thickness >= geo.lumen_height)
    throw ConfigError("channel: wall thickness must be smaller than the lumen height");
  if (geo.nx < 1 || geo.ny_fluid < 1 || geo.ny_wall < 1)
    throw ConfigError("channel: resolution must be positive");

  const double half = 0.5 * geo.lumen_height;
  const double outer = half + geo.wall_thickness;

  Grid g;
  g.xs = linspace(0.0, geo.length, geo.nx);
  auto bottom = linspace(-outer, -half, geo.ny_wall);
  auto fluid = linspace(-half, half, geo.ny_fluid);
  auto top = linspace(half, outer, geo.ny_wall);
  g.ys = bottom;
  g.ys.insert(g.ys.end(), fluid.begin() + 1, fluid.end());
  g.ys.insert(g.ys.end(), top.begin() + 1, top.end());

  Mesh mesh;
  emit_grid(g, mesh);

  const int ny = g.ny();
  mesh.element_region.resize(mesh.n_elements());
  for (int j = 0; j < ny; ++j) {
    const bool solid = (j < geo.ny_wall) || (j >= geo.ny_wall + geo.ny_fluid);
    for (int i = 0; i < geo.nx; ++i)
      mesh.element_region[j * geo.nx + i] = solid ? Region::Solid : Region::Fluid;
  }

  mesh.group_names = {"inlet", "outlet", "clamp_in", "clamp_out", "wall"};
  auto elem = [&](int i, int j) { return j * geo.nx + i; };
  for (int j = 0; j < ny; ++j) {
    const bool solid = (j < geo.ny_wall) || (j >= geo.ny_wall + geo.ny_fluid);
    mesh.boundary_faces.push_back({elem(0, j), 3, solid ? 2 : 0});
    mesh.boundary_faces.push_back({elem(geo.nx - 1, j), 1, solid ? 3 : 1});
  }
  for (int i = 0; i < geo.nx; ++i) {
    mesh.boundary_faces.push_back({elem(i, 0), 0, 4});
    mesh.boundary_faces.push_back({elem(i, ny - 1), 2, 4});
  }
  return mesh;
}

Mesh build_bulge(const GeometryCase& geo) {
  Mesh mesh = build_channel(geo);
  if (geo.bulge_height == 0.0) return mesh;  // degenerates to the straight channel, node for node
  if (geo.bulge_height < 0 || geo.bulge_width <= 0) throw ConfigError("bulge: invalid parameters");

  const double hb = geo.bulge_height;
  const double w = geo.bulge_width;
  const double c = geo.bulge_center;
  const double r_arc = (hb * hb + 0.25 * w * w) / (2.0 * hb);
  const double half = 0.5 * geo.lumen_height;
  const double outer = half + geo.wall_thickness;

  auto bump = [&](double x) {
    const double dx = x - c;
    if (std::abs(dx) >= 0.5 * w) return 0.0;
    return std::sqrt(r_arc * r_arc - dx * dx) - (r_arc - hb);
  };
  // Blend from the fixed bottom wall to the fully displaced top wall.
  auto blend = [&](double y) { return (y + outer) / (2.0 * outer); };

  std::vector<double> disp(mesh.n_nodes());
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    disp[n] = bump(mesh.nodes[n][0]) * blend(mesh.nodes[n][1]);
    mesh.nodes[n][1] += disp[n];
  }

  std::vector<int> cavity;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (mesh.element_region[e] != Region::Fluid) continue;
    double dmean = 0.0;
    for (int i = 0; i < 4; ++i) dmean += 0.25 * disp[mesh.elements[e][i]];
    if (dmean >= 0.25 * hb) cavity.push_back(e);
  }
  mesh.element_sets["cavity"] = std::move(cavity);
  return mesh;
}

}  // namespace

Mesh build_case(const GeometryCase& geo) {
  Mesh mesh;
  if (geo.name == "unit_square") {
    mesh = build_unit_square(geo);
  } else if (geo.name == "channel") {
    mesh = build_channel(geo);
  } else if (geo.name == "bulge") {
    mesh = build_bulge(geo);
  } else {
    throw ConfigError("unknown geometry case '" + geo.name + "'");
  }
  mesh.audit();
  return mesh;
}

void refine(MeshHierarchy& h) {
  const Mesh& coarse = h.levels.back();
  Mesh fine;
  fine.level = coarse.level + 1;
  fine.group_names = coarse.group_names;
  fine.nodes = coarse.nodes;

  std::vector<NodeOrigin> origin(coarse.nodes.size());
  for (int n = 0; n < coarse.n_nodes(); ++n) origin[n] = {NodeOrigin::Kind::Corner, n, -1};

  std::map<std::pair<int, int>, int> edge_mid;
  auto midpoint_node = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    const int id = static_cast<int>(fine.nodes.size());
    fine.nodes.push_back({0.5 * (coarse.nodes[a][0] + coarse.nodes[b][0]),
                          0.5 * (coarse.nodes[a][1] + coarse.nodes[b][1])});
    origin.push_back({NodeOrigin::Kind::EdgeMidpoint, key.first, key.second});
    edge_mid.emplace(key, id);
    return id;
  };

  std::vector<int> parent;
  parent.reserve(coarse.n_elements() * 4);
  fine.elements.reserve(coarse.n_elements() * 4);
  fine.element_region.reserve(coarse.n_elements() * 4);

  for (int e = 0; e < coarse.n_elements(); ++e) {
    const auto& q = coarse.elements[e];
    const int m01 = midpoint_node(q[0], q[1]);
    const int m12 = midpoint_node(q[1], q[2]);
    const int m23 = midpoint_node(q[2], q[3]);
    const int m30 = midpoint_node(q[3], q[0]);
    const int ctr = static_cast<int>(fine.nodes.size());
    fine.nodes.push_back({0.25 * (coarse.nodes[q[0]][0] + coarse.nodes[q[1]][0] +
                                  coarse.nodes[q[2]][0] + coarse.nodes[q[3]][0]),
                          0.25 * (coarse.nodes[q[0]][1] + coarse.nodes[q[1]][1] +
                                  coarse.nodes[q[2]][1] + coarse.nodes[q[3]][1])});
    origin.push_back({NodeOrigin::Kind::ElementCenter, e, -1});

    const std::array<std::array<int, 4>, 4> children = {{
        {q[0], m01, ctr, m30},
        {m01, q[1], m12, ctr},
        {ctr, m12, q[2], m23},
        {m30, ctr, m23, q[3]},
    }};
    for (const auto& child : children) {
      fine.elements.push_back(child);
      fine.element_region.push_back(coarse.element_region[e]);
      parent.push_back(e);
    }
  }

  // Boundary faces split in two; each half keeps the group and the local
  // edge index of its parent.
  for (const auto& f : coarse.boundary_faces) {
    fine.boundary_faces.push_back({4 * f.element + f.edge, f.edge, f.group});
    fine.boundary_faces.push_back({4 * f.element + (f.edge + 1) % 4, f.edge, f.group});
  }

  for (const auto& [name, set] : coarse.element_sets) {
    std::vector<int> fine_set;
    fine_set.reserve(set.size() * 4);
    for (int e : set)
      for (int k = 0; k < 4; ++k) fine_set.push_back(4 * e + k);
    fine.element_sets[name] = std::move(fine_set);
  }

  h.levels.push_back(std::move(fine));
  h.parent_map.push_back(std::move(parent));
  h.node_origin.push_back(std::move(origin));
}

MeshHierarchy make_hierarchy(const GeometryCase& geo, int levels) {
  if (levels < 1) throw ConfigError("hierarchy needs at least one level");
  MeshHierarchy h;
  h.levels.push_back(build_case(geo));
  for (int l = 1; l < levels; ++l) refine(h);
  return h;
}

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::vector<std::pair<std::string, std::vector<std::array<double, 2>>>>& point_vectors,
               const std::vector<std::pair<std::string, std::vector<double>>>& cell_scalars) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(12);
  os << "# vtk DataFile Version 3.0\nfsibench mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& p : mesh.nodes) os << p[0] << " " << p[1] << " 0\n";
  os << "CELLS " << mesh.n_elements() << " " << 5 * mesh.n_elements() << "\n";
  for (const auto& e : mesh.elements) os << "4 " << e[0] << " " << e[1] << " " << e[2] << " " << e[3] << "\n";
  os << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) os << "9\n";  // VTK_QUAD

  os << "CELL_DATA " << mesh.n_elements() << "\n";
  os << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (auto r : mesh.element_region) os << static_cast<int>(r) << "\n";
  for (const auto& [name, data] : cell_scalars) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : data) os << v << "\n";
  }

  if (!point_vectors.empty()) {
    os << "POINT_DATA " << mesh.n_nodes() << "\n";
    for (const auto& [name, data] : point_vectors) {
      os << "VECTORS " << name << " double\n";
      for (const auto& v : data) os << v[0] << " " << v[1] << " 0\n";
    }
  }
}

}  // namespace fsi
