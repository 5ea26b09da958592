#include "cyto/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "cyto/error.hpp"

namespace cyto {

namespace {

int integer_ratio(double a, double b) {
  const double r = a / b;
  const double rounded = std::round(r);
  if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) return -1;
  return static_cast<int>(rounded);
}

struct ArrayHash {
  template <std::size_t N>
  std::size_t operator()(const std::array<Index, N>& a) const noexcept {
    std::size_t seed = N;
    for (Index v : a) {
      seed ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    }
    return seed;
  }
};

}  // namespace

void MeshConfig::validate() const {
  std::ostringstream msg;
  if (cells_per_axis < 1) msg << "cells_per_axis must be >= 1; ";
  if (!(cell_side > 0.0)) msg << "cell_side must be positive; ";
  if (!(gap > 0.0)) msg << "gap must be positive; ";
  if (levels < 0) msg << "levels must be >= 0; ";
  if (cell_side > 0.0 && gap > 0.0 && integer_ratio(cell_side, gap) < 0) {
    msg << "cell_side (" << cell_side << ") is not an integer multiple of gap (" << gap << "); ";
  }
  const std::string text = msg.str();
  if (!text.empty()) throw Error(ErrorKind::InvalidConfig, "invalid mesh config: " + text);
}

double MeshConfig::domain_volume() const {
  const double side = box_side();
  return side * side * side - num_cells() * cell_side * cell_side * cell_side;
}

Point3 MeshConfig::hole_origin(int cell) const {
  const int n = cells_per_axis;
  const int a = cell % n;
  const int b = (cell / n) % n;
  const int c = cell / (n * n);
  const double pitch = cell_side + gap;
  return {gap + a * pitch, gap + b * pitch, gap + c * pitch};
}

Point3 MeshConfig::hole_center(int cell) const {
  Point3 p = hole_origin(cell);
  for (double& x : p) x += 0.5 * cell_side;
  return p;
}

double HexMesh::face_area(const BoundaryFace& f) const {
  const auto& ev = elements[f.element];
  const auto& fv = kFaceVertices[f.local_face];
  const Point3& p0 = vertices[ev[fv[0]]];
  const Point3& p1 = vertices[ev[fv[1]]];
  const Point3& p2 = vertices[ev[fv[2]]];
  const Point3 a{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  const Point3 b{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
  const Point3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  return std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
}

double HexMesh::tagged_area(int tag) const {
  double area = 0.0;
  for (const auto& f : boundary_faces) {
    if (f.tag == tag) area += face_area(f);
  }
  return area;
}

HexMesh build_root_mesh(const MeshConfig& config) {
  config.validate();
  const int n = config.cells_per_axis;
  const int s = integer_ratio(config.cell_side, config.gap);
  const int ne = n * s + n + 1;  // elements per axis
  const int nv = ne + 1;         // lattice vertices per axis
  const double h = config.gap;

  // Cell index along one axis for lattice element i, or -1 in a gap.
  auto hole_axis = [&](int i) -> int {
    if (i < 1) return -1;
    const int a = (i - 1) / (s + 1);
    const int offset = (i - 1) % (s + 1);
    return (a < n && offset < s) ? a : -1;
  };
  auto hole_of = [&](int i, int j, int k) -> int {
    const int a = hole_axis(i), b = hole_axis(j), c = hole_axis(k);
    if (a < 0 || b < 0 || c < 0) return -1;
    return a + n * b + n * n * c;
  };

  HexMesh mesh;
  mesh.level = 0;
  mesh.h = h;
  mesh.num_cells = config.num_cells();

  std::vector<Index> lattice_vertex(static_cast<std::size_t>(nv) * nv * nv, -1);
  auto vertex_id = [&](int i, int j, int k) -> Index {
    Index& id = lattice_vertex[(static_cast<std::size_t>(k) * nv + j) * nv + i];
    if (id < 0) {
      id = static_cast<Index>(mesh.vertices.size());
      mesh.vertices.push_back({i * h, j * h, k * h});
    }
    return id;
  };

  for (int k = 0; k < ne; ++k) {
    for (int j = 0; j < ne; ++j) {
      for (int i = 0; i < ne; ++i) {
        if (hole_of(i, j, k) >= 0) continue;
        std::array<Index, 8> ev{};
        for (int a = 0; a < 8; ++a) ev[a] = vertex_id(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
        const auto e = static_cast<Index>(mesh.elements.size());
        mesh.elements.push_back(ev);

        const std::array<std::array<int, 3>, 6> neighbour = {{
            {i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k}, {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1},
        }};
        for (int f = 0; f < 6; ++f) {
          const auto [ni, nj, nk] = neighbour[f];
          if (ni < 0 || nj < 0 || nk < 0 || ni >= ne || nj >= ne || nk >= ne) {
            mesh.boundary_faces.push_back({e, static_cast<std::uint8_t>(f), kOuterWall});
          } else if (const int cell = hole_of(ni, nj, nk); cell >= 0) {
            mesh.boundary_faces.push_back({e, static_cast<std::uint8_t>(f), cell});
          }
        }
      }
    }
  }
  return mesh;
}

HexMesh refine(const HexMesh& coarse) {
  HexMesh fine;
  fine.level = coarse.level + 1;
  fine.h = 0.5 * coarse.h;
  fine.num_cells = coarse.num_cells;
  fine.vertices = coarse.vertices;
  fine.vertex_parents.resize(coarse.vertices.size());
  for (std::size_t v = 0; v < coarse.vertices.size(); ++v) fine.vertex_parents[v] = {static_cast<Index>(v)};

  std::unordered_map<std::array<Index, 2>, Index, ArrayHash> edge_mid;
  std::unordered_map<std::array<Index, 4>, Index, ArrayHash> face_mid;
  edge_mid.reserve(coarse.num_elements() * 4);
  face_mid.reserve(coarse.num_elements() * 4);

  auto add_vertex = [&](std::vector<Index> parents) -> Index {
    Point3 p{0.0, 0.0, 0.0};
    for (Index q : parents) {
      for (int d = 0; d < 3; ++d) p[d] += coarse.vertices[q][d];
    }
    for (double& x : p) x /= static_cast<double>(parents.size());
    fine.vertices.push_back(p);
    fine.vertex_parents.push_back(std::move(parents));
    return static_cast<Index>(fine.vertices.size() - 1);
  };

  fine.elements.reserve(coarse.num_elements() * 8);
  fine.parent.reserve(coarse.num_elements() * 8);

  for (std::size_t e = 0; e < coarse.num_elements(); ++e) {
    const auto& ev = coarse.elements[e];
    // Sub-lattice point (a, b, c) in {0, 1, 2}^3 of this element.
    std::array<Index, 27> point{};
    for (int c = 0; c < 3; ++c) {
      for (int b = 0; b < 3; ++b) {
        for (int a = 0; a < 3; ++a) {
          std::vector<Index> parents;
          for (int z = (c == 2 ? 1 : 0); z <= (c == 0 ? 0 : 1); ++z) {
            for (int y = (b == 2 ? 1 : 0); y <= (b == 0 ? 0 : 1); ++y) {
              for (int x = (a == 2 ? 1 : 0); x <= (a == 0 ? 0 : 1); ++x) {
                parents.push_back(ev[x + 2 * y + 4 * z]);
              }
            }
          }
          Index id = -1;
          switch (parents.size()) {
            case 1:
              id = parents[0];
              break;
            case 2: {
              std::array<Index, 2> key{parents[0], parents[1]};
              std::sort(key.begin(), key.end());
              auto it = edge_mid.find(key);
              id = it != edge_mid.end() ? it->second : (edge_mid[key] = add_vertex(parents));
              break;
            }
            case 4: {
              std::array<Index, 4> key{parents[0], parents[1], parents[2], parents[3]};
              std::sort(key.begin(), key.end());
              auto it = face_mid.find(key);
              id = it != face_mid.end() ? it->second : (face_mid[key] = add_vertex(parents));
              break;
            }
            default:
              id = add_vertex(parents);
          }
          point[a + 3 * b + 9 * c] = id;
        }
      }
    }
    for (int child = 0; child < 8; ++child) {
      const int cx = child & 1, cy = (child >> 1) & 1, cz = (child >> 2) & 1;
      std::array<Index, 8> cv{};
      for (int a = 0; a < 8; ++a) {
        cv[a] = point[(cx + (a & 1)) + 3 * (cy + ((a >> 1) & 1)) + 9 * (cz + ((a >> 2) & 1))];
      }
      fine.elements.push_back(cv);
      fine.parent.push_back({static_cast<Index>(e), static_cast<std::uint8_t>(child)});
    }
  }

  fine.boundary_faces.reserve(coarse.boundary_faces.size() * 4);
  for (const auto& f : coarse.boundary_faces) {
    const int axis = f.local_face / 2;
    const int side = f.local_face % 2;
    for (int child = 0; child < 8; ++child) {
      if (((child >> axis) & 1) != side) continue;
      fine.boundary_faces.push_back({static_cast<Index>(8 * f.element + child), f.local_face, f.tag});
    }
  }
  return fine;
}

DofMap build_dof_map(const HexMesh& mesh) {
  const std::size_t nv = mesh.num_vertices();
  std::vector<std::array<long, 3>> lattice(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    for (int d = 0; d < 3; ++d) lattice[v][d] = std::lround(mesh.vertices[v][d] / mesh.h);
  }
  DofMap dofs;
  dofs.dof_to_vertex.resize(nv);
  std::iota(dofs.dof_to_vertex.begin(), dofs.dof_to_vertex.end(), Index{0});
  std::sort(dofs.dof_to_vertex.begin(), dofs.dof_to_vertex.end(), [&](Index a, Index b) {
    const auto& pa = lattice[a];
    const auto& pb = lattice[b];
    return std::tie(pa[2], pa[1], pa[0]) < std::tie(pb[2], pb[1], pb[0]);
  });
  dofs.vertex_to_dof.assign(nv, -1);
  for (std::size_t d = 0; d < nv; ++d) dofs.vertex_to_dof[dofs.dof_to_vertex[d]] = static_cast<Index>(d);

  dofs.boundary_dofs.assign(static_cast<std::size_t>(mesh.num_cells), {});
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag == kOuterWall) continue;
    for (int a : kFaceVertices[f.local_face]) {
      dofs.boundary_dofs[f.tag].push_back(dofs.vertex_to_dof[mesh.elements[f.element][a]]);
    }
  }
  for (auto& list : dofs.boundary_dofs) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return dofs;
}

Point3 MeshHierarchy::dof_point(int level, Index dof) const {
  return meshes.at(level).vertices[dofs.at(level).dof_to_vertex[dof]];
}

std::vector<Index> MeshHierarchy::coarse_to_fine(int coarse_level) const {
  const DofMap& coarse = dofs.at(coarse_level);
  const DofMap& fine = dofs.at(coarse_level + 1);
  std::vector<Index> map(coarse.dof_to_vertex.size());
  for (std::size_t d = 0; d < map.size(); ++d) map[d] = fine.vertex_to_dof[coarse.dof_to_vertex[d]];
  return map;
}

MeshHierarchy build_hierarchy(const MeshConfig& config) {
  MeshHierarchy hierarchy;
  hierarchy.config = config;
  hierarchy.meshes.push_back(build_root_mesh(config));
  for (int l = 0; l < config.levels; ++l) hierarchy.meshes.push_back(refine(hierarchy.meshes.back()));
  for (const auto& m : hierarchy.meshes) hierarchy.dofs.push_back(build_dof_map(m));
  return hierarchy;
}

}  // namespace cyto
