#pragma once

// Nested hexahedral grids over a box with cube-shaped holes (one per
// biological cell).
//
// Local vertex numbering of a hexahedron is lexicographic in (x, y, z):
//
//        6-------7
//       /|      /|        vertex a sits at offset (a & 1, (a >> 1) & 1, (a >> 2) & 1)
//      4-------5 |
//      | 2-----|-3        faces: 0 = x-, 1 = x+, 2 = y-, 3 = y+, 4 = z-, 5 = z+
//      |/      |/
//      0-------1          child c of a refined element occupies octant
//                         (c & 1, (c >> 1) & 1, (c >> 2) & 1)
//
// Assembly, refinement and the VTK writer all rely on this convention.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace cyto {

using Index = std::int32_t;
using Point3 = std::array<double, 3>;

/// Tag of faces on the outer box wall. Hole faces carry the cell index 0..N_c-1.
inline constexpr int kOuterWall = -1;

inline constexpr std::array<std::array<int, 4>, 6> kFaceVertices = {{
    {0, 2, 4, 6},
    {1, 3, 5, 7},
    {0, 1, 4, 5},
    {2, 3, 6, 7},
    {0, 1, 2, 3},
    {4, 5, 6, 7},
}};

struct MeshConfig {
  int cells_per_axis = 2;
  double cell_side = 10.0;  // um
  double gap = 5.0;         // um, also the root element edge
  int levels = 1;

  /// Throws Error(InvalidConfig) if the geometry cannot be meshed exactly.
  void validate() const;

  int num_cells() const { return cells_per_axis * cells_per_axis * cells_per_axis; }
  double box_side() const { return cells_per_axis * cell_side + (cells_per_axis + 1) * gap; }
  double domain_volume() const;
  double hole_area() const { return 6.0 * cell_side * cell_side; }
  /// Lower corner of hole `cell` (lexicographic cell order).
  Point3 hole_origin(int cell) const;
  Point3 hole_center(int cell) const;
};

struct BoundaryFace {
  Index element;
  std::uint8_t local_face;
  int tag;
};

struct ParentLink {
  Index element;
  std::uint8_t child;
};

struct HexMesh {
  int level = 0;
  double h = 0.0;  // element edge length
  int num_cells = 0;
  std::vector<Point3> vertices;
  std::vector<std::array<Index, 8>> elements;
  std::vector<BoundaryFace> boundary_faces;
  /// Level > 0 only: parent of every element.
  std::vector<ParentLink> parent;
  /// Level > 0 only: the coarse vertices whose average is this vertex
  /// (1 for inherited vertices, 2/4/8 for edge, face and cell midpoints).
  /// Inherited vertices keep their coarse index.
  std::vector<std::vector<Index>> vertex_parents;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_elements() const { return elements.size(); }
  double face_area(const BoundaryFace& f) const;
  double tagged_area(int tag) const;
};

struct DofMap {
  std::vector<Index> vertex_to_dof;
  std::vector<Index> dof_to_vertex;
  std::vector<std::vector<Index>> boundary_dofs;  // sorted, per cell

  Index n_pde() const { return static_cast<Index>(dof_to_vertex.size()); }
  Index n_ode() const { return static_cast<Index>(3 * boundary_dofs.size()); }
};

/// Lexicographic (z, y, x) dof numbering on the lattice of spacing mesh.h.
DofMap build_dof_map(const HexMesh& mesh);

HexMesh build_root_mesh(const MeshConfig& config);
HexMesh refine(const HexMesh& mesh);

struct MeshHierarchy {
  MeshConfig config;
  std::vector<HexMesh> meshes;
  std::vector<DofMap> dofs;

  int finest() const { return static_cast<int>(meshes.size()) - 1; }
  int num_cells() const { return config.num_cells(); }
  const HexMesh& mesh(int level) const { return meshes.at(level); }
  const DofMap& dof(int level) const { return dofs.at(level); }
  Point3 dof_point(int level, Index dof) const;

  /// For each coarse dof, the fine dof at the same vertex (levels adjacent).
  std::vector<Index> coarse_to_fine(int coarse_level) const;
};

MeshHierarchy build_hierarchy(const MeshConfig& config);

}  // namespace cyto
