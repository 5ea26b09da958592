#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cyto/error.hpp"
#include "cyto/mesh.hpp"

using namespace cyto;

namespace {

MeshConfig config(int n, int levels = 0, double gap = 5.0) {
  MeshConfig c;
  c.cells_per_axis = n;
  c.gap = gap;
  c.levels = levels;
  return c;
}

int count_tag(const HexMesh& m, int tag) {
  return static_cast<int>(std::count_if(m.boundary_faces.begin(), m.boundary_faces.end(),
                                        [tag](const BoundaryFace& f) { return f.tag == tag; }));
}

bool on_hole_surface(const MeshConfig& c, int cell, const Point3& x) {
  const Point3 lo = c.hole_origin(cell);
  bool inside = true, on_face = false;
  for (int d = 0; d < 3; ++d) {
    const double a = lo[d], b = lo[d] + c.cell_side;
    if (x[d] < a - 1e-12 || x[d] > b + 1e-12) inside = false;
    if (std::abs(x[d] - a) < 1e-12 || std::abs(x[d] - b) < 1e-12) on_face = true;
  }
  return inside && on_face;
}

}  // namespace

TEST_CASE("single cell root mesh has 56 elements and 24 hole faces") {
  const auto c = config(1);
  const HexMesh m = build_root_mesh(c);
  CHECK(c.box_side() == doctest::Approx(20.0));
  CHECK(m.num_elements() == 56);
  CHECK(count_tag(m, 0) == 24);
  CHECK(count_tag(m, kOuterWall) == 6 * 16);
}

TEST_CASE("eight cell root mesh keeps 279 of 343 lattice elements") {
  const auto c = config(2);
  CHECK(c.box_side() == doctest::Approx(35.0));
  const HexMesh m = build_root_mesh(c);
  CHECK(m.num_elements() == 279);
  for (int i = 0; i < 8; ++i) CHECK(count_tag(m, i) == 24);
}

TEST_CASE("gap that does not divide the cell side is rejected") {
  CHECK_THROWS_AS(build_root_mesh(config(1, 0, 3.0)), Error);
  try {
    config(1, 0, 3.0).validate();
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidConfig);
  }
  MeshConfig bad = config(0);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("refinement multiplies elements by eight per level") {
  const HexMesh m0 = build_root_mesh(config(1));
  const HexMesh m1 = refine(m0);
  const HexMesh m2 = refine(m1);
  CHECK(m1.num_elements() == 448);
  CHECK(m2.num_elements() == 64 * m0.num_elements());
  CHECK(m2.level == 2);
  CHECK(m2.h == doctest::Approx(m0.h / 4));
}

TEST_CASE("every parent has exactly eight children with distinct child indices") {
  const HexMesh m0 = build_root_mesh(config(2));
  const HexMesh m1 = refine(m0);
  REQUIRE(m1.parent.size() == m1.num_elements());
  std::map<Index, std::set<int>> children;
  for (const auto& p : m1.parent) children[p.element].insert(p.child);
  CHECK(children.size() == m0.num_elements());
  for (const auto& [e, set] : children) CHECK(set.size() == 8);
}

TEST_CASE("tagged hole area is 6 side^2 on every level") {
  const auto c = config(2, 2);
  const MeshHierarchy h = build_hierarchy(c);
  REQUIRE(h.finest() == 2);
  for (int l = 0; l <= 2; ++l) {
    for (int i = 0; i < 8; ++i) CHECK(h.mesh(l).tagged_area(i) == doctest::Approx(600.0).epsilon(1e-13));
    CHECK(h.mesh(l).tagged_area(kOuterWall) == doctest::Approx(6.0 * 35.0 * 35.0).epsilon(1e-13));
  }
}

TEST_CASE("refined vertices are coarse vertices or averages of their parents") {
  const HexMesh m0 = build_root_mesh(config(1));
  const HexMesh m1 = refine(m0);
  REQUIRE(m1.vertex_parents.size() == m1.num_vertices());
  for (std::size_t v = 0; v < m1.num_vertices(); ++v) {
    const auto& parents = m1.vertex_parents[v];
    const std::size_t k = parents.size();
    CHECK((k == 1 || k == 2 || k == 4 || k == 8));
    if (k == 1) CHECK(parents[0] == static_cast<Index>(v));
    Point3 avg{0, 0, 0};
    for (Index p : parents)
      for (int d = 0; d < 3; ++d) avg[d] += m0.vertices[p][d] / static_cast<double>(k);
    for (int d = 0; d < 3; ++d) CHECK(avg[d] == doctest::Approx(m1.vertices[v][d]));
  }
}

TEST_CASE("mesh is conforming: only boundary faces are unshared") {
  const HexMesh m = refine(build_root_mesh(config(2)));
  std::map<std::array<Index, 4>, int> faces;
  for (const auto& e : m.elements) {
    for (const auto& fv : kFaceVertices) {
      std::array<Index, 4> key{e[fv[0]], e[fv[1]], e[fv[2]], e[fv[3]]};
      std::sort(key.begin(), key.end());
      ++faces[key];
    }
  }
  std::size_t single = 0;
  for (const auto& [key, count] : faces) {
    CHECK(count <= 2);
    if (count == 1) ++single;
  }
  CHECK(single == m.boundary_faces.size());
}

TEST_CASE("hole boundary dofs of a single cell are the 26 surface lattice points") {
  const auto c = config(1);
  const MeshHierarchy h = build_hierarchy(c);
  const HexMesh& m = h.mesh(0);
  const DofMap& d = h.dof(0);
  std::vector<Index> brute;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (on_hole_surface(c, 0, m.vertices[v])) brute.push_back(d.vertex_to_dof[v]);
  }
  std::sort(brute.begin(), brute.end());
  CHECK(brute.size() == 26);
  CHECK(d.boundary_dofs.at(0) == brute);
}

TEST_CASE("dof maps: ODE count is level independent and boundary sets are disjoint") {
  const MeshHierarchy h = build_hierarchy(config(2, 1));
  for (int l = 0; l <= 1; ++l) {
    const DofMap& d = h.dof(l);
    CHECK(d.n_ode() == 24);
    CHECK(static_cast<std::size_t>(d.n_pde()) == h.mesh(l).num_vertices());
    std::set<Index> seen;
    for (const auto& b : d.boundary_dofs) {
      CHECK(!b.empty());
      CHECK(std::is_sorted(b.begin(), b.end()));
      for (Index i : b) CHECK(seen.insert(i).second);
    }
  }
  CHECK(h.dof(0).n_pde() == 504);
  CHECK(h.dof(1).n_pde() == 3159);
}

TEST_CASE("coarse to fine dof map matches coordinates") {
  const MeshHierarchy h = build_hierarchy(config(2, 1));
  const auto map = h.coarse_to_fine(0);
  REQUIRE(map.size() == static_cast<std::size_t>(h.dof(0).n_pde()));
  for (Index c = 0; c < h.dof(0).n_pde(); ++c) {
    const Point3 a = h.dof_point(0, c), b = h.dof_point(1, map[c]);
    for (int d = 0; d < 3; ++d) CHECK(a[d] == b[d]);
  }
}

TEST_CASE("domain volume is the box minus the holes") {
  const auto c = config(3);
  CHECK(c.domain_volume() == doctest::Approx(std::pow(50.0, 3) - 27 * 1000.0));
  CHECK(c.hole_center(0)[0] == doctest::Approx(10.0));
}
