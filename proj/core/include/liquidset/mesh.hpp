#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "liquidset/vec.hpp"

namespace liquidset {

using Triangle = std::array<std::uint32_t, 3>;

// Triangle mesh in meters. Construction validates indices and drops
// triangles whose area is at or below kDegenerateArea.
class TriMesh {
 public:
  static constexpr double kDegenerateArea = 1e-12;  // m^2

  TriMesh() = default;
  TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return triangles_.empty(); }
  // Number of degenerate triangles removed at construction.
  std::size_t dropped_degenerate() const { return dropped_degenerate_; }

  std::array<Vec3, 3> corners(std::size_t tri) const {
    const Triangle& t = triangles_[tri];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::size_t dropped_degenerate_ = 0;
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const TriMesh& mesh);

// Every undirected edge is shared by exactly two triangles.
bool is_watertight(const TriMesh& mesh);
// Watertight and every edge is traversed once in each direction.
bool is_closed_and_oriented(const TriMesh& mesh);

// Divergence-theorem volume; throws VolumeUndefined unless closed and oriented.
double mesh_volume(const TriMesh& mesh);

// Throws EmptyMesh when the mesh has no vertices.
Aabb mesh_aabb(const TriMesh& mesh);
// Axis extents (length=x, width=y, height=z).
Vec3 mesh_aabb_dims(const TriMesh& mesh);

TriMesh transformed(const TriMesh& mesh, const RigidTransform& xf);
TriMesh translated(const TriMesh& mesh, const Vec3& offset);
TriMesh scaled(const TriMesh& mesh, const Vec3& factors);
TriMesh scaled(const TriMesh& mesh, double factor);
TriMesh merged(std::span<const TriMesh> meshes);

// Closed, outward-oriented primitives.
TriMesh make_box(const Vec3& lo, const Vec3& hi);
TriMesh make_icosphere(const Vec3& center, double radius, int subdivisions);
// Single-sided rectangle in the plane z = height spanning [x0,x1] x [y0,y1].
TriMesh make_rectangle_z(double x0, double x1, double y0, double y1, double height);

}  // namespace liquidset
