#include "liquidset/mesh.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>

#include "liquidset/error.hpp"

namespace liquidset {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)) {
  triangles_.reserve(triangles.size());
  const auto n = static_cast<std::uint32_t>(vertices_.size());
  for (const Triangle& t : triangles) {
    if (t[0] >= n || t[1] >= n || t[2] >= n) {
      fail(ErrorCode::InvalidMesh, "triangle index out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2] ||
        triangle_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]) <= kDegenerateArea) {
      ++dropped_degenerate_;
      continue;
    }
    triangles_.push_back(t);
  }
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

double surface_area(const TriMesh& mesh) {
  double area = 0.0;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto [a, b, c] = mesh.corners(i);
    area += triangle_area(a, b, c);
  }
  return area;
}

bool is_watertight(const TriMesh& mesh) {
  if (mesh.empty()) return false;
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(mesh.triangle_count() * 3);
  for (const Triangle& t : mesh.triangles()) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = t[e];
      const std::uint32_t b = t[(e + 1) % 3];
      ++count[edge_key(std::min(a, b), std::max(a, b))];
    }
  }
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

bool is_closed_and_oriented(const TriMesh& mesh) {
  if (mesh.empty()) return false;
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangle_count() * 3);
  for (const Triangle& t : mesh.triangles()) {
    for (int e = 0; e < 3; ++e) {
      if (++directed[edge_key(t[e], t[(e + 1) % 3])] > 1) return false;
    }
  }
  for (const auto& [key, n] : directed) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (!directed.contains(edge_key(b, a))) return false;
  }
  return true;
}

double mesh_volume(const TriMesh& mesh) {
  if (!is_closed_and_oriented(mesh)) {
    fail(ErrorCode::VolumeUndefined, "mesh is not closed and consistently oriented");
  }
  // Reference point at the AABB center keeps the sum well conditioned.
  const Vec3 ref = mesh_aabb(mesh).center();
  double six_v = 0.0;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto [a, b, c] = mesh.corners(i);
    six_v += dot(a - ref, cross(b - ref, c - ref));
  }
  return six_v / 6.0;
}

Aabb mesh_aabb(const TriMesh& mesh) {
  if (mesh.vertices().empty()) fail(ErrorCode::EmptyMesh, "mesh has no vertices");
  Aabb box;
  for (const Vec3& v : mesh.vertices()) box.expand(v);
  return box;
}

Vec3 mesh_aabb_dims(const TriMesh& mesh) { return mesh_aabb(mesh).extent(); }

TriMesh transformed(const TriMesh& mesh, const RigidTransform& xf) {
  std::vector<Vec3> v;
  v.reserve(mesh.vertex_count());
  for (const Vec3& p : mesh.vertices()) v.push_back(xf.apply(p));
  return TriMesh(std::move(v), mesh.triangles());
}

TriMesh translated(const TriMesh& mesh, const Vec3& offset) {
  std::vector<Vec3> v;
  v.reserve(mesh.vertex_count());
  for (const Vec3& p : mesh.vertices()) v.push_back(p + offset);
  return TriMesh(std::move(v), mesh.triangles());
}

TriMesh scaled(const TriMesh& mesh, const Vec3& factors) {
  std::vector<Vec3> v;
  v.reserve(mesh.vertex_count());
  for (const Vec3& p : mesh.vertices()) v.push_back(cwise_mul(p, factors));
  return TriMesh(std::move(v), mesh.triangles());
}

TriMesh scaled(const TriMesh& mesh, double factor) {
  return scaled(mesh, Vec3{factor, factor, factor});
}

TriMesh merged(std::span<const TriMesh> meshes) {
  std::vector<Vec3> v;
  std::vector<Triangle> t;
  for (const TriMesh& m : meshes) {
    const auto base = static_cast<std::uint32_t>(v.size());
    v.insert(v.end(), m.vertices().begin(), m.vertices().end());
    for (const Triangle& tri : m.triangles()) t.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
  }
  return TriMesh(std::move(v), std::move(t));
}

TriMesh make_box(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> v = {
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
  };
  std::vector<Triangle> t = {
      {0, 2, 1}, {0, 3, 2},  // -z
      {4, 5, 6}, {4, 6, 7},  // +z
      {0, 1, 5}, {0, 5, 4},  // -y
      {3, 6, 2}, {3, 7, 6},  // +y
      {0, 4, 7}, {0, 7, 3},  // -x
      {1, 2, 6}, {1, 6, 5},  // +x
  };
  return TriMesh(std::move(v), std::move(t));
}

TriMesh make_icosphere(const Vec3& center, double radius, int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& p : v) p = normalized(p);
  std::vector<Triangle> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7}, {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back(normalized(v[a] + v[b]));
      const auto idx = static_cast<std::uint32_t>(v.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> next;
    next.reserve(t.size() * 4);
    for (const Triangle& tri : t) {
      const std::uint32_t ab = mid(tri[0], tri[1]);
      const std::uint32_t bc = mid(tri[1], tri[2]);
      const std::uint32_t ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    t = std::move(next);
  }
  for (Vec3& p : v) p = center + p * radius;
  return TriMesh(std::move(v), std::move(t));
}

TriMesh make_rectangle_z(double x0, double x1, double y0, double y1, double height) {
  std::vector<Vec3> v = {{x0, y0, height}, {x1, y0, height}, {x1, y1, height}, {x0, y1, height}};
  return TriMesh(std::move(v), {{0, 1, 2}, {0, 2, 3}});
}

}  // namespace liquidset
