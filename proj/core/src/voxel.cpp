#include "liquidset/voxel.hpp"

#include <algorithm>
#include <cmath>

#include "raster2d.hpp"

namespace liquidset {

OccupancyGrid voxelize(const TriMesh& mesh, int res, const Aabb& bounds) {
  if (res <= 0 || bounds.empty()) fail(ErrorCode::BadDims, "voxelize needs res > 0 and non-empty bounds");
  if (!mesh.empty() && !is_watertight(mesh)) {
    fail(ErrorCode::VoxelizationUndefined, "mesh is not watertight");
  }
  const Vec3 ext = bounds.extent();
  const double dx = std::max({ext.x, ext.y, ext.z}) / res;
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    dims[a] = std::max(1, static_cast<int>(std::lround(std::ceil(ext[a] / dx - 1e-9))));
  }
  OccupancyGrid grid(bounds.lo + Vec3{0.5 * dx, 0.5 * dx, 0.5 * dx}, dx, dims, 0);
  if (mesh.empty()) return grid;

  const int ny = dims[1];
  const int nz = dims[2];
  std::vector<std::vector<double>> hits(static_cast<std::size_t>(ny) * nz);
  const Vec3 o = grid.origin();

  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto [a, b, c] = mesh.corners(t);
    const detail::Triangle2 tri{{a.y, a.z}, {b.y, b.z}, {c.y, c.z}};
    const double area2 = detail::orient(tri.a, tri.b, tri.c);
    if (area2 == 0.0) continue;
    const double ylo = std::min({a.y, b.y, c.y});
    const double yhi = std::max({a.y, b.y, c.y});
    const double zlo = std::min({a.z, b.z, c.z});
    const double zhi = std::max({a.z, b.z, c.z});
    const int j0 = std::max(0, static_cast<int>(std::ceil((ylo - o.y) / dx)) - 1);
    const int j1 = std::min(ny - 1, static_cast<int>(std::floor((yhi - o.y) / dx)) + 1);
    const int k0 = std::max(0, static_cast<int>(std::ceil((zlo - o.z) / dx)) - 1);
    const int k1 = std::min(nz - 1, static_cast<int>(std::floor((zhi - o.z) / dx)) + 1);
    const Vec3 n = cross(b - a, c - a);
    for (int k = k0; k <= k1; ++k) {
      for (int j = j0; j <= j1; ++j) {
        const double py = o.y + j * dx;
        const double pz = o.z + k * dx;
        if (!detail::covers_top_left(tri, {py, pz})) continue;
        // Plane: n . (p - a) = 0, solve for x.
        const double x = a.x - (n.y * (py - a.y) + n.z * (pz - a.z)) / n.x;
        hits[static_cast<std::size_t>(k) * ny + j].push_back(x);
      }
    }
  }

  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      auto& column = hits[static_cast<std::size_t>(k) * ny + j];
      if (column.empty()) continue;
      std::sort(column.begin(), column.end());
      std::size_t crossed = 0;
      for (int i = 0; i < dims[0]; ++i) {
        const double px = o.x + i * dx;
        while (crossed < column.size() && column[crossed] < px) ++crossed;
        grid.at(i, j, k) = static_cast<std::uint8_t>(crossed % 2);
      }
    }
  }
  return grid;
}

std::size_t count_occupied(const OccupancyGrid& grid) {
  return static_cast<std::size_t>(std::count_if(grid.data().begin(), grid.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

bool point_in_mesh(const TriMesh& mesh, const Vec3& p) {
  std::size_t crossings = 0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto [a, b, c] = mesh.corners(t);
    const detail::Triangle2 tri{{a.y, a.z}, {b.y, b.z}, {c.y, c.z}};
    if (detail::orient(tri.a, tri.b, tri.c) == 0.0) continue;
    if (!detail::covers_top_left(tri, {p.y, p.z})) continue;
    const Vec3 n = cross(b - a, c - a);
    const double x = a.x - (n.y * (p.y - a.y) + n.z * (p.z - a.z)) / n.x;
    if (x < p.x) ++crossings;
  }
  return crossings % 2 == 1;
}

}  // namespace liquidset
