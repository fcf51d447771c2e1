#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "liquidset/error.hpp"
#include "liquidset/mesh.hpp"
#include "liquidset/vec.hpp"

namespace liquidset {

// Regular grid of samples; sample (i,j,k) sits at origin + (i,j,k) * dx.
template <class T>
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, double dx, std::array<int, 3> dims, T fill = T{})
      : origin_(origin), dx_(dx), dims_(dims) {
    if (!(dx > 0.0) || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
      fail(ErrorCode::BadDims, "voxel grid needs dx > 0 and positive dims");
    }
    cells_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], fill);
  }

  const Vec3& origin() const { return origin_; }
  double dx() const { return dx_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t size() const { return cells_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  T& at(int i, int j, int k) { return cells_[index(i, j, k)]; }
  const T& at(int i, int j, int k) const { return cells_[index(i, j, k)]; }
  Vec3 position(int i, int j, int k) const { return origin_ + Vec3{i * dx_, j * dx_, k * dx_}; }

  std::vector<T>& data() { return cells_; }
  const std::vector<T>& data() const { return cells_; }

 private:
  Vec3 origin_;
  double dx_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<T> cells_;
};

using ScalarGrid = VoxelGrid<double>;
using OccupancyGrid = VoxelGrid<std::uint8_t>;

// Cubic cells of size max_extent/res covering `bounds`; samples at cell centers.
// A sample is true iff it lies inside the mesh (ray-parity along +x).
// Throws VoxelizationUndefined for meshes that are not watertight.
OccupancyGrid voxelize(const TriMesh& mesh, int res, const Aabb& bounds);

std::size_t count_occupied(const OccupancyGrid& grid);

// Point-in-mesh by ray parity along +x (same rule as voxelize).
bool point_in_mesh(const TriMesh& mesh, const Vec3& p);

}  // namespace liquidset
