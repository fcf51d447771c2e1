#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "liquidset/vec.hpp"

namespace liquidset {

enum class CellLabel : std::uint8_t { Empty = 0, Fluid = 1, Solid = 2 };

enum class Axis : int { X = 0, Y = 1, Z = 2 };

// Staggered (MAC) grid. Cell (i,j,k) spans origin + [i,i+1]x[j,j+1]x[k,k+1] * dx.
// u lives on x-faces ((nx+1) x ny x nz), v on y-faces, w on z-faces.
// solid_phi is sampled at cell centers and is negative inside the solid.
class MacGrid {
 public:
  MacGrid() = default;
  MacGrid(const Vec3& origin, double dx, std::array<int, 3> dims);

  const Vec3& origin() const { return origin_; }
  double dx() const { return dx_; }
  const std::array<int, 3>& dims() const { return dims_; }
  int nx() const { return dims_[0]; }
  int ny() const { return dims_[1]; }
  int nz() const { return dims_[2]; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx()) * ny() * nz(); }

  std::size_t cell_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny() + j) * nx() + i;
  }
  // Face dims for the given axis component.
  std::array<int, 3> face_dims(Axis a) const {
    std::array<int, 3> d = dims_;
    ++d[static_cast<int>(a)];
    return d;
  }
  std::size_t face_index(Axis a, int i, int j, int k) const {
    const auto d = face_dims(a);
    return (static_cast<std::size_t>(k) * d[1] + j) * d[0] + i;
  }

  Vec3 cell_center(int i, int j, int k) const {
    return origin_ + Vec3{(i + 0.5) * dx_, (j + 0.5) * dx_, (k + 0.5) * dx_};
  }
  Vec3 face_center(Axis a, int i, int j, int k) const;

  std::vector<double>& velocity(Axis a) { return vel_[static_cast<int>(a)]; }
  const std::vector<double>& velocity(Axis a) const { return vel_[static_cast<int>(a)]; }
  // Rigid-body velocity of the boundary, sampled on faces.
  std::vector<double>& solid_velocity(Axis a) { return solid_vel_[static_cast<int>(a)]; }
  const std::vector<double>& solid_velocity(Axis a) const { return solid_vel_[static_cast<int>(a)]; }

  std::vector<double>& pressure() { return pressure_; }
  const std::vector<double>& pressure() const { return pressure_; }
  std::vector<double>& solid_phi() { return solid_phi_; }
  const std::vector<double>& solid_phi() const { return solid_phi_; }
  std::vector<CellLabel>& labels() { return labels_; }
  const std::vector<CellLabel>& labels() const { return labels_; }

  CellLabel label(int i, int j, int k) const { return labels_[cell_index(i, j, k)]; }
  // Cells outside the grid are treated as solid.
  CellLabel label_or_solid(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= nx() || j >= ny() || k >= nz()) return CellLabel::Solid;
    return label(i, j, k);
  }

  // Trilinear interpolation of the staggered velocity at a world point.
  Vec3 sample_velocity(const Vec3& p) const;
  double sample_component(Axis a, const Vec3& p) const;

  // Discrete divergence (1/s) of cell (i,j,k).
  double divergence(int i, int j, int k) const;
  // Max |divergence| over fluid cells.
  double max_fluid_divergence() const;

  // Labels cells Solid where solid_phi < 0, else Empty; Fluid must be set by the caller.
  void relabel_from_solid();

  // Time step used to convert the projection potential to pressure (Pa).
  double pressure_dt = 1.0;

 private:
  Vec3 origin_;
  double dx_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::array<std::vector<double>, 3> vel_;
  std::array<std::vector<double>, 3> solid_vel_;
  std::vector<double> pressure_;
  std::vector<double> solid_phi_;
  std::vector<CellLabel> labels_;
};

}  // namespace liquidset
