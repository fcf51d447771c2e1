#include "liquidset/mac_grid.hpp"

#include <algorithm>
#include <cmath>

#include "liquidset/error.hpp"

namespace liquidset {

MacGrid::MacGrid(const Vec3& origin, double dx, std::array<int, 3> dims)
    : origin_(origin), dx_(dx), dims_(dims) {
  if (!(dx > 0.0) || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    fail(ErrorCode::BadDims, "MAC grid needs dx > 0 and positive dims");
  }
  for (int a = 0; a < 3; ++a) {
    const auto d = face_dims(static_cast<Axis>(a));
    const auto n = static_cast<std::size_t>(d[0]) * d[1] * d[2];
    vel_[a].assign(n, 0.0);
    solid_vel_[a].assign(n, 0.0);
  }
  pressure_.assign(cell_count(), 0.0);
  solid_phi_.assign(cell_count(), 1.0);
  labels_.assign(cell_count(), CellLabel::Empty);
}

Vec3 MacGrid::face_center(Axis a, int i, int j, int k) const {
  Vec3 p = cell_center(i, j, k);
  p[static_cast<int>(a)] -= 0.5 * dx_;
  return p;
}

double MacGrid::sample_component(Axis a, const Vec3& p) const {
  const int ax = static_cast<int>(a);
  const auto d = face_dims(a);
  // Face (i,j,k) of axis a sits at origin + (i + 0.5 - 0.5*[a==axis]) * dx.
  double g[3];
  int base[3];
  double frac[3];
  for (int c = 0; c < 3; ++c) {
    g[c] = (p[c] - origin_[c]) / dx_ - (c == ax ? 0.0 : 0.5);
    const double lim = static_cast<double>(d[c] - 1);
    g[c] = std::clamp(g[c], 0.0, lim);
    base[c] = std::min(static_cast<int>(g[c]), std::max(d[c] - 2, 0));
    frac[c] = g[c] - base[c];
  }
  const std::vector<double>& f = vel_[ax];
  auto at = [&](int i, int j, int k) {
    i = std::min(i, d[0] - 1);
    j = std::min(j, d[1] - 1);
    k = std::min(k, d[2] - 1);
    return f[(static_cast<std::size_t>(k) * d[1] + j) * d[0] + i];
  };
  const int i = base[0], j = base[1], k = base[2];
  const double fx = frac[0], fy = frac[1], fz = frac[2];
  const double c00 = at(i, j, k) * (1 - fx) + at(i + 1, j, k) * fx;
  const double c10 = at(i, j + 1, k) * (1 - fx) + at(i + 1, j + 1, k) * fx;
  const double c01 = at(i, j, k + 1) * (1 - fx) + at(i + 1, j, k + 1) * fx;
  const double c11 = at(i, j + 1, k + 1) * (1 - fx) + at(i + 1, j + 1, k + 1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

Vec3 MacGrid::sample_velocity(const Vec3& p) const {
  return {sample_component(Axis::X, p), sample_component(Axis::Y, p), sample_component(Axis::Z, p)};
}

double MacGrid::divergence(int i, int j, int k) const {
  const auto& u = vel_[0];
  const auto& v = vel_[1];
  const auto& w = vel_[2];
  const double du = u[face_index(Axis::X, i + 1, j, k)] - u[face_index(Axis::X, i, j, k)];
  const double dv = v[face_index(Axis::Y, i, j + 1, k)] - v[face_index(Axis::Y, i, j, k)];
  const double dw = w[face_index(Axis::Z, i, j, k + 1)] - w[face_index(Axis::Z, i, j, k)];
  return (du + dv + dw) / dx_;
}

double MacGrid::max_fluid_divergence() const {
  double m = 0.0;
  for (int k = 0; k < nz(); ++k)
    for (int j = 0; j < ny(); ++j)
      for (int i = 0; i < nx(); ++i)
        if (label(i, j, k) == CellLabel::Fluid) m = std::max(m, std::abs(divergence(i, j, k)));
  return m;
}

void MacGrid::relabel_from_solid() {
  for (std::size_t c = 0; c < cell_count(); ++c) {
    labels_[c] = solid_phi_[c] < 0.0 ? CellLabel::Solid : CellLabel::Empty;
  }
}

}  // namespace liquidset
