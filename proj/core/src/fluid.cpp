#include "liquidset/fluid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "liquidset/error.hpp"
#include "rng.hpp"

namespace liquidset {

void SimParams::validate() const {
  if (!(dx > 0.0)) fail(ErrorCode::BadConfig, "dx must be positive");
  if (!(dt > 0.0)) fail(ErrorCode::BadConfig, "dt must be positive");
  if (!(cfl > 0.0)) fail(ErrorCode::BadConfig, "cfl must be positive");
  if (!(flip_ratio >= 0.0 && flip_ratio <= 1.0)) fail(ErrorCode::BadConfig, "flip_ratio must lie in [0,1]");
  const double r = effective_particle_radius();
  if (!(r > 0.0 && r < dx)) fail(ErrorCode::BadConfig, "particle_radius must lie in (0, dx)");
  if (max_particles == 0) fail(ErrorCode::BadConfig, "max_particles must be positive");
  if (!(density > 0.0)) fail(ErrorCode::BadConfig, "density must be positive");
  if (!(viscosity >= 0.0)) fail(ErrorCode::BadConfig, "viscosity must be non-negative");
  if (!(pressure_tolerance > 0.0) || pressure_max_iterations <= 0) {
    fail(ErrorCode::BadConfig, "pressure solver settings must be positive");
  }
}

namespace {

double bounding_radius(const SdfShape& container, const Vec3& pivot) {
  const Aabb b = container.bounds();
  double r = 0.0;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{(c & 1) ? b.hi.x : b.lo.x, (c & 2) ? b.hi.y : b.lo.y, (c & 4) ? b.hi.z : b.lo.z};
    r = std::max(r, norm(corner - pivot));
  }
  return r;
}

constexpr int kDomainPadCells = 2;

}  // namespace

SimDomain make_domain(const SdfShape& container, const Vec3& pivot, double dx) {
  const double half = bounding_radius(container, pivot) + kDomainPadCells * dx;
  const int n = static_cast<int>(std::ceil(2.0 * half / dx - 1e-9));
  SimDomain d;
  d.dx = dx;
  d.dims = {n, n, n};
  const double span = n * dx;
  d.origin = pivot - Vec3{span, span, span} * 0.5;
  return d;
}

double dx_for_resolution(const SdfShape& container, const Vec3& pivot, int cells) {
  if (cells <= 2 * kDomainPadCells) fail(ErrorCode::BadConfig, "grid resolution too small");
  return 2.0 * bounding_radius(container, pivot) / (cells - 2 * kDomainPadCells);
}

ParticleSet seed_particles(const SdfShape& container, const RigidPose& pose, double fill_volume,
                           const SimParams& params, std::uint64_t seed) {
  params.validate();
  ParticleSet out;
  out.particle_volume = params.particle_volume();
  out.particle_radius = params.effective_particle_radius();
  if (fill_volume < 0.0) fail(ErrorCode::BadConfig, "fill volume must be non-negative");
  if (const auto cap = container.analytic_volume(); cap && fill_volume > *cap) {
    fail(ErrorCode::Overfill, "fill volume exceeds cavity volume");
  }
  const auto wanted = static_cast<std::size_t>(std::llround(fill_volume / out.particle_volume));
  if (wanted == 0) return out;
  if (wanted > params.max_particles) fail(ErrorCode::ParticleLimit, "particle count exceeds max_particles");

  const SimDomain dom = make_domain(container, pose.pivot, params.dx);
  const double dx = params.dx;
  const double r = params.effective_particle_radius();
  Rng rng(seed);
  std::vector<Vec3> candidates;
  for (int k = 0; k < dom.dims[2]; ++k) {
    for (int j = 0; j < dom.dims[1]; ++j) {
      for (int i = 0; i < dom.dims[0]; ++i) {
        const Vec3 center = dom.origin + Vec3{(i + 0.5) * dx, (j + 0.5) * dx, (k + 0.5) * dx};
        if (container.distance(pose.to_local(center)) >= 0.0) continue;
        for (int s = 0; s < 8; ++s) {
          const Vec3 sub{(s & 1) ? 0.25 : -0.25, (s & 2) ? 0.25 : -0.25, (s & 4) ? 0.25 : -0.25};
          Vec3 p = center + sub * dx;
          p.x += rng.uniform(-params.jitter, params.jitter) * dx;
          p.y += rng.uniform(-params.jitter, params.jitter) * dx;
          p.z += rng.uniform(-params.jitter, params.jitter) * dx;
          if (container.distance(pose.to_local(p)) < -r) candidates.push_back(p);
        }
      }
    }
  }
  if (wanted > candidates.size()) fail(ErrorCode::Overfill, "fill volume exceeds seedable cavity volume");

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].z < candidates[b].z; });
  order.resize(wanted);
  std::sort(order.begin(), order.end());
  out.positions.reserve(wanted);
  for (std::size_t idx : order) out.positions.push_back(candidates[idx]);
  out.velocities.assign(wanted, Vec3{});
  return out;
}

namespace flip {

BoundaryMotion BoundaryMotion::at(const RigidPose& pose_t, const RigidPose& pose_t1, double frame_dt,
                                  double elapsed) {
  auto lerp_pose = [&](double s) {
    return RigidPose{pose_t.angles_deg + (pose_t1.angles_deg - pose_t.angles_deg) * s,
                     pose_t.pivot + (pose_t1.pivot - pose_t.pivot) * s};
  };
  const double s = elapsed / frame_dt;
  BoundaryMotion m;
  m.pose = lerp_pose(s);
  m.world_from_local = RigidTransform::from_pose(m.pose);
  m.local_from_world = m.world_from_local.inverse();
  // Angular velocity from the rotation increment over a short interval.
  constexpr double h = 1e-4;
  const double s0 = std::max(0.0, s - 0.5 * h);
  const double s1 = s0 + h;
  const Mat3 increment = lerp_pose(s1).rotation() * lerp_pose(s0).rotation().transposed();
  m.angular_velocity = rotation_log(increment) / (h * frame_dt);
  m.pivot_velocity = (pose_t1.pivot - pose_t.pivot) / frame_dt;
  return m;
}

Vec3 BoundaryMotion::velocity_at(const Vec3& world) const {
  return cross(angular_velocity, world - pose.pivot) + pivot_velocity -
         world_from_local.r * pivot_velocity;
}

MacGrid make_grid(const SimDomain& domain, const SdfShape& container, const BoundaryMotion& motion) {
  MacGrid g(domain.origin, domain.dx, domain.dims);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        g.solid_phi()[g.cell_index(i, j, k)] =
            -container.distance(motion.local_from_world.apply(g.cell_center(i, j, k)));
  g.relabel_from_solid();
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = g.face_dims(ax);
    auto& sv = g.solid_velocity(ax);
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i)
          sv[g.face_index(ax, i, j, k)] = motion.velocity_at(g.face_center(ax, i, j, k))[a];
  }
  return g;
}

std::array<std::vector<std::uint8_t>, 3> transfer_to_grid(const ParticleSet& particles, MacGrid& grid) {
  std::array<std::vector<std::uint8_t>, 3> valid;
  const double dx = grid.dx();
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = grid.face_dims(ax);
    auto& vel = grid.velocity(ax);
    std::vector<double> weight(vel.size(), 0.0);
    std::fill(vel.begin(), vel.end(), 0.0);
    for (std::size_t p = 0; p < particles.size(); ++p) {
      const Vec3& x = particles.positions[p];
      double g[3];
      int base[3];
      double frac[3];
      for (int c = 0; c < 3; ++c) {
        g[c] = (x[c] - grid.origin()[c]) / dx - (c == a ? 0.0 : 0.5);
        base[c] = static_cast<int>(std::floor(g[c]));
        frac[c] = g[c] - base[c];
      }
      const double value = particles.velocities[p][a];
      for (int dk = 0; dk < 2; ++dk) {
        const int k = base[2] + dk;
        if (k < 0 || k >= d[2]) continue;
        const double wz = dk ? frac[2] : 1.0 - frac[2];
        for (int dj = 0; dj < 2; ++dj) {
          const int j = base[1] + dj;
          if (j < 0 || j >= d[1]) continue;
          const double wy = dj ? frac[1] : 1.0 - frac[1];
          for (int di = 0; di < 2; ++di) {
            const int i = base[0] + di;
            if (i < 0 || i >= d[0]) continue;
            const double w = wz * wy * (di ? frac[0] : 1.0 - frac[0]);
            const std::size_t f = grid.face_index(ax, i, j, k);
            vel[f] += w * value;
            weight[f] += w;
          }
        }
      }
    }
    valid[a].assign(vel.size(), 0);
    for (std::size_t f = 0; f < vel.size(); ++f) {
      if (weight[f] > 1e-12) {
        vel[f] /= weight[f];
        valid[a][f] = 1;
      } else {
        vel[f] = 0.0;
      }
    }
  }
  return valid;
}

void mark_fluid(const ParticleSet& particles, MacGrid& grid) {
  for (const Vec3& x : particles.positions) {
    const int i = static_cast<int>(std::floor((x.x - grid.origin().x) / grid.dx()));
    const int j = static_cast<int>(std::floor((x.y - grid.origin().y) / grid.dx()));
    const int k = static_cast<int>(std::floor((x.z - grid.origin().z) / grid.dx()));
    if (i < 0 || j < 0 || k < 0 || i >= grid.nx() || j >= grid.ny() || k >= grid.nz()) continue;
    auto& l = grid.labels()[grid.cell_index(i, j, k)];
    if (l != CellLabel::Solid) l = CellLabel::Fluid;
  }
}

void extrapolate(MacGrid& grid, std::array<std::vector<std::uint8_t>, 3>& valid, int layers) {
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = grid.face_dims(ax);
    auto& vel = grid.velocity(ax);
    auto& ok = valid[a];
    std::vector<std::uint8_t> next;
    std::vector<double> values;
    for (int layer = 0; layer < layers; ++layer) {
      next = ok;
      values = vel;
      bool changed = false;
      for (int k = 0; k < d[2]; ++k) {
        for (int j = 0; j < d[1]; ++j) {
          for (int i = 0; i < d[0]; ++i) {
            const std::size_t f = grid.face_index(ax, i, j, k);
            if (ok[f]) continue;
            double sum = 0.0;
            int count = 0;
            const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                                  {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
            for (const auto& n : nb) {
              if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= d[0] || n[1] >= d[1] || n[2] >= d[2]) continue;
              const std::size_t nf = grid.face_index(ax, n[0], n[1], n[2]);
              if (!ok[nf]) continue;
              sum += vel[nf];
              ++count;
            }
            if (count > 0) {
              values[f] = sum / count;
              next[f] = 1;
              changed = true;
            }
          }
        }
      }
      vel.swap(values);
      ok.swap(next);
      if (!changed) break;
    }
  }
}

void grid_to_particles(ParticleSet& particles, const MacGrid& old_grid, const MacGrid& new_grid,
                       double flip_ratio) {
  for (std::size_t p = 0; p < particles.size(); ++p) {
    const Vec3& x = particles.positions[p];
    const Vec3 pic = new_grid.sample_velocity(x);
    if (flip_ratio == 0.0) {
      particles.velocities[p] = pic;
      continue;
    }
    const Vec3 delta = pic - old_grid.sample_velocity(x);
    particles.velocities[p] = (particles.velocities[p] + delta) * flip_ratio + pic * (1.0 - flip_ratio);
  }
}

}  // namespace flip

namespace {

using flip::BoundaryMotion;

// Faces touching a solid cell carry the boundary velocity.
void impose_solid_faces(MacGrid& g) {
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = g.face_dims(ax);
    auto& vel = g.velocity(ax);
    const auto& sv = g.solid_velocity(ax);
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          int li = i, lj = j, lk = k;
          (a == 0 ? li : a == 1 ? lj : lk) -= 1;
          if (g.label_or_solid(li, lj, lk) == CellLabel::Solid || g.label_or_solid(i, j, k) == CellLabel::Solid) {
            const std::size_t f = g.face_index(ax, i, j, k);
            vel[f] = sv[f];
          }
        }
      }
    }
  }
}

std::array<std::vector<std::uint8_t>, 3> fluid_face_mask(const MacGrid& g) {
  std::array<std::vector<std::uint8_t>, 3> mask;
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = g.face_dims(ax);
    mask[a].assign(g.velocity(ax).size(), 0);
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          int li = i, lj = j, lk = k;
          (a == 0 ? li : a == 1 ? lj : lk) -= 1;
          const CellLabel l = g.label_or_solid(li, lj, lk);
          const CellLabel r = g.label_or_solid(i, j, k);
          if (l == CellLabel::Fluid || r == CellLabel::Fluid || l == CellLabel::Solid || r == CellLabel::Solid) {
            mask[a][g.face_index(ax, i, j, k)] = 1;
          }
        }
      }
    }
  }
  return mask;
}

// Explicit viscous diffusion on faces adjacent to fluid.
void apply_viscosity(MacGrid& g, const std::array<std::vector<std::uint8_t>, 3>& active, double nu, double dt) {
  if (nu <= 0.0) return;
  const double k = nu * dt / (g.dx() * g.dx());
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = g.face_dims(ax);
    const std::vector<double> src = g.velocity(ax);
    auto& vel = g.velocity(ax);
    for (int kk = 0; kk < d[2]; ++kk) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          const std::size_t f = g.face_index(ax, i, j, kk);
          if (!active[a][f]) continue;
          double lap = 0.0;
          const int nb[6][3] = {{i - 1, j, kk}, {i + 1, j, kk}, {i, j - 1, kk},
                                {i, j + 1, kk}, {i, j, kk - 1}, {i, j, kk + 1}};
          for (const auto& n : nb) {
            if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= d[0] || n[1] >= d[1] || n[2] >= d[2]) continue;
            lap += src[g.face_index(ax, n[0], n[1], n[2])] - src[f];
          }
          vel[f] = src[f] + k * lap;
        }
      }
    }
  }
}

// Fluid-adjacent faces that are not boundary faces.
std::array<std::vector<std::uint8_t>, 3> liquid_faces(const MacGrid& g) {
  std::array<std::vector<std::uint8_t>, 3> mask;
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = g.face_dims(ax);
    mask[a].assign(g.velocity(ax).size(), 0);
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          int li = i, lj = j, lk = k;
          (a == 0 ? li : a == 1 ? lj : lk) -= 1;
          const CellLabel l = g.label_or_solid(li, lj, lk);
          const CellLabel r = g.label_or_solid(i, j, k);
          if (l == CellLabel::Solid || r == CellLabel::Solid) continue;
          if (l == CellLabel::Fluid || r == CellLabel::Fluid) mask[a][g.face_index(ax, i, j, k)] = 1;
        }
      }
    }
  }
  return mask;
}

void push_out(ParticleSet& ps, const SdfShape& container, const BoundaryMotion& motion, double radius,
              const Vec3& fallback_local) {
  const Mat3& rot = motion.world_from_local.r;
  for (std::size_t p = 0; p < ps.size(); ++p) {
    Vec3& x = ps.positions[p];
    Vec3 local = motion.local_from_world.apply(x);
    double phi = container.distance(local);
    if (phi < -radius) continue;
    Vec3 n_local;
    for (int iter = 0; iter < 4 && phi >= -radius; ++iter) {
      n_local = normalized(container.gradient(local, 1e-3 * radius));
      if (norm(n_local) == 0.0) break;
      local -= n_local * (phi + radius);
      phi = container.distance(local);
    }
    if (phi >= 0.0) {
      // Last resort: march toward the cavity centroid.
      for (int iter = 0; iter < 64 && phi >= -0.5 * radius; ++iter) {
        local = local + (fallback_local - local) * 0.1;
        phi = container.distance(local);
      }
    }
    x = motion.world_from_local.apply(local);
    if (norm(n_local) > 0.0) {
      const Vec3 n = rot * n_local;
      Vec3& v = ps.velocities[p];
      const double rel = dot(v - motion.velocity_at(x), n);
      if (rel > 0.0) v -= n * rel;
    }
  }
}

double max_boundary_speed(const SdfShape& container, const BoundaryMotion& m) {
  const Aabb b = container.bounds();
  double v = 0.0;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{(c & 1) ? b.hi.x : b.lo.x, (c & 2) ? b.hi.y : b.lo.y, (c & 4) ? b.hi.z : b.lo.z};
    v = std::max(v, norm(m.velocity_at(m.world_from_local.apply(corner))));
  }
  return v;
}

void check_finite(const ParticleSet& ps, int substep) {
  for (std::size_t p = 0; p < ps.size(); ++p) {
    if (!is_finite(ps.positions[p]) || !is_finite(ps.velocities[p])) {
      Error err(ErrorCode::NumericalBlowup, "non-finite particle state");
      err.substep = substep;
      throw err;
    }
  }
}

constexpr int kExtrapolationLayers = 4;

}  // namespace

ParticleSet simulate_step(const ParticleSet& particles, const SdfShape& container, const RigidPose& pose_t,
                          const RigidPose& pose_t1, const SimParams& params, StepStats* stats) {
  params.validate();
  ParticleSet ps = particles;
  StepStats local_stats;
  if (ps.empty()) {
    if (stats != nullptr) *stats = local_stats;
    return ps;
  }
  const SimDomain domain = make_domain(container, pose_t.pivot, params.dx);
  const double radius = params.effective_particle_radius();
  const Vec3 fallback = cavity_moments(container, params.dx).centroid;
  const double frame_dt = params.dt;
  double elapsed = 0.0;
  int substep = 0;
  check_finite(ps, 0);
  while (elapsed < frame_dt * (1.0 - 1e-12)) {
    // Substep from the CFL condition on particle and wall speeds.
    double max_v = 0.0;
    for (const Vec3& v : ps.velocities) max_v = std::max(max_v, norm(v));
    const BoundaryMotion start = BoundaryMotion::at(pose_t, pose_t1, frame_dt, elapsed);
    max_v = std::max(max_v, max_boundary_speed(container, start));
    max_v += std::sqrt(5.0 * params.dx * norm(params.gravity));
    double dt = max_v > 0.0 ? params.cfl * params.dx / max_v : frame_dt;
    const double remaining = frame_dt - elapsed;
    if (dt >= remaining) {
      dt = remaining;
    } else if (dt > 0.5 * remaining) {
      dt = 0.5 * remaining;
    }
    const BoundaryMotion motion = BoundaryMotion::at(pose_t, pose_t1, frame_dt, elapsed + dt);

    MacGrid grid = flip::make_grid(domain, container, motion);
    grid.pressure_dt = dt;
    auto valid = flip::transfer_to_grid(ps, grid);
    flip::mark_fluid(ps, grid);
    flip::extrapolate(grid, valid, kExtrapolationLayers);
    const MacGrid old_grid = grid;

    const auto active = fluid_face_mask(grid);
    for (int a = 0; a < 3; ++a) {
      auto& vel = grid.velocity(static_cast<Axis>(a));
      const double ga = params.gravity[a] * dt;
      for (std::size_t f = 0; f < vel.size(); ++f) vel[f] += ga;
    }
    apply_viscosity(grid, active, params.viscosity, dt);

    ProjectionStats ps_stats;
    try {
      grid = pressure_project(grid, params, &ps_stats);
    } catch (Error& e) {
      e.substep = substep;
      throw;
    }
    local_stats.max_divergence = std::max(local_stats.max_divergence, ps_stats.max_divergence);
    local_stats.max_iterations = std::max(local_stats.max_iterations, ps_stats.iterations);

    auto keep = liquid_faces(grid);
    flip::extrapolate(grid, keep, kExtrapolationLayers);
    impose_solid_faces(grid);

    flip::grid_to_particles(ps, old_grid, grid, params.flip_ratio);

    for (std::size_t p = 0; p < ps.size(); ++p) {
      const Vec3 x0 = ps.positions[p];
      const Vec3 mid = x0 + grid.sample_velocity(x0) * (0.5 * dt);
      ps.positions[p] = x0 + grid.sample_velocity(mid) * dt;
    }
    push_out(ps, container, motion, radius, fallback);
    check_finite(ps, substep);

    elapsed += dt;
    ++substep;
  }
  local_stats.substeps = substep;
  if (stats != nullptr) *stats = local_stats;
  return ps;
}

SurfaceTilt measure_surface_tilt(const ParticleSet& particles, const RigidPose& pose) {
  constexpr std::size_t kMinParticles = 50;
  if (particles.size() < kMinParticles) {
    fail(ErrorCode::InsufficientParticles, "surface tilt needs at least 50 particles");
  }
  std::vector<std::size_t> order(particles.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t top = std::max<std::size_t>(3, (particles.size() + 9) / 10);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double za = particles.positions[a].z;
                      const double zb = particles.positions[b].z;
                      return za != zb ? za > zb : a < b;
                    });
  order.resize(top);

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (std::size_t idx : order) {
    const Vec3& p = particles.positions[idx];
    mean += Eigen::Vector3d(p.x, p.y, p.z);
  }
  mean /= static_cast<double>(top);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t idx : order) {
    const Vec3& p = particles.positions[idx];
    const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  Eigen::Vector3d n = solver.eigenvectors().col(0);  // smallest eigenvalue
  if (n.z() < 0.0) n = -n;

  SurfaceTilt out;
  out.normal = normalized(Vec3{n.x(), n.y(), n.z()});
  const Vec3 wall = pose.rotation() * Vec3{0.0, 0.0, 1.0};
  const double c = std::clamp(std::abs(dot(out.normal, wall)), 0.0, 1.0);
  out.wall_angle = rad_to_deg(std::asin(c));
  return out;
}

double mean_speed(const ParticleSet& particles) {
  if (particles.empty()) return 0.0;
  double s = 0.0;
  for (const Vec3& v : particles.velocities) s += norm(v);
  return s / static_cast<double>(particles.size());
}

}  // namespace liquidset
