#pragma once

#include <cstdint>
#include <vector>

#include "liquidset/mac_grid.hpp"
#include "liquidset/sdf.hpp"
#include "liquidset/vec.hpp"

namespace liquidset {

struct SimParams {
  double dx = 0.005;            // grid cell size, m
  double dt = 1.0 / 24.0;       // frame duration, s
  double cfl = 1.0;             // substep CFL number
  Vec3 gravity{0.0, 0.0, -9.81};
  double viscosity = 1.0e-6;    // kinematic, m^2/s
  double density = 1000.0;      // kg/m^3
  double flip_ratio = 0.95;
  double particle_radius = 0.0;  // m; 0 selects dx / 5
  std::size_t max_particles = 2'000'000;
  double pressure_tolerance = 1e-4;  // max |div u|, 1/s
  int pressure_max_iterations = 400;
  double jitter = 0.25;         // seeding jitter, fraction of dx

  double effective_particle_radius() const { return particle_radius > 0.0 ? particle_radius : 0.2 * dx; }
  double particle_volume() const { return dx * dx * dx / 8.0; }
  // Throws BadConfig when an invariant is violated.
  void validate() const;
};

struct ParticleSet {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  double particle_volume = 0.0;  // m^3, shared
  double particle_radius = 0.0;  // m, collision and surfacing radius

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  double total_volume() const { return particle_volume * static_cast<double>(size()); }
};

struct ProjectionStats {
  int iterations = 0;
  double residual = 0.0;        // max |r| reached by the solver, 1/s
  double max_divergence = 0.0;  // recomputed from velocities after the update, 1/s
  std::size_t fluid_cells = 0;
};

struct StepStats {
  int substeps = 0;
  int max_iterations = 0;
  double max_divergence = 0.0;  // max over substeps, post projection
};

// Cubic simulation domain centered on the pivot that contains the cavity in
// every orientation.
struct SimDomain {
  Vec3 origin;
  std::array<int, 3> dims{0, 0, 0};
  double dx = 0.0;
};
SimDomain make_domain(const SdfShape& container, const Vec3& pivot, double dx);
// dx giving `cells` cells per axis for the domain above.
double dx_for_resolution(const SdfShape& container, const Vec3& pivot, int cells);

// Jitter-seeds 8 particles per cell inside the cavity and keeps the lowest
// fill_volume / particle_volume of them by world z. Velocities are zero.
ParticleSet seed_particles(const SdfShape& container, const RigidPose& pose, double fill_volume,
                           const SimParams& params, std::uint64_t seed = 0);

// Makes the velocity field divergence free on fluid cells. Faces touching a
// solid cell take the solid velocity; empty cells hold p = 0.
MacGrid pressure_project(const MacGrid& grid, const SimParams& params,
                         ProjectionStats* stats = nullptr);

// Advances one frame of duration params.dt while the container moves from
// pose_t to pose_t1.
ParticleSet simulate_step(const ParticleSet& particles, const SdfShape& container,
                          const RigidPose& pose_t, const RigidPose& pose_t1, const SimParams& params,
                          StepStats* stats = nullptr);

struct SurfaceTilt {
  Vec3 normal;        // unit, pointing up
  double wall_angle;  // degrees between the free surface plane and the container axis
};

// Plane fit to the top 10% of particles by world z.
SurfaceTilt measure_surface_tilt(const ParticleSet& particles, const RigidPose& pose);

double mean_speed(const ParticleSet& particles);

namespace flip {

// Pieces of simulate_step, exposed for testing.

// Container state at `elapsed` seconds into a frame; Euler angles and pivot
// are interpolated linearly between the frame's end poses.
struct BoundaryMotion {
  RigidPose pose;
  RigidTransform world_from_local;
  RigidTransform local_from_world;
  Vec3 angular_velocity;  // rad/s, world
  Vec3 pivot_velocity;    // m/s

  static BoundaryMotion at(const RigidPose& pose_t, const RigidPose& pose_t1, double frame_dt,
                           double elapsed);
  Vec3 velocity_at(const Vec3& world) const;
};
// Zero-velocity grid over the domain with solid_phi, labels and boundary
// velocities for the container at `motion`.
MacGrid make_grid(const SimDomain& domain, const SdfShape& container, const BoundaryMotion& motion);

// Trilinear particle-to-face splat; returns per-face validity (weight > 0).
std::array<std::vector<std::uint8_t>, 3> transfer_to_grid(const ParticleSet& particles, MacGrid& grid);
// Marks non-solid cells containing particles as fluid.
void mark_fluid(const ParticleSet& particles, MacGrid& grid);
// Extends valid face velocities into invalid faces, `layers` rings deep.
void extrapolate(MacGrid& grid, std::array<std::vector<std::uint8_t>, 3>& valid, int layers);
// Blends FLIP and PIC updates into particle velocities.
void grid_to_particles(ParticleSet& particles, const MacGrid& old_grid, const MacGrid& new_grid,
                       double flip_ratio);

}  // namespace flip

}  // namespace liquidset
