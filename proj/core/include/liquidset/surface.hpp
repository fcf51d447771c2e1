#pragma once

#include "liquidset/fluid.hpp"
#include "liquidset/mesh.hpp"
#include "liquidset/voxel.hpp"

namespace liquidset {

struct SurfaceParams {
  double field_dx = 0.0;       // m; 0 selects kernel_radius
  double kernel_radius = 0.0;  // m; 0 selects 2 x particle radius
  double iso_offset = 0.0;     // mesh the level set phi == iso_offset, m
  int smoothing_iterations = 0;
  // Averaged-centre (Zhu-Bridson) field instead of the union of spheres.
  bool averaged = false;

  // Fills the zero defaults from the particle radius; throws BadConfig on invalid values.
  SurfaceParams resolved(double particle_radius) const;
};

// Signed field, negative inside the liquid, sampled on nodes covering `bounds`.
// Union of spheres: phi(x) = min_i |x - x_i| - r_k. Nodes far from every particle
// hold a positive cap value.
ScalarGrid particles_to_field(const ParticleSet& particles, const SurfaceParams& params,
                              const Aabb& bounds);

// Particle AABB padded by 4 kernel radii plus half a field cell.
Aabb surface_bounds(const ParticleSet& particles, const SurfaceParams& params);

// Watertight liquid surface in meters. Defaults resolve from
// particles.particle_radius. Each smoothing iteration is one Taubin
// (lambda/mu) Laplacian pass pair, which keeps the enclosed volume stable.
TriMesh extract_surface(const ParticleSet& particles, const SurfaceParams& params);

// Taubin smoothing on an arbitrary mesh; connectivity is unchanged.
TriMesh smooth_taubin(const TriMesh& mesh, int iterations, double lambda = 0.5, double mu = -0.53);

}  // namespace liquidset
