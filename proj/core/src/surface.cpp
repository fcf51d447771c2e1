#include "liquidset/surface.hpp"

#include <algorithm>
#include <cmath>

#include "liquidset/error.hpp"
#include "liquidset/marching.hpp"

namespace liquidset {

SurfaceParams SurfaceParams::resolved(double particle_radius) const {
  SurfaceParams p = *this;
  if (p.kernel_radius <= 0.0) p.kernel_radius = 2.0 * particle_radius;
  if (p.field_dx <= 0.0) p.field_dx = p.kernel_radius;
  if (!(p.kernel_radius > 0.0)) fail(ErrorCode::BadConfig, "kernel radius must be positive");
  if (!(p.field_dx > 0.0)) fail(ErrorCode::BadConfig, "field dx must be positive");
  if (p.smoothing_iterations < 0) fail(ErrorCode::BadConfig, "smoothing iterations must be >= 0");
  return p;
}

Aabb surface_bounds(const ParticleSet& particles, const SurfaceParams& params) {
  if (particles.empty()) fail(ErrorCode::EmptyField, "no particles");
  Aabb box;
  for (const Vec3& p : particles.positions) box.expand(p);
  // Half-cell shift keeps the extreme particles off the node lattice, where
  // neighbouring nodes would land exactly on the iso level.
  return box.padded(4.0 * params.kernel_radius + 0.5 * params.field_dx);
}

namespace {

std::array<int, 3> node_dims(const Aabb& bounds, double h) {
  const Vec3 e = bounds.extent();
  return {std::max(2, static_cast<int>(std::ceil(e.x / h)) + 1),
          std::max(2, static_cast<int>(std::ceil(e.y / h)) + 1),
          std::max(2, static_cast<int>(std::ceil(e.z / h)) + 1)};
}

struct NodeRange {
  int lo[3];
  int hi[3];
};

NodeRange nodes_within(const ScalarGrid& g, const Vec3& p, double reach) {
  NodeRange r{};
  for (int a = 0; a < 3; ++a) {
    r.lo[a] = std::max(0, static_cast<int>(std::ceil((p[a] - reach - g.origin()[a]) / g.dx())));
    r.hi[a] = std::min(g.dims()[a] - 1, static_cast<int>(std::floor((p[a] + reach - g.origin()[a]) / g.dx())));
  }
  return r;
}

ScalarGrid union_of_spheres(const ParticleSet& particles, const SurfaceParams& params, const Aabb& bounds) {
  const double h = params.field_dx;
  const double rk = params.kernel_radius;
  const double reach = rk + 2.0 * h;
  ScalarGrid g(bounds.lo, h, node_dims(bounds, h), reach);
  // Track min squared distance, convert at the end.
  auto& data = g.data();
  std::fill(data.begin(), data.end(), (reach + rk) * (reach + rk));
  for (const Vec3& p : particles.positions) {
    const NodeRange r = nodes_within(g, p, reach);
    for (int k = r.lo[2]; k <= r.hi[2]; ++k) {
      for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
        for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
          const Vec3 d = g.position(i, j, k) - p;
          double& cell = g.at(i, j, k);
          cell = std::min(cell, dot(d, d));
        }
      }
    }
  }
  for (double& v : data) v = std::sqrt(v) - rk;
  return g;
}

// Zhu-Bridson: phi(x) = |x - xbar| - r with kernel-weighted mean position.
ScalarGrid averaged_centers(const ParticleSet& particles, const SurfaceParams& params, const Aabb& bounds) {
  const double h = params.field_dx;
  const double rk = params.kernel_radius;
  const double support = 2.0 * rk;
  ScalarGrid g(bounds.lo, h, node_dims(bounds, h), 0.0);
  const std::size_t n = g.size();
  std::vector<double> wsum(n, 0.0);
  std::vector<Vec3> xsum(n);
  for (const Vec3& p : particles.positions) {
    const NodeRange r = nodes_within(g, p, support);
    for (int k = r.lo[2]; k <= r.hi[2]; ++k) {
      for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
        for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
          const Vec3 d = g.position(i, j, k) - p;
          const double s2 = dot(d, d) / (support * support);
          if (s2 >= 1.0) continue;
          const double w = (1.0 - s2) * (1.0 - s2) * (1.0 - s2);
          const std::size_t c = g.index(i, j, k);
          wsum[c] += w;
          xsum[c] += p * w;
        }
      }
    }
  }
  for (int k = 0; k < g.dims()[2]; ++k) {
    for (int j = 0; j < g.dims()[1]; ++j) {
      for (int i = 0; i < g.dims()[0]; ++i) {
        const std::size_t c = g.index(i, j, k);
        g.data()[c] = wsum[c] > 0.0 ? norm(g.position(i, j, k) - xsum[c] / wsum[c]) - rk : support;
      }
    }
  }
  return g;
}

}  // namespace

ScalarGrid particles_to_field(const ParticleSet& particles, const SurfaceParams& params, const Aabb& bounds) {
  if (particles.empty()) fail(ErrorCode::EmptyField, "no particles");
  if (!(params.kernel_radius > 0.0) || !(params.field_dx > 0.0)) {
    fail(ErrorCode::BadConfig, "surface params must be resolved before use");
  }
  return params.averaged ? averaged_centers(particles, params, bounds)
                         : union_of_spheres(particles, params, bounds);
}

TriMesh smooth_taubin(const TriMesh& mesh, int iterations, double lambda, double mu) {
  if (iterations <= 0 || mesh.empty()) return mesh;
  const std::size_t n = mesh.vertex_count();
  std::vector<std::vector<std::uint32_t>> nbrs(n);
  for (const Triangle& t : mesh.triangles()) {
    for (int e = 0; e < 3; ++e) {
      nbrs[t[e]].push_back(t[(e + 1) % 3]);
      nbrs[t[e]].push_back(t[(e + 2) % 3]);
    }
  }
  for (auto& list : nbrs) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::vector<Vec3> v = mesh.vertices();
  std::vector<Vec3> next(n);
  auto pass = [&](double factor) {
    for (std::size_t i = 0; i < n; ++i) {
      if (nbrs[i].empty()) {
        next[i] = v[i];
        continue;
      }
      Vec3 avg;
      for (std::uint32_t j : nbrs[i]) avg += v[j];
      avg = avg / static_cast<double>(nbrs[i].size());
      next[i] = v[i] + (avg - v[i]) * factor;
    }
    v.swap(next);
  };
  for (int it = 0; it < iterations; ++it) {
    pass(lambda);
    pass(mu);
  }
  return TriMesh(std::move(v), mesh.triangles());
}

TriMesh extract_surface(const ParticleSet& particles, const SurfaceParams& raw) {
  if (particles.empty()) fail(ErrorCode::EmptyField, "no particles");
  const SurfaceParams params = raw.resolved(particles.particle_radius);
  const Aabb bounds = surface_bounds(particles, params);
  const ScalarGrid field = particles_to_field(particles, params, bounds);
  TriMesh mesh = marching_cubes(field, params.iso_offset);
  return smooth_taubin(mesh, params.smoothing_iterations);
}

}  // namespace liquidset
