#include <cmath>
#include <numeric>

#include "doctest.h"
#include "liquidset/error.hpp"
#include "liquidset/surface.hpp"

using namespace liquidset;

namespace {

ParticleSet particles_at(std::vector<Vec3> xs, double radius) {
  ParticleSet ps;
  ps.positions = std::move(xs);
  ps.velocities.assign(ps.positions.size(), Vec3{});
  ps.particle_radius = radius;
  ps.particle_volume = std::pow(2.0 * radius, 3);
  return ps;
}

// Regular lattice filling [lo, hi) with the given spacing.
ParticleSet block(const Vec3& lo, const Vec3& hi, double spacing, double radius) {
  std::vector<Vec3> xs;
  for (double z = lo.z + 0.5 * spacing; z < hi.z; z += spacing)
    for (double y = lo.y + 0.5 * spacing; y < hi.y; y += spacing)
      for (double x = lo.x + 0.5 * spacing; x < hi.x; x += spacing) xs.push_back({x, y, z});
  return particles_at(std::move(xs), radius);
}

// Connected components over shared vertices (union-find).
int components(const TriMesh& m) {
  std::vector<std::uint32_t> parent(m.vertex_count());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const Triangle& t : m.triangles()) {
    parent[find(t[1])] = find(t[0]);
    parent[find(t[2])] = find(t[0]);
  }
  std::vector<char> used(m.vertex_count(), 0);
  for (const Triangle& t : m.triangles()) used[t[0]] = 1;
  int roots = 0;
  for (std::uint32_t v = 0; v < m.vertex_count(); ++v) roots += used[v] && find(v) == v;
  return roots;
}

double sphere_volume(double r) { return 4.0 / 3.0 * kPi * r * r * r; }

}  // namespace

TEST_CASE("parameter defaults resolve from the particle radius") {
  const SurfaceParams p = SurfaceParams{}.resolved(0.001);
  CHECK(p.kernel_radius == doctest::Approx(0.002));
  CHECK(p.field_dx == doctest::Approx(0.002));
  SurfaceParams bad;
  bad.smoothing_iterations = -1;
  CHECK_THROWS_AS(bad.resolved(0.001), Error);
}

TEST_CASE("empty particle set has no field") {
  const ParticleSet none = particles_at({}, 0.001);
  try {
    extract_surface(none, {});
    FAIL("expected EmptyField");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyField);
  }
}

TEST_CASE("union field is the distance to the nearest particle minus the kernel radius") {
  const ParticleSet ps = particles_at({{0, 0, 0}, {0.03, 0.01, 0}}, 0.005);
  const SurfaceParams p = SurfaceParams{}.resolved(ps.particle_radius);
  const Aabb bounds = surface_bounds(ps, p);
  const ScalarGrid g = particles_to_field(ps, p, bounds);
  int checked = 0;
  for (int k = 0; k < g.dims()[2]; ++k)
    for (int j = 0; j < g.dims()[1]; ++j)
      for (int i = 0; i < g.dims()[0]; ++i) {
        const Vec3 x = g.position(i, j, k);
        const double d = std::min(norm(x - ps.positions[0]), norm(x - ps.positions[1]));
        if (d > p.kernel_radius + p.field_dx) continue;
        CHECK(g.at(i, j, k) == doctest::Approx(d - p.kernel_radius).epsilon(1e-12));
        ++checked;
      }
  CHECK(checked > 0);
}

TEST_CASE("single particle gives a closed sphere of the kernel radius") {
  const double r = 0.005;
  const ParticleSet ps = particles_at({{0.1, -0.2, 0.3}}, r);
  SurfaceParams p;
  p.field_dx = 0.25 * 2.0 * r;
  const TriMesh m = extract_surface(ps, p);
  REQUIRE_FALSE(m.empty());
  CHECK(is_watertight(m));
  CHECK(components(m) == 1);
  for (const Vec3& v : m.vertices()) {
    CHECK(norm(v - ps.positions[0]) == doctest::Approx(2.0 * r).epsilon(0.05));
  }
  CHECK(mesh_volume(m) == doctest::Approx(sphere_volume(2.0 * r)).epsilon(0.30));
}

TEST_CASE("volume error shrinks as the field is refined") {
  const double r = 0.005;
  const ParticleSet ps = particles_at({{0, 0, 0}}, r);
  double last = 1.0;
  for (double frac : {1.0, 0.5, 0.25, 0.125}) {
    SurfaceParams p;
    p.field_dx = frac * 2.0 * r;
    const double err = std::abs(mesh_volume(extract_surface(ps, p)) / sphere_volume(2.0 * r) - 1.0);
    CHECK(err < last);
    last = err;
  }
  CHECK(last < 0.05);
}

TEST_CASE("two particles join only when their spheres overlap") {
  const double r = 0.005;
  SurfaceParams p;
  p.field_dx = 0.5 * r;
  const TriMesh near = extract_surface(particles_at({{0, 0, 0}, {3.0 * r, 0, 0}}, r), p);
  CHECK(components(near) == 1);
  const TriMesh far = extract_surface(particles_at({{0, 0, 0}, {6.0 * r, 0, 0}}, r), p);
  CHECK(components(far) == 2);
  CHECK(is_watertight(near));
  CHECK(is_watertight(far));
}

TEST_CASE("block of particles meshes to the block extent") {
  const double dx = 0.01;
  const Vec3 lo{0, 0, 0}, hi{0.05, 0.04, 0.03};
  const ParticleSet ps = block(lo, hi, 0.5 * dx, 0.2 * dx);
  const TriMesh m = extract_surface(ps, {});
  CHECK(is_watertight(m));
  CHECK(components(m) == 1);
  const Aabb box = mesh_aabb(m);
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(box.lo[a] - lo[a]) <= 2.0 * dx);
    CHECK(std::abs(box.hi[a] - hi[a]) <= 2.0 * dx);
  }
  const double target = 0.05 * 0.04 * 0.03;
  CHECK(mesh_volume(m) == doctest::Approx(target).epsilon(0.10));
}

TEST_CASE("smoothing barely changes the enclosed volume") {
  const double dx = 0.01;
  const ParticleSet ps = block({0, 0, 0}, {0.04, 0.04, 0.04}, 0.5 * dx, 0.2 * dx);
  SurfaceParams p;
  const TriMesh raw = extract_surface(ps, p);
  p.smoothing_iterations = 5;
  const TriMesh smooth = extract_surface(ps, p);
  CHECK(smooth.triangle_count() == raw.triangle_count());
  CHECK(is_watertight(smooth));
  CHECK(std::abs(mesh_volume(smooth) / mesh_volume(raw) - 1.0) < 0.05);
}

TEST_CASE("translating the particles translates the surface") {
  const ParticleSet a = block({0, 0, 0}, {0.03, 0.02, 0.02}, 0.005, 0.00213);
  ParticleSet b = a;
  const Vec3 offset{0.25, -0.5, 1.0};
  for (Vec3& x : b.positions) x += offset;
  const TriMesh ma = extract_surface(a, {});
  const TriMesh mb = extract_surface(b, {});
  CHECK(mb.triangle_count() == ma.triangle_count());
  CHECK(mesh_volume(mb) == doctest::Approx(mesh_volume(ma)).epsilon(1e-9));
  const Aabb ba = mesh_aabb(ma), bb = mesh_aabb(mb);
  CHECK(norm(bb.lo - ba.lo - offset) < 1e-9);
  CHECK(norm(bb.hi - ba.hi - offset) < 1e-9);
}

TEST_CASE("averaged field gives a closed surface near the block") {
  const double dx = 0.01;
  const ParticleSet ps = block({0, 0, 0}, {0.04, 0.04, 0.04}, 0.5 * dx, 0.2 * dx);
  SurfaceParams p;
  p.averaged = true;
  const TriMesh m = extract_surface(ps, p);
  REQUIRE_FALSE(m.empty());
  CHECK(is_watertight(m));
  const Aabb box = mesh_aabb(m);
  for (int a = 0; a < 3; ++a) {
    CHECK(box.lo[a] > -2.0 * dx);
    CHECK(box.hi[a] < 0.04 + 2.0 * dx);
  }
}
