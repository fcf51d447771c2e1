#include <cmath>
#include <random>

#include "doctest.h"
#include "liquidset/error.hpp"
#include "liquidset/fluid.hpp"

using namespace liquidset;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Io;
}

// Divergence straight from face velocities, 1/s.
double max_divergence_oracle(const MacGrid& g) {
  const double h = g.dx();
  double worst = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        if (g.label(i, j, k) != CellLabel::Fluid) continue;
        const auto& u = g.velocity(Axis::X);
        const auto& v = g.velocity(Axis::Y);
        const auto& w = g.velocity(Axis::Z);
        const double d = (u[g.face_index(Axis::X, i + 1, j, k)] - u[g.face_index(Axis::X, i, j, k)] +
                          v[g.face_index(Axis::Y, i, j + 1, k)] - v[g.face_index(Axis::Y, i, j, k)] +
                          w[g.face_index(Axis::Z, i, j, k + 1)] - w[g.face_index(Axis::Z, i, j, k)]) /
                         h;
        worst = std::max(worst, std::abs(d));
      }
  return worst;
}

MacGrid block_grid(int n, int pad, double dx) {
  MacGrid g({0, 0, 0}, dx, {n, n, n});
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const bool in = i >= pad && j >= pad && k >= pad && i < n - pad && j < n - pad && k < n - pad;
        g.labels()[g.cell_index(i, j, k)] = in ? CellLabel::Fluid : CellLabel::Empty;
      }
  return g;
}

void randomize(MacGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int a = 0; a < 3; ++a)
    for (double& x : g.velocity(static_cast<Axis>(a))) x = dist(rng);
}

SimParams small_params(const SdfShape& c, int cells) {
  SimParams p;
  p.dx = dx_for_resolution(c, {0, 0, 0}, cells);
  return p;
}

}  // namespace

TEST_CASE("SimParams validation") {
  SimParams p;
  CHECK_NOTHROW(p.validate());
  p.flip_ratio = 1.5;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::BadConfig);
  p = SimParams{};
  p.particle_radius = 2.0 * p.dx;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::BadConfig);
  p = SimParams{};
  p.dt = 0.0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::BadConfig);
}

TEST_CASE("seeding zero volume gives no particles") {
  const SdfShape c = make_box_shape({0.1, 0.1, 0.1});
  SimParams p;
  p.dx = 0.0125;
  CHECK(seed_particles(c, {}, 0.0, p).empty());
}

TEST_CASE("seeding half a cube matches the layer count within one layer") {
  const SdfShape c = make_box_shape({0.1, 0.1, 0.1});
  SimParams p;
  p.dx = 0.0125;
  const double fill = 0.5e-3;
  const ParticleSet ps = seed_particles(c, {}, fill, p, 3);
  const double total = ps.total_volume();
  CHECK(total >= 0.00045);
  CHECK(total <= 0.00055);

  // Oracle: walk cell layers of the seeding domain from the bottom, 8
  // particles per cell whose center is inside, until the fill is reached.
  const SimDomain dom = make_domain(c, {0, 0, 0}, p.dx);
  double layer_volume = 0.0;
  double oracle = 0.0;
  for (int k = 0; k < dom.dims[2] && oracle < fill; ++k) {
    std::size_t cells = 0;
    for (int j = 0; j < dom.dims[1]; ++j)
      for (int i = 0; i < dom.dims[0]; ++i) {
        const Vec3 x = dom.origin + Vec3{(i + 0.5) * p.dx, (j + 0.5) * p.dx, (k + 0.5) * p.dx};
        cells += c.distance(x) < 0.0;
      }
    layer_volume = std::max(layer_volume, static_cast<double>(cells * 8) * p.particle_volume());
    oracle += static_cast<double>(cells * 8) * p.particle_volume();
  }
  CHECK(std::abs(total - fill) <= layer_volume);
  CHECK(std::abs(oracle - fill) <= layer_volume);

  // All particles inside the cavity, lowest first.
  for (const Vec3& x : ps.positions) CHECK(c.distance(x) < -p.effective_particle_radius());
}

TEST_CASE("seeding errors") {
  const SdfShape c = make_box_shape({0.1, 0.1, 0.1});
  SimParams p;
  p.dx = 0.0125;
  CHECK(code_of([&] { seed_particles(c, {}, 2e-3, p); }) == ErrorCode::Overfill);
  p.max_particles = 10;
  CHECK(code_of([&] { seed_particles(c, {}, 1e-4, p); }) == ErrorCode::ParticleLimit);
}

TEST_CASE("projection leaves a zero field unchanged") {
  MacGrid g = block_grid(12, 2, 0.01);
  const MacGrid out = pressure_project(g, SimParams{});
  for (int a = 0; a < 3; ++a) CHECK(out.velocity(static_cast<Axis>(a)) == g.velocity(static_cast<Axis>(a)));
}

TEST_CASE("projection of random velocities on a free-surface block") {
  MacGrid g = block_grid(20, 2, 0.01);
  randomize(g, 7);
  ProjectionStats stats;
  const MacGrid out = pressure_project(g, SimParams{}, &stats);
  CHECK(stats.fluid_cells == 16 * 16 * 16);
  CHECK(max_divergence_oracle(out) <= 1e-4);
  CHECK(stats.max_divergence <= 1e-4);
}

TEST_CASE("projection in a closed solid box honours no-penetration") {
  const int n = 14;
  MacGrid g({0, 0, 0}, 0.01, {n, n, n});
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const bool wall = i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
        g.solid_phi()[g.cell_index(i, j, k)] = wall ? -0.005 : 0.005;
        g.labels()[g.cell_index(i, j, k)] = wall ? CellLabel::Solid : CellLabel::Fluid;
      }
  randomize(g, 11);
  const MacGrid out = pressure_project(g, SimParams{});
  CHECK(max_divergence_oracle(out) <= 1e-4);
  // Faces between the wall and the fluid carry the (zero) wall velocity.
  const auto& u = out.velocity(Axis::X);
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j) {
      CHECK(u[out.face_index(Axis::X, 1, j, k)] == 0.0);
      CHECK(u[out.face_index(Axis::X, n - 1, j, k)] == 0.0);
    }
}

TEST_CASE("projection keeps a solid-body vortex") {
  MacGrid g = block_grid(16, 1, 0.01);
  const double omega = 2.0;
  const Vec3 c{0.08, 0.08, 0.08};
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i <= 16; ++i) {
        g.velocity(Axis::X)[g.face_index(Axis::X, i, j, k)] = -omega * (g.face_center(Axis::X, i, j, k).y - c.y);
      }
  for (int k = 0; k < 16; ++k)
    for (int j = 0; j <= 16; ++j)
      for (int i = 0; i < 16; ++i) {
        g.velocity(Axis::Y)[g.face_index(Axis::Y, i, j, k)] = omega * (g.face_center(Axis::Y, i, j, k).x - c.x);
      }
  const MacGrid out = pressure_project(g, SimParams{});
  // Compare faces bordering a fluid cell; the outer domain faces are walls.
  double change = 0.0;
  for (int a = 0; a < 3; ++a) {
    const Axis ax = static_cast<Axis>(a);
    const auto d = g.face_dims(ax);
    for (int k = 0; k < d[2]; ++k)
      for (int j = 0; j < d[1]; ++j)
        for (int i = 0; i < d[0]; ++i) {
          const int c[3] = {i, j, k};
          if (c[a] < 2 || c[a] > 14) continue;
          if (a != 0 && (i < 1 || i > 14)) continue;
          if (a != 1 && (j < 1 || j > 14)) continue;
          if (a != 2 && (k < 1 || k > 14)) continue;
          const std::size_t f = g.face_index(ax, i, j, k);
          change = std::max(change, std::abs(out.velocity(ax)[f] - g.velocity(ax)[f]));
        }
  }
  CHECK(change <= 10.0 * 1e-4);
}

TEST_CASE("projection reports non-convergence with the residual") {
  MacGrid g = block_grid(20, 2, 0.01);
  randomize(g, 5);
  SimParams p;
  p.pressure_max_iterations = 2;
  try {
    pressure_project(g, p);
    FAIL("expected NonConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConverged);
    REQUIRE(e.residual.has_value());
    CHECK(*e.residual > 1e-4);
  }
}

TEST_CASE("no forces and a static pose keep particles still") {
  const SdfShape c = make_box_shape({0.08, 0.08, 0.08});
  SimParams p = small_params(c, 16);
  p.gravity = {0, 0, 0};
  const ParticleSet ps = seed_particles(c, {}, 1.5e-4, p, 1);
  const ParticleSet next = simulate_step(ps, c, {}, {}, p);
  REQUIRE(next.size() == ps.size());
  double moved = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) moved = std::max(moved, norm(next.positions[i] - ps.positions[i]));
  CHECK(moved < 1e-12);
}

TEST_CASE("rotating steps conserve count, stay inside and stay divergence free") {
  const SdfShape c = make_cylinder_shape(0.03, 0.08);
  const SimParams p = small_params(c, 16);
  ParticleSet ps = seed_particles(c, {}, 0.4 * *c.analytic_volume(), p, 2);
  const std::size_t n = ps.size();
  RigidPose pose{};
  for (int f = 1; f <= 4; ++f) {
    const RigidPose next{{10.0 * f, 5.0 * f, 0}, {0, 0, 0}};
    StepStats st;
    ps = simulate_step(ps, c, pose, next, p, &st);
    pose = next;
    CHECK(ps.size() == n);
    CHECK(st.max_divergence <= p.pressure_tolerance);
    CHECK(st.substeps >= 1);
    for (const Vec3& x : ps.positions) REQUIRE(c.distance(pose.to_local(x)) < 0.0);
  }
}

TEST_CASE("steps are deterministic") {
  const SdfShape c = make_box_shape({0.06, 0.06, 0.08});
  const SimParams p = small_params(c, 12);
  auto run = [&] {
    ParticleSet ps = seed_particles(c, {}, 1e-4, p, 9);
    ps = simulate_step(ps, c, {}, {{20, 0, 0}, {}}, p);
    return simulate_step(ps, c, {{20, 0, 0}, {}}, {{40, 0, 0}, {}}, p);
  };
  const ParticleSet a = run();
  const ParticleSet b = run();
  REQUIRE(a.size() == b.size());
  bool identical = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    identical = identical && a.positions[i].x == b.positions[i].x && a.positions[i].y == b.positions[i].y &&
                a.positions[i].z == b.positions[i].z && a.velocities[i].x == b.velocities[i].x;
  }
  CHECK(identical);
}

TEST_CASE("pure PIC takes the grid velocity") {
  MacGrid old_grid({0, 0, 0}, 0.01, {8, 8, 8});
  MacGrid new_grid = old_grid;
  randomize(new_grid, 3);
  ParticleSet ps;
  ps.positions = {{0.031, 0.042, 0.017}, {0.05, 0.05, 0.05}, {0.011, 0.07, 0.063}};
  ps.velocities = {{5, 5, 5}, {-3, 1, 2}, {0, 0, 9}};
  flip::grid_to_particles(ps, old_grid, new_grid, 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(norm(ps.velocities[i] - new_grid.sample_velocity(ps.positions[i])) < 1e-15);
  }
}

TEST_CASE("non-finite particles raise NumericalBlowup") {
  const SdfShape c = make_box_shape({0.06, 0.06, 0.06});
  const SimParams p = small_params(c, 12);
  ParticleSet ps = seed_particles(c, {}, 5e-5, p, 1);
  ps.velocities[0].x = std::nan("");
  try {
    simulate_step(ps, c, {}, {}, p);
    FAIL("expected NumericalBlowup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericalBlowup);
    CHECK(e.substep.has_value());
  }
}

TEST_CASE("resting liquid settles with a level surface") {
  const SdfShape c = make_box_shape({0.08, 0.08, 0.1});
  const SimParams p = small_params(c, 16);
  ParticleSet ps = seed_particles(c, {}, 0.4 * *c.analytic_volume(), p, 4);
  for (int f = 0; f < 20; ++f) ps = simulate_step(ps, c, {}, {}, p);
  CHECK(mean_speed(ps) < 0.01);
  const SurfaceTilt t = measure_surface_tilt(ps, {});
  CHECK(std::acos(std::min(1.0, t.normal.z)) * 180.0 / kPi < 1.0);
  CHECK(t.wall_angle == doctest::Approx(90.0).epsilon(1.0 / 90.0));
}

TEST_CASE("surface tilt of coplanar particles") {
  ParticleSet ps;
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  for (int i = 0; i < 200; ++i) ps.positions.push_back({d(rng), d(rng), 0.02});
  ps.velocities.assign(ps.positions.size(), Vec3{});
  const SurfaceTilt t = measure_surface_tilt(ps, {});
  CHECK(std::abs(t.normal.x) < 1e-12);
  CHECK(std::abs(t.normal.y) < 1e-12);
  CHECK(t.normal.z == doctest::Approx(1.0).epsilon(1e-12));

  // Tilting the container by 30 degrees about X leaves a 60 degree wall angle.
  const SurfaceTilt tilted = measure_surface_tilt(ps, RigidPose{{30, 0, 0}, {}});
  CHECK(tilted.wall_angle == doctest::Approx(60.0).epsilon(1e-9));

  ps.positions.resize(49);
  ps.velocities.resize(49);
  CHECK(code_of([&] { measure_surface_tilt(ps, {}); }) == ErrorCode::InsufficientParticles);
}
