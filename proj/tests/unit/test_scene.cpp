#include <cmath>
#include <random>

#include "doctest.h"
#include "liquidset/error.hpp"
#include "liquidset/scene.hpp"

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

// Monte Carlo cavity volume from SDF sign samples.
double monte_carlo_volume(const SdfShape& s, int samples) {
  const Aabb b = s.bounds();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int inside = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec3 p{b.lo.x + u(rng) * b.extent().x, b.lo.y + u(rng) * b.extent().y, b.lo.z + u(rng) * b.extent().z};
    inside += s.distance(p) < 0.0;
  }
  return b.extent().x * b.extent().y * b.extent().z * inside / samples;
}

SceneConfig small_config(std::string_view preset, int frames) {
  SceneConfig c = make_preset(preset, frames);
  c.grid_resolution = 16;
  c.camera.resolution = 48;
  return c;
}

}  // namespace

TEST_CASE("rotation schedule endpoints and interpolation") {
  const RotationSchedule r1 = RotationSchedule::from_mode("R1");
  CHECK(r1.frame_count == 81);
  CHECK(rotation_at_frame(r1, 0) == Vec3{0, 0, 0});
  CHECK(rotation_at_frame(r1, 80) == Vec3{80, 0, 0});
  CHECK(rotation_at_frame(r1, 40).x == doctest::Approx(40.0));

  const RotationSchedule r3 = RotationSchedule::from_mode("R3");
  CHECK(rotation_at_frame(r3, 80) == Vec3{40, 50, 80});
  const RotationSchedule r6 = RotationSchedule::from_mode("R6", 9);
  CHECK(rotation_at_frame(r6, 8) == Vec3{0, 80, 60});
  CHECK(rotation_at_frame(r6, 4).y == doctest::Approx(40.0));

  const RotationSchedule still = RotationSchedule::from_mode("static", 5);
  for (int t = 0; t < 5; ++t) CHECK(rotation_at_frame(still, t) == Vec3{0, 0, 0});

  CHECK(rotation_mode_names().size() == 6);
  CHECK(code_of([] { RotationSchedule::from_mode("R7"); }) == ErrorCode::BadConfig);
  CHECK(code_of([&] { rotation_at_frame(r1, 81); }) == ErrorCode::FrameOutOfRange);
  CHECK(code_of([&] { rotation_at_frame(r1, -1); }) == ErrorCode::FrameOutOfRange);
}

TEST_CASE("container cavity volumes") {
  const Container box = build_container({"b", "box", {0.1, 0.1, 0.1}});
  CHECK(box.cavity_volume == doctest::Approx(0.001).epsilon(0.01));
  const Container sphere = build_container({"s", "sphere", {0.1}});
  CHECK(sphere.cavity_volume == doctest::Approx(4.0 / 3.0 * kPi * 0.05 * 0.05 * 0.05).epsilon(0.01));
  const Container cyl = build_container({"c", "cylinder", {0.05, 0.1}});
  CHECK(cyl.cavity_volume == doctest::Approx(kPi * 0.025 * 0.025 * 0.1).epsilon(0.01));
  const Container cone = build_container({"k", "cone", {0.06, 0.02, 0.1}});
  const double frustum = kPi * 0.1 / 3.0 * (0.03 * 0.03 + 0.03 * 0.01 + 0.01 * 0.01);
  CHECK(cone.cavity_volume == doctest::Approx(frustum).epsilon(0.01));
}

TEST_CASE("every catalog container builds with a closed shell") {
  CHECK(container_catalog().size() == 20);
  for (const ContainerSpec& spec : container_catalog()) {
    CAPTURE(spec.name);
    const Container c = build_container(spec);
    CHECK(c.cavity_volume > 0.0);
    CHECK(c.cavity_volume == doctest::Approx(monte_carlo_volume(c.cavity, 200000)).epsilon(0.03));
    CHECK(is_watertight(c.shell));
    // The wall wraps the cavity, so the shell is larger than the cavity.
    const Aabb cav = c.cavity.bounds();
    const Aabb shell = mesh_aabb(c.shell);
    for (int a = 0; a < 3; ++a) {
      CHECK(shell.lo[a] < cav.lo[a]);
      CHECK(shell.hi[a] > cav.hi[a]);
    }
    CHECK(c.cavity.distance(c.cavity_centroid) < 0.0);
  }
}

TEST_CASE("box shell volume matches the offset solid") {
  const double t = 0.002;
  const Container c = build_container({"b", "box", {0.1, 0.1, 0.1}, t});
  // Steiner formula for the rounded offset of a cube, minus the cavity.
  const double s = 0.1;
  const double wall = 6 * s * s * t + 12 * s * kPi / 4.0 * t * t + 4.0 / 3.0 * kPi * t * t * t;
  CHECK(mesh_volume(c.shell) == doctest::Approx(wall).epsilon(0.10));
}

TEST_CASE("invalid container specs") {
  CHECK(code_of([] { build_container({"x", "box", {0.1, 0.1, 0.1}, 0.0}); }) == ErrorCode::BadContainerSpec);
  CHECK(code_of([] { build_container({"x", "box", {0.1, 0.1, 0.1}, 0.06}); }) == ErrorCode::BadContainerSpec);
  CHECK(code_of([] { build_container({"x", "box", {0.1, -0.1, 0.1}}); }) == ErrorCode::BadContainerSpec);
  CHECK(code_of([] { build_container({"x", "box", {0.1, 0.1}}); }) == ErrorCode::BadContainerSpec);
  CHECK(code_of([] { build_container({"x", "torus", {0.1}}); }) == ErrorCode::BadContainerSpec);
  CHECK(code_of([] { build_container({"x", "bottle", {0.05, 0.06, 0.1}}); }) == ErrorCode::BadContainerSpec);
}

TEST_CASE("presets") {
  CHECK(is_preset("cube-flask"));
  CHECK(is_preset("tube-S-R4"));
  CHECK(is_preset("sphere-flask-static"));
  CHECK_FALSE(is_preset("cube-flask-R9"));
  const SceneConfig a = make_preset("cube-flask");
  CHECK(a.schedule.mode == "R1");
  CHECK(a.id == "cube-flask");
  CHECK(a.fill_volume == doctest::Approx(0.4 * 0.001).epsilon(0.01));
  CHECK(make_preset("cube-flask-R5").schedule.mode == "R5");
  CHECK(make_preset("cube-flask-static", 10).schedule.frame_count == 10);
  CHECK(code_of([] { make_preset("no-such-thing"); }) == ErrorCode::BadConfig);
}

TEST_CASE("config validation") {
  SceneConfig c = make_preset("cube-flask");
  CHECK_NOTHROW(c.validate());
  c.tags.scene = "Lab6";
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadConfig);
  c = make_preset("cube-flask");
  c.tags.color = "green";
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadConfig);
  c = make_preset("cube-flask");
  c.fill_volume = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::BadConfig);
}

TEST_CASE("camera framing covers the swept container") {
  const SceneConfig c = small_config("rect-flask-R2", 9);
  const SequenceSetup s = prepare_sequence(c);
  CHECK(s.rig.size() == 6);
  bool framed = true;
  for (int t = 0; t < 9; ++t) {
    const RigidTransform x = RigidTransform::from_pose({rotation_at_frame(c.schedule, t), s.pivot});
    for (const OrthoCamera& cam : s.rig) {
      const Vec3 r = cam.right();
      for (const Vec3& v : s.container.shell.vertices()) {
        const Vec3 d = x.apply(v) - cam.center;
        framed = framed && std::abs(dot(d, r)) <= 0.5 * cam.extent_w && std::abs(dot(d, cam.up)) <= 0.5 * cam.extent_h;
      }
    }
  }
  CHECK(framed);
}

TEST_CASE("a short sequence yields one record and six masks per frame") {
  const SceneConfig c = small_config("cube-flask-R3", 9);
  const std::vector<FrameRecord> frames = run_sequence(c);
  REQUIRE(frames.size() == 9);
  std::size_t masks = 0;
  for (int t = 0; t < 9; ++t) {
    const FrameRecord& r = frames[t];
    CHECK(r.frame_index == t);
    CHECK(r.pose.angles_deg == rotation_at_frame(c.schedule, t));
    CHECK(is_watertight(r.mesh));
    CHECK(r.mesh_volume > 0.0);
    CHECK(r.particle_count == frames[0].particle_count);
    CHECK(r.step.max_divergence <= c.sim.pressure_tolerance);
    for (const auto& [view, m] : r.masks) {
      CHECK(m.width == 48);
      CHECK(m.count() > 0);
    }
    masks += r.masks.size();
  }
  CHECK(masks == 54);
  CHECK(frames[0].step.substeps == 0);
  CHECK(frames[8].pose.angles_deg == Vec3{40, 50, 80});
}

TEST_CASE("sequences are deterministic") {
  const SceneConfig c = small_config("tube-M-R2", 4);
  const auto a = run_sequence(c);
  const auto b = run_sequence(c);
  REQUIRE(a.size() == b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(a[t].mesh.vertices().size() == b[t].mesh.vertices().size());
    CHECK(a[t].mesh_volume == b[t].mesh_volume);
    CHECK(a[t].masks == b[t].masks);
  }
}

TEST_CASE("a static container reaches a steady volume") {
  const SceneConfig c = small_config("rect-bottle-S-static", 30);
  std::vector<double> volumes;
  run_sequence(c, [&](FrameRecord&& r) { volumes.push_back(r.mesh_volume); });
  REQUIRE(volumes.size() == 30);
  CHECK(std::abs(volumes[29] - volumes[28]) / volumes[28] < 0.01);
}

TEST_CASE("solver failures carry the frame index") {
  SceneConfig c = small_config("cube-flask-R1", 3);
  c.sim.pressure_max_iterations = 1;
  try {
    run_sequence(c, [](FrameRecord&&) {});
    FAIL("expected NonConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConverged);
    REQUIRE(e.frame.has_value());
    CHECK(*e.frame == 1);
  }
}
