#include "liquidset/scene.hpp"

#include <algorithm>
#include <cmath>

#include "liquidset/error.hpp"
#include "liquidset/marching.hpp"
#include "liquidset/voxel.hpp"

namespace liquidset {

namespace {

struct ModeRow {
  std::string_view name;
  std::array<double, 3> end;
};

// All modes start at 0 degrees on every axis.
constexpr std::array<ModeRow, 6> kModes{{
    {"R1", {80, 0, 0}},
    {"R2", {80, 80, 0}},
    {"R3", {40, 50, 80}},
    {"R4", {30, 40, 60}},
    {"R5", {80, 40, 20}},
    {"R6", {0, 80, 60}},
}};

constexpr double kNeckFraction = 0.3;

void check_dims(const ContainerSpec& spec, std::size_t n) {
  if (spec.dims_m.size() != n) {
    fail(ErrorCode::BadContainerSpec,
         spec.shape + " needs " + std::to_string(n) + " dims, got " + std::to_string(spec.dims_m.size()));
  }
  for (double d : spec.dims_m) {
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorCode::BadContainerSpec, "container dims must be positive");
  }
}

// Body below, cylindrical neck above; the neck overlaps the body slightly so
// the union is connected.
SdfShape flask(const ContainerSpec& spec) {
  check_dims(spec, 3);
  const double w = spec.dims_m[0];
  const double neck = spec.dims_m[1];
  const double h = spec.dims_m[2];
  if (neck >= w) fail(ErrorCode::BadContainerSpec, "neck must be narrower than the body");
  const double body_h = (1.0 - kNeckFraction) * h;
  const double neck_h = kNeckFraction * h + 0.05 * h;
  const Vec3 body_at{0, 0, -0.5 * h + 0.5 * body_h};
  const Vec3 neck_at{0, 0, 0.5 * h - 0.5 * neck_h};
  SdfShape body;
  if (spec.shape == "bottle") {
    body = make_box_shape({w, w, body_h}, body_at);
  } else if (spec.shape == "conical-flask") {
    body = make_cone_shape(0.5 * w, 0.5 * neck, body_h, body_at);
  } else {
    body = make_cylinder_shape(0.5 * w, body_h, body_at);
  }
  return make_union_shape({body, make_cylinder_shape(0.5 * neck, neck_h, neck_at)});
}

SdfShape cavity_for(const ContainerSpec& spec) {
  const auto& d = spec.dims_m;
  if (spec.shape == "box") {
    check_dims(spec, 3);
    return make_box_shape({d[0], d[1], d[2]});
  }
  if (spec.shape == "cylinder") {
    check_dims(spec, 2);
    return make_cylinder_shape(0.5 * d[0], d[1]);
  }
  if (spec.shape == "cone") {
    check_dims(spec, 3);
    return make_cone_shape(0.5 * d[0], 0.5 * d[1], d[2]);
  }
  if (spec.shape == "sphere") {
    check_dims(spec, 1);
    return make_sphere_shape(0.5 * d[0]);
  }
  if (spec.shape == "bottle" || spec.shape == "conical-flask" || spec.shape == "cylinder-flask") {
    return flask(spec);
  }
  fail(ErrorCode::BadContainerSpec, "unknown container shape '" + spec.shape + "'");
}

TriMesh shell_mesh(const SdfShape& cavity, double t) {
  const Aabb b = cavity.bounds();
  const double size = std::max({b.extent().x, b.extent().y, b.extent().z});
  const double h = std::max(0.5 * t, size / 200.0);
  const Aabb box = b.padded(t + 2.0 * h);
  const Vec3 e = box.extent();
  const std::array<int, 3> dims{static_cast<int>(std::ceil(e.x / h)) + 1, static_cast<int>(std::ceil(e.y / h)) + 1,
                                static_cast<int>(std::ceil(e.z / h)) + 1};
  ScalarGrid g(box.lo, h, dims, 0.0);
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        const double phi = cavity.distance(g.position(i, j, k));
        g.at(i, j, k) = std::max(-phi, phi - t);
      }
    }
  }
  return marching_cubes(g, 0.0);
}

ContainerSpec entry(std::string name, std::string shape, std::vector<double> dims) {
  return ContainerSpec{std::move(name), std::move(shape), std::move(dims), 0.002, "transparent"};
}

template <std::size_t N>
bool in_vocabulary(const std::string& v, const std::array<std::string_view, N>& vocab) {
  return std::find(vocab.begin(), vocab.end(), v) != vocab.end();
}

bool numbered_tag(const std::string& v, std::string_view prefix, int max) {
  if (v.size() <= prefix.size() || v.compare(0, prefix.size(), prefix) != 0) return false;
  const std::string digits = v.substr(prefix.size());
  if (digits.size() != 1 || digits[0] < '1') return false;
  return digits[0] - '0' <= max;
}

}  // namespace

RotationSchedule RotationSchedule::from_mode(std::string_view mode, int frame_count) {
  RotationSchedule s;
  s.mode = std::string(mode);
  s.frame_count = frame_count;
  if (mode == "static") return s;
  for (const ModeRow& row : kModes) {
    if (row.name == mode) {
      for (int a = 0; a < 3; ++a) s.ranges[a] = {0.0, row.end[a]};
      return s;
    }
  }
  fail(ErrorCode::BadConfig, "unknown rotation mode '" + std::string(mode) + "'");
}

const std::vector<std::string>& rotation_mode_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const ModeRow& row : kModes) n.emplace_back(row.name);
    return n;
  }();
  return names;
}

Vec3 rotation_at_frame(const RotationSchedule& schedule, int t) {
  if (schedule.frame_count < 1) fail(ErrorCode::BadConfig, "frame_count must be >= 1");
  if (t < 0 || t >= schedule.frame_count) {
    fail(ErrorCode::FrameOutOfRange,
         "frame " + std::to_string(t) + " outside [0, " + std::to_string(schedule.frame_count) + ")");
  }
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    const AngleRange& r = schedule.ranges[a];
    if (t == schedule.frame_count - 1) {
      out[a] = r.end;
    } else {
      const double u = schedule.frame_count == 1 ? 0.0 : static_cast<double>(t) / (schedule.frame_count - 1);
      out[a] = r.start + (r.end - r.start) * u;
    }
  }
  return out;
}

Container build_container(const ContainerSpec& spec) {
  Container c;
  c.spec = spec;
  c.cavity = cavity_for(spec);
  if (!(spec.thickness_m > 0.0)) fail(ErrorCode::BadContainerSpec, "wall thickness must be positive");
  if (spec.thickness_m >= c.cavity.min_half_extent()) {
    fail(ErrorCode::BadContainerSpec, "wall thickness must be below the smallest half-extent");
  }
  c.cavity.wall_thickness = spec.thickness_m;
  const Aabb b = c.cavity.bounds();
  const double size = std::max({b.extent().x, b.extent().y, b.extent().z});
  const CavityMoments m = cavity_moments(c.cavity, size / 128.0);
  c.cavity_volume = c.cavity.analytic_volume().value_or(m.volume);
  c.cavity_centroid = m.centroid;
  c.shell = shell_mesh(c.cavity, spec.thickness_m);
  return c;
}

const std::vector<ContainerSpec>& container_catalog() {
  static const std::vector<ContainerSpec> catalog{
      entry("cube-bottle-L", "bottle", {0.08, 0.03, 0.12}),
      entry("cube-bottle-S", "bottle", {0.05, 0.02, 0.08}),
      entry("cone-flask-L", "conical-flask", {0.10, 0.03, 0.14}),
      entry("cone-flask-M", "conical-flask", {0.08, 0.025, 0.11}),
      entry("cone-flask-S", "conical-flask", {0.06, 0.02, 0.08}),
      entry("tube-L", "cylinder", {0.025, 0.15}),
      entry("tube-M", "cylinder", {0.02, 0.12}),
      entry("tube-S", "cylinder", {0.016, 0.10}),
      entry("rect-bottle-L", "box", {0.08, 0.05, 0.12}),
      entry("rect-bottle-S", "box", {0.06, 0.04, 0.09}),
      entry("cylinder-L", "cylinder", {0.07, 0.12}),
      entry("cylinder-S", "cylinder", {0.05, 0.08}),
      entry("cylinder-flask", "cylinder-flask", {0.08, 0.03, 0.14}),
      entry("cylinder-tube", "cylinder", {0.03, 0.10}),
      entry("cylinder-G", "cylinder", {0.04, 0.16}),
      entry("cone-tube", "cone", {0.015, 0.03, 0.10}),
      entry("sphere-flask", "sphere", {0.08}),
      entry("cube-flask", "box", {0.1, 0.1, 0.1}),
      entry("cone-bottle", "cone", {0.07, 0.04, 0.10}),
      entry("rect-flask", "box", {0.09, 0.05, 0.07}),
  };
  return catalog;
}

std::optional<ContainerSpec> find_container(std::string_view name) {
  for (const ContainerSpec& c : container_catalog()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

void SceneConfig::validate() const {
  if (id.empty()) fail(ErrorCode::BadConfig, "sequence id must not be empty");
  if (!(fill_volume > 0.0)) fail(ErrorCode::BadConfig, "fill volume must be positive");
  if (schedule.frame_count < 1) fail(ErrorCode::BadConfig, "frame count must be >= 1");
  if (grid_resolution < 0) fail(ErrorCode::BadConfig, "grid resolution must be >= 0");
  if (camera.resolution <= 0) fail(ErrorCode::BadConfig, "camera resolution must be positive");
  if (camera.extent_m < 0.0) fail(ErrorCode::BadConfig, "camera extent must be >= 0");
  if (!in_vocabulary(tags.color, kLiquidColors)) fail(ErrorCode::BadConfig, "unknown liquid color '" + tags.color + "'");
  if (!numbered_tag(tags.lighting, "L", 8)) fail(ErrorCode::BadConfig, "lighting must be L1..L8");
  if (!numbered_tag(tags.scene, "Lab", 5)) fail(ErrorCode::BadConfig, "scene must be Lab1..Lab5");
  if (grid_resolution == 0) sim.validate();
  if (surface.kernel_radius < 0.0 || surface.field_dx < 0.0 || surface.smoothing_iterations < 0) {
    fail(ErrorCode::BadConfig, "surface parameters must be non-negative");
  }
}

bool is_preset(std::string_view name) {
  try {
    make_preset(name, 1);
    return true;
  } catch (const Error&) {
    return false;
  }
}

SceneConfig make_preset(std::string_view name, int frame_count) {
  std::string container(name);
  std::string mode = "R1";
  const auto dash = name.rfind('-');
  if (dash != std::string_view::npos) {
    const std::string_view suffix = name.substr(dash + 1);
    const bool is_mode = suffix == "static" || std::find(rotation_mode_names().begin(), rotation_mode_names().end(),
                                                         suffix) != rotation_mode_names().end();
    if (is_mode) {
      container = std::string(name.substr(0, dash));
      mode = std::string(suffix);
    }
  }
  const auto spec = find_container(container);
  if (!spec) fail(ErrorCode::BadConfig, "unknown preset '" + std::string(name) + "'");
  SceneConfig cfg;
  cfg.id = std::string(name);
  cfg.container = *spec;
  cfg.schedule = RotationSchedule::from_mode(mode, frame_count);
  const Container built = build_container(*spec);
  cfg.fill_volume = 0.4 * built.cavity_volume;
  return cfg;
}

SequenceSetup prepare_sequence(const SceneConfig& config) {
  config.validate();
  SequenceSetup s;
  s.container = build_container(config.container);
  s.pivot = config.schedule.pivot.value_or(s.container.cavity_centroid);
  s.sim = config.sim;
  if (config.grid_resolution > 0) s.sim.dx = dx_for_resolution(s.container.cavity, s.pivot, config.grid_resolution);
  s.sim.validate();

  // Frame the container over the whole schedule so every view shares one
  // metric scale for the sequence.
  Aabb swept;
  for (int t = 0; t < config.schedule.frame_count; ++t) {
    const RigidTransform x = RigidTransform::from_pose(RigidPose{rotation_at_frame(config.schedule, t), s.pivot});
    for (const Vec3& v : s.container.shell.vertices()) swept.expand(x.apply(v));
  }
  const Vec3 e = swept.extent();
  s.camera_extent = config.camera.extent_m > 0.0 ? config.camera.extent_m : 1.2 * std::max({e.x, e.y, e.z});
  s.rig = make_rig(swept.center(), s.camera_extent, config.camera.resolution, config.camera.distance_m);
  return s;
}

namespace {

FrameRecord make_record(int t, const RigidPose& pose, const ParticleSet& ps, const SceneConfig& config,
                        const SequenceSetup& setup, const StepStats& step) {
  FrameRecord r;
  r.frame_index = t;
  r.pose = pose;
  r.mesh = extract_surface(ps, config.surface);
  r.masks = render_rig(r.mesh, setup.rig);
  r.aabb_dims = r.mesh.empty() ? Vec3{} : mesh_aabb_dims(r.mesh);
  r.mesh_volume = r.mesh.empty() ? 0.0 : mesh_volume(r.mesh);
  r.particle_count = ps.size();
  r.particle_volume = ps.total_volume();
  r.step = step;
  r.tags = config.tags;
  return r;
}

}  // namespace

SequenceStats run_sequence(const SceneConfig& config, const FrameSink& sink) {
  const SequenceSetup setup = prepare_sequence(config);
  const SdfShape& cavity = setup.container.cavity;
  SequenceStats stats;
  RigidPose pose{rotation_at_frame(config.schedule, 0), setup.pivot};
  ParticleSet ps = seed_particles(cavity, pose, config.fill_volume, setup.sim, config.seed);
  for (int t = 0; t < config.schedule.frame_count; ++t) {
    StepStats step;
    try {
      if (t > 0) {
        const RigidPose next{rotation_at_frame(config.schedule, t), setup.pivot};
        ps = simulate_step(ps, cavity, pose, next, setup.sim, &step);
        pose = next;
      }
      sink(make_record(t, pose, ps, config, setup, step));
    } catch (Error& e) {
      if (!e.frame) e.frame = t;
      throw;
    }
    stats.frames = t + 1;
    stats.total_substeps += step.substeps;
    stats.max_pressure_iterations = std::max(stats.max_pressure_iterations, step.max_iterations);
    stats.max_divergence = std::max(stats.max_divergence, step.max_divergence);
  }
  return stats;
}

std::vector<FrameRecord> run_sequence(const SceneConfig& config) {
  std::vector<FrameRecord> out;
  run_sequence(config, [&](FrameRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

}  // namespace liquidset
