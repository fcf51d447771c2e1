#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liquidset/fluid.hpp"
#include "liquidset/mesh.hpp"
#include "liquidset/render.hpp"
#include "liquidset/sdf.hpp"
#include "liquidset/surface.hpp"

namespace liquidset {

struct AngleRange {
  double start = 0.0;  // degrees
  double end = 0.0;
};

struct RotationSchedule {
  std::string mode = "R1";  // R1..R6, "static" or "custom"
  std::array<AngleRange, 3> ranges{};
  int frame_count = 81;
  std::optional<Vec3> pivot;  // unset selects the cavity centroid

  // Throws BadConfig for an unknown mode name.
  static RotationSchedule from_mode(std::string_view mode, int frame_count = 81);
};

// R1..R6 in order.
const std::vector<std::string>& rotation_mode_names();

// theta = start + (end - start) * t / (frame_count - 1), per axis, degrees.
Vec3 rotation_at_frame(const RotationSchedule& schedule, int t);

// Shapes and their dims_m:
//   box [x, y, z]; cylinder [diameter, height]; cone [bottom d, top d, height];
//   sphere [diameter]; bottle, conical-flask, cylinder-flask [body width or
//   diameter, neck diameter, total height].
struct ContainerSpec {
  std::string name;
  std::string shape;
  std::vector<double> dims_m;
  double thickness_m = 0.002;
  std::string transparency = "transparent";
};

struct Container {
  ContainerSpec spec;
  SdfShape cavity;  // centered on the local origin
  TriMesh shell;    // wall of the given thickness, local frame
  double cavity_volume = 0.0;
  Vec3 cavity_centroid;
};

// Throws BadContainerSpec on unknown shapes, non-positive dims or a wall at
// least as thick as the smallest half-extent.
Container build_container(const ContainerSpec& spec);

const std::vector<ContainerSpec>& container_catalog();
std::optional<ContainerSpec> find_container(std::string_view name);

inline const std::array<std::string_view, 5> kLiquidColors{"colorless", "purple", "red", "orange", "yellow"};

struct SceneTags {
  std::string color = "colorless";
  std::string lighting = "L1";  // L1..L8
  std::string scene = "Lab1";   // Lab1..Lab5
  std::string tabletop = "white";
};

struct CameraConfig {
  double extent_m = 0.0;  // 0 selects 1.2 x the swept container AABB's largest side
  int resolution = 512;
  double distance_m = 1.0;
};

struct SceneConfig {
  std::string id = "0000";
  ContainerSpec container;
  double fill_volume = 0.0;  // m^3
  RotationSchedule schedule;
  SimParams sim;
  int grid_resolution = 32;  // cells per domain axis; > 0 overrides sim.dx
  SurfaceParams surface;
  SceneTags tags;
  CameraConfig camera;
  std::uint64_t seed = 0;

  // Throws BadConfig (or BadContainerSpec) when invalid.
  void validate() const;
};

// "<container>" (R1), "<container>-R1".."-R6" and "<container>-static" for every
// catalog entry. Fill is 40% of the cavity. Throws BadConfig for unknown names.
SceneConfig make_preset(std::string_view name, int frame_count = 81);
bool is_preset(std::string_view name);

struct FrameRecord {
  int frame_index = 0;
  RigidPose pose;
  TriMesh mesh;  // world frame, meters
  std::map<View, MaskImage> masks;
  Vec3 aabb_dims;
  double mesh_volume = 0.0;
  std::size_t particle_count = 0;
  double particle_volume = 0.0;  // count x per-particle volume
  StepStats step;                // solver stats of the step that produced this frame
  SceneTags tags;
};

// Everything derived from a config before the first frame.
struct SequenceSetup {
  Container container;
  Vec3 pivot;
  SimParams sim;
  std::vector<OrthoCamera> rig;
  double camera_extent = 0.0;
};
SequenceSetup prepare_sequence(const SceneConfig& config);

struct SequenceStats {
  int frames = 0;
  int total_substeps = 0;
  int max_pressure_iterations = 0;
  double max_divergence = 0.0;
};

using FrameSink = std::function<void(FrameRecord&&)>;

// Streams frame records in order. Solver errors are rethrown with the frame
// index set.
SequenceStats run_sequence(const SceneConfig& config, const FrameSink& sink);
std::vector<FrameRecord> run_sequence(const SceneConfig& config);

}  // namespace liquidset
