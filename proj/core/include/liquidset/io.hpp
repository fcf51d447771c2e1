#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liquidset/mesh.hpp"
#include "liquidset/render.hpp"
#include "liquidset/scene.hpp"

namespace liquidset {

namespace fs = std::filesystem;

// ---- OBJ ----------------------------------------------------------------
// `v x y z` lines (17 significant digits) followed by 1-based `f i j k` lines.
std::string format_obj(const TriMesh& mesh);
// Comments, blank lines and other record types (vn, vt, o, g, ...) are
// skipped; `f` accepts the i/t/n forms. Throws ParseError with the line number.
TriMesh parse_obj(std::string_view text);
void write_obj(const TriMesh& mesh, const fs::path& path);
TriMesh read_obj(const fs::path& path);

// ---- masks --------------------------------------------------------------
enum class MaskFormat { Pgm, Png };
std::string_view extension(MaskFormat format);  // ".pgm" / ".png"

// Binary P5, maxval 255, liquid = 255.
std::string encode_pgm(const MaskImage& mask);
MaskImage decode_pgm(std::string_view bytes);
// The format is chosen by extension; .png needs libpng.
void write_mask(const MaskImage& mask, const fs::path& path);
MaskImage read_mask(const fs::path& path);

// ---- metadata -----------------------------------------------------------
struct FrameMetadata {
  struct Container {
    std::string name;
    std::string shape;
    std::vector<double> dims_m;
    double thickness_m = 0.0;
    std::string transparency;
    bool operator==(const Container&) const = default;
  } container;
  struct Camera {
    std::vector<std::string> views;
    double extent_m = 0.0;
    std::array<int, 2> resolution{0, 0};
    double distance_m = 0.0;
    bool operator==(const Camera&) const = default;
  } camera;
  struct Liquid {
    std::string color;
    double initial_volume_m3 = 0.0;
    std::string mesh_path;
    std::array<double, 3> aabb_dims_m{0, 0, 0};
    double mesh_volume_m3 = 0.0;
    bool operator==(const Liquid&) const = default;
  } liquid;
  struct Environment {
    std::string lighting;
    std::string scene;
    std::string tabletop;
    bool operator==(const Environment&) const = default;
  } environment;
  struct Rotation {
    std::string mode;
    std::array<double, 3> angles_deg{0, 0, 0};
    int frame_index = 0;
    bool operator==(const Rotation&) const = default;
  } rotation;
  struct Image {
    std::array<int, 2> resolution{0, 0};
    bool operator==(const Image&) const = default;
  } image;

  bool operator==(const FrameMetadata&) const = default;
};

FrameMetadata make_metadata(const FrameRecord& record, const SceneConfig& config, const SequenceSetup& setup,
                            const std::string& mesh_path);
std::string metadata_to_json(const FrameMetadata& meta);
FrameMetadata metadata_from_json(std::string_view text);
void write_metadata(const FrameRecord& record, const SceneConfig& config, const SequenceSetup& setup,
                    const fs::path& path);
FrameMetadata read_metadata(const fs::path& path);

// ---- scene configs ------------------------------------------------------
// A config document is one scene object or {"sequences": [scene, ...]}. A scene
// may name a "preset" and override any of: id, container, camera, liquid,
// environment, rotation, simulation, surface, seed. Throws BadConfig.
std::vector<SceneConfig> parse_configs(std::string_view text);
std::vector<SceneConfig> load_configs(const fs::path& path);
std::string config_to_json(const SceneConfig& config);

// ---- layout -------------------------------------------------------------
std::string frame_dir_name(int frame);  // frame_000
fs::path sequence_dir(const fs::path& root, const std::string& id);
fs::path frame_dir(const fs::path& root, const std::string& id, int frame);
std::string mask_file_name(View view, MaskFormat format);  // mask_front.pgm

// Writes liquid.obj, six masks and meta.json under frame_dir(root, id, t).
void write_frame(const fs::path& root, const FrameRecord& record, const SceneConfig& config,
                 const SequenceSetup& setup, MaskFormat format = MaskFormat::Pgm);

struct SplitAssignment {
  double ratio = 0.9;
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> test;
  bool operator==(const SplitAssignment&) const = default;
};

struct ManifestEntry {
  std::string id;
  std::string container;
  std::string mode;
  int frames = 0;
  std::string path;  // relative to the dataset root
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> sequences;
  std::optional<SplitAssignment> split;
  bool operator==(const Manifest&) const = default;
};

std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(std::string_view text);
void write_manifest(const Manifest& manifest, const fs::path& path);
Manifest read_manifest(const fs::path& path);

// Whole-sequence split: |train| = round(ratio * n) clamped to [1, n - 1].
// Both sides are returned sorted. Throws TooFewSequences for n < 2 and
// BadConfig for ratio outside (0, 1) or duplicate ids.
SplitAssignment split_dataset(const std::vector<std::string>& ids, double ratio, std::uint64_t seed);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view bytes);

}  // namespace liquidset
