#include "liquidset/io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "liquidset/error.hpp"
#include "rng.hpp"

namespace liquidset {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(int line, const std::string& message) {
  Error e(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message);
  e.line = line;
  throw e;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

// ---- files ---------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

// ---- OBJ -----------------------------------------------------------------

std::string format_obj(const TriMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertex_count() * 64 + mesh.triangle_count() * 24);
  for (const Vec3& v : mesh.vertices()) {
    out += "v ";
    append_double(out, v.x);
    out += ' ';
    append_double(out, v.y);
    out += ' ';
    append_double(out, v.z);
    out += '\n';
  }
  char buf[16];
  for (const Triangle& t : mesh.triangles()) {
    out += 'f';
    for (std::uint32_t idx : t) {
      out += ' ';
      const auto res = std::to_chars(buf, buf + sizeof buf, idx + 1);
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

TriMesh parse_obj(std::string_view text) {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<int> face_lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() != 4) parse_fail(line_no, "vertex needs 3 coordinates");
      Vec3 v;
      for (int a = 0; a < 3; ++a) {
        if (!parse_double(tok[a + 1], v[a])) parse_fail(line_no, "bad coordinate '" + std::string(tok[a + 1]) + "'");
      }
      vertices.push_back(v);
    } else if (tok[0] == "f") {
      if (tok.size() != 4) parse_fail(line_no, "only triangle faces are supported");
      Triangle t{};
      for (int a = 0; a < 3; ++a) {
        std::string_view s = tok[a + 1];
        s = s.substr(0, s.find('/'));
        long long idx = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), idx);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || idx < 1 || idx > UINT32_MAX) {
          parse_fail(line_no, "bad face index '" + std::string(tok[a + 1]) + "'");
        }
        t[a] = static_cast<std::uint32_t>(idx - 1);
      }
      triangles.push_back(t);
      face_lines.push_back(line_no);
    }
  }
  for (std::size_t f = 0; f < triangles.size(); ++f) {
    for (std::uint32_t idx : triangles[f]) {
      if (idx >= vertices.size()) parse_fail(face_lines[f], "face index out of range");
    }
  }
  return TriMesh(std::move(vertices), std::move(triangles));
}

void write_obj(const TriMesh& mesh, const fs::path& path) { write_file(path, format_obj(mesh)); }

TriMesh read_obj(const fs::path& path) { return parse_obj(read_file(path)); }

// ---- masks ---------------------------------------------------------------

std::string_view extension(MaskFormat format) { return format == MaskFormat::Png ? ".png" : ".pgm"; }

std::string encode_pgm(const MaskImage& mask) {
  std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + mask.pixels.size());
  for (std::size_t i = 0; i < mask.pixels.size(); ++i) out[header + i] = mask.pixels[i] ? '\xff' : '\0';
  return out;
}

MaskImage decode_pgm(std::string_view bytes) {
  // Header: magic, width, height, maxval, separated by whitespace and comments.
  std::size_t pos = 0;
  int header_line = 1;
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        if (c == '\n') ++header_line;
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto next_int = [&](const char* what) {
    const std::string_view t = next_token();
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || v < 0) {
      parse_fail(header_line, std::string("bad PGM ") + what);
    }
    return v;
  };
  if (next_token() != "P5") parse_fail(1, "not a binary PGM (P5)");
  const int w = next_int("width");
  const int h = next_int("height");
  const int maxval = next_int("maxval");
  if (maxval < 1 || maxval > 255) parse_fail(header_line, "maxval must be in 1..255");
  if (pos >= bytes.size()) parse_fail(header_line, "missing pixel data");
  ++pos;  // single whitespace byte after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos != n) {
    parse_fail(header_line, "pixel data has " + std::to_string(bytes.size() - pos) + " bytes, header says " +
                                std::to_string(n));
  }
  MaskImage mask(w, h);
  for (std::size_t i = 0; i < n; ++i) mask.pixels[i] = bytes[pos + i] != '\0' ? 1 : 0;
  return mask;
}

namespace {

void write_png(const MaskImage& mask, const fs::path& path) {
  std::vector<std::uint8_t> gray(mask.pixels.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.pixels[i] ? 255 : 0;
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.width);
  image.height = static_cast<png_uint_32>(mask.height);
  image.format = PNG_FORMAT_GRAY;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, gray.data(), 0, nullptr)) {
    fail(ErrorCode::Io, "png write failed for " + path.string() + ": " + image.message);
  }
}

MaskImage read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    fail(ErrorCode::ParseError, "png read failed for " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, gray.data(), 0, nullptr)) {
    png_image_free(&image);
    fail(ErrorCode::ParseError, "png decode failed for " + path.string() + ": " + image.message);
  }
  MaskImage mask(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < mask.pixels.size(); ++i) mask.pixels[i] = gray[i] >= 128 ? 1 : 0;
  return mask;
}

}  // namespace

void write_mask(const MaskImage& mask, const fs::path& path) {
  if (path.extension() == ".png") {
    write_png(mask, path);
  } else {
    write_file(path, encode_pgm(mask));
  }
}

MaskImage read_mask(const fs::path& path) {
  if (path.extension() == ".png") return read_png(path);
  return decode_pgm(read_file(path));
}

// ---- metadata ------------------------------------------------------------

FrameMetadata make_metadata(const FrameRecord& record, const SceneConfig& config, const SequenceSetup& setup,
                            const std::string& mesh_path) {
  FrameMetadata m;
  m.container = {config.container.name, config.container.shape, config.container.dims_m,
                 config.container.thickness_m, config.container.transparency};
  for (View v : kAllViews) m.camera.views.emplace_back(to_string(v));
  m.camera.extent_m = setup.camera_extent;
  m.camera.resolution = {config.camera.resolution, config.camera.resolution};
  m.camera.distance_m = config.camera.distance_m;
  m.liquid.color = record.tags.color;
  m.liquid.initial_volume_m3 = config.fill_volume;
  m.liquid.mesh_path = mesh_path;
  m.liquid.aabb_dims_m = {record.aabb_dims.x, record.aabb_dims.y, record.aabb_dims.z};
  m.liquid.mesh_volume_m3 = record.mesh_volume;
  m.environment = {record.tags.lighting, record.tags.scene, record.tags.tabletop};
  m.rotation.mode = config.schedule.mode;
  m.rotation.angles_deg = {record.pose.angles_deg.x, record.pose.angles_deg.y, record.pose.angles_deg.z};
  m.rotation.frame_index = record.frame_index;
  m.image.resolution = m.camera.resolution;
  return m;
}

std::string metadata_to_json(const FrameMetadata& m) {
  ojson j;
  j["container"] = {{"name", m.container.name},
                    {"shape", m.container.shape},
                    {"dims_m", m.container.dims_m},
                    {"thickness_m", m.container.thickness_m},
                    {"transparency", m.container.transparency}};
  j["camera"] = {{"views", m.camera.views},
                 {"extent_m", m.camera.extent_m},
                 {"resolution", m.camera.resolution},
                 {"distance_m", m.camera.distance_m}};
  j["liquid"] = {{"color", m.liquid.color},
                 {"initial_volume_m3", m.liquid.initial_volume_m3},
                 {"mesh_path", m.liquid.mesh_path},
                 {"aabb_dims_m", m.liquid.aabb_dims_m},
                 {"mesh_volume_m3", m.liquid.mesh_volume_m3}};
  j["environment"] = {{"lighting", m.environment.lighting},
                      {"scene", m.environment.scene},
                      {"tabletop", m.environment.tabletop}};
  j["rotation"] = {{"mode", m.rotation.mode},
                   {"angles_deg", m.rotation.angles_deg},
                   {"frame_index", m.rotation.frame_index}};
  j["image"] = {{"resolution", m.image.resolution}};
  return j.dump(2) + "\n";
}

FrameMetadata metadata_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    FrameMetadata m;
    const json& c = j.at("container");
    m.container = {c.at("name").get<std::string>(), c.at("shape").get<std::string>(),
                   c.at("dims_m").get<std::vector<double>>(), c.at("thickness_m").get<double>(),
                   c.at("transparency").get<std::string>()};
    const json& cam = j.at("camera");
    m.camera = {cam.at("views").get<std::vector<std::string>>(), cam.at("extent_m").get<double>(),
                cam.at("resolution").get<std::array<int, 2>>(), cam.at("distance_m").get<double>()};
    const json& l = j.at("liquid");
    m.liquid = {l.at("color").get<std::string>(), l.at("initial_volume_m3").get<double>(),
                l.at("mesh_path").get<std::string>(), l.at("aabb_dims_m").get<std::array<double, 3>>(),
                l.at("mesh_volume_m3").get<double>()};
    const json& e = j.at("environment");
    m.environment = {e.at("lighting").get<std::string>(), e.at("scene").get<std::string>(),
                     e.at("tabletop").get<std::string>()};
    const json& r = j.at("rotation");
    m.rotation = {r.at("mode").get<std::string>(), r.at("angles_deg").get<std::array<double, 3>>(),
                  r.at("frame_index").get<int>()};
    m.image.resolution = j.at("image").at("resolution").get<std::array<int, 2>>();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("metadata: ") + e.what());
  }
}

void write_metadata(const FrameRecord& record, const SceneConfig& config, const SequenceSetup& setup,
                    const fs::path& path) {
  const std::string mesh_path =
      (fs::path("seq_" + config.id) / frame_dir_name(record.frame_index) / "liquid.obj").generic_string();
  write_file(path, metadata_to_json(make_metadata(record, config, setup, mesh_path)));
}

FrameMetadata read_metadata(const fs::path& path) { return metadata_from_json(read_file(path)); }

// ---- configs -------------------------------------------------------------

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::BadConfig, where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail(ErrorCode::BadConfig, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Vec3 vec3_from(const json& j) {
  const auto a = j.get<std::array<double, 3>>();
  return {a[0], a[1], a[2]};
}

SceneConfig scene_from_json(const json& j, std::size_t index) {
  check_keys(j,
             {"preset", "id", "container", "camera", "liquid", "environment", "rotation", "simulation", "surface",
              "seed"},
             "scene");
  int frames = 81;
  if (j.contains("rotation") && j.at("rotation").contains("frames")) frames = j.at("rotation").at("frames").get<int>();
  if (frames < 1) fail(ErrorCode::BadConfig, "rotation.frames must be >= 1");

  SceneConfig cfg;
  cfg.schedule.frame_count = frames;
  if (j.contains("preset")) {
    cfg = make_preset(j.at("preset").get<std::string>(), frames);
  } else {
    cfg.id = std::to_string(index);
  }
  take(j, "id", cfg.id);
  take(j, "seed", cfg.seed);

  if (j.contains("container")) {
    const json& c = j.at("container");
    check_keys(c, {"name", "shape", "dims_m", "thickness_m", "transparency"}, "container");
    if (c.contains("shape")) {
      cfg.container = ContainerSpec{};
      take(c, "name", cfg.container.name);
      take(c, "shape", cfg.container.shape);
      take(c, "dims_m", cfg.container.dims_m);
      if (cfg.container.name.empty()) cfg.container.name = cfg.container.shape;
    } else {
      const auto spec = find_container(c.at("name").get<std::string>());
      if (!spec) fail(ErrorCode::BadConfig, "unknown container '" + c.at("name").get<std::string>() + "'");
      cfg.container = *spec;
    }
    take(c, "thickness_m", cfg.container.thickness_m);
    take(c, "transparency", cfg.container.transparency);
  }
  if (cfg.container.shape.empty()) fail(ErrorCode::BadConfig, "scene needs a container or a preset");

  double fill_fraction = 0.4;
  bool fill_given = false;
  if (j.contains("liquid")) {
    const json& l = j.at("liquid");
    check_keys(l, {"color", "initial_volume_m3", "fill_fraction"}, "liquid");
    take(l, "color", cfg.tags.color);
    if (l.contains("initial_volume_m3") && l.contains("fill_fraction")) {
      fail(ErrorCode::BadConfig, "give either liquid.initial_volume_m3 or liquid.fill_fraction");
    }
    if (l.contains("initial_volume_m3")) {
      cfg.fill_volume = l.at("initial_volume_m3").get<double>();
      fill_given = true;
    }
    if (l.contains("fill_fraction")) fill_fraction = l.at("fill_fraction").get<double>();
  }
  if (!fill_given) {
    if (!(fill_fraction > 0.0 && fill_fraction <= 1.0)) fail(ErrorCode::BadConfig, "fill_fraction must be in (0, 1]");
    cfg.fill_volume = fill_fraction * build_container(cfg.container).cavity_volume;
  }

  if (j.contains("camera")) {
    const json& c = j.at("camera");
    check_keys(c, {"extent_m", "resolution", "distance_m"}, "camera");
    take(c, "extent_m", cfg.camera.extent_m);
    take(c, "resolution", cfg.camera.resolution);
    take(c, "distance_m", cfg.camera.distance_m);
  }
  if (j.contains("environment")) {
    const json& e = j.at("environment");
    check_keys(e, {"lighting", "scene", "tabletop"}, "environment");
    take(e, "lighting", cfg.tags.lighting);
    take(e, "scene", cfg.tags.scene);
    take(e, "tabletop", cfg.tags.tabletop);
  }
  if (j.contains("rotation")) {
    const json& r = j.at("rotation");
    check_keys(r, {"mode", "frames", "ranges_deg", "pivot"}, "rotation");
    if (r.contains("mode")) {
      const std::string mode = r.at("mode").get<std::string>();
      if (mode == "custom") {
        if (!r.contains("ranges_deg")) fail(ErrorCode::BadConfig, "rotation mode 'custom' needs ranges_deg");
        cfg.schedule.mode = mode;
      } else {
        cfg.schedule = RotationSchedule::from_mode(mode, frames);
      }
    }
    if (r.contains("ranges_deg")) {
      const auto ranges = r.at("ranges_deg").get<std::vector<std::array<double, 2>>>();
      if (ranges.size() != 3) fail(ErrorCode::BadConfig, "rotation.ranges_deg needs three [start, end] pairs");
      for (int a = 0; a < 3; ++a) cfg.schedule.ranges[a] = {ranges[a][0], ranges[a][1]};
      if (!r.contains("mode")) cfg.schedule.mode = "custom";
    }
    if (r.contains("pivot")) cfg.schedule.pivot = vec3_from(r.at("pivot"));
    cfg.schedule.frame_count = frames;
  }
  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    check_keys(s,
               {"grid_resolution", "dx", "dt", "cfl", "gravity", "viscosity", "density", "flip_ratio",
                "particle_radius", "max_particles", "pressure_tolerance", "pressure_max_iterations", "jitter"},
               "simulation");
    take(s, "grid_resolution", cfg.grid_resolution);
    if (s.contains("dx")) {
      cfg.sim.dx = s.at("dx").get<double>();
      if (!s.contains("grid_resolution")) cfg.grid_resolution = 0;
    }
    take(s, "dt", cfg.sim.dt);
    take(s, "cfl", cfg.sim.cfl);
    if (s.contains("gravity")) cfg.sim.gravity = vec3_from(s.at("gravity"));
    take(s, "viscosity", cfg.sim.viscosity);
    take(s, "density", cfg.sim.density);
    take(s, "flip_ratio", cfg.sim.flip_ratio);
    take(s, "particle_radius", cfg.sim.particle_radius);
    take(s, "max_particles", cfg.sim.max_particles);
    take(s, "pressure_tolerance", cfg.sim.pressure_tolerance);
    take(s, "pressure_max_iterations", cfg.sim.pressure_max_iterations);
    take(s, "jitter", cfg.sim.jitter);
  }
  if (j.contains("surface")) {
    const json& s = j.at("surface");
    check_keys(s, {"field_dx", "kernel_radius", "iso_offset", "smoothing_iterations", "averaged"}, "surface");
    take(s, "field_dx", cfg.surface.field_dx);
    take(s, "kernel_radius", cfg.surface.kernel_radius);
    take(s, "iso_offset", cfg.surface.iso_offset);
    take(s, "smoothing_iterations", cfg.surface.smoothing_iterations);
    take(s, "averaged", cfg.surface.averaged);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

std::vector<SceneConfig> parse_configs(std::string_view text) {
  try {
    const json j = json::parse(text);
    std::vector<SceneConfig> out;
    if (j.is_object() && j.contains("sequences")) {
      check_keys(j, {"sequences"}, "config");
      const json& seqs = j.at("sequences");
      if (!seqs.is_array() || seqs.empty()) fail(ErrorCode::BadConfig, "sequences must be a non-empty array");
      for (std::size_t i = 0; i < seqs.size(); ++i) out.push_back(scene_from_json(seqs[i], i));
    } else {
      out.push_back(scene_from_json(j, 0));
    }
    std::set<std::string> ids;
    for (const SceneConfig& c : out) {
      if (!ids.insert(c.id).second) fail(ErrorCode::BadConfig, "duplicate sequence id '" + c.id + "'");
    }
    return out;
  } catch (const json::exception& e) {
    fail(ErrorCode::BadConfig, std::string("config: ") + e.what());
  }
}

std::vector<SceneConfig> load_configs(const fs::path& path) { return parse_configs(read_file(path)); }

std::string config_to_json(const SceneConfig& c) {
  ojson j;
  j["id"] = c.id;
  j["container"] = {{"name", c.container.name},
                    {"shape", c.container.shape},
                    {"dims_m", c.container.dims_m},
                    {"thickness_m", c.container.thickness_m},
                    {"transparency", c.container.transparency}};
  j["camera"] = {{"extent_m", c.camera.extent_m}, {"resolution", c.camera.resolution},
                 {"distance_m", c.camera.distance_m}};
  j["liquid"] = {{"color", c.tags.color}, {"initial_volume_m3", c.fill_volume}};
  j["environment"] = {{"lighting", c.tags.lighting}, {"scene", c.tags.scene}, {"tabletop", c.tags.tabletop}};
  ojson ranges = ojson::array();
  for (const AngleRange& r : c.schedule.ranges) ranges.push_back({r.start, r.end});
  j["rotation"] = {{"mode", c.schedule.mode}, {"frames", c.schedule.frame_count}, {"ranges_deg", ranges}};
  if (c.schedule.pivot) {
    j["rotation"]["pivot"] = {c.schedule.pivot->x, c.schedule.pivot->y, c.schedule.pivot->z};
  }
  ojson sim = {{"grid_resolution", c.grid_resolution},
               {"dx", c.sim.dx},
               {"dt", c.sim.dt},
               {"cfl", c.sim.cfl},
               {"gravity", {c.sim.gravity.x, c.sim.gravity.y, c.sim.gravity.z}},
               {"viscosity", c.sim.viscosity},
               {"density", c.sim.density},
               {"flip_ratio", c.sim.flip_ratio},
               {"particle_radius", c.sim.particle_radius},
               {"max_particles", c.sim.max_particles},
               {"pressure_tolerance", c.sim.pressure_tolerance},
               {"pressure_max_iterations", c.sim.pressure_max_iterations},
               {"jitter", c.sim.jitter}};
  j["simulation"] = sim;
  j["surface"] = {{"field_dx", c.surface.field_dx},
                  {"kernel_radius", c.surface.kernel_radius},
                  {"iso_offset", c.surface.iso_offset},
                  {"smoothing_iterations", c.surface.smoothing_iterations},
                  {"averaged", c.surface.averaged}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

// ---- layout --------------------------------------------------------------

std::string frame_dir_name(int frame) {
  std::string digits = std::to_string(frame);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "frame_" + digits;
}

fs::path sequence_dir(const fs::path& root, const std::string& id) { return root / ("seq_" + id); }

fs::path frame_dir(const fs::path& root, const std::string& id, int frame) {
  return sequence_dir(root, id) / frame_dir_name(frame);
}

std::string mask_file_name(View view, MaskFormat format) {
  return "mask_" + std::string(to_string(view)) + std::string(extension(format));
}

void write_frame(const fs::path& root, const FrameRecord& record, const SceneConfig& config,
                 const SequenceSetup& setup, MaskFormat format) {
  const fs::path dir = frame_dir(root, config.id, record.frame_index);
  fs::create_directories(dir);
  write_obj(record.mesh, dir / "liquid.obj");
  for (const auto& [view, mask] : record.masks) write_mask(mask, dir / mask_file_name(view, format));
  write_metadata(record, config, setup, dir / "meta.json");
}

// ---- manifest ------------------------------------------------------------

std::string manifest_to_json(const Manifest& m) {
  ojson j;
  j["sequences"] = ojson::array();
  for (const ManifestEntry& e : m.sequences) {
    j["sequences"].push_back(
        {{"id", e.id}, {"container", e.container}, {"mode", e.mode}, {"frames", e.frames}, {"path", e.path}});
  }
  if (m.split) {
    j["split"] = {{"ratio", m.split->ratio}, {"seed", m.split->seed}, {"train", m.split->train},
                  {"test", m.split->test}};
  }
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Manifest m;
    for (const json& e : j.at("sequences")) {
      m.sequences.push_back({e.at("id").get<std::string>(), e.value("container", std::string{}),
                             e.value("mode", std::string{}), e.value("frames", 0),
                             e.value("path", "seq_" + e.at("id").get<std::string>())});
    }
    if (j.contains("split")) {
      const json& s = j.at("split");
      m.split = SplitAssignment{s.at("ratio").get<double>(), s.at("seed").get<std::uint64_t>(),
                                s.at("train").get<std::vector<std::string>>(),
                                s.at("test").get<std::vector<std::string>>()};
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("manifest: ") + e.what());
  }
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  write_file(path, manifest_to_json(manifest));
}

Manifest read_manifest(const fs::path& path) { return manifest_from_json(read_file(path)); }

SplitAssignment split_dataset(const std::vector<std::string>& ids, double ratio, std::uint64_t seed) {
  const std::size_t n = ids.size();
  if (n < 2) fail(ErrorCode::TooFewSequences, "need at least 2 sequences to split, got " + std::to_string(n));
  if (!(ratio > 0.0 && ratio < 1.0)) fail(ErrorCode::BadConfig, "split ratio must be in (0, 1)");
  if (std::set<std::string>(ids.begin(), ids.end()).size() != n) fail(ErrorCode::BadConfig, "duplicate sequence ids");

  const auto wanted = static_cast<long long>(std::llround(ratio * static_cast<double>(n)));
  const auto k = static_cast<std::size_t>(std::clamp<long long>(wanted, 1, static_cast<long long>(n) - 1));

  // Sort first so the result depends only on the id set, then Fisher-Yates.
  std::vector<std::string> order = ids;
  std::sort(order.begin(), order.end());
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(order[i], order[std::min(j, i)]);
  }
  SplitAssignment s;
  s.ratio = ratio;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace liquidset
