#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "liquidset/error.hpp"
#include "liquidset/io.hpp"
#include "test_util.hpp"

using namespace liquidset;
using nlohmann::json;

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

std::optional<int> parse_error_line(std::string_view text) {
  try {
    parse_obj(text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) return e.line;
  }
  return std::nullopt;
}

MaskImage checkerboard(int w, int h) {
  MaskImage m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.at(x, y) = (x + y) % 2;
  return m;
}

std::vector<std::string> keys_of(const json& j) {
  std::vector<std::string> k;
  for (auto it = j.begin(); it != j.end(); ++it) k.push_back(it.key());
  std::sort(k.begin(), k.end());
  return k;
}

FrameRecord record_at(const SceneConfig& config, const SequenceSetup& setup, int t) {
  FrameRecord r;
  r.frame_index = t;
  r.pose = {rotation_at_frame(config.schedule, t), setup.pivot};
  r.mesh = make_box({0, 0, 0}, {0.05, 0.04, 0.03});
  r.masks = render_rig(r.mesh, setup.rig);
  r.aabb_dims = mesh_aabb_dims(r.mesh);
  r.mesh_volume = mesh_volume(r.mesh);
  r.tags = config.tags;
  return r;
}

}  // namespace

TEST_CASE("OBJ round-trip is exact") {
  const TriMesh cube = testutil::unit_cube({0.1, -0.2, 1.0 / 3.0});
  const TriMesh back = parse_obj(format_obj(cube));
  CHECK(back.vertex_count() == 8);
  CHECK(back.triangle_count() == 12);
  CHECK(back.vertices() == cube.vertices());
  CHECK(back.triangles() == cube.triangles());

  const TriMesh sphere = make_icosphere({0.01, 0.02, 0.03}, 0.0731, 3);
  testutil::TempDir dir("obj");
  write_obj(sphere, dir.path() / "s.obj");
  const TriMesh s2 = read_obj(dir.path() / "s.obj");
  CHECK(s2.vertices() == sphere.vertices());
  CHECK(mesh_volume(s2) == mesh_volume(sphere));
  // Writing the parsed mesh again gives the same bytes.
  CHECK(format_obj(s2) == read_file(dir.path() / "s.obj"));
}

TEST_CASE("OBJ parser subset") {
  const TriMesh m = parse_obj("# comment\no x\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\n\nf 1/1/1 2//1 3\n");
  CHECK(m.vertex_count() == 3);
  CHECK(m.triangle_count() == 1);

  const TriMesh verts = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\n");
  CHECK(verts.vertex_count() == 3);
  CHECK(verts.triangle_count() == 0);
  CHECK_FALSE(is_watertight(verts));

  CHECK(parse_error_line("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n") == 5);
  CHECK(parse_error_line("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n") == 4);
  CHECK(parse_error_line("v 0 0\n") == 1);
  CHECK(parse_error_line("v 0 0 0\nv a b c\n") == 2);
  CHECK(code_of([] { read_obj("/nonexistent/dir/x.obj"); }) == ErrorCode::Io);
}

TEST_CASE("PGM masks") {
  testutil::TempDir dir("pgm");
  const MaskImage zero(4, 4);
  write_mask(zero, dir.path() / "z.pgm");
  CHECK(read_mask(dir.path() / "z.pgm") == zero);

  const MaskImage board = checkerboard(8, 8);
  const std::string bytes = encode_pgm(board);
  CHECK(bytes.substr(0, 2) == "P5");
  CHECK(bytes.size() == std::string("P5\n8 8\n255\n").size() + 64);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 64 + 1]) == 255);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 64]) == 0);
  CHECK(decode_pgm(bytes) == board);

  CHECK(code_of([&] { decode_pgm(bytes.substr(0, bytes.size() - 3)); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { decode_pgm("P2\n1 1\n255\n0\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { decode_pgm(bytes + "x"); }) == ErrorCode::ParseError);
}

TEST_CASE("PNG masks") {
  testutil::TempDir dir("png");
  const MaskImage board = checkerboard(13, 7);
  write_mask(board, dir.path() / "b.png");
  CHECK(read_mask(dir.path() / "b.png") == board);
  write_file(dir.path() / "bad.png", "not a png");
  CHECK(code_of([&] { read_mask(dir.path() / "bad.png"); }) == ErrorCode::ParseError);
}

TEST_CASE("frame metadata") {
  SceneConfig config = make_preset("cube-flask-R1");
  config.camera.resolution = 32;
  const SequenceSetup setup = prepare_sequence(config);
  const FrameRecord rec = record_at(config, setup, 80);
  const FrameMetadata meta = make_metadata(rec, config, setup, "seq_x/frame_080/liquid.obj");
  CHECK(meta.rotation.angles_deg == std::array<double, 3>{80, 0, 0});
  CHECK(meta.rotation.mode == "R1");
  CHECK(meta.rotation.frame_index == 80);
  CHECK(meta.liquid.color == "colorless");
  CHECK(meta.liquid.initial_volume_m3 == config.fill_volume);
  CHECK(meta.image.resolution == std::array<int, 2>{32, 32});
  CHECK(meta.camera.views.size() == 6);

  const json j = json::parse(metadata_to_json(meta));
  CHECK(keys_of(j) == std::vector<std::string>{"camera", "container", "environment", "image", "liquid", "rotation"});
  CHECK(keys_of(j["container"]) == std::vector<std::string>{"dims_m", "name", "shape", "thickness_m", "transparency"});
  CHECK(keys_of(j["camera"]) == std::vector<std::string>{"distance_m", "extent_m", "resolution", "views"});
  CHECK(keys_of(j["liquid"]) ==
        std::vector<std::string>{"aabb_dims_m", "color", "initial_volume_m3", "mesh_path", "mesh_volume_m3"});
  CHECK(keys_of(j["environment"]) == std::vector<std::string>{"lighting", "scene", "tabletop"});
  CHECK(keys_of(j["rotation"]) == std::vector<std::string>{"angles_deg", "frame_index", "mode"});
  CHECK(keys_of(j["image"]) == std::vector<std::string>{"resolution"});
  CHECK(j["rotation"]["angles_deg"] == json::array({80.0, 0.0, 0.0}));

  CHECK(metadata_from_json(metadata_to_json(meta)) == meta);
  CHECK(json::parse(metadata_to_json(metadata_from_json(metadata_to_json(meta)))) == j);
  CHECK(code_of([] { metadata_from_json("{\"container\": {}}"); }) == ErrorCode::ParseError);
}

TEST_CASE("frame files on disk") {
  SceneConfig config = make_preset("rect-flask-R2", 9);
  config.id = "0007";
  config.camera.resolution = 24;
  const SequenceSetup setup = prepare_sequence(config);
  const FrameRecord rec = record_at(config, setup, 3);
  testutil::TempDir dir("frame");
  write_frame(dir.path(), rec, config, setup, MaskFormat::Pgm);
  const fs::path fd = frame_dir(dir.path(), "0007", 3);
  CHECK(fd == dir.path() / "seq_0007" / "frame_003");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(fd)) ++files;
  CHECK(files == 8);
  CHECK(read_obj(fd / "liquid.obj").vertices() == rec.mesh.vertices());
  for (View v : kAllViews) CHECK(read_mask(fd / mask_file_name(v, MaskFormat::Pgm)) == rec.masks.at(v));
  const FrameMetadata meta = read_metadata(fd / "meta.json");
  CHECK(meta.liquid.mesh_path == "seq_0007/frame_003/liquid.obj");
  CHECK(meta.rotation.angles_deg == std::array<double, 3>{30, 30, 0});
  CHECK(mask_file_name(View::Top, MaskFormat::Png) == "mask_top.png");
}

TEST_CASE("scene configs") {
  const auto one = parse_configs(R"({"preset": "tube-S-R4", "id": "a1", "seed": 5,
    "liquid": {"color": "red", "fill_fraction": 0.25},
    "environment": {"lighting": "L3", "scene": "Lab2", "tabletop": "wood"},
    "rotation": {"frames": 12}})");
  REQUIRE(one.size() == 1);
  const SceneConfig& c = one[0];
  CHECK(c.id == "a1");
  CHECK(c.seed == 5);
  CHECK(c.schedule.mode == "R4");
  CHECK(c.schedule.frame_count == 12);
  CHECK(c.tags.color == "red");
  CHECK(c.tags.lighting == "L3");
  CHECK(c.fill_volume == doctest::Approx(0.25 * build_container(c.container).cavity_volume));

  const auto many = parse_configs(R"({"sequences": [
    {"id": "b", "container": {"shape": "box", "dims_m": [0.05, 0.05, 0.05]},
     "liquid": {"initial_volume_m3": 2e-5},
     "rotation": {"mode": "custom", "ranges_deg": [[0, 10], [0, 20], [5, 30]], "frames": 3}},
    {"preset": "cube-flask"}]})");
  REQUIRE(many.size() == 2);
  CHECK(many[0].fill_volume == 2e-5);
  CHECK(rotation_at_frame(many[0].schedule, 2) == Vec3{10, 20, 30});
  CHECK(many[1].id == "cube-flask");

  // Serialised configs parse back to the same document.
  const std::string text = config_to_json(many[0]);
  CHECK(json::parse(config_to_json(parse_configs(text).at(0))) == json::parse(text));

  CHECK(code_of([] { parse_configs(R"({"preset": "cube-flask", "bogus": 1})"); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { parse_configs("{not json"); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { parse_configs(R"({"preset": "cube-flask", "rotation": {"mode": "R9"}})"); }) ==
        ErrorCode::BadConfig);
}

TEST_CASE("dataset split") {
  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.push_back("s" + std::to_string(i));
  const SplitAssignment s = split_dataset(ids, 0.9, 1);
  CHECK(s.train.size() == 90);
  CHECK(s.test.size() == 10);
  std::vector<std::string> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<std::string> sorted_ids = ids;
  std::sort(sorted_ids.begin(), sorted_ids.end());
  CHECK(all == sorted_ids);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  CHECK(split_dataset(ids, 0.9, 1) == s);
  std::vector<std::string> shuffled(ids.rbegin(), ids.rend());
  CHECK(split_dataset(shuffled, 0.9, 1) == s);
  CHECK(split_dataset(ids, 0.9, 2).test != s.test);

  const SplitAssignment ten = split_dataset({ids.begin(), ids.begin() + 10}, 0.9, 0);
  CHECK(ten.train.size() == 9);
  CHECK(ten.test.size() == 1);
  const SplitAssignment two = split_dataset({"a", "b"}, 0.99, 0);
  CHECK(two.train.size() == 1);

  CHECK(code_of([] { split_dataset({"only"}, 0.9, 0); }) == ErrorCode::TooFewSequences);
  CHECK(code_of([] { split_dataset({"a", "b"}, 1.0, 0); }) == ErrorCode::BadConfig);
  CHECK(code_of([] { split_dataset({"a", "a"}, 0.5, 0); }) == ErrorCode::BadConfig);
}

TEST_CASE("manifest round-trip") {
  Manifest m;
  m.sequences.push_back({"0001", "cube-flask", "R3", 81, "seq_0001"});
  m.sequences.push_back({"0002", "tube-L", "R1", 81, "seq_0002"});
  CHECK(manifest_from_json(manifest_to_json(m)) == m);
  m.split = split_dataset({"0001", "0002"}, 0.5, 3);
  testutil::TempDir dir("manifest");
  write_manifest(m, dir.path() / "manifest.json");
  CHECK(read_manifest(dir.path() / "manifest.json") == m);
  CHECK(manifest_to_json(read_manifest(dir.path() / "manifest.json")) == read_file(dir.path() / "manifest.json"));
}
