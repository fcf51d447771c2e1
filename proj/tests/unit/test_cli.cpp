#include <sstream>

#include "app.hpp"
#include "doctest.h"
#include "json.hpp"
#include "liquidset/io.hpp"
#include "liquidset/metrics.hpp"
#include "test_util.hpp"

using namespace liquidset;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "liquidset");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = app::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Two quick sequences on a coarse grid with small masks.
constexpr const char* kSmallConfig = R"({"sequences": [
  {"preset": "cube-flask-R3", "id": "a", "camera": {"resolution": 32},
   "simulation": {"grid_resolution": 12}, "rotation": {"frames": 4}},
  {"preset": "cylinder-S-R5", "id": "b", "camera": {"resolution": 32},
   "simulation": {"grid_resolution": 12}, "rotation": {"frames": 4}}]})";

std::map<std::string, int> count_by_extension(const fs::path& root) {
  std::map<std::string, int> n;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) ++n[e.path().extension().string()];
  }
  return n;
}

void generate_small(const fs::path& root, const fs::path& config) {
  write_file(config, kSmallConfig);
  const Run r = cli({"generate", "--config", config.string(), "--out", root.string(), "--seed", "3"});
  INFO(r.err);
  REQUIRE(r.code == 0);
}

}  // namespace

TEST_CASE("generate writes one mesh, six masks and one metadata file per frame") {
  testutil::TempDir dir("gen");
  write_file(dir.path() / "cfg.json", kSmallConfig);
  app::GenerateOptions opts;
  opts.config = dir.path() / "cfg.json";
  opts.out = dir.path() / "data";
  std::ostringstream out, err;
  app::RunReport report;
  REQUIRE(app::cmd_generate(opts, out, err, &report) == 0);
  CHECK(report.sequences == 2);
  CHECK(report.frames == 8);
  CHECK(report.meshes == 8);
  CHECK(report.masks == 6 * report.meshes);
  for (const app::SequenceReport& s : report.per_sequence) CHECK(s.max_divergence <= 1e-4);

  const auto n = count_by_extension(opts.out);
  CHECK(n.at(".obj") == 8);
  CHECK(n.at(".pgm") == 48);
  CHECK(n.at(".json") == 9);
  const Manifest m = read_manifest(opts.out / "manifest.json");
  REQUIRE(m.sequences.size() == 2);
  CHECK(m.sequences[0].id == "a");
  CHECK(m.sequences[0].mode == "R3");
  CHECK(m.sequences[1].frames == 4);
}

TEST_CASE("generate is deterministic under a seed") {
  testutil::TempDir dir("det");
  generate_small(dir.path() / "one", dir.path() / "cfg.json");
  generate_small(dir.path() / "two", dir.path() / "cfg.json");
  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path() / "one")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir.path() / "one");
    CHECK(read_file(e.path()) == read_file(dir.path() / "two" / rel));
    ++compared;
  }
  CHECK(compared == 8 * 8 + 1);
}

TEST_CASE("generate rejects invalid input") {
  testutil::TempDir dir("bad");
  const std::string out = (dir.path() / "d").string();
  CHECK(cli({"generate", "--preset", "cube-flask", "--frames", "0", "--out", out}).code == 2);
  CHECK(cli({"generate", "--preset", "no-such-container", "--out", out}).code == 2);
  CHECK(cli({"generate", "--preset", "cube-flask"}).code == 2);
  CHECK(cli({"generate", "--config", (dir.path() / "missing.json").string(), "--out", out}).code == 2);
  write_file(dir.path() / "bad.json", R"({"preset": "cube-flask", "colour": "red"})");
  const Run r = cli({"generate", "--config", (dir.path() / "bad.json").string(), "--out", out});
  CHECK(r.code == 2);
  CHECK(r.err.find("colour") != std::string::npos);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("solver failure exits 3 and names the frame") {
  testutil::TempDir dir("solver");
  write_file(dir.path() / "cfg.json", R"({"preset": "cube-flask-R1", "id": "z", "camera": {"resolution": 16},
    "simulation": {"grid_resolution": 12, "pressure_max_iterations": 1}, "rotation": {"frames": 3}})");
  const Run r = cli({"generate", "--config", (dir.path() / "cfg.json").string(), "--out",
                     (dir.path() / "d").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("NonConverged") != std::string::npos);
  CHECK(r.err.find("frame 1") != std::string::npos);
  CHECK(r.err.find("z") != std::string::npos);
}

TEST_CASE("evaluate a dataset against itself") {
  testutil::TempDir dir("eval");
  const fs::path root = dir.path() / "data";
  generate_small(root, dir.path() / "cfg.json");
  const fs::path report_path = dir.path() / "report.json";
  const Run r = cli({"evaluate", "--gt", root.string(), "--pred", root.string(), "--out", report_path.string(),
                     "--samples", "500"});
  REQUIRE(r.code == 0);
  const json rep = json::parse(read_file(report_path));
  CHECK(rep["count"] == 8);
  CHECK(rep["mean"]["chamfer"].get<double>() == 0.0);
  CHECK(rep["mean"]["volume_iou"].get<double>() == 1.0);
  CHECK(rep["mean"]["f_score"].get<double>() == 100.0);
  CHECK(rep["dims_rmse_m"].get<double>() == 0.0);
  CHECK(rep["tau"].get<double>() == 0.005);
}

TEST_CASE("evaluate report matches direct metric calls") {
  testutil::TempDir dir("eval2");
  const fs::path gt = dir.path() / "gt";
  generate_small(gt, dir.path() / "cfg.json");
  // Prediction: every ground-truth mesh shifted by 3 mm and scaled by 1.05.
  const fs::path pred = dir.path() / "pred";
  for (const auto& e : fs::recursive_directory_iterator(gt)) {
    if (e.path().filename() != "liquid.obj") continue;
    const fs::path rel = fs::relative(e.path(), gt);
    fs::create_directories((pred / rel).parent_path());
    write_obj(translated(scaled(read_obj(e.path()), 1.05), {0.003, 0, 0}), pred / rel);
  }
  const fs::path report_path = dir.path() / "report.json";
  REQUIRE(cli({"evaluate", "--gt", gt.string(), "--pred", pred.string(), "--out", report_path.string(), "--samples",
               "400", "--tau", "0.004", "--seed", "9"})
              .code == 0);
  const json rep = json::parse(read_file(report_path));
  REQUIRE(rep["items"].size() == 8);
  std::vector<Vec3> pd, gd;
  double cd_sum = 0.0;
  for (const json& row : rep["items"]) {
    const std::string id = row["id"];
    const std::string seq = id.substr(0, id.find('/'));
    const std::string frame = id.substr(id.find('/') + 1);
    const TriMesh g = read_obj(gt / ("seq_" + seq) / frame / "liquid.obj");
    const TriMesh p = read_obj(pred / ("seq_" + seq) / frame / "liquid.obj");
    const double cd = chamfer_distance(p, g, 400, 9, 9);
    CHECK(row["chamfer"].get<double>() == cd);
    CHECK(row["f_score"].get<double>() == f_score(p, g, 0.004, 400, 9, 9));
    CHECK(row["volume_iou"].get<double>() == volume_iou(p, g));
    cd_sum += cd;
    pd.push_back(mesh_aabb_dims(p));
    gd.push_back(mesh_aabb_dims(g));
  }
  CHECK(rep["mean"]["chamfer"].get<double>() == doctest::Approx(cd_sum / 8.0).epsilon(1e-12));
  CHECK(rep["dims_rmse_m"].get<double>() == doctest::Approx(dims_rmse(pd, gd)).epsilon(1e-12));
  CHECK(rep["dims_rmse_normalized"].get<double>() == doctest::Approx(dims_rmse_normalized(pd, gd)).epsilon(1e-12));
}

TEST_CASE("evaluate reports missing predictions") {
  testutil::TempDir dir("eval3");
  const fs::path gt = dir.path() / "gt";
  generate_small(gt, dir.path() / "cfg.json");
  const fs::path pred = dir.path() / "pred";
  fs::copy(gt, pred, fs::copy_options::recursive);
  fs::remove(pred / "seq_b" / "frame_002" / "liquid.obj");
  const Run r = cli({"evaluate", "--gt", gt.string(), "--pred", pred.string(), "--out",
                     (dir.path() / "r.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("b/frame_002") != std::string::npos);
  CHECK(cli({"evaluate", "--gt", (dir.path() / "nope").string(), "--pred", pred.string(), "--out",
             (dir.path() / "r.json").string()})
            .code == 2);
}

TEST_CASE("split writes a 90/10 assignment into the manifest") {
  testutil::TempDir dir("split");
  Manifest m;
  for (int i = 0; i < 100; ++i) {
    const std::string id = std::to_string(1000 + i);
    m.sequences.push_back({id, "cube-flask", "R1", 81, "seq_" + id});
  }
  const fs::path path = dir.path() / "manifest.json";
  write_manifest(m, path);
  REQUIRE(cli({"split", "--manifest", path.string(), "--ratio", "0.9", "--seed", "4"}).code == 0);
  const Manifest first = read_manifest(path);
  REQUIRE(first.split.has_value());
  CHECK(first.split->train.size() == 90);
  CHECK(first.split->test.size() == 10);
  REQUIRE(cli({"split", "--manifest", path.string(), "--ratio", "0.9", "--seed", "4"}).code == 0);
  CHECK(read_manifest(path) == first);
  CHECK(first.sequences == m.sequences);

  Manifest one;
  one.sequences.push_back({"x", "cube-flask", "R1", 81, "seq_x"});
  write_manifest(one, path);
  CHECK(cli({"split", "--manifest", path.string()}).code == 2);
  CHECK(cli({"split", "--manifest", (dir.path() / "none.json").string()}).code == 2);
}

TEST_CASE("inspect prints the mesh volume") {
  testutil::TempDir dir("inspect");
  const fs::path root = dir.path() / "data";
  generate_small(root, dir.path() / "cfg.json");
  const fs::path frame = root / "seq_a" / "frame_002";
  const Run r = cli({"inspect", "--frame", frame.string()});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("volume_m3");
  REQUIRE(pos != std::string::npos);
  const double printed = std::stod(r.out.substr(pos + 9));
  CHECK(printed == mesh_volume(read_obj(frame / "liquid.obj")));
  CHECK(r.out.find("R3 frame 2") != std::string::npos);
  CHECK(r.out.find("mask front") != std::string::npos);
  CHECK(cli({"inspect", "--frame", (root / "seq_a" / "frame_099").string()}).code == 2);
}
