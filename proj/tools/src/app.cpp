#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "liquidset/error.hpp"
#include "liquidset/metrics.hpp"

namespace liquidset::app {

using ojson = nlohmann::ordered_json;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NumericalBlowup:
    case ErrorCode::NonConverged:
      return kSolver;
    case ErrorCode::Io:
      return kFailure;
    default:
      return kInvalid;
  }
}

std::string describe(const Error& e) {
  std::string msg = e.what();
  if (e.frame) msg += " (frame " + std::to_string(*e.frame) + ")";
  if (e.substep) msg += " (substep " + std::to_string(*e.substep) + ")";
  if (e.residual) msg += " (residual " + std::to_string(*e.residual) + ")";
  return msg;
}

std::vector<SceneConfig> collect_configs(const GenerateOptions& opts) {
  if (opts.frames && *opts.frames < 1) fail(ErrorCode::BadConfig, "--frames must be >= 1");
  if (!opts.config && opts.presets.empty()) fail(ErrorCode::BadConfig, "give --config or --preset");
  std::vector<SceneConfig> configs;
  if (opts.config) {
    if (!fs::exists(*opts.config)) fail(ErrorCode::BadConfig, "config not found: " + opts.config->string());
    configs = load_configs(*opts.config);
  }
  for (const std::string& name : opts.presets) configs.push_back(make_preset(name, opts.frames.value_or(81)));
  std::set<std::string> ids;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    SceneConfig& c = configs[i];
    if (opts.frames) c.schedule.frame_count = *opts.frames;
    if (opts.seed) c.seed = *opts.seed + i;
    c.validate();
    if (!ids.insert(c.id).second) fail(ErrorCode::BadConfig, "duplicate sequence id '" + c.id + "'");
  }
  return configs;
}

SequenceReport generate_one(const SceneConfig& config, const GenerateOptions& opts) {
  SequenceReport rep;
  rep.id = config.id;
  const SequenceSetup setup = prepare_sequence(config);
  if (opts.with_container) {
    const RigidTransform x = RigidTransform::from_pose(RigidPose{rotation_at_frame(config.schedule, 0), setup.pivot});
    write_obj(transformed(setup.container.shell, x), sequence_dir(opts.out, config.id) / "container.obj");
  }
  const SequenceStats stats = run_sequence(config, [&](FrameRecord&& r) {
    write_frame(opts.out, r, config, setup, opts.format);
    ++rep.meshes;
    rep.masks += static_cast<int>(r.masks.size());
  });
  rep.frames = stats.frames;
  rep.total_substeps = stats.total_substeps;
  rep.max_pressure_iterations = stats.max_pressure_iterations;
  rep.max_divergence = stats.max_divergence;
  return rep;
}

void merge_manifest(const fs::path& root, const std::vector<SceneConfig>& configs) {
  const fs::path path = root / "manifest.json";
  Manifest m;
  if (fs::exists(path)) m = read_manifest(path);
  for (const SceneConfig& c : configs) {
    ManifestEntry e{c.id, c.container.name, c.schedule.mode, c.schedule.frame_count, "seq_" + c.id};
    auto it = std::find_if(m.sequences.begin(), m.sequences.end(), [&](const ManifestEntry& x) { return x.id == c.id; });
    if (it != m.sequences.end()) {
      *it = e;
    } else {
      m.sequences.push_back(e);
    }
  }
  // Membership changed, so any earlier split is stale.
  m.split.reset();
  write_manifest(m, path);
}

std::vector<double> as_vector(const Vec3& v) { return {v.x, v.y, v.z}; }

std::optional<std::pair<double, Vec3>> read_scale(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    const auto d = j.at("model_dims").get<std::array<double, 3>>();
    return std::make_pair(j.at("s").get<double>(), Vec3{d[0], d[1], d[2]});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err, RunReport* report) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SceneConfig> configs;
  try {
    if (opts.jobs < 1) fail(ErrorCode::BadConfig, "--jobs must be >= 1");
    if (opts.out.empty()) fail(ErrorCode::BadConfig, "--out is required");
    configs = collect_configs(opts);
    fs::create_directories(opts.out);
  } catch (const Error& e) {
    err << "generate: " << describe(e) << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "generate: " << e.what() << "\n";
    return kFailure;
  }

  std::vector<SequenceReport> results(configs.size());
  std::vector<std::optional<std::pair<int, std::string>>> failures(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = generate_one(configs[i], opts);
        std::lock_guard<std::mutex> lock(log_mutex);
        out << "seq " << configs[i].id << ": " << results[i].frames << " frames, max div "
            << results[i].max_divergence << " 1/s, " << results[i].total_substeps << " substeps\n";
      } catch (const Error& e) {
        failures[i] = std::make_pair(exit_code_for(e), "sequence " + configs[i].id + ": " + describe(e));
      } catch (const std::exception& e) {
        failures[i] = std::make_pair(static_cast<int>(kFailure), "sequence " + configs[i].id + ": " + e.what());
      }
    }
  };
  const int threads = std::min<int>(opts.jobs, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  int code = kOk;
  for (const auto& f : failures) {
    if (!f) continue;
    err << "generate: " << f->second << "\n";
    code = std::max(code, f->first);
  }
  if (code != kOk) return code;

  try {
    merge_manifest(opts.out, configs);
  } catch (const Error& e) {
    err << "generate: " << describe(e) << "\n";
    return exit_code_for(e);
  }

  RunReport rep;
  rep.per_sequence = results;
  rep.sequences = static_cast<int>(results.size());
  for (const SequenceReport& s : results) {
    rep.frames += s.frames;
    rep.meshes += s.meshes;
    rep.masks += s.masks;
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "generated " << rep.sequences << " sequences, " << rep.meshes << " meshes, " << rep.masks << " masks in "
      << std::fixed << std::setprecision(1) << rep.wall_seconds << " s\n";
  out.unsetf(std::ios::floatfield);
  if (report != nullptr) *report = rep;
  return rep.masks == 6 * rep.meshes ? kOk : kFailure;
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::exists(opts.gt / "manifest.json")) {
      fail(ErrorCode::BadConfig, "no manifest.json under " + opts.gt.string());
    }
    const Manifest gt_manifest = read_manifest(opts.gt / "manifest.json");
    struct Item {
      std::string id;
      fs::path gt_mesh;
      fs::path pred_mesh;
      fs::path pred_scale;
    };
    std::vector<Item> items;
    std::vector<std::string> missing;
    for (const ManifestEntry& seq : gt_manifest.sequences) {
      for (int t = 0; t < seq.frames; ++t) {
        const fs::path rel = fs::path(seq.path) / frame_dir_name(t);
        Item it{seq.id + "/" + frame_dir_name(t), opts.gt / rel / "liquid.obj", opts.pred / rel / "liquid.obj",
                opts.pred / rel / "scale.json"};
        if (!fs::exists(it.pred_mesh)) missing.push_back(it.id);
        items.push_back(std::move(it));
      }
    }
    if (!missing.empty()) {
      err << "evaluate: " << missing.size() << " predictions missing:\n";
      for (const std::string& id : missing) err << "  " << id << "\n";
      return kInvalid;
    }
    if (items.empty()) fail(ErrorCode::BadConfig, "ground truth has no frames");

    ojson report;
    report["tau"] = opts.tau;
    report["samples"] = opts.samples;
    report["iou_resolution"] = opts.iou_resolution;
    report["seed"] = opts.seed;
    ojson rows = ojson::array();
    std::vector<Vec3> pred_dims;
    std::vector<Vec3> gt_dims;
    std::vector<double> s_pred;
    std::vector<double> s_gt;
    double cd_sum = 0.0;
    double f_sum = 0.0;
    double iou_sum = 0.0;
    std::size_t iou_count = 0;
    for (const Item& it : items) {
      const TriMesh gt = read_obj(it.gt_mesh);
      const TriMesh pred = read_obj(it.pred_mesh);
      ojson row;
      row["id"] = it.id;
      const double cd = chamfer_distance(pred, gt, opts.samples, opts.seed, opts.seed);
      const double f = f_score(pred, gt, opts.tau, opts.samples, opts.seed, opts.seed);
      row["chamfer"] = cd;
      try {
        const double iou = volume_iou(pred, gt, opts.iou_resolution);
        row["volume_iou"] = iou;
        iou_sum += iou;
        ++iou_count;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::VoxelizationUndefined) throw;
        row["volume_iou"] = nullptr;
      }
      row["f_score"] = f;
      const Vec3 pd = mesh_aabb_dims(pred);
      const Vec3 gd = mesh_aabb_dims(gt);
      row["pred_dims_m"] = as_vector(pd);
      row["gt_dims_m"] = as_vector(gd);
      if (const auto scale = read_scale(it.pred_scale)) {
        const double sg = scaling_factor(gd, scale->second);
        row["scale"] = {{"pred", scale->first}, {"gt", sg}};
        s_pred.push_back(scale->first);
        s_gt.push_back(sg);
      }
      cd_sum += cd;
      f_sum += f;
      pred_dims.push_back(pd);
      gt_dims.push_back(gd);
      rows.push_back(std::move(row));
    }
    const double n = static_cast<double>(items.size());
    ojson mean;
    mean["chamfer"] = cd_sum / n;
    mean["volume_iou"] = iou_count > 0 ? ojson(iou_sum / static_cast<double>(iou_count)) : ojson(nullptr);
    mean["f_score"] = f_sum / n;
    report["count"] = items.size();
    report["mean"] = mean;
    report["dims_rmse_m"] = dims_rmse(pred_dims, gt_dims);
    report["dims_rmse_normalized"] = dims_rmse_normalized(pred_dims, gt_dims);
    if (!s_pred.empty()) report["scale_mape_percent"] = liquidset::mape(s_pred, s_gt);
    report["items"] = rows;
    write_file(opts.out, report.dump(2) + "\n");
    out << "evaluated " << items.size() << " items: CD " << mean["chamfer"].get<double>() << " m, F "
        << mean["f_score"].get<double>() << ", RMSE " << report["dims_rmse_m"].get<double>() << " m\n";
    return kOk;
  } catch (const Error& e) {
    err << "evaluate: " << describe(e) << "\n";
    return exit_code_for(e);
  }
}

int cmd_split(const SplitOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::exists(opts.manifest)) fail(ErrorCode::BadConfig, "manifest not found: " + opts.manifest.string());
    Manifest m = read_manifest(opts.manifest);
    std::vector<std::string> ids;
    for (const ManifestEntry& e : m.sequences) ids.push_back(e.id);
    m.split = split_dataset(ids, opts.ratio, opts.seed);
    write_manifest(m, opts.manifest);
    out << "split " << ids.size() << " sequences: " << m.split->train.size() << " train / " << m.split->test.size()
        << " test\n";
    return kOk;
  } catch (const Error& e) {
    err << "split: " << describe(e) << "\n";
    return exit_code_for(e);
  }
}

int cmd_inspect(const fs::path& frame, std::ostream& out, std::ostream& err) {
  try {
    for (const char* name : {"meta.json", "liquid.obj"}) {
      if (!fs::exists(frame / name)) fail(ErrorCode::BadConfig, "missing " + (frame / name).string());
    }
    const FrameMetadata meta = read_metadata(frame / "meta.json");
    const TriMesh mesh = read_obj(frame / "liquid.obj");
    out << "container    " << meta.container.name << " (" << meta.container.shape << ")\n";
    out << "rotation     " << meta.rotation.mode << " frame " << meta.rotation.frame_index << " angles ["
        << meta.rotation.angles_deg[0] << ", " << meta.rotation.angles_deg[1] << ", " << meta.rotation.angles_deg[2]
        << "] deg\n";
    out << "liquid       " << meta.liquid.color << ", initial " << meta.liquid.initial_volume_m3 << " m3\n";
    out << "environment  " << meta.environment.lighting << " " << meta.environment.scene << " "
        << meta.environment.tabletop << "\n";
    out << "mesh         " << mesh.vertex_count() << " vertices, " << mesh.triangle_count() << " triangles, "
        << (is_watertight(mesh) ? "watertight" : "open") << "\n";
    if (is_watertight(mesh) && !mesh.empty()) {
      out << std::setprecision(17) << "volume_m3    " << mesh_volume(mesh) << "\n" << std::setprecision(6);
    }
    if (!mesh.empty()) {
      const Vec3 d = mesh_aabb_dims(mesh);
      out << "aabb_dims_m  " << d.x << " " << d.y << " " << d.z << "\n";
    }
    for (View v : kAllViews) {
      for (MaskFormat f : {MaskFormat::Pgm, MaskFormat::Png}) {
        const fs::path p = frame / mask_file_name(v, f);
        if (!fs::exists(p)) continue;
        const MaskImage mask = read_mask(p);
        out << "mask " << std::left << std::setw(8) << to_string(v) << mask.width << "x" << mask.height << " fill "
            << mask.fill_fraction() << "\n";
      }
    }
    return kOk;
  } catch (const Error& e) {
    err << "inspect: " << describe(e) << "\n";
    return exit_code_for(e);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Liquid dataset generator and evaluation toolkit", "liquidset"};
  cli.require_subcommand(1);

  GenerateOptions gen;
  std::string format = "pgm";
  std::string config_path;
  int frames = 0;
  std::uint64_t seed = 0;
  auto* g = cli.add_subcommand("generate", "Simulate sequences and write the dataset");
  g->add_option("--config", config_path, "Scene config JSON");
  g->add_option("--preset", gen.presets, "Preset name (repeatable)");
  g->add_option("--out", gen.out, "Output dataset directory")->required();
  auto* frames_opt = g->add_option("--frames", frames, "Frames per sequence");
  auto* seed_opt = g->add_option("--seed", seed, "Base seed");
  g->add_option("--jobs", gen.jobs, "Sequences simulated in parallel");
  g->add_option("--mask-format", format, "pgm or png")->check(CLI::IsMember({"pgm", "png"}));
  g->add_flag("--with-container", gen.with_container, "Also write the container shell mesh");

  EvaluateOptions ev;
  auto* e = cli.add_subcommand("evaluate", "Compare predicted meshes against a dataset");
  e->add_option("--gt", ev.gt, "Ground-truth dataset root")->required();
  e->add_option("--pred", ev.pred, "Prediction root with the same layout")->required();
  e->add_option("--tau", ev.tau, "F-score threshold, m");
  e->add_option("--out", ev.out, "Report JSON path")->required();
  e->add_option("--samples", ev.samples, "Surface samples per mesh");
  e->add_option("--iou-res", ev.iou_resolution, "Voxel resolution for volume IoU");
  e->add_option("--seed", ev.seed, "Sampling seed");

  SplitOptions sp;
  auto* s = cli.add_subcommand("split", "Assign whole sequences to train and test");
  s->add_option("--manifest", sp.manifest, "manifest.json to update")->required();
  s->add_option("--ratio", sp.ratio, "Train fraction");
  s->add_option("--seed", sp.seed, "Shuffle seed");

  fs::path frame;
  auto* in = cli.add_subcommand("inspect", "Print one frame's metadata, mesh and mask stats");
  in->add_option("--frame", frame, "Frame directory")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return cli.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    cli.exit(ex, out, err);
    return kInvalid;
  }

  if (g->parsed()) {
    if (!config_path.empty()) gen.config = config_path;
    if (frames_opt->count() > 0) gen.frames = frames;
    if (seed_opt->count() > 0) gen.seed = seed;
    gen.format = format == "png" ? MaskFormat::Png : MaskFormat::Pgm;
    return cmd_generate(gen, out, err);
  }
  if (e->parsed()) return cmd_evaluate(ev, out, err);
  if (s->parsed()) return cmd_split(sp, out, err);
  return cmd_inspect(frame, out, err);
}

}  // namespace liquidset::app
