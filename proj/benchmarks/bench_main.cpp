#include <benchmark/benchmark.h>

#include <random>

#include "liquidset/fluid.hpp"
#include "liquidset/io.hpp"
#include "liquidset/metrics.hpp"
#include "liquidset/render.hpp"
#include "liquidset/scene.hpp"
#include "liquidset/surface.hpp"

using namespace liquidset;

namespace {

struct Fixture {
  SceneConfig config;
  SequenceSetup setup;
  ParticleSet particles;
  TriMesh mesh;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    x.config = make_preset("cube-flask-R3", 9);
    x.setup = prepare_sequence(x.config);
    x.particles = seed_particles(x.setup.container.cavity, {{0, 0, 0}, x.setup.pivot}, x.config.fill_volume,
                                 x.setup.sim, 0);
    x.mesh = extract_surface(x.particles, x.config.surface);
    return x;
  }();
  return f;
}

void BM_PressureProjection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MacGrid g({0, 0, 0}, 0.01, {n, n, n});
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const bool in = i > 0 && j > 0 && k > 0 && i < n - 1 && j < n - 1 && k < n - 4;
        g.labels()[g.cell_index(i, j, k)] = in ? CellLabel::Fluid : CellLabel::Empty;
      }
  for (int a = 0; a < 3; ++a)
    for (double& v : g.velocity(static_cast<Axis>(a))) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(pressure_project(g, SimParams{}));
  state.SetComplexityN(static_cast<std::int64_t>(n) * n * n);
}
BENCHMARK(BM_PressureProjection)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SimulateFrame(benchmark::State& state) {
  const Fixture& f = fixture();
  const RigidPose a{{0, 0, 0}, f.setup.pivot};
  const RigidPose b{rotation_at_frame(f.config.schedule, 1), f.setup.pivot};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_step(f.particles, f.setup.container.cavity, a, b, f.setup.sim));
  }
  state.counters["particles"] = static_cast<double>(f.particles.size());
}
BENCHMARK(BM_SimulateFrame)->Unit(benchmark::kMillisecond);

void BM_ExtractSurface(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(extract_surface(f.particles, f.config.surface));
}
BENCHMARK(BM_ExtractSurface)->Unit(benchmark::kMillisecond);

void BM_RenderRig(benchmark::State& state) {
  const Fixture& f = fixture();
  const auto rig = make_rig(f.setup.rig.front().center, f.setup.camera_extent, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_rig(f.mesh, rig));
}
BENCHMARK(BM_RenderRig)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FormatObj(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(format_obj(f.mesh));
  state.counters["triangles"] = static_cast<double>(f.mesh.triangle_count());
}
BENCHMARK(BM_FormatObj)->Unit(benchmark::kMillisecond);

void BM_ChamferDistance(benchmark::State& state) {
  const Fixture& f = fixture();
  const TriMesh moved = translated(f.mesh, {0.002, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(chamfer_distance(f.mesh, moved, state.range(0)));
}
BENCHMARK(BM_ChamferDistance)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_VolumeIou(benchmark::State& state) {
  const Fixture& f = fixture();
  const TriMesh moved = translated(f.mesh, {0.002, 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(volume_iou(f.mesh, moved, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_VolumeIou)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
