#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liquidset/io.hpp"

namespace liquidset::app {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kSolver = 3 };

struct SequenceReport {
  std::string id;
  int frames = 0;
  int meshes = 0;
  int masks = 0;
  int total_substeps = 0;
  int max_pressure_iterations = 0;
  double max_divergence = 0.0;
};

struct RunReport {
  int sequences = 0;
  int frames = 0;
  int meshes = 0;
  int masks = 0;
  double wall_seconds = 0.0;
  std::vector<SequenceReport> per_sequence;
};

struct GenerateOptions {
  std::optional<fs::path> config;
  std::vector<std::string> presets;
  fs::path out;
  std::optional<int> frames;
  std::optional<std::uint64_t> seed;  // sequence i gets seed + i
  int jobs = 1;
  MaskFormat format = MaskFormat::Pgm;
  bool with_container = false;  // also write seq_<id>/container.obj
};

struct EvaluateOptions {
  fs::path gt;
  fs::path pred;
  double tau = 0.005;
  fs::path out;
  std::size_t samples = 10'000;
  int iou_resolution = 64;
  std::uint64_t seed = 0;
};

struct SplitOptions {
  fs::path manifest;
  double ratio = 0.9;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err, RunReport* report = nullptr);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_split(const SplitOptions& opts, std::ostream& out, std::ostream& err);
int cmd_inspect(const fs::path& frame, std::ostream& out, std::ostream& err);

// Full command line, argv[0] included.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace liquidset::app
