#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace liquidset {

enum class ErrorCode {
  VolumeUndefined,
  EmptyMesh,
  VoxelizationUndefined,
  Overfill,
  ParticleLimit,
  NonConverged,
  NumericalBlowup,
  InsufficientParticles,
  EmptyField,
  FrameOutOfRange,
  BadContainerSpec,
  BadRig,
  ParseError,
  TooFewSequences,
  ShapeMismatch,
  BadDims,
  BadReference,
  BadConfig,
  InvalidMesh,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  // Populated for NonConverged.
  std::optional<double> residual;
  // Populated for NumericalBlowup / propagated solver failures.
  std::optional<int> frame;
  std::optional<int> substep;
  // Populated for ParseError.
  std::optional<int> line;

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace liquidset
