#include "liquidset/error.hpp"

namespace liquidset {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::VolumeUndefined: return "VolumeUndefined";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::VoxelizationUndefined: return "VoxelizationUndefined";
    case ErrorCode::Overfill: return "Overfill";
    case ErrorCode::ParticleLimit: return "ParticleLimit";
    case ErrorCode::NonConverged: return "NonConverged";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::InsufficientParticles: return "InsufficientParticles";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
    case ErrorCode::BadContainerSpec: return "BadContainerSpec";
    case ErrorCode::BadRig: return "BadRig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewSequences: return "TooFewSequences";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadDims: return "BadDims";
    case ErrorCode::BadReference: return "BadReference";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::InvalidMesh: return "InvalidMesh";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace liquidset
