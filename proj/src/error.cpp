#include "cstarreg/error.hpp"

namespace cstarreg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::MissingGapCertificate: return "MissingGapCertificate";
    case ErrorCode::EigenvalueTooCloseToCut: return "EigenvalueTooCloseToCut";
    case ErrorCode::BadOrdering: return "BadOrdering";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotAWitness: return "NotAWitness";
    case ErrorCode::CornerNotInvertible: return "CornerNotInvertible";
    case ErrorCode::OffDiagonalNotZero: return "OffDiagonalNotZero";
    case ErrorCode::TooFar: return "TooFar";
    case ErrorCode::XNotRegular: return "XNotRegular";
    case ErrorCode::SpectralCollision: return "SpectralCollision";
    case ErrorCode::PhaseUnwrapAliasing: return "PhaseUnwrapAliasing";
    case ErrorCode::NoWitness: return "NoWitness";
    case ErrorCode::InconsistentVerdict: return "InconsistentVerdict";
    case ErrorCode::InputParse: return "InputParse";
    case ErrorCode::UnknownGalleryName: return "UnknownGalleryName";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

}  // namespace cstarreg
