#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstarreg {

enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  MissingGapCertificate,
  EigenvalueTooCloseToCut,
  BadOrdering,
  ShapeMismatch,
  NotInvertible,
  NotAWitness,
  CornerNotInvertible,
  OffDiagonalNotZero,
  TooFar,
  XNotRegular,
  SpectralCollision,
  PhaseUnwrapAliasing,
  NoWitness,
  InconsistentVerdict,
  InputParse,
  UnknownGalleryName,
};

std::string_view to_string(ErrorCode code);

/// Every module failure surfaces as this exception; `code()` identifies the
/// failure class so callers (the CLI in particular) can map it to a report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace cstarreg
