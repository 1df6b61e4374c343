#pragma once

// Partial-isometry extension from a nearby regular element.
//
// Given a, a regular x with ||a - x|| = beta < delta, builds a partial
// isometry w with w e_delta = f_delta w = v e_delta = f_delta v, where v is
// the canonical polar part of a and e_delta, f_delta are the spectral
// projections of |a|, |a*| for (delta, inf). Every intermediate identity of
// the construction is measured and stored in the trace.

#include <map>
#include <string>

#include "cstarreg/opcore.hpp"

namespace cstarreg::constructpi {

struct Check {
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

/// Check names are prefixed by their group: "i." invertibility and norm
/// bound, "ii." construction of b, "iii." corner identities, "iv." shape of
/// c, "v." regularity and polar part of c, "vi." |c| on e_1, "vii." final.
using CheckMap = std::map<std::string, Check>;

struct PipelineTrace {
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double mu1 = 0.0;
  bool shortCircuit = false;  // a == x, c := x

  ComplexMatrix a, x;
  ComplexMatrix v, absA, absAdj;  // polar data of a; |a*|
  ComplexMatrix y;
  ComplexMatrix gOfAbs, fOfAbs;   // g(|a|), f(|a|)
  ComplexMatrix b, c, w;
  ComplexMatrix eDelta, fDelta, eGamma, fGamma;
  ComplexMatrix h1OfAbsAdj, h2OfAbsA;

  CheckMap checks;

  bool passed() const;
  /// Largest residual/tolerance ratio across checks.
  double worst_ratio() const;
  std::map<std::string, bool> group_status() const;

  ComplexMatrix e(int i) const;  // e_1, e_2, e_3
  ComplexMatrix f(int i) const;  // f_1, f_2, f_3
};

inline constexpr double kShortCircuitTol = 1e-12;
inline constexpr double kIdentityTol = 1e-7;

PipelineTrace construct_partial_isometry(const ComplexMatrix& a, const ComplexMatrix& x,
                                         double delta);

/// Residual of every block f_i c e_j against the expected shape
///   [ v e1   0          0   ]
///   [ 0      v e2       0   ]
///   [ 0      b32 h2(|a|) b33 ]
/// plus the cross term h1(|a*|) v e2 (1 - h2(|a|)). Keys "c11" .. "c33",
/// "cross22".
std::map<std::string, double> verify_block_shape(const PipelineTrace& trace);

struct ApproxPolar {
  ComplexMatrix w;
  double err = 0.0;  // ||a - w |a|||
};

ApproxPolar approx_polar_from_pipeline(const ComplexMatrix& a, const ComplexMatrix& x,
                                       double delta);

}  // namespace cstarreg::constructpi
