#pragma once

// Regularity (a = a b a for some b) in matrix algebras: gap certificates,
// Moore-Penrose inverses built as g(|a|) v*, Penrose verification, and the
// two propagation results (conjugation by invertibles, block reduction).

#include <optional>

#include "cstarreg/opcore.hpp"

namespace cstarreg::regularity {

using opcore::GapCertificate;

struct RegularityReport {
  bool isRegular = false;
  std::optional<GapCertificate> gap;
  std::optional<ComplexMatrix> witness;
  std::optional<ComplexMatrix> mpInverse;
};

/// (kRankTol * ||a||)^2: the zero band for eigenvalues of a*a that matches
/// the rank decision made by opcore::polar.
double default_zero_tol(const ComplexMatrix& a);

/// Builds a certificate from singular values. Values whose square sits in
/// (zeroTol, 4 zeroTol) are absorbed into the zero band so the certificate
/// always satisfies zeroTol < epsilon^2 / 4.
GapCertificate measure_gap(const RealVector& singularValues, double zeroTol);

RegularityReport is_regular(const ComplexMatrix& a, double zeroTol);
RegularityReport is_regular(const ComplexMatrix& a);

ComplexMatrix moore_penrose(const ComplexMatrix& a);
ComplexMatrix moore_penrose(const ComplexMatrix& a, const GapCertificate& gap);

struct PenroseResiduals {
  double aba = 0.0;     // ||aba - a||
  double bab = 0.0;     // ||bab - b||
  double abProj = 0.0;  // ab Hermitian idempotent defect
  double baProj = 0.0;  // ba Hermitian idempotent defect
  double scale = 1.0;   // 1 + ||a|| + ||b||
};

PenroseResiduals penrose_residuals(const ComplexMatrix& a, const ComplexMatrix& b);
bool verify_penrose(const ComplexMatrix& a, const ComplexMatrix& b, double tol);

double condition_number(const ComplexMatrix& u);

/// Conjugation guard: condition numbers above this are rejected.
inline constexpr double kMaxConditionNumber = 1e6;

/// 1e-7 * kappa(u) * kappa(v): tolerance for the propagated witness identity.
double propagation_tolerance(const ComplexMatrix& u, const ComplexMatrix& v);

/// c = vInv b uInv, a witness for the regularity of u a v.
ComplexMatrix conjugate_regular_witness(const ComplexMatrix& a, const ComplexMatrix& b,
                                        const ComplexMatrix& u, const ComplexMatrix& uInv,
                                        const ComplexMatrix& v, const ComplexMatrix& vInv);

/// ||(u a v) c (u a v) - u a v||.
double witness_residual(const ComplexMatrix& a, const ComplexMatrix& u, const ComplexMatrix& v,
                        const ComplexMatrix& c);

/// x = L D with L = q + c aDag + (1 - q) and D = a + d, where columns split by
/// p and rows by q, a = qxp, c = (1-q)xp, d = (1-q)x(1-p).
struct BlockFactorization {
  ComplexMatrix left;
  ComplexMatrix leftInverse;  // q - c aDag + (1 - q)
  ComplexMatrix diagonal;
  ComplexMatrix corner;       // a
  ComplexMatrix lowerLeft;    // c
  ComplexMatrix lowerRight;   // d
  ComplexMatrix cornerInverse;  // p aDag q
};

BlockFactorization block_factorize(const ComplexMatrix& x, const ComplexMatrix& p,
                                   const ComplexMatrix& q, const ComplexMatrix& aDag);

struct BlockRegularity {
  bool xRegular = false;
  bool dRegular = false;
  Eigen::Index xRank = 0;
  Eigen::Index cornerRank = 0;
  Eigen::Index dRank = 0;
  double xGap = 0.0;
  double dGap = 0.0;

  bool flags_agree() const { return xRegular == dRegular; }
  /// rank x = rank a + rank d, which the invertible left factor forces.
  bool ranks_consistent() const { return xRank == cornerRank + dRank; }
};

BlockRegularity block_regular_iff(const ComplexMatrix& x, const ComplexMatrix& p,
                                  const ComplexMatrix& q, const ComplexMatrix& aDag,
                                  double zeroTol);

}  // namespace cstarreg::regularity
