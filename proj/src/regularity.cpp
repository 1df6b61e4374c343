#include "cstarreg/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cstarreg/error.hpp"

namespace cstarreg::regularity {

using opcore::op_norm;

namespace {

constexpr double kInvertTol = 1e-8;
constexpr double kWitnessTol = 1e-8;
constexpr double kBlockTol = 1e-8;

Eigen::Index numerical_rank(const RealVector& singularValues, double zeroTol) {
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < singularValues.size(); ++i) {
    if (singularValues(i) * singularValues(i) > zeroTol) ++r;
  }
  return r;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " must be square");
  }
}

}  // namespace

double default_zero_tol(const ComplexMatrix& a) {
  const double t = opcore::kRankTol * op_norm(a);
  return t * t;
}

GapCertificate measure_gap(const RealVector& singularValues, double zeroTol) {
  if (!(zeroTol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "zeroTol must be non-negative");
  }
  std::vector<double> squares;
  squares.reserve(static_cast<std::size_t>(singularValues.size()));
  for (Eigen::Index i = 0; i < singularValues.size(); ++i) {
    squares.push_back(singularValues(i) * singularValues(i));
  }
  std::sort(squares.begin(), squares.end());

  double band = zeroTol;
  double epsilonSq = std::numeric_limits<double>::infinity();
  for (double s : squares) {
    if (s <= band) continue;
    if (s < 4.0 * band) {
      band = s;
      continue;
    }
    epsilonSq = s;
    break;
  }
  return GapCertificate{std::sqrt(epsilonSq), band};
}

RegularityReport is_regular(const ComplexMatrix& a, double zeroTol) {
  if (!(zeroTol > 0.0) && op_norm(a) > 0.0) {
    throw Error(ErrorCode::InvalidArgument, "zeroTol must be positive");
  }
  const opcore::SingularSystem s = opcore::svd(a);
  const GapCertificate gap = measure_gap(s.values, zeroTol);
  RegularityReport report;
  // Finite spectra always leave 0 isolated, so every matrix is regular.
  report.isRegular = true;
  report.gap = gap;
  report.mpInverse = moore_penrose(a, gap);
  report.witness = report.mpInverse;
  return report;
}

RegularityReport is_regular(const ComplexMatrix& a) {
  const double tol = default_zero_tol(a);
  return is_regular(a, tol > 0.0 ? tol : std::numeric_limits<double>::min());
}

ComplexMatrix moore_penrose(const ComplexMatrix& a, const GapCertificate& gap) {
  const opcore::PolarParts p = opcore::polar(a);
  const ComplexMatrix g =
      opcore::apply_function(p.absA, opcore::ScalarFunction::pseudoinverse_g(), &gap);
  return g * p.v.adjoint();
}

ComplexMatrix moore_penrose(const ComplexMatrix& a) {
  const opcore::SingularSystem s = opcore::svd(a);
  return moore_penrose(a, measure_gap(s.values, default_zero_tol(a)));
}

PenroseResiduals penrose_residuals(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (b.rows() != a.cols() || b.cols() != a.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "b must have the shape of a*");
  }
  PenroseResiduals r;
  const ComplexMatrix ab = a * b;
  const ComplexMatrix ba = b * a;
  r.aba = op_norm(ab * a - a);
  r.bab = op_norm(ba * b - b);
  r.abProj = opcore::projection_defect(ab);
  r.baProj = opcore::projection_defect(ba);
  r.scale = 1.0 + op_norm(a) + op_norm(b);
  return r;
}

bool verify_penrose(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  const PenroseResiduals r = penrose_residuals(a, b);
  return r.aba <= tol * r.scale && r.bab <= tol * r.scale && r.abProj <= tol &&
         r.baProj <= tol;
}

double condition_number(const ComplexMatrix& u) {
  require_square(u, "u");
  const opcore::SingularSystem s = opcore::svd(u);
  const double smallest = s.values(s.values.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s.values(0) / smallest;
}

double propagation_tolerance(const ComplexMatrix& u, const ComplexMatrix& v) {
  return 1e-7 * condition_number(u) * condition_number(v);
}

ComplexMatrix conjugate_regular_witness(const ComplexMatrix& a, const ComplexMatrix& b,
                                        const ComplexMatrix& u, const ComplexMatrix& uInv,
                                        const ComplexMatrix& v, const ComplexMatrix& vInv) {
  require_square(u, "u");
  require_square(v, "v");
  if (u.rows() != a.rows() || v.rows() != a.cols() || uInv.rows() != u.rows() ||
      uInv.cols() != u.cols() || vInv.rows() != v.rows() || vInv.cols() != v.cols() ||
      b.rows() != a.cols() || b.cols() != a.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "incompatible shapes for u a v");
  }
  const double uDefect = op_norm(u * uInv - opcore::identity(u.rows()));
  const double vDefect = op_norm(v * vInv - opcore::identity(v.rows()));
  if (uDefect > kInvertTol || vDefect > kInvertTol) {
    throw Error(ErrorCode::NotInvertible, "supplied inverse does not invert (defect " +
                                              std::to_string(std::max(uDefect, vDefect)) + ")");
  }
  const double ku = condition_number(u);
  const double kv = condition_number(v);
  if (ku > kMaxConditionNumber || kv > kMaxConditionNumber) {
    throw Error(ErrorCode::NotInvertible,
                "condition number above " + std::to_string(kMaxConditionNumber));
  }
  if (op_norm(a * b * a - a) > kWitnessTol * (1.0 + op_norm(a))) {
    throw Error(ErrorCode::NotAWitness, "a b a != a");
  }
  return vInv * b * uInv;
}

double witness_residual(const ComplexMatrix& a, const ComplexMatrix& u, const ComplexMatrix& v,
                        const ComplexMatrix& c) {
  const ComplexMatrix uav = u * a * v;
  return op_norm(uav * c * uav - uav);
}

BlockFactorization block_factorize(const ComplexMatrix& x, const ComplexMatrix& p,
                                   const ComplexMatrix& q, const ComplexMatrix& aDag) {
  require_square(x, "x");
  const Eigen::Index n = x.rows();
  if (p.rows() != n || p.cols() != n || q.rows() != n || q.cols() != n || aDag.rows() != n ||
      aDag.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "x, p, q, aDag must share one square shape");
  }
  if (opcore::projection_defect(p) > kBlockTol || opcore::projection_defect(q) > kBlockTol) {
    throw Error(ErrorCode::InvalidArgument, "p and q must be projections");
  }
  const ComplexMatrix one = opcore::identity(n);
  const ComplexMatrix pc = one - p;
  const ComplexMatrix qc = one - q;
  if (op_norm(q * x * pc) > kBlockTol * (1.0 + op_norm(x))) {
    throw Error(ErrorCode::OffDiagonalNotZero, "q x (1 - p) != 0");
  }

  BlockFactorization out;
  out.corner = q * x * p;
  out.lowerLeft = qc * x * p;
  out.lowerRight = qc * x * pc;
  out.cornerInverse = p * aDag * q;
  if (op_norm(out.corner * out.cornerInverse - q) > kBlockTol ||
      op_norm(out.cornerInverse * out.corner - p) > kBlockTol) {
    throw Error(ErrorCode::CornerNotInvertible, "a aDag != q or aDag a != p");
  }
  const ComplexMatrix cad = out.lowerLeft * out.cornerInverse;
  out.left = q + cad + qc;
  out.leftInverse = q - cad + qc;
  out.diagonal = out.corner + out.lowerRight;
  return out;
}

BlockRegularity block_regular_iff(const ComplexMatrix& x, const ComplexMatrix& p,
                                  const ComplexMatrix& q, const ComplexMatrix& aDag,
                                  double zeroTol) {
  const BlockFactorization f = block_factorize(x, p, q, aDag);
  const RegularityReport xr = is_regular(x, zeroTol);
  const RegularityReport dr = is_regular(f.lowerRight, zeroTol);

  BlockRegularity out;
  out.xRegular = xr.isRegular && verify_penrose(x, *xr.mpInverse, 1e-8);
  out.dRegular = dr.isRegular && verify_penrose(f.lowerRight, *dr.mpInverse, 1e-8);
  out.xRank = numerical_rank(opcore::svd(x).values, xr.gap->zeroTol);
  out.cornerRank = numerical_rank(opcore::svd(f.corner).values, zeroTol);
  out.dRank = numerical_rank(opcore::svd(f.lowerRight).values, dr.gap->zeroTol);
  out.xGap = xr.gap->epsilon;
  out.dGap = dr.gap->epsilon;
  return out;
}

}  // namespace cstarreg::regularity
