#include "cstarreg/constructpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstarreg/error.hpp"
#include "cstarreg/regularity.hpp"

namespace cstarreg::constructpi {

using opcore::op_norm;
using opcore::ScalarFunction;

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kPenroseTol = 1e-8;
constexpr int kSupGridPoints = 10000;

bool collides(const opcore::SpectralData& s, double level, double eta) {
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (std::abs(s.values(i) - level) <= eta) return true;
  }
  return false;
}

ComplexMatrix projection_or_collision(const opcore::SpectralData& s, double level,
                                      const char* which) {
  try {
    return opcore::spectral_projection(s, level);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EigenvalueTooCloseToCut) {
      throw Error(ErrorCode::SpectralCollision, std::string(which) + ": " + e.message());
    }
    throw;
  }
}

/// Midpoint of (beta, delta), nudged by 2 eta until it clears both spectra.
double choose_gamma(double beta, double delta, const opcore::SpectralData& absA,
                    const opcore::SpectralData& absAdj, double eta) {
  const double mid = 0.5 * (beta + delta);
  for (int k = 0; k <= 200; ++k) {
    const double step = 2.0 * eta * static_cast<double>((k + 1) / 2);
    const double candidate = (k % 2 == 1) ? mid + step : mid - step;
    if (!(candidate > beta && candidate < delta)) continue;
    if (!collides(absA, candidate, eta) && !collides(absAdj, candidate, eta)) return candidate;
  }
  throw Error(ErrorCode::SpectralCollision, "no admissible gamma clear of the spectrum");
}

double penrose_ratio(const ComplexMatrix& m) {
  const ComplexMatrix mp = regularity::moore_penrose(m);
  const regularity::PenroseResiduals r = regularity::penrose_residuals(m, mp);
  return std::max({r.aba / r.scale, r.bab / r.scale, r.abProj, r.baProj});
}

}  // namespace

bool PipelineTrace::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& kv) { return kv.second.passed(); });
}

double PipelineTrace::worst_ratio() const {
  double worst = 0.0;
  for (const auto& [name, check] : checks) {
    if (check.tolerance > 0.0) {
      worst = std::max(worst, check.residual / check.tolerance);
    } else if (check.residual > 0.0) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

std::map<std::string, bool> PipelineTrace::group_status() const {
  std::map<std::string, bool> groups;
  for (const auto& [name, check] : checks) {
    const std::string group = name.substr(0, name.find('.'));
    auto [it, inserted] = groups.emplace(group, true);
    it->second = it->second && check.passed();
  }
  return groups;
}

ComplexMatrix PipelineTrace::e(int i) const {
  const Eigen::Index n = eDelta.rows();
  switch (i) {
    case 1: return eDelta;
    case 2: return eGamma - eDelta;
    case 3: return opcore::identity(n) - eGamma;
    default: throw Error(ErrorCode::InvalidArgument, "block index must be 1, 2 or 3");
  }
}

ComplexMatrix PipelineTrace::f(int i) const {
  const Eigen::Index m = fDelta.rows();
  switch (i) {
    case 1: return fDelta;
    case 2: return fGamma - fDelta;
    case 3: return opcore::identity(m) - fGamma;
    default: throw Error(ErrorCode::InvalidArgument, "block index must be 1, 2 or 3");
  }
}

PipelineTrace construct_partial_isometry(const ComplexMatrix& a, const ComplexMatrix& x,
                                         double delta) {
  if (a.rows() != x.rows() || a.cols() != x.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "a and x must have the same shape");
  }
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  }

  PipelineTrace t;
  t.a = a;
  t.x = x;
  t.delta = delta;
  t.beta = op_norm(a - x);
  if (t.beta >= delta) {
    throw Error(ErrorCode::TooFar, "||a - x|| = " + std::to_string(t.beta) +
                                       " is not below delta = " + std::to_string(delta));
  }
  {
    const regularity::RegularityReport xr = regularity::is_regular(x);
    if (!xr.isRegular || !regularity::verify_penrose(x, *xr.mpInverse, kPenroseTol)) {
      throw Error(ErrorCode::XNotRegular, "x failed the Penrose checks");
    }
  }

  const Eigen::Index n = a.cols();
  const Eigen::Index m = a.rows();
  const ComplexMatrix oneN = opcore::identity(n);
  const ComplexMatrix oneM = opcore::identity(m);
  const double normA = op_norm(a);
  const double eta = opcore::cut_separation(normA);

  const opcore::PolarParts pa = opcore::polar(a);
  t.v = pa.v;
  t.absA = pa.absA;
  t.absAdj = opcore::abs_of(a.adjoint());
  const opcore::SpectralData specA = opcore::hermitian_eig(t.absA);
  const opcore::SpectralData specAdj = opcore::hermitian_eig(t.absAdj);

  t.eDelta = projection_or_collision(specA, delta, "delta vs spectrum of |a|");
  t.fDelta = projection_or_collision(specAdj, delta, "delta vs spectrum of |a*|");

  t.shortCircuit = t.beta <= kShortCircuitTol * (1.0 + normA);
  t.gamma = choose_gamma(t.shortCircuit ? 0.0 : t.beta, delta, specA, specAdj, eta);
  t.mu1 = 0.5 * (t.gamma + delta);
  t.eGamma = opcore::spectral_projection(specA, t.gamma);
  t.fGamma = opcore::spectral_projection(specAdj, t.gamma);

  auto& checks = t.checks;

  if (t.shortCircuit) {
    t.c = x;
  } else {
    t.y = (x - a) / t.beta;
    const ScalarFunction fFun = ScalarFunction::proof_f(t.gamma);
    const ScalarFunction gFun = ScalarFunction::proof_g(t.gamma);
    t.gOfAbs = opcore::apply_function(specA, gFun);
    t.fOfAbs = opcore::apply_function(specA, fFun);

    // (i) ||beta g||_inf = beta / gamma < 1 makes 1 + beta g(|a|) v* y invertible.
    {
      const double top = std::max(2.0 * delta, normA) + 1.0;
      double sup = gFun(t.gamma);
      for (int k = 0; k <= kSupGridPoints; ++k) {
        sup = std::max(sup, gFun(top * k / kSupGridPoints));
      }
      const double bound = t.beta / t.gamma;
      checks["i.beta_g_sup"] = {std::abs(t.beta * sup - bound), kNormTol};
      checks["i.beta_g_op_norm"] = {std::max(0.0, op_norm(t.beta * t.gOfAbs) - bound), kNormTol};
      const ComplexMatrix perturbation = t.beta * t.gOfAbs * t.v.adjoint() * t.y;
      checks["i.neumann_bound"] = {std::max(0.0, op_norm(perturbation) - bound), kNormTol};
    }
    const ComplexMatrix corr = oneN + t.beta * t.gOfAbs * t.v.adjoint() * t.y;
    const ComplexMatrix corrInv = corr.fullPivLu().inverse();
    checks["i.inverse"] = {op_norm(corr * corrInv - oneN), kNormTol};

    // (ii) b := x (1 + beta g(|a|) v* y)^{-1} f(|a|).
    t.b = x * corrInv * t.fOfAbs;
    checks["ii.ordering"] = {(t.beta < t.gamma && t.gamma < delta) ? 0.0 : 1.0, 0.0};
    checks["ii.y_unit_norm"] = {std::abs(op_norm(t.y) - 1.0), kNormTol};
    checks["ii.x_eq_a_plus_beta_y"] = {op_norm(x - (a + t.beta * t.y)), kNormTol * (1.0 + normA)};
    checks["ii.corner_identity"] = {op_norm(t.fGamma * x - t.v * t.eGamma * t.absA * corr),
                                    kIdentityTol};
    checks["ii.b_regular"] = {penrose_ratio(t.b), kPenroseTol};

    // (iii) f_gamma b = v e_gamma = f_gamma v, so the top two block rows of b
    // are those of v.
    checks["iii.fgamma_b"] = {op_norm(t.fGamma * t.b - t.v * t.eGamma), kIdentityTol};
    checks["iii.v_egamma"] = {op_norm(t.v * t.eGamma - t.fGamma * t.v), kIdentityTol};
    {
      double worst = 0.0;
      for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 3; ++j) {
          const ComplexMatrix block = t.f(i) * t.b * t.e(j);
          const ComplexMatrix expected =
              (i == j) ? ComplexMatrix(t.v * t.e(j)) : ComplexMatrix::Zero(m, n);
          worst = std::max(worst, op_norm(block - expected));
        }
      }
      checks["iii.b_shape"] = {worst, kIdentityTol};
    }

    // (iv) c := b - h1(|a*|) b (1 - h2(|a|)).
    const auto [h1, h2] = opcore::make_h_pair(t.gamma, t.mu1, delta);
    {
      double worst = 0.0;
      const double top = std::max(2.0 * delta, normA) + 1.0;
      for (int k = 0; k <= kSupGridPoints; ++k) {
        const double s = top * k / kSupGridPoints;
        worst = std::max(worst, std::abs(h1(s) * h2(s) - h1(s)));
      }
      checks["iv.h_pair_product"] = {worst, 1e-15};
    }
    t.h1OfAbsAdj = opcore::apply_function(specAdj, h1);
    t.h2OfAbsA = opcore::apply_function(specA, h2);
    t.c = t.b - t.h1OfAbsAdj * t.b * (oneN - t.h2OfAbsA);
  }

  const opcore::PolarParts pc = opcore::polar(t.c);
  t.w = pc.v;

  if (!t.shortCircuit) {
    const auto shape = verify_block_shape(t);
    double worst = 0.0;
    for (const auto& [name, r] : shape) {
      if (name != "cross22") worst = std::max(worst, r);
    }
    checks["iv.block_shape"] = {worst, kIdentityTol};
    checks["iv.cross22"] = {shape.at("cross22"), kIdentityTol};
  }

  // (v) c is regular and c = w |c|.
  checks["v.c_penrose"] = {penrose_ratio(t.c), kPenroseTol};
  checks["v.w_partial_isometry"] = {opcore::partial_isometry_defect(t.w), kPenroseTol};
  checks["v.c_polar"] = {op_norm(t.w * pc.absA - t.c), kNormTol * (1.0 + op_norm(t.c))};

  // (vi) c* c e1 = e1, hence |c| e1 = e1; likewise f1 |c*| = f1.
  if (!t.shortCircuit) {
    const ComplexMatrix e1 = t.e(1);
    const ComplexMatrix f1 = t.f(1);
    checks["vi.cstar_c_e1"] = {op_norm(t.c.adjoint() * t.c * e1 - e1), kIdentityTol};
    checks["vi.abs_c_e1"] = {op_norm(pc.absA * e1 - e1), kIdentityTol};
    checks["vi.f1_abs_cstar"] = {op_norm(f1 * opcore::abs_of(t.c.adjoint()) - f1), kIdentityTol};
  }

  // (vii) w e_delta = f_delta w = v e_delta = f_delta v.
  checks["vii.w_edelta"] = {op_norm(t.w * t.eDelta - t.v * t.eDelta), kIdentityTol};
  checks["vii.fdelta_w"] = {op_norm(t.fDelta * t.w - t.fDelta * t.v), kIdentityTol};
  checks["vii.v_edelta_fdelta_v"] = {op_norm(t.v * t.eDelta - t.fDelta * t.v), kIdentityTol};
  (void)oneM;
  return t;
}

std::map<std::string, double> verify_block_shape(const PipelineTrace& t) {
  std::map<std::string, double> out;
  if (t.shortCircuit) return out;
  const Eigen::Index n = t.eDelta.rows();
  const Eigen::Index m = t.fDelta.rows();
  const ComplexMatrix oneN = opcore::identity(n);

  const ComplexMatrix b32 = t.f(3) * t.b * t.e(2);
  const ComplexMatrix b33 = t.f(3) * t.b * t.e(3);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      ComplexMatrix expected = ComplexMatrix::Zero(m, n);
      if (i == 1 && j == 1) expected = t.v * t.e(1);
      if (i == 2 && j == 2) expected = t.v * t.e(2);
      if (i == 3 && j == 2) expected = b32 * t.h2OfAbsA;
      if (i == 3 && j == 3) expected = b33;
      const ComplexMatrix block = t.f(i) * t.c * t.e(j);
      out["c" + std::to_string(i) + std::to_string(j)] = op_norm(block - expected);
    }
  }
  out["cross22"] = op_norm(t.h1OfAbsAdj * t.v * t.e(2) * (oneN - t.h2OfAbsA));
  return out;
}

ApproxPolar approx_polar_from_pipeline(const ComplexMatrix& a, const ComplexMatrix& x,
                                       double delta) {
  const PipelineTrace t = construct_partial_isometry(a, x, delta);
  ApproxPolar out;
  out.w = t.w;
  out.err = op_norm(a - t.w * t.absA);
  return out;
}

}  // namespace cstarreg::constructpi
