#include "cstarreg/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cstarreg/error.hpp"

namespace cstarreg::opcore {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double frobenius(const ComplexMatrix& a) { return a.norm(); }

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarFunction

ScalarFunction::ScalarFunction(Description d) : desc_(std::move(d)) {}

ScalarFunction ScalarFunction::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) {
    throw Error(ErrorCode::InvalidArgument, "piecewise-linear function needs at least one knot");
  }
  std::sort(knots.begin(), knots.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first)) {
      throw Error(ErrorCode::InvalidArgument, "piecewise-linear knots must be distinct");
    }
  }
  return {PiecewiseLinear{std::move(knots)}};
}

ScalarFunction ScalarFunction::product(const ScalarFunction& f, const ScalarFunction& g) {
  return callable("product(" + f.tag() + "," + g.tag() + ")",
                  [f, g](double t) { return f(t) * g(t); });
}

double ScalarFunction::operator()(double t) const {
  return std::visit(
      Overloaded{
          [t](const PseudoinverseG&) { return t > 0.0 ? 1.0 / t : 0.0; },
          [t](const ProofF& f) { return t <= f.gamma ? 1.0 / f.gamma : 1.0 / t; },
          [t](const ProofG& g) { return t <= g.gamma ? t / (g.gamma * g.gamma) : 1.0 / t; },
          [t](const BumpH1& h) {
            if (t <= h.gamma) return 1.0;
            if (t >= h.mu1) return 0.0;
            return (h.mu1 - t) / (h.mu1 - h.gamma);
          },
          [t](const BumpH2& h) {
            if (t <= h.mu1) return 1.0;
            if (t >= h.delta) return 0.0;
            return (h.delta - t) / (h.delta - h.mu1);
          },
          [t](const RampCutdown& r) { return std::max(t - r.delta, 0.0); },
          [t](const PiecewiseLinear& p) {
            const auto& k = p.knots;
            if (t <= k.front().first) return k.front().second;
            if (t >= k.back().first) return k.back().second;
            auto hi = std::upper_bound(k.begin(), k.end(), t,
                                       [](double x, const auto& knot) { return x < knot.first; });
            auto lo = hi - 1;
            const double s = (t - lo->first) / (hi->first - lo->first);
            return lo->second + s * (hi->second - lo->second);
          },
          [t](const Callable& c) { return c.fn(t); },
      },
      desc_);
}

std::string ScalarFunction::tag() const {
  return std::visit(
      Overloaded{
          [](const PseudoinverseG&) { return std::string("pseudoinverse-g"); },
          [](const ProofF& f) { return "proof-f(" + format_number(f.gamma) + ")"; },
          [](const ProofG& g) { return "proof-g(" + format_number(g.gamma) + ")"; },
          [](const BumpH1& h) {
            return "bump-h1(" + format_number(h.gamma) + "," + format_number(h.mu1) + ")";
          },
          [](const BumpH2& h) {
            return "bump-h2(" + format_number(h.mu1) + "," + format_number(h.delta) + ")";
          },
          [](const RampCutdown& r) { return "ramp-cutdown(" + format_number(r.delta) + ")"; },
          [](const PiecewiseLinear& p) {
            return "piecewise-linear(" + std::to_string(p.knots.size()) + " knots)";
          },
          [](const Callable& c) { return c.name; },
      },
      desc_);
}

// ---------------------------------------------------------------------------

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

SingularSystem svd(const ComplexMatrix& a) {
  SingularSystem out;
  if (a.rows() == 1 && a.cols() == 1) {
    const Complex z = a(0, 0);
    const double r = std::abs(z);
    out.values = RealVector::Constant(1, r);
    out.left = ComplexMatrix::Constant(1, 1, r > 0.0 ? z / r : Complex(1.0, 0.0));
    out.right = ComplexMatrix::Identity(1, 1);
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.left = solver.matrixU();
  out.values = solver.singularValues();
  out.right = solver.matrixV();
  return out;
}

double op_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return frobenius(a);
  Eigen::JacobiSVD<ComplexMatrix> solver(a);
  return solver.singularValues()(0);
}

double hermitian_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return op_norm(h - h.adjoint());
}

double partial_isometry_defect(const ComplexMatrix& v) {
  return op_norm(v * v.adjoint() * v - v);
}

double projection_defect(const ComplexMatrix& p) {
  if (p.rows() != p.cols()) return std::numeric_limits<double>::infinity();
  return std::max(op_norm(p * p - p), op_norm(p - p.adjoint()));
}

bool is_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

SpectralData hermitian_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::NotHermitian, "matrix is not square");
  }
  SpectralData out;
  if (h.rows() == 1) {
    const Complex z = h(0, 0);
    if (std::abs(z.imag()) > kHermitianTol * (1.0 + std::abs(z))) {
      throw Error(ErrorCode::NotHermitian, "imaginary diagonal entry");
    }
    out.values = RealVector::Constant(1, z.real());
    out.frame = ComplexMatrix::Identity(1, 1);
    return out;
  }
  // Frobenius bounds the operator norm from above, so a small Frobenius
  // defect settles the question without an SVD.
  const ComplexMatrix skew = h - h.adjoint();
  const double fro = frobenius(h);
  const double n = static_cast<double>(h.rows());
  if (frobenius(skew) > kHermitianTol * (1.0 + fro / std::sqrt(n))) {
    if (op_norm(skew) > kHermitianTol * (1.0 + op_norm(h))) {
      throw Error(ErrorCode::NotHermitian,
                  "||h - h*|| = " + format_number(op_norm(skew)) + " exceeds tolerance");
    }
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NotHermitian, "eigensolver failed to converge");
  }
  out.values = solver.eigenvalues();
  out.frame = solver.eigenvectors();
  return out;
}

ComplexMatrix abs_of(const ComplexMatrix& a) {
  if (a.rows() == 1 && a.cols() == 1) {
    return ComplexMatrix::Constant(1, 1, Complex(std::abs(a(0, 0)), 0.0));
  }
  const SingularSystem s = svd(a);
  const Eigen::Index n = a.cols();
  RealVector padded = RealVector::Zero(n);
  padded.head(s.values.size()) = s.values;
  return s.right * padded.cast<Complex>().asDiagonal() * s.right.adjoint();
}

PolarParts polar(const ComplexMatrix& a) {
  PolarParts out;
  const SingularSystem s = svd(a);
  const double norm = s.values.size() > 0 ? s.values(0) : 0.0;
  const double cut = kRankTol * norm;
  Eigen::Index rank = 0;
  while (rank < s.values.size() && s.values(rank) > cut) ++rank;

  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const auto ur = s.left.leftCols(rank);
  const auto vr = s.right.leftCols(rank);
  out.v = ur * vr.adjoint();
  RealVector padded = RealVector::Zero(n);
  padded.head(s.values.size()) = s.values;
  out.absA = s.right * padded.cast<Complex>().asDiagonal() * s.right.adjoint();
  out.suppRight = vr * vr.adjoint();
  out.suppLeft = ur * ur.adjoint();
  if (rank == 0) {
    out.v = ComplexMatrix::Zero(m, n);
    out.suppRight = ComplexMatrix::Zero(n, n);
    out.suppLeft = ComplexMatrix::Zero(m, m);
  }
  out.singularValues = s.values;
  out.rank = rank;
  return out;
}

ComplexMatrix apply_function(const SpectralData& spectrum, const ScalarFunction& fn,
                             const GapCertificate* gap) {
  const RealVector& values = spectrum.values;
  const Eigen::Index n = values.size();
  RealVector mapped(n);
  if (fn.needs_gap_certificate()) {
    if (gap == nullptr) {
      throw Error(ErrorCode::MissingGapCertificate,
                  "pseudoinverse function applied without a spectral gap certificate");
    }
    const double scale = n > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
    const double zeroEdge = std::sqrt(std::max(gap->zeroTol, 0.0)) + slack;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = values(i);
      if (t <= zeroEdge) {
        mapped(i) = 0.0;
      } else if (t >= gap->epsilon - slack) {
        mapped(i) = 1.0 / t;
      } else {
        throw Error(ErrorCode::MissingGapCertificate,
                    "eigenvalue " + format_number(t) + " lies inside the certified gap");
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) mapped(i) = fn(values(i));
  }
  if (n == 1) {
    return ComplexMatrix::Constant(1, 1, Complex(mapped(0), 0.0));
  }
  return spectrum.frame * mapped.cast<Complex>().asDiagonal() * spectrum.frame.adjoint();
}

ComplexMatrix apply_function(const ComplexMatrix& h, const ScalarFunction& fn,
                             const GapCertificate* gap) {
  return apply_function(hermitian_eig(h), fn, gap);
}

ComplexMatrix spectral_projection(const SpectralData& spectrum, double delta) {
  const RealVector& values = spectrum.values;
  const Eigen::Index n = values.size();
  const double scale = n > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
  const double eta = cut_separation(scale);
  Eigen::Index first_above = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(values(i) - delta) <= eta) {
      throw Error(ErrorCode::EigenvalueTooCloseToCut,
                  "eigenvalue " + format_number(values(i)) + " within " + format_number(eta) +
                      " of cut " + format_number(delta));
    }
    if (values(i) > delta && first_above == n) first_above = i;
  }
  const auto above = spectrum.frame.rightCols(n - first_above);
  return above * above.adjoint();
}

ComplexMatrix spectral_projection(const ComplexMatrix& h, double delta) {
  return spectral_projection(hermitian_eig(h), delta);
}

ComplexMatrix cutdown(const ComplexMatrix& a, double delta) {
  if (!(delta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cut-down level must be non-negative");
  }
  if (a.rows() == 1 && a.cols() == 1) {
    const Complex z = a(0, 0);
    const double r = std::abs(z);
    if (r <= delta || r == 0.0) return ComplexMatrix::Zero(1, 1);
    return ComplexMatrix::Constant(1, 1, z / r * (r - delta));
  }
  const PolarParts p = polar(a);
  return p.v * apply_function(p.absA, ScalarFunction::ramp_cutdown(delta));
}

std::pair<ScalarFunction, ScalarFunction> make_h_pair(double gamma, double mu1, double delta) {
  if (!(0.0 < gamma && gamma < mu1 && mu1 < delta)) {
    throw Error(ErrorCode::BadOrdering, "need 0 < gamma < mu1 < delta, got " +
                                            format_number(gamma) + ", " + format_number(mu1) +
                                            ", " + format_number(delta));
  }
  return {ScalarFunction::bump_h1(gamma, mu1), ScalarFunction::bump_h2(mu1, delta)};
}

}  // namespace cstarreg::opcore
