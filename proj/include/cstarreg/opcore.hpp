#pragma once

// Dense complex operator core: adjoints, norms, Hermitian spectral data,
// functional calculus, canonical polar parts, spectral projections and
// cut-downs. Every routine is a pure function of its arguments.

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cstarreg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace opcore {

/// Singular values <= kRankTol * ||a|| are treated as zero by `polar`.
inline constexpr double kRankTol = 1e-9;
/// Relative tolerance on ||h - h*|| accepted by the Hermitian routines.
inline constexpr double kHermitianTol = 1e-8;
/// Relative guard band around a spectral cut.
inline constexpr double kCutSeparation = 1e-8;

/// Width of the guard band around a cut for an operator of norm `norm`.
inline double cut_separation(double norm) { return kCutSeparation * (1.0 + norm); }

/// Spectral-gap certificate for a*a: every eigenvalue is <= zeroTol or
/// >= epsilon^2. epsilon is +inf when the whole spectrum is in the zero band.
struct GapCertificate {
  double epsilon = 0.0;
  double zeroTol = 0.0;
};

struct SpectralData {
  RealVector values;    // ascending
  ComplexMatrix frame;  // unitary, columns are eigenvectors
};

/// Thin singular system a = left * diag(values) * right^*, values descending.
/// left and right are square (full) unitaries.
struct SingularSystem {
  ComplexMatrix left;
  RealVector values;
  ComplexMatrix right;
};

struct PolarParts {
  ComplexMatrix v;          // partial isometry
  ComplexMatrix absA;       // |a|
  ComplexMatrix suppRight;  // v* v, support of |a|
  ComplexMatrix suppLeft;   // v v*, support of |a*|
  RealVector singularValues;
  Eigen::Index rank = 0;
};

// ---------------------------------------------------------------------------
// Scalar functions for the functional calculus.

struct PseudoinverseG {};          // 0 for t <= 0, 1/t for t > 0
struct ProofF { double gamma; };   // 1/gamma on t <= gamma, 1/t above
struct ProofG { double gamma; };   // t/gamma^2 on t <= gamma, 1/t above
struct BumpH1 { double gamma, mu1; };  // 1 on [0,gamma], 0 on [mu1,inf)
struct BumpH2 { double mu1, delta; };  // 1 on [0,mu1], 0 on [delta,inf)
struct RampCutdown { double delta; };  // max(t - delta, 0)
/// Linear interpolation through (t, y) knots sorted by t; constant outside.
struct PiecewiseLinear { std::vector<std::pair<double, double>> knots; };
struct Callable {
  std::string name;
  std::function<double(double)> fn;
};

class ScalarFunction {
 public:
  using Description = std::variant<PseudoinverseG, ProofF, ProofG, BumpH1, BumpH2,
                                   RampCutdown, PiecewiseLinear, Callable>;

  ScalarFunction(Description d);  // NOLINT(google-explicit-constructor)

  static ScalarFunction pseudoinverse_g() { return {PseudoinverseG{}}; }
  static ScalarFunction proof_f(double gamma) { return {ProofF{gamma}}; }
  static ScalarFunction proof_g(double gamma) { return {ProofG{gamma}}; }
  static ScalarFunction bump_h1(double gamma, double mu1) { return {BumpH1{gamma, mu1}}; }
  static ScalarFunction bump_h2(double mu1, double delta) { return {BumpH2{mu1, delta}}; }
  static ScalarFunction ramp_cutdown(double delta) { return {RampCutdown{delta}}; }
  static ScalarFunction piecewise_linear(std::vector<std::pair<double, double>> knots);
  static ScalarFunction callable(std::string name, std::function<double(double)> fn) {
    return {Callable{std::move(name), std::move(fn)}};
  }
  static ScalarFunction product(const ScalarFunction& f, const ScalarFunction& g);

  double operator()(double t) const;
  std::string tag() const;
  bool needs_gap_certificate() const {
    return std::holds_alternative<PseudoinverseG>(desc_);
  }
  const Description& description() const { return desc_; }

 private:
  Description desc_;
};

// ---------------------------------------------------------------------------

ComplexMatrix identity(Eigen::Index n);
ComplexMatrix adjoint(const ComplexMatrix& a);
double op_norm(const ComplexMatrix& a);
SingularSystem svd(const ComplexMatrix& a);

/// Throws NotHermitian when ||h - h*|| > kHermitianTol * (1 + ||h||).
SpectralData hermitian_eig(const ComplexMatrix& h);
ComplexMatrix abs_of(const ComplexMatrix& a);
PolarParts polar(const ComplexMatrix& a);

/// frame * diag(fn(values)) * frame^*. The pseudoinverse function requires a
/// certificate; the certificate is read against h^2 (a*a when h = |a|).
ComplexMatrix apply_function(const ComplexMatrix& h, const ScalarFunction& fn,
                             const GapCertificate* gap = nullptr);
ComplexMatrix apply_function(const SpectralData& spectrum, const ScalarFunction& fn,
                             const GapCertificate* gap = nullptr);

/// Projection onto the spectral subspace of h for (delta, inf). Throws
/// EigenvalueTooCloseToCut if an eigenvalue is within cut_separation(||h||).
ComplexMatrix spectral_projection(const ComplexMatrix& h, double delta);
ComplexMatrix spectral_projection(const SpectralData& spectrum, double delta);

/// v (|a| - delta)_+ for the canonical polar part v of a.
ComplexMatrix cutdown(const ComplexMatrix& a, double delta);

/// The decreasing bump pair with h1 = 1 on [0,gamma], h1 = 0 on [mu1,inf),
/// h2 = 1 on [0,mu1], h2 = 0 on [delta,inf); hence h1 * h2 = h1.
std::pair<ScalarFunction, ScalarFunction> make_h_pair(double gamma, double mu1, double delta);

bool is_finite(const ComplexMatrix& a);
double hermitian_defect(const ComplexMatrix& h);                  // ||h - h*||
double partial_isometry_defect(const ComplexMatrix& v);            // ||v v* v - v||
double projection_defect(const ComplexMatrix& p);                  // max(||p^2-p||, ||p-p*||)

}  // namespace opcore
}  // namespace cstarreg
