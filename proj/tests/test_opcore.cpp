#include "doctest.h"

#include <cmath>

#include "cstarreg/error.hpp"
#include "cstarreg/opcore.hpp"
#include "cstarreg/random.hpp"
#include "oracles.hpp"

using namespace cstarreg;
using namespace cstarreg::opcore;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                        static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = rng.gaussian(n, n);
  return 0.5 * (g + g.adjoint());
}

}  // namespace

TEST_CASE("adjoint conjugates and transposes") {
  CHECK(adjoint(identity(3)) == identity(3));
  ComplexMatrix i1(1, 1);
  i1(0, 0) = Complex(0, 1);
  CHECK(adjoint(i1)(0, 0) == Complex(0, -1));
  Rng rng(1);
  const ComplexMatrix a = rng.gaussian(3, 2);
  CHECK(adjoint(adjoint(a)) == a);
  CHECK(adjoint(a).rows() == 2);
}

TEST_CASE("op_norm agrees with power iteration") {
  CHECK(op_norm(ComplexMatrix::Zero(3, 3)) == 0.0);
  CHECK(op_norm(diag({3, 1})) == doctest::Approx(3.0).epsilon(1e-14));
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = rng.gaussian(4, 4);
    const double ref = oracle::singular_values(a).front();
    CHECK(std::abs(op_norm(a) - ref) <= 1e-12 * ref);
    CHECK(std::abs(op_norm(a) - oracle::power_norm(a, 3000)) <= 1e-6 * ref);
  }
}

TEST_CASE("hermitian_eig on known spectra") {
  const SpectralData d = hermitian_eig(diag({2, 0}));
  CHECK(d.values(0) == doctest::Approx(0.0));
  CHECK(d.values(1) == doctest::Approx(2.0));
  CHECK(std::abs(std::abs(d.frame(1, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(d.frame(0, 1)) - 1.0) < 1e-14);

  ComplexMatrix swap = ComplexMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const SpectralData s = hermitian_eig(swap);
  CHECK(s.values(0) == doctest::Approx(-1.0));
  CHECK(s.values(1) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig matches the inertia-bisection root oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix h = random_hermitian(rng, 6);
    const SpectralData d = hermitian_eig(h);
    for (int k = 0; k < 6; ++k) {
      CHECK(std::abs(d.values(k) - oracle::bisect_eigenvalue(h, k)) <= 1e-9);
    }
    const ComplexMatrix recon = d.frame * d.values.cast<Complex>().asDiagonal() * d.frame.adjoint();
    CHECK((recon - h).norm() <= 1e-10 * (1.0 + h.norm()));
  }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(m), Error);
  try {
    hermitian_eig(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("abs_of") {
  CHECK((abs_of(diag({-2, 3})) - diag({2, 3})).norm() < 1e-14);
  CHECK(abs_of(ComplexMatrix::Zero(2, 2)).norm() == 0.0);
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = rng.gaussian(4, 4);
    const std::vector<double> sv = oracle::singular_values(a);
    const std::vector<double> ev = oracle::jacobi_eigenvalues(abs_of(a));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(ev[3 - k] - sv[k]) <= 1e-10);
  }
}

TEST_CASE("polar parts") {
  const PolarParts z = opcore::polar(ComplexMatrix::Zero(2, 2));
  CHECK(z.v.norm() == 0.0);
  CHECK(z.absA.norm() == 0.0);
  CHECK(z.rank == 0);

  const PolarParts p = opcore::polar(diag({2, 0}));
  CHECK((p.v - diag({1, 0})).norm() < 1e-14);
  CHECK((p.absA - diag({2, 0})).norm() < 1e-14);

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = rng.gaussian(5, 5);
    const PolarParts pp = opcore::polar(a);
    CHECK(op_norm(pp.v * pp.absA - a) <= 1e-10 * (1.0 + op_norm(a)));
    CHECK(partial_isometry_defect(pp.v) <= 1e-10);
    CHECK(op_norm(pp.v.adjoint() * pp.v - spectral_projection(pp.absA, 1e-6)) <= 1e-8);
  }
}

TEST_CASE("polar of a rectangular, rank-deficient matrix") {
  Rng rng(6);
  RealVector sv(2);
  sv << 2.0, 0.5;
  const ComplexMatrix a = rng.with_singular_values(4, 3, sv);
  const PolarParts pp = opcore::polar(a);
  CHECK(pp.rank == 2);
  CHECK(op_norm(pp.v * pp.absA - a) <= 1e-10);
  CHECK(projection_defect(pp.suppLeft) <= 1e-10);
  CHECK(std::abs(pp.suppRight.trace().real() - 2.0) <= 1e-10);
}

TEST_CASE("apply_function") {
  CHECK((apply_function(diag({3, 0.5}), ScalarFunction::ramp_cutdown(1.0)) - diag({2, 0})).norm() < 1e-14);
  // 1/gamma below gamma and 1/t above.
  CHECK((apply_function(diag({0.25, 2}), ScalarFunction::proof_f(0.5)) - diag({2, 0.5})).norm() < 1e-14);
  Rng rng(7);
  const ComplexMatrix h = random_hermitian(rng, 5);
  const ComplexMatrix id = apply_function(h, ScalarFunction::callable("id", [](double t) { return t; }));
  CHECK(op_norm(id - h) <= 1e-10);
}

TEST_CASE("pseudoinverse function needs a gap certificate") {
  CHECK_THROWS_AS(apply_function(diag({2, 0}), ScalarFunction::pseudoinverse_g()), Error);
  const GapCertificate gap{2.0, 1e-20};
  const ComplexMatrix g = apply_function(diag({2, 0}), ScalarFunction::pseudoinverse_g(), &gap);
  CHECK((g - diag({0.5, 0})).norm() < 1e-14);
}

TEST_CASE("proof_g matches its definition") {
  const ScalarFunction g = ScalarFunction::proof_g(0.5);
  CHECK(g(0.25) == doctest::Approx(1.0));
  CHECK(g(0.5) == doctest::Approx(2.0));
  CHECK(g(2.0) == doctest::Approx(0.5));
  CHECK(g(0.0) == 0.0);
}

TEST_CASE("spectral_projection") {
  CHECK((spectral_projection(diag({3, 1}), 2.0) - diag({1, 0})).norm() < 1e-14);
  CHECK(spectral_projection(diag({3, 1}), 5.0).norm() < 1e-14);
  try {
    spectral_projection(diag({3, 1}), 1.0);
    FAIL("expected EigenvalueTooCloseToCut");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EigenvalueTooCloseToCut);
  }
}

TEST_CASE("cutdown") {
  CHECK(cutdown(diag({3, 1}), 4.0).norm() < 1e-14);
  CHECK((cutdown(diag({3, 1}), 2.0) - diag({1, 0})).norm() < 1e-14);
  Rng rng(8);
  const ComplexMatrix a = rng.gaussian(4, 4);
  CHECK(op_norm(cutdown(a, 0.0) - a) <= 1e-10);
  // The cut-down shaves delta off every singular value.
  const std::vector<double> s = oracle::singular_values(a);
  const std::vector<double> c = oracle::singular_values(cutdown(a, 0.3));
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(c[k] - std::max(s[k] - 0.3, 0.0)) <= 1e-9);
}

TEST_CASE("h pair") {
  const auto [h1, h2] = make_h_pair(0.2, 0.3, 0.5);
  CHECK(h1(0.1) == 1.0);
  CHECK(h2(0.25) == 1.0);
  CHECK(h1(0.4) == 0.0);
  for (double gamma : {0.05, 0.2, 0.4}) {
    const double mu1 = gamma + 0.1;
    const double delta = mu1 + 0.2;
    const auto [p, q] = make_h_pair(gamma, mu1, delta);
    double worst = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double t = 2.0 * k / 2000.0;
      worst = std::max(worst, std::abs(p(t) * q(t) - p(t)));
      worst = std::max(worst, std::abs(p(t) * (1.0 - q(t))));
    }
    CHECK(worst == 0.0);
  }
  CHECK_THROWS_AS(make_h_pair(0.3, 0.2, 0.5), Error);
}

TEST_CASE("property: functional calculus is multiplicative") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = rng.gaussian(4, 4);
    const ComplexMatrix h = abs_of(a);
    const ScalarFunction f = ScalarFunction::proof_f(0.7);
    const ScalarFunction g = ScalarFunction::ramp_cutdown(0.4);
    const ComplexMatrix fg = apply_function(h, ScalarFunction::product(f, g));
    CHECK(op_norm(fg - apply_function(h, f) * apply_function(h, g)) <= 1e-10 * (1.0 + op_norm(a)));
  }
}
