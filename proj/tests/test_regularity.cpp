#include "doctest.h"

#include <cmath>

#include "cstarreg/error.hpp"
#include "cstarreg/random.hpp"
#include "cstarreg/regularity.hpp"
#include "oracles.hpp"

using namespace cstarreg;
using namespace cstarreg::regularity;
using opcore::op_norm;

namespace {

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                        static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

// Invertible matrix with singular values spread over [1, kappa].
ComplexMatrix conditioned(Rng& rng, Eigen::Index n, double kappa) {
  RealVector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::pow(kappa, rng.uniform());
  s(0) = kappa;
  s(n - 1) = 1.0;
  return rng.with_singular_values(n, n, s);
}

}  // namespace

TEST_CASE("projections and zero are regular") {
  Rng rng(11);
  const ComplexMatrix p = rng.projection(4, 2);
  const RegularityReport r = is_regular(p);
  CHECK(r.isRegular);
  REQUIRE(r.witness);
  CHECK(op_norm(*r.witness - p) <= 1e-10);

  const RegularityReport z = is_regular(ComplexMatrix::Zero(3, 3));
  CHECK(z.isRegular);
  REQUIRE(z.gap);
  CHECK(std::isinf(z.gap->epsilon));
  CHECK(z.witness->norm() == 0.0);
}

TEST_CASE("random matrices are regular with a working witness") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = rng.gaussian(4, 4);
    const RegularityReport r = is_regular(a);
    CHECK(r.isRegular);
    CHECK(op_norm(a * *r.witness * a - a) <= 1e-8 * (1.0 + op_norm(a)));
  }
}

TEST_CASE("moore_penrose against the COD oracle") {
  Rng rng(13);
  const ComplexMatrix p = rng.projection(5, 3);
  CHECK(op_norm(moore_penrose(p) - p) <= 1e-10);
  CHECK(op_norm(moore_penrose(diag({2, 0})) - diag({0.5, 0})) <= 1e-14);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = rng.gaussian(5, 3);
    const ComplexMatrix b = moore_penrose(a);
    CHECK(b.rows() == 3);
    CHECK(op_norm(b - oracle::pinv(a)) <= 1e-8);
  }
}

TEST_CASE("moore_penrose spans: range of b is the row space of a") {
  Rng rng(14);
  RealVector s(2);
  s << 1.5, 0.4;
  const ComplexMatrix a = rng.with_singular_values(5, 4, s);
  const ComplexMatrix b = moore_penrose(a);
  // b = b (a b): the columns of b lie in the range of a* = range of ba.
  CHECK(op_norm(b * a * b - b) <= 1e-10);
  CHECK(op_norm((b * a) * a.adjoint() - a.adjoint()) <= 1e-10);
}

TEST_CASE("verify_penrose") {
  Rng rng(15);
  const ComplexMatrix p = rng.projection(4, 1);
  CHECK(verify_penrose(p, p, 1e-10));
  const ComplexMatrix a = rng.gaussian(4, 4);
  CHECK_FALSE(verify_penrose(a, ComplexMatrix::Zero(4, 4), 1e-8));
  CHECK(verify_penrose(a, moore_penrose(a), 1e-8));
}

TEST_CASE("property: the Penrose inverse is unique") {
  // Any b satisfying all four identities agrees with the oracle.
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    RealVector s(2);
    s << 1.0 + rng.uniform(), 0.2 + rng.uniform();
    const ComplexMatrix a = rng.with_singular_values(4, 4, s);
    const ComplexMatrix b = oracle::pinv(a);
    REQUIRE(verify_penrose(a, b, 1e-8));
    CHECK(op_norm(moore_penrose(a) - b) <= 1e-8);
    // A generalized inverse that is not Penrose fails the check.
    const ComplexMatrix z = rng.gaussian(4, 4);
    const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
    const ComplexMatrix other = b + (id - b * a) * z * (id - a * b);
    CHECK(op_norm(a * other * a - a) <= 1e-8);
    CHECK_FALSE(verify_penrose(a, other, 1e-8));
  }
}

TEST_CASE("measure_gap keeps zeroTol below a quarter of the gap") {
  RealVector s(3);
  s << 2.0, 1e-3, 0.0;
  const GapCertificate g = measure_gap(s, 1e-12);
  CHECK(g.epsilon == doctest::Approx(1e-3));
  CHECK(g.zeroTol < 0.25 * g.epsilon * g.epsilon);
  // A value whose square sits just above zeroTol is absorbed.
  const GapCertificate h = measure_gap(s, 0.5e-6);
  CHECK(h.epsilon == doctest::Approx(2.0));
  CHECK(h.zeroTol < 0.25 * h.epsilon * h.epsilon);
}

TEST_CASE("conjugation carries the witness") {
  Rng rng(17);
  const ComplexMatrix a = rng.gaussian(3, 3);
  const ComplexMatrix b = moore_penrose(a);
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  CHECK(op_norm(conjugate_regular_witness(a, b, id, id, id, id) - b) == 0.0);

  const ComplexMatrix p = rng.projection(3, 2);
  const ComplexMatrix c = conjugate_regular_witness(p, p, 2.0 * id, 0.5 * id, id, id);
  CHECK(op_norm(c - 0.5 * p) <= 1e-15);
  CHECK(witness_residual(p, 2.0 * id, id, c) <= 1e-14);

  for (int trial = 0; trial < 20; ++trial) {
    RealVector s(2);
    s << 1.0, 0.3;
    const ComplexMatrix x = rng.with_singular_values(4, 4, s);
    const ComplexMatrix u = conditioned(rng, 4, 1e3);
    const ComplexMatrix v = conditioned(rng, 4, 50.0);
    const ComplexMatrix cc = conjugate_regular_witness(x, moore_penrose(x), u, u.inverse(), v, v.inverse());
    CHECK(witness_residual(x, u, v, cc) <= propagation_tolerance(u, v));
  }
}

TEST_CASE("conjugation rejects a bad inverse and a bad witness") {
  Rng rng(18);
  const ComplexMatrix a = rng.gaussian(3, 3);
  const ComplexMatrix u = rng.gaussian(3, 3);
  const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(conjugate_regular_witness(a, moore_penrose(a), u, id, id, id), Error);
  CHECK_THROWS_AS(conjugate_regular_witness(a, ComplexMatrix::Zero(3, 3), id, id, id, id), Error);
}

TEST_CASE("condition_number against the singular value oracle") {
  Rng rng(19);
  const ComplexMatrix u = conditioned(rng, 5, 200.0);
  const std::vector<double> s = oracle::singular_values(u);
  CHECK(condition_number(u) == doctest::Approx(s.front() / s.back()).epsilon(1e-8));
}

TEST_CASE("block factorization: trivial cases") {
  Rng rng(20);
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  const ComplexMatrix x = conditioned(rng, 4, 10.0);
  const BlockFactorization full = block_factorize(x, id, id, x.inverse());
  CHECK(op_norm(full.left - id) <= 1e-12);
  CHECK(op_norm(full.diagonal - x) <= 1e-12);

  ComplexMatrix bd = ComplexMatrix::Zero(4, 4);
  bd.topLeftCorner(2, 2) = conditioned(rng, 2, 5.0);
  bd.bottomRightCorner(2, 2) = rng.gaussian(2, 2);
  const ComplexMatrix p = diag({1, 1, 0, 0});
  const ComplexMatrix aDag = moore_penrose(p * bd * p);
  const BlockFactorization f = block_factorize(bd, p, p, aDag);
  CHECK(op_norm(f.left - id) <= 1e-12);
  CHECK(op_norm(f.diagonal - bd) <= 1e-12);
}

TEST_CASE("block factorization: random lower-triangular instances") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix u = rng.unitary(6);
    const ComplexMatrix w = rng.unitary(6);
    const ComplexMatrix p = u * diag({1, 1, 1, 0, 0, 0}) * u.adjoint();
    const ComplexMatrix q = w * diag({1, 1, 1, 0, 0, 0}) * w.adjoint();
    const ComplexMatrix id = ComplexMatrix::Identity(6, 6);
    ComplexMatrix x = q * conditioned(rng, 6, 20.0) * p + (id - q) * rng.gaussian(6, 6);
    CHECK(op_norm(q * x * (id - p)) <= 1e-12);
    const ComplexMatrix aDag = moore_penrose(q * x * p);
    const BlockFactorization f = block_factorize(x, p, q, aDag);
    CHECK(op_norm(f.left * f.diagonal - x) <= 1e-8);
    CHECK(op_norm(f.left * f.leftInverse - id) <= 1e-8);
  }
}

TEST_CASE("block factorization preconditions") {
  const ComplexMatrix p = diag({1, 0});
  ComplexMatrix x = ComplexMatrix::Identity(2, 2);
  x(0, 1) = 1.0;  // q x (1 - p) != 0
  CHECK_THROWS_AS(block_factorize(x, p, p, p), Error);
}

TEST_CASE("block regularity flags agree") {
  Rng rng(22);
  const ComplexMatrix p = diag({1, 1, 0, 0});
  ComplexMatrix x = ComplexMatrix::Zero(4, 4);
  x.topLeftCorner(2, 2) = conditioned(rng, 2, 4.0);
  x.bottomLeftCorner(2, 2) = rng.gaussian(2, 2);
  // d = 0.
  BlockRegularity r = block_regular_iff(x, p, p, moore_penrose(p * x * p), 1e-18);
  CHECK(r.xRegular);
  CHECK(r.dRegular);
  CHECK(r.ranks_consistent());
  // d a projection.
  x.bottomRightCorner(2, 2) = diag({1, 0});
  r = block_regular_iff(x, p, p, moore_penrose(p * x * p), 1e-18);
  CHECK(r.flags_agree());
  CHECK(r.xRank == 3);
}
