#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cstarreg/error.hpp"
#include "cstarreg/gallery.hpp"
#include "cstarreg/gridalg.hpp"
#include "oracles.hpp"

using namespace cstarreg;
using namespace cstarreg::gridalg;

namespace {

GridElement interval_fn(int n, const std::function<Complex(double)>& f) {
  const GridDomain d = GridDomain::interval(n);
  return make_scalar(d, [&](std::size_t k) { return f(d.t(k)); });
}

GridElement disk_fn(int nr, int nt, const std::function<Complex(Complex)>& f) {
  const GridDomain d = GridDomain::disk(nr, nt);
  return make_scalar(d, [&](std::size_t k) { return f(d.point(k)); });
}

}  // namespace

TEST_CASE("domain geometry") {
  const GridDomain iv = GridDomain::interval(17);
  CHECK(iv.size() == 17);
  CHECK(iv.t(16) == 1.0);
  CHECK(iv.spacing() == doctest::Approx(1.0 / 16));
  CHECK(iv.edges().size() == 16);
  CHECK_THROWS_AS(GridDomain::interval(8), Error);

  const GridDomain dk = GridDomain::disk(5, 64);
  CHECK(dk.size() == 1 + 4 * 64);
  CHECK(dk.node(1, 0) == 1);
  CHECK(dk.node(4, 63) == dk.size() - 1);
  CHECK(std::abs(dk.point(dk.node(4, 16)) - Complex(0, 1)) < 1e-14);
  CHECK(dk.cells().size() == 4 * 64);
  CHECK_THROWS_AS(GridDomain::disk(5, 32), Error);
  // Euler characteristic of a triangulated-and-quadded disk: V - E + F = 1.
  const long v = static_cast<long>(dk.size());
  const long e = static_cast<long>(dk.edges().size());
  const long f = static_cast<long>(dk.cells().size());
  CHECK(v - e + f == 1);
}

TEST_CASE("element validation") {
  const GridDomain d = GridDomain::interval(16);
  std::vector<ComplexMatrix> vals(16, ComplexMatrix::Identity(2, 2));
  vals[3] = ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(GridElement(d, vals), Error);
  vals[3] = ComplexMatrix::Identity(2, 2);
  vals[4](0, 0) = NAN;
  CHECK_THROWS_AS(GridElement(d, vals), Error);
  CHECK_THROWS_AS(GridElement(d, std::vector<ComplexMatrix>(15, ComplexMatrix::Identity(2, 2))), Error);
}

TEST_CASE("sup norms") {
  CHECK(sup_norm(gallery::const_unitary(64)) == doctest::Approx(1.0));
  CHECK(sup_norm(gallery::linear(64)) == doctest::Approx(1.0));
  for (int n : {64, 256, 1024}) CHECK(std::abs(sup_norm(gallery::osc(n)) - 1.0) <= 1.0 / n);
  CHECK(sup_norm(gallery::rankdrop(32)) == doctest::Approx(1.0));
}

TEST_CASE("lifts of the oscillating example") {
  const int n = 512;
  const GridElement osc = gallery::osc(n);
  const GridElement ab = lift_abs(osc);
  for (std::size_t k = 0; k < osc.size(); ++k) {
    CHECK(std::abs(ab.scalar(k) - osc.domain().t(k)) <= 1e-12);
  }
  const GridElement cd = lift_cutdown(osc, 0.1);
  double worst = 0.0;
  for (std::size_t k = 1; k < osc.size(); ++k) {
    const double t = osc.domain().t(k);
    const Complex expect = std::polar(std::max(t - 0.1, 0.0), 1.0 / t);
    worst = std::max(worst, std::abs(cd.scalar(k) - expect));
  }
  CHECK(worst <= 1e-12);
  const GridElement same = lift(osc, [](const ComplexMatrix& m) { return m; });
  CHECK(sup_distance(same, osc) == 0.0);
}

TEST_CASE("uniform gap regularity") {
  const GridElement u = gallery::const_unitary(32);
  const GapReport r = uniform_gap_regular(u, 1e-9);
  CHECK(r.isRegular);
  CHECK(r.gap == doctest::Approx(1.0));
  CHECK_FALSE(uniform_gap_regular(gallery::rankdrop(128), 1e-9).isRegular);
  CHECK_FALSE(uniform_gap_regular(gallery::osc(128), 1e-9).isRegular);
  // Invertible 2x2 constant.
  const GridDomain d = GridDomain::interval(16);
  ComplexMatrix m(2, 2);
  m << 2.0, 0.0, 0.0, 0.5;
  const GapReport c = uniform_gap_regular(GridElement(d, std::vector<ComplexMatrix>(16, m)), 1e-9);
  CHECK(c.isRegular);
  CHECK(c.gap == doctest::Approx(0.5));
}

TEST_CASE("1-D extensions") {
  const ExtensionReport lin = polar_extension(gallery::linear(128), 0.5);
  CHECK(lin.exists);
  REQUIRE(lin.witness);
  for (std::size_t k = 0; k < lin.witness->size(); ++k) CHECK(std::abs(lin.witness->scalar(k) - 1.0) <= 1e-12);

  const GridElement osc = gallery::osc(1024);
  const double d = separate_from_spectrum(osc, 0.1);
  const ExtensionReport ext = polar_extension(osc, d);
  CHECK(ext.exists);
  REQUIRE(ext.witness);
  // Unimodular, equal to the phase of osc above delta, constant below.
  for (std::size_t k = 0; k < osc.size(); ++k) {
    const double t = osc.domain().t(k);
    CHECK(std::abs(std::abs(ext.witness->scalar(k)) - 1.0) <= 1e-9);
    if (t > d) CHECK(std::abs(ext.witness->scalar(k) - std::polar(1.0, 1.0 / t)) <= 1e-9);
  }
  CHECK(ext.witnessModulus <= ext.modulusBound + 1e-9);

  const ExtensionReport rd = polar_extension(gallery::rankdrop(128), 0.5 + 1e-4);
  CHECK(rd.exists);
  REQUIRE(rd.witness);
  CHECK(opcore::op_norm(rd.witness->at(0) - ComplexMatrix::Identity(2, 2)) <= 1e-9);
}

TEST_CASE("2-D extensions and the winding oracle") {
  const GridElement z = gallery::disk_z(32);
  for (double delta : {0.2, 0.5, 0.8}) {
    const double d = separate_from_spectrum(z, delta);
    const ExtensionReport r = polar_extension(z, d);
    CHECK_FALSE(r.exists);
    REQUIRE(r.windings.size() == 1);
    CHECK(r.windings[0] == 1);
    // The ring just above delta winds once.
    const int ring = static_cast<int>(std::ceil(d * (z.domain().radial() - 1)));
    CHECK(oracle::ring_winding(z, ring) == 1);
  }
  const GridElement one = disk_fn(16, 64, [](Complex) { return Complex(1.0); });
  const ExtensionReport r1 = polar_extension(one, 0.5);
  CHECK(r1.exists);
  const GridElement absz = disk_fn(16, 64, [](Complex p) { return Complex(std::abs(p)); });
  const ExtensionReport ra = polar_extension(absz, separate_from_spectrum(absz, 0.5));
  CHECK(ra.exists);
  REQUIRE(ra.witness);
  for (std::size_t k = 0; k < absz.size(); ++k) CHECK(std::abs(ra.witness->scalar(k) - 1.0) <= 1e-9);
}

TEST_CASE("2-D: conjugate and squared phases wind -1 and 2") {
  const GridElement zc = disk_fn(24, 64, [](Complex p) { return std::conj(p); });
  const ExtensionReport r = cutdown_extension(zc, 0.3);
  CHECK_FALSE(r.exists);
  REQUIRE(r.windings.size() == 1);
  CHECK(r.windings[0] == -1);
  const GridElement z2 = disk_fn(24, 128, [](Complex p) { return p * p; });
  const ExtensionReport r2 = cutdown_extension(z2, 0.3);
  REQUIRE(r2.windings.size() == 1);
  CHECK(r2.windings[0] == 2);
  CHECK(oracle::ring_winding(z2, 20) == 2);
}

TEST_CASE("phase aliasing is refused") {
  // Phase 40 theta cannot be sampled by 64 angular nodes without aliasing.
  const GridElement fast = disk_fn(8, 64, [](Complex p) { return std::polar(std::abs(p), 40.0 * std::arg(p)); });
  try {
    polar_extension(fast, 0.3);
    FAIL("expected PhaseUnwrapAliasing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PhaseUnwrapAliasing);
  }
}

TEST_CASE("spectral collision is reported") {
  try {
    polar_extension(gallery::linear(17), 0.5);
    FAIL("expected SpectralCollision");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpectralCollision);
  }
  const double d = separate_from_spectrum(gallery::linear(17), 0.5);
  CHECK(d != 0.5);
  CHECK_NOTHROW(require_separated(gallery::linear(17), d));
}

TEST_CASE("distance brackets") {
  const DistBracket u = dist_to_regular(gallery::const_unitary(64), 1e-4);
  CHECK(u.lower <= 0.0);
  CHECK(u.upper <= 1e-4);
  const DistBracket z = dist_to_regular(gallery::disk_z(128), 1e-3);
  CHECK(z.lower >= 0.95);
  CHECK(z.upper <= 1.05);
  CHECK(z.lower <= z.upper);
  double prev = 1.0;
  for (int n : {256, 1024}) {
    const DistBracket o = dist_to_regular(gallery::osc(n), 1e-4);
    CHECK(o.upper <= 5.0 / n);
    CHECK(o.upper < prev);
    CHECK(o.certified);
    prev = o.upper;
  }
}

TEST_CASE("regular approximant from a witness has the promised gap") {
  const GridElement osc = gallery::osc(512);
  const double d = separate_from_spectrum(osc, 0.1);
  const ExtensionReport ext = polar_extension(osc, d);
  REQUIRE(ext.witness);
  const GridElement x = approximant_from_witness(osc, *ext.witness, d, 0.01);
  const GapReport g = uniform_gap_regular(x, 0.005);
  CHECK(g.isRegular);
  CHECK(g.gap >= 0.009);
  CHECK(sup_distance(osc, x) <= 0.11 + 1.0 / 512);
}

TEST_CASE("variation witness") {
  CHECK(no_polar_decomposition_witness(gallery::linear(256)) == 0.0);
  const GridElement twist = interval_fn(1024, [](double t) { return std::polar(t, t); });
  CHECK(no_polar_decomposition_witness(twist) <= 1.0 + 1e-9);
  // For t e^{i/t} the resolved phase runs over [t*, 1] with |d(1/t)| / step
  // reaching pi/2 near t* ~ sqrt(2h/pi); the variation is about 1/t*.
  double prev = 0.0;
  for (int n : {256, 1024, 4096}) {
    const double v = no_polar_decomposition_witness(gallery::osc(n));
    const double h = 1.0 / (n - 1);
    const double tStar = std::sqrt(2.0 * h / std::numbers::pi);
    CHECK(v == doctest::Approx(1.0 / tStar - 1.0).epsilon(0.05));
    if (prev > 0.0) CHECK(v >= 2.0 * prev * 0.95);
    prev = v;
  }
}

TEST_CASE("property: 2-D witnesses agree with the phase on the support") {
  Rng rng(71);
  int built = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto pf = gallery::random_phase_field_2d(rng, 24, 64);
    const double d = separate_from_spectrum(pf.element, 0.5 * sup_norm(pf.element));
    const ExtensionReport r = polar_extension(pf.element, d);
    if (!r.exists) {
      CHECK(pf.charge != 0);
      continue;
    }
    ++built;
    REQUIRE(r.witness);
    CHECK(r.agreementResidual <= 1e-7);
    for (std::size_t k = 0; k < pf.element.size(); ++k) {
      CHECK(std::abs(std::abs(r.witness->scalar(k)) - 1.0) <= 1e-12);
      if (std::abs(pf.element.scalar(k)) > d) {
        CHECK(std::abs(r.witness->scalar(k) - pf.element.scalar(k) / std::abs(pf.element.scalar(k))) <= 1e-7);
      }
    }
  }
  CHECK(built > 0);
}
