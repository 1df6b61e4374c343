#include "cstarreg/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cstarreg/error.hpp"

namespace cstarreg::gallery {

using gridalg::GridDomain;
using gridalg::GridElement;
using gridalg::make_scalar;

const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"osc", "disk-z", "rankdrop", "linear",
                                            "const-unitary"};
  return all;
}

GridElement make(const std::string& name, int gridN) {
  if (name == "osc") return osc(gridN);
  if (name == "disk-z") return disk_z(gridN);
  if (name == "rankdrop") return rankdrop(gridN);
  if (name == "linear") return linear(gridN);
  if (name == "const-unitary") return const_unitary(gridN);
  throw Error(ErrorCode::UnknownGalleryName, "no gallery element named '" + name + "'");
}

GridElement osc(int n) {
  const GridDomain dom = GridDomain::interval(n);
  return make_scalar(dom, [&](std::size_t k) {
    const double t = dom.t(k);
    return t > 0.0 ? std::polar(t, 1.0 / t) : Complex(0.0);
  });
}

GridElement disk_z(int n) {
  const GridDomain dom = GridDomain::disk(n, std::max(2 * n, gridalg::kMinAngularPoints));
  return make_scalar(dom, [&](std::size_t k) { return dom.point(k); });
}

GridElement rankdrop(int n) {
  const GridDomain dom = GridDomain::interval(n);
  std::vector<ComplexMatrix> values(dom.size(), ComplexMatrix::Zero(2, 2));
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k](0, 0) = dom.t(k);
    values[k](1, 1) = 1.0;
  }
  return GridElement(dom, std::move(values));
}

GridElement linear(int n) {
  const GridDomain dom = GridDomain::interval(n);
  return make_scalar(dom, [&](std::size_t k) { return Complex(dom.t(k)); });
}

GridElement const_unitary(int n) {
  return make_scalar(GridDomain::interval(n), [](std::size_t) { return Complex(1.0); });
}

GridElement random_scalar_1d(Rng& rng, int n) {
  constexpr double twoPi = 2.0 * std::numbers::pi;
  const double c0 = rng.uniform(-0.3, 0.6);
  double ac[3], as[3], pa[3], pp[3];
  for (int k = 0; k < 3; ++k) {
    ac[k] = rng.uniform(-0.4, 0.4);
    as[k] = rng.uniform(-0.4, 0.4);
    pa[k] = rng.uniform(-2.0, 2.0);
    pp[k] = rng.uniform(0.0, twoPi);
  }
  const GridDomain dom = GridDomain::interval(n);
  return make_scalar(dom, [&](std::size_t idx) {
    const double t = dom.t(idx);
    double p = c0;
    double phi = 0.0;
    for (int k = 0; k < 3; ++k) {
      p += ac[k] * std::cos(twoPi * (k + 1) * t) + as[k] * std::sin(twoPi * (k + 1) * t);
      phi += pa[k] * std::sin(std::numbers::pi * (k + 1) * t + pp[k]);
    }
    return p * std::polar(1.0, phi);
  });
}

PhaseField random_phase_field_2d(Rng& rng, int nr, int ntheta) {
  const int m = rng.uniform_int(-2, 2);
  double alpha[2], beta[2], c[2], d[2];
  for (int k = 0; k < 2; ++k) {
    alpha[k] = rng.uniform(-0.5, 0.5);
    beta[k] = rng.uniform(-0.5, 0.5);
    c[k] = rng.uniform(-1.0, 1.0);
    d[k] = rng.uniform(-1.0, 1.0);
  }
  const GridDomain dom = GridDomain::disk(nr, ntheta);
  GridElement element = make_scalar(dom, [&](std::size_t idx) {
    const double r = dom.radius(idx);
    const double th = dom.angle(idx);
    const Complex z = dom.point(idx);
    double factor = 1.0;
    double phase = m * th;
    Complex zk = 1.0;
    for (int k = 0; k < 2; ++k) {
      zk *= z;
      factor += 0.4 * std::pow(r, k + 1) *
                (alpha[k] * std::cos((k + 1) * th) + beta[k] * std::sin((k + 1) * th));
      phase += c[k] * zk.real() + d[k] * zk.imag();
    }
    const double amplitude = m == 0 ? (0.2 + r) * factor / 1.2 : std::pow(r, std::abs(m)) * factor;
    return std::polar(amplitude, phase);
  });
  return PhaseField{std::move(element), m};
}

ConstructionInstance random_construction_instance(Rng& rng, int n, double delta, double ratio) {
  if (n < 1 || !(delta > 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "need n >= 1, delta > 0, 0 < ratio < 1");
  }
  ConstructionInstance inst;
  const int rank = n == 1 ? 1 : rng.uniform_int(1, n - 1);
  RealVector sv = RealVector::Zero(n);
  for (int i = 0; i < rank; ++i) sv(i) = rng.uniform(0.1, 2.0);
  inst.x = rng.with_singular_values(n, n, sv);
  const ComplexMatrix y = rng.unit_norm(n, n);
  inst.beta = ratio * delta;
  inst.a = inst.x - inst.beta * y;

  const double normA = opcore::op_norm(inst.a);
  const double eta = opcore::cut_separation(normA);
  const RealVector s = opcore::svd(inst.a).values;
  auto clear = [&](double d) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (std::abs(s(i) - d) <= eta) return false;
    }
    // |a*| has the same nonzero spectrum plus zeros.
    return std::abs(d) > eta;
  };
  double d = delta;
  for (int k = 1; !clear(d); ++k) d = delta + 2.0 * eta * k;
  inst.delta = d;
  return inst;
}

}  // namespace cstarreg::gallery
