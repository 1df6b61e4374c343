#pragma once

// Named example elements and seeded random instance generators.

#include <string>
#include <vector>

#include "cstarreg/gridalg.hpp"
#include "cstarreg/random.hpp"

namespace cstarreg::gallery {

/// "osc", "disk-z", "rankdrop", "linear", "const-unitary".
const std::vector<std::string>& names();

/// Throws UnknownGalleryName.
gridalg::GridElement make(const std::string& name, int gridN);

gridalg::GridElement osc(int n);            // t e^{i/t}, 0 at t = 0
gridalg::GridElement disk_z(int n);         // z on an n x max(2n, 64) polar grid
gridalg::GridElement rankdrop(int n);       // diag(t, 1)
gridalg::GridElement linear(int n);         // t
gridalg::GridElement const_unitary(int n);  // 1

/// p(t) e^{i phi(t)} with p a real trigonometric polynomial and phi a smooth
/// phase of amplitude at most 6.
gridalg::GridElement random_scalar_1d(Rng& rng, int n);

struct PhaseField {
  gridalg::GridElement element;
  int charge = 0;  // m in A(r, theta) e^{i (m theta + P)}
};

/// A e^{i (m theta + P(x, y))} with m in [-2, 2], A = r^|m| times a positive
/// trigonometric factor, and P a small polynomial in Re z^k, Im z^k.
PhaseField random_phase_field_2d(Rng& rng, int nr, int ntheta);

struct ConstructionInstance {
  ComplexMatrix a;
  ComplexMatrix x;  // regular, rank deficient
  double delta = 0.0;
  double beta = 0.0;  // ||a - x|| = ratio * delta
};

/// x with singular values in [0.1, 2] plus zeros, a = x - beta y with
/// ||y|| = 1. delta is nudged off the spectra of |a| and |a*| if needed.
ConstructionInstance random_construction_instance(Rng& rng, int n, double delta, double ratio);

}  // namespace cstarreg::gallery
