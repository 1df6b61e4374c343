#pragma once

#include <cstdint>
#include <random>

#include "cstarreg/opcore.hpp"

namespace cstarreg {

/// Seeded generator with platform-independent output. The standard
/// distributions are implementation-defined, so normals are drawn here by
/// Box-Muller from the raw 64-bit engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                         // [0, 1)
  double uniform(double lo, double hi);     // [lo, hi)
  int uniform_int(int lo, int hi);          // inclusive
  double normal();
  Complex complex_normal();

  ComplexMatrix gaussian(Eigen::Index rows, Eigen::Index cols);
  /// Haar-distributed unitary (QR of a Gaussian with phase-corrected R).
  ComplexMatrix unitary(Eigen::Index n);
  /// U diag(values) V* with Haar U, V; values are padded with zeros.
  ComplexMatrix with_singular_values(Eigen::Index rows, Eigen::Index cols,
                                     const RealVector& values);
  /// Orthogonal projection onto a random subspace of the given rank.
  ComplexMatrix projection(Eigen::Index n, Eigen::Index rank);
  /// Matrix with operator norm exactly 1.
  ComplexMatrix unit_norm(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace cstarreg
