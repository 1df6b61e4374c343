#include "cstarreg/random.hpp"

#include <cmath>
#include <numbers>

namespace cstarreg {

double Rng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

double Rng::normal() {
  if (hasSpare_) {
    hasSpare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  hasSpare_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
}

ComplexMatrix Rng::gaussian(Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
  }
  return m;
}

ComplexMatrix Rng::unitary(Eigen::Index n) {
  const ComplexMatrix g = gaussian(n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double m = std::abs(d);
    if (m > 0.0) q.col(k) *= d / m;
  }
  return q;
}

ComplexMatrix Rng::with_singular_values(Eigen::Index rows, Eigen::Index cols,
                                        const RealVector& values) {
  const ComplexMatrix u = unitary(rows);
  const ComplexMatrix v = unitary(cols);
  ComplexMatrix s = ComplexMatrix::Zero(rows, cols);
  const Eigen::Index k = std::min<Eigen::Index>({rows, cols, values.size()});
  for (Eigen::Index i = 0; i < k; ++i) s(i, i) = values(i);
  return u * s * v.adjoint();
}

ComplexMatrix Rng::projection(Eigen::Index n, Eigen::Index rank) {
  const ComplexMatrix u = unitary(n);
  const auto cols = u.leftCols(rank);
  return cols * cols.adjoint();
}

ComplexMatrix Rng::unit_norm(Eigen::Index rows, Eigen::Index cols) {
  const ComplexMatrix g = gaussian(rows, cols);
  return g / opcore::op_norm(g);
}

}  // namespace cstarreg
