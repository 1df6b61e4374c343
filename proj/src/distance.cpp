#include <algorithm>
#include <cmath>
#include <numbers>

#include "cstarreg/error.hpp"
#include "cstarreg/gridalg.hpp"

namespace cstarreg::gridalg {

namespace {

constexpr int kMaxEpsilonSteps = 80;

double wrapped_step(Complex from, Complex to) {
  return std::abs(std::remainder(std::arg(to) - std::arg(from), 2.0 * std::numbers::pi));
}

}  // namespace

DistBracket dist_to_regular(const GridElement& ge, double tolBisect) {
  if (!(tolBisect > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolBisect must be positive");
  if (ge.domain().kind() == DomainKind::Disk && !ge.is_scalar()) {
    throw Error(ErrorCode::InvalidArgument, "disk elements must be scalar");
  }
  const double sup = sup_norm(ge);
  const double eta = opcore::cut_separation(sup);

  DistBracket out;
  double lo = 0.0;
  double hi = sup + 2.0 * eta;
  while (hi - lo > tolBisect) {
    const double mid = 0.5 * (lo + hi);
    if (cutdown_extension(ge, mid).exists) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.lower = lo;
  out.upper = hi;

  // Certify the upper end with the explicit approximant w (eps + (|a| - d)_+).
  double probe = hi;
  for (int k = 0; k < 400; ++k) {
    try {
      require_separated(ge, probe);
      break;
    } catch (const Error&) {
      probe += 2.0 * eta;
    }
  }
  out.probeDelta = probe;
  const ExtensionReport ext = polar_extension(ge, probe, true);
  if (!ext.witness) return out;

  double eps = tolBisect;
  for (int step = 0; step < kMaxEpsilonSteps; ++step, eps *= 1.5) {
    const GridElement x = approximant_from_witness(ge, *ext.witness, probe, eps);
    const GapReport gap = uniform_gap_regular(x, 0.5 * eps);
    if (!gap.isRegular) continue;
    out.certified = true;
    out.certifiedEpsilon = eps;
    out.upper = sup_distance(ge, x);
    break;
  }
  return out;
}

double no_polar_decomposition_witness(const GridElement& ge) {
  if (ge.domain().kind() != DomainKind::Interval || !ge.is_scalar()) {
    throw Error(ErrorCode::InvalidArgument, "variation witness needs a scalar interval element");
  }
  const std::size_t count = ge.size();
  const double zero = 1e-12 * std::max(1.0, sup_norm(ge));
  constexpr double limit = std::numbers::pi / 2.0;

  double total = 0.0;
  std::size_t k = 0;
  while (k < count) {
    if (std::abs(ge.scalar(k)) <= zero) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k < count && std::abs(ge.scalar(k)) > zero) ++k;
    const std::size_t last = k - 1;

    // From the right end inward.
    double right = 0.0;
    std::size_t stop = first;
    bool resolved = true;
    for (std::size_t i = last; i > first; --i) {
      const double step = wrapped_step(ge.scalar(i - 1), ge.scalar(i));
      if (step > limit) {
        stop = i;
        resolved = false;
        break;
      }
      right += step;
    }
    total += right;
    if (resolved) continue;

    // From the left end inward, up to where the right scan stopped.
    for (std::size_t i = first; i + 1 < stop; ++i) {
      const double step = wrapped_step(ge.scalar(i), ge.scalar(i + 1));
      if (step > limit) break;
      total += step;
    }
  }
  return total;
}

}  // namespace cstarreg::gridalg
