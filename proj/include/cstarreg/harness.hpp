#pragma once

// Evaluates the four equivalent descriptions of dist(a, A_reg) <= gamma on a
// grid element over a sweep of thresholds delta > gamma:
//   (1) the distance bracket is at most gamma,
//   (2) some partial isometry w agrees with v on e_delta,
//   (3) v f(|a|) has a polar decomposition for ramps f vanishing on [0, delta],
//   (4) the delta cut-down has a polar decomposition,
// and checks that the answers fit together.

#include <string>
#include <vector>

#include "cstarreg/gridalg.hpp"

namespace cstarreg::harness {

struct Ramp {
  double slope = 1.0;
  double height = 1.0;
};

/// min(slope (t - delta)_+, height) as a piecewise-linear function.
opcore::ScalarFunction ramp_function(double delta, const Ramp& ramp);

/// 25 ramps: slopes 10^-1 .. 10^3, heights 10^-1 .. 10^1 (log spaced).
const std::vector<Ramp>& default_ramps();

struct DeltaEvaluation {
  double delta = 0.0;           // as requested
  double effectiveDelta = 0.0;  // moved off the spectrum if needed
  bool cond2 = false;
  bool cond3 = false;
  bool cond4 = false;
  bool undecided = false;       // inside the 3h band around the bracket
  int rampsTested = 0;
  int rampsExtended = 0;
  double transportResidual = 0.0;  // max over ramps of ||w f(|a|) - v f(|a|)||
  double witnessModulus = 0.0;
  double modulusBound = 0.0;
  std::vector<int> windings;       // obstruction of the cut-down, 2-D
  std::string obstruction;
};

enum class Cond1 { Holds, Fails, Undecided };
std::string to_string(Cond1 c);

struct EquivalenceReport {
  std::string element;
  double gamma = 0.0;
  std::vector<double> deltas;
  gridalg::DistBracket cond1;
  Cond1 cond1AtGamma = Cond1::Undecided;
  double gridSpacing = 0.0;
  std::vector<DeltaEvaluation> evaluations;
  std::vector<std::string> violations;

  bool consistent() const { return violations.empty(); }
  std::string verdict() const { return consistent() ? "consistent" : "inconsistent"; }
};

inline constexpr double kTransportTol = 1e-7;
inline constexpr double kBandWidth = 3.0;  // verdict band, in grid spacings

/// Requires deltas strictly increasing and above gamma + eta.
EquivalenceReport check_equivalences(const gridalg::GridElement& ge, const std::string& name,
                                     double gamma, const std::vector<double>& deltas,
                                     double tolBisect = 1e-4);

/// Same, reusing a bracket that was already computed for this element.
EquivalenceReport check_equivalences(const gridalg::GridElement& ge, const std::string& name,
                                     double gamma, const std::vector<double>& deltas,
                                     const gridalg::DistBracket& bracket);

/// {0, u/2, 0.99 u, 1.01 u} for the upper bound u.
std::vector<double> default_gamma_probes(const gridalg::DistBracket& bracket);

/// Six thresholds spread over (gamma, 1.1 sup_norm].
std::vector<double> default_delta_grid(const gridalg::GridElement& ge, double gamma);

/// Throws InconsistentVerdict naming the first violation.
void require_consistent(const EquivalenceReport& report);

struct Approximant {
  gridalg::GridElement x;
  double distance = 0.0;  // sup ||a - x||
  gridalg::GapReport gap;
};

/// x = w (eps 1 + (|a| - delta)_+) from the extension witness at delta.
/// Throws NoWitness when the extension does not exist.
Approximant regular_approximant(const gridalg::GridElement& ge, double delta, double eps);

}  // namespace cstarreg::harness
