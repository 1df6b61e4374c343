#include "cstarreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cstarreg/error.hpp"

namespace cstarreg::harness {

using gridalg::DistBracket;
using gridalg::ExtensionReport;
using gridalg::GridElement;

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// sup_k ||w_k f(|a_k|) - g_k||.
double transport_residual(const GridElement& ge, const GridElement& w, const GridElement& g,
                          const opcore::ScalarFunction& f,
                          const std::vector<opcore::SpectralData>& spectra) {
  double worst = 0.0;
  for (std::size_t k = 0; k < ge.size(); ++k) {
    if (ge.is_scalar()) {
      const Complex lhs = w.scalar(k) * f(std::abs(ge.scalar(k)));
      worst = std::max(worst, std::abs(lhs - g.scalar(k)));
    } else {
      const ComplexMatrix lhs = w.at(k) * opcore::apply_function(spectra[k], f);
      worst = std::max(worst, opcore::op_norm(lhs - g.at(k)));
    }
  }
  return worst;
}

}  // namespace

std::string to_string(Cond1 c) {
  switch (c) {
    case Cond1::Holds: return "holds";
    case Cond1::Fails: return "fails";
    case Cond1::Undecided: return "undecided";
  }
  return "undecided";
}

opcore::ScalarFunction ramp_function(double delta, const Ramp& ramp) {
  return opcore::ScalarFunction::piecewise_linear(
      {{delta, 0.0}, {delta + ramp.height / ramp.slope, ramp.height}});
}

const std::vector<Ramp>& default_ramps() {
  static const std::vector<Ramp> ramps = [] {
    std::vector<Ramp> out;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        out.push_back({std::pow(10.0, -1.0 + i), std::pow(10.0, -1.0 + 0.5 * j)});
      }
    }
    return out;
  }();
  return ramps;
}

EquivalenceReport check_equivalences(const GridElement& ge, const std::string& name, double gamma,
                                     const std::vector<double>& deltas, double tolBisect) {
  return check_equivalences(ge, name, gamma, deltas, gridalg::dist_to_regular(ge, tolBisect));
}

EquivalenceReport check_equivalences(const GridElement& ge, const std::string& name, double gamma,
                                     const std::vector<double>& deltas,
                                     const DistBracket& bracket) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be non-negative");
  const double sup = gridalg::sup_norm(ge);
  const double eta = opcore::cut_separation(sup);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > gamma + eta)) {
      throw Error(ErrorCode::InvalidArgument, "every delta must exceed gamma + eta");
    }
    if (i > 0 && !(deltas[i] > deltas[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "deltas must be strictly increasing");
    }
  }

  EquivalenceReport rep;
  rep.element = name;
  rep.gamma = gamma;
  rep.deltas = deltas;
  rep.cond1 = bracket;
  rep.gridSpacing = ge.domain().spacing();
  const double band = kBandWidth * rep.gridSpacing;
  if (bracket.upper <= gamma) {
    rep.cond1AtGamma = Cond1::Holds;
  } else if (bracket.lower > gamma) {
    rep.cond1AtGamma = Cond1::Fails;
  }

  std::vector<opcore::SpectralData> spectra;
  if (!ge.is_scalar()) {
    spectra.reserve(ge.size());
    for (const auto& m : ge.values()) spectra.push_back(opcore::hermitian_eig(opcore::abs_of(m)));
  }
  const double tau0 = 1e-6 * (1.0 + sup);

  for (double requested : deltas) {
    DeltaEvaluation ev;
    ev.delta = requested;
    ev.effectiveDelta = gridalg::separate_from_spectrum(ge, requested);
    const double delta = ev.effectiveDelta;
    ev.undecided = delta >= bracket.lower - band && delta <= bracket.upper + band;

    const ExtensionReport ext2 = gridalg::polar_extension(ge, delta, true);
    ev.cond2 = ext2.exists;
    ev.witnessModulus = ext2.witnessModulus;
    ev.modulusBound = ext2.modulusBound;

    ev.cond3 = true;
    for (const Ramp& r : default_ramps()) {
      const opcore::ScalarFunction f = ramp_function(delta, r);
      const GridElement g = gridalg::lift_polar_function(ge, f);
      const double tau = gridalg::separate_from_spectrum(g, tau0);
      const ExtensionReport ext3 = gridalg::polar_extension(g, tau, false);
      ++ev.rampsTested;
      if (ext3.exists) ++ev.rampsExtended;
      else ev.cond3 = false;
      if (ext2.exists && ext2.witness) {
        ev.transportResidual =
            std::max(ev.transportResidual, transport_residual(ge, *ext2.witness, g, f, spectra));
      }
    }

    const ExtensionReport ext4 = gridalg::cutdown_extension(ge, delta, false);
    ev.cond4 = ext4.exists;
    ev.windings = ext4.windings;
    ev.obstruction = ext4.obstruction;

    const std::string at = " at delta = " + fmt(delta);
    if (ev.cond2 && !ev.cond3) rep.violations.push_back("(2) holds but (3) fails" + at);
    if (ev.cond3 && !ev.cond4) rep.violations.push_back("(3) holds but (4) fails" + at);
    if (ev.cond2 && ev.transportResidual > kTransportTol) {
      rep.violations.push_back("w f(|a|) != v f(|a|)" + at + ", residual " +
                               fmt(ev.transportResidual));
    }
    if (!ev.undecided) {
      if (delta > bracket.upper + band && !ev.cond4) {
        rep.violations.push_back("(4) fails above the distance bracket" + at);
      }
      if (delta < bracket.lower - band && ev.cond4) {
        rep.violations.push_back("(4) holds below the distance bracket" + at);
      }
    }
    rep.evaluations.push_back(std::move(ev));
  }

  // Condition (4) is monotone in delta.
  for (std::size_t i = 0; i + 1 < rep.evaluations.size(); ++i) {
    if (rep.evaluations[i].cond4 && !rep.evaluations[i + 1].cond4) {
      rep.violations.push_back("(4) holds at delta = " + fmt(rep.evaluations[i].effectiveDelta) +
                               " but fails at the larger delta = " +
                               fmt(rep.evaluations[i + 1].effectiveDelta));
    }
  }
  return rep;
}

std::vector<double> default_gamma_probes(const DistBracket& bracket) {
  const double u = bracket.upper;
  return {0.0, 0.5 * u, 0.99 * u, 1.01 * u};
}

std::vector<double> default_delta_grid(const GridElement& ge, double gamma) {
  const double sup = gridalg::sup_norm(ge);
  const double eta = opcore::cut_separation(sup);
  const double top = std::max(1.1 * sup, gamma + 0.1);
  std::vector<double> out;
  for (double f : {0.05, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    out.push_back(gamma + 3.0 * eta + f * (top - gamma));
  }
  return out;
}

void require_consistent(const EquivalenceReport& report) {
  if (!report.consistent()) {
    throw Error(ErrorCode::InconsistentVerdict, report.element + ": " + report.violations.front());
  }
}

Approximant regular_approximant(const GridElement& ge, double delta, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be non-negative");
  const double d = gridalg::separate_from_spectrum(ge, std::max(delta, 1e-12));
  const ExtensionReport ext = gridalg::polar_extension(ge, d, true);
  if (!ext.exists || !ext.witness) {
    throw Error(ErrorCode::NoWitness, "no extension at delta = " + fmt(d) +
                                          (ext.obstruction.empty() ? "" : ": " + ext.obstruction));
  }
  GridElement x = gridalg::approximant_from_witness(ge, *ext.witness, d, eps);
  const double distance = gridalg::sup_distance(ge, x);
  const gridalg::GapReport gap = gridalg::uniform_gap_regular(x, 0.5 * eps);
  return Approximant{std::move(x), distance, gap};
}

}  // namespace cstarreg::harness
