#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "cstarreg/error.hpp"
#include "cstarreg/gridalg.hpp"

namespace cstarreg::gridalg {

using opcore::op_norm;

namespace {

constexpr double kAgreementTol = 1e-7;
constexpr double kModulusSlack = 1e-9;
constexpr double kEntryThreshold = 0.5;
constexpr double kAliasLimit = std::numbers::pi / 2.0;

double wrap(double x) {
  constexpr double twoPi = 2.0 * std::numbers::pi;
  x = std::remainder(x, twoPi);
  return x;
}

// Per-node data for frame transport: v e and orthonormal bases of the
// complements of the source and target supports.
struct NodeFrame {
  ComplexMatrix ve;  // v e_delta
  ComplexMatrix e;   // e_delta
  ComplexMatrix kerBasis;   // range(1 - e)
  ComplexMatrix cokerBasis; // range(1 - f)
};

NodeFrame node_frame(const ComplexMatrix& a, double delta) {
  const opcore::SingularSystem s = opcore::svd(a);
  const Eigen::Index n = a.cols();
  Eigen::Index r = 0;
  while (r < s.values.size() && s.values(r) > delta) ++r;
  NodeFrame f;
  const auto ur = s.left.leftCols(r);
  const auto vr = s.right.leftCols(r);
  f.ve = ur * vr.adjoint();
  f.e = vr * vr.adjoint();
  if (r == 0) {
    f.ve = ComplexMatrix::Zero(n, n);
    f.e = ComplexMatrix::Zero(n, n);
  }
  f.kerBasis = s.right.rightCols(n - r);
  f.cokerBasis = s.left.rightCols(n - r);
  return f;
}

// Closest unitary from range(1 - e) onto range(1 - f) to the reference.
ComplexMatrix fill(const NodeFrame& f, const ComplexMatrix& reference) {
  const Eigen::Index n = f.e.rows();
  if (f.kerBasis.cols() == 0) return ComplexMatrix::Zero(n, n);
  const ComplexMatrix m = f.cokerBasis.adjoint() * reference * f.kerBasis;
  ComplexMatrix u;
  if (m.rows() == 1) {
    const double r = std::abs(m(0, 0));
    u = ComplexMatrix::Constant(1, 1, r > 0.0 ? m(0, 0) / r : Complex(1.0));
  } else {
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
  }
  return f.cokerBasis * u * f.kerBasis.adjoint();
}

ComplexMatrix complete(const NodeFrame& f, const ComplexMatrix& reference) {
  return f.ve + fill(f, reference);
}

// Principal logarithm of a unitary via its (diagonal) Schur form.
struct UnitaryLog {
  ComplexMatrix basis;
  Eigen::VectorXcd logs;

  explicit UnitaryLog(const ComplexMatrix& u) {
    if (u.rows() == 1) {
      basis = ComplexMatrix::Identity(1, 1);
      logs = Eigen::VectorXcd::Constant(1, Complex(0.0, std::arg(u(0, 0))));
      return;
    }
    Eigen::ComplexSchur<ComplexMatrix> schur(u);
    basis = schur.matrixU();
    logs.resize(u.rows());
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      logs(i) = Complex(0.0, std::arg(schur.matrixT()(i, i)));
    }
  }

  ComplexMatrix exp_scaled(double s) const {
    const Eigen::VectorXcd d = (s * logs).array().exp();
    return basis * d.asDiagonal() * basis.adjoint();
  }
};

ExtensionReport finish_1d(const GridElement& ge, double delta, std::vector<ComplexMatrix> frames,
                          const std::vector<NodeFrame>& data) {
  ExtensionReport rep;
  const Eigen::Index n = ge.rows();
  double agreement = 0.0;
  double unitarity = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    agreement = std::max(agreement, op_norm(frames[k] * data[k].e - data[k].ve));
    unitarity = std::max(unitarity,
                         op_norm(frames[k].adjoint() * frames[k] - ComplexMatrix::Identity(n, n)));
    if (data[k].e.trace().real() > 0.5) ++rep.supportSize;
  }
  rep.agreementResidual = agreement;
  GridElement witness(ge.domain(), std::move(frames));
  rep.witnessModulus = witness.modulus();
  rep.modulusBound = witness_modulus_bound(ge, delta);

  const bool transported = agreement <= kAgreementTol && unitarity <= kAgreementTol;
  const bool bounded = rep.witnessModulus <= rep.modulusBound + kModulusSlack;
  rep.exists = transported && bounded;
  if (!rep.exists) {
    double worst = -1.0;
    const auto& w = witness.values();
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
      const double jump = op_norm(w[k + 1] - w[k]);
      if (jump > worst) {
        worst = jump;
        rep.failureIndex = k;
      }
    }
    rep.obstruction = transported ? "witness modulus " + std::to_string(rep.witnessModulus) +
                                        " exceeds bound " + std::to_string(rep.modulusBound)
                                  : "frame transport residual " + std::to_string(agreement);
  }
  rep.witness = std::move(witness);
  return rep;
}

}  // namespace

double separate_from_spectrum(const GridElement& ge, double delta) {
  const std::vector<RealVector> s = singular_values(ge);
  const double eta = opcore::cut_separation(sup_norm(ge));
  auto clear = [&](double d) {
    for (const auto& values : s) {
      for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::abs(values(i) - d) <= eta) return false;
      }
    }
    return true;
  };
  for (int k = 0; k < 400; ++k) {
    const double step = 2.0 * eta * static_cast<double>((k + 1) / 2);
    const double candidate = (k % 2 == 1) ? delta + step : delta - step;
    if (candidate > 0.0 && clear(candidate)) return candidate;
  }
  throw Error(ErrorCode::SpectralCollision,
              "no threshold near " + std::to_string(delta) + " clears the spectrum");
}

void require_separated(const GridElement& ge, double delta) {
  const double eta = opcore::cut_separation(sup_norm(ge));
  const std::vector<RealVector> s = singular_values(ge);
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (Eigen::Index i = 0; i < s[k].size(); ++i) {
      if (std::abs(s[k](i) - delta) <= eta) {
        throw Error(ErrorCode::SpectralCollision,
                    "singular value " + std::to_string(s[k](i)) + " at node " + std::to_string(k) +
                        " is within " + std::to_string(eta) + " of delta");
      }
    }
  }
}

double witness_modulus_bound(const GridElement& ge, double delta) {
  const std::vector<RealVector> s = singular_values(ge);
  double below = -1.0;
  for (const auto& values : s) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values(i) < delta) below = std::max(below, values(i));
    }
  }
  if (below < 0.0) return std::numeric_limits<double>::infinity();
  const double mod = lift_cutdown(ge, delta).modulus();
  return 10.0 * mod / (delta - below);
}

ExtensionReport polar_extension_1d(const GridElement& ge, double delta) {
  if (ge.domain().kind() != DomainKind::Interval) {
    throw Error(ErrorCode::InvalidArgument, "polar_extension_1d needs an interval domain");
  }
  if (ge.rows() != ge.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "frame transport needs square node matrices");
  }
  require_separated(ge, delta);

  const std::size_t count = ge.size();
  const Eigen::Index n = ge.rows();
  std::vector<NodeFrame> data(count);
  for (std::size_t k = 0; k < count; ++k) data[k] = node_frame(ge.at(k), delta);

  const ComplexMatrix one = ComplexMatrix::Identity(n, n);
  std::vector<ComplexMatrix> w(count);
  w[0] = complete(data[0], one);
  for (std::size_t k = 1; k < count; ++k) {
    const bool entry = op_norm(data[k].e * (one - data[k - 1].e)) > kEntryThreshold;
    if (!entry) {
      w[k] = complete(data[k], w[k - 1]);
      continue;
    }
    // New support directions appear: bridge from the last node whose support
    // already covered them, or restart the frame from here backwards.
    std::optional<std::size_t> anchor;
    for (std::size_t j = k - 1; j-- > 0;) {
      if (op_norm(data[k].e * (one - data[j].e)) <= kEntryThreshold) {
        anchor = j;
        break;
      }
    }
    if (anchor) {
      const std::size_t j = *anchor;
      const ComplexMatrix target = complete(data[k], w[j]);
      const UnitaryLog log(w[j].adjoint() * target);
      for (std::size_t i = j + 1; i <= k; ++i) {
        const double s = static_cast<double>(i - j) / static_cast<double>(k - j);
        w[i] = complete(data[i], w[j] * log.exp_scaled(s));
      }
    } else {
      w[k] = complete(data[k], w[k - 1]);
      for (std::size_t i = k; i-- > 0;) w[i] = complete(data[i], w[i + 1]);
    }
  }
  return finish_1d(ge, delta, std::move(w), data);
}

ExtensionReport polar_extension_2d_scalar(const GridElement& ge, double delta, bool buildWitness) {
  const GridDomain& dom = ge.domain();
  if (dom.kind() != DomainKind::Disk) {
    throw Error(ErrorCode::InvalidArgument, "polar_extension_2d_scalar needs a disk domain");
  }
  if (!ge.is_scalar()) {
    throw Error(ErrorCode::ShapeMismatch, "polar_extension_2d_scalar needs scalar values");
  }
  require_separated(ge, delta);

  const std::size_t count = ge.size();
  std::vector<char> inS(count, 0);
  std::vector<double> phase(count, 0.0);
  ExtensionReport rep;
  for (std::size_t k = 0; k < count; ++k) {
    const Complex z = ge.scalar(k);
    if (std::abs(z) > delta) {
      inS[k] = 1;
      phase[k] = std::arg(z);
      ++rep.supportSize;
    }
  }
  rep.modulusBound = witness_modulus_bound(ge, delta);

  if (rep.supportSize == 0) {
    rep.exists = true;
    if (buildWitness) {
      rep.witness = make_scalar(dom, [](std::size_t) { return Complex(1.0); });
    }
    return rep;
  }

  for (const auto& [p, q] : dom.edges()) {
    if (inS[p] && inS[q] && std::abs(wrap(phase[q] - phase[p])) > kAliasLimit) {
      throw Error(ErrorCode::PhaseUnwrapAliasing,
                  "phase jump " + std::to_string(wrap(phase[q] - phase[p])) + " between nodes " +
                      std::to_string(p) + " and " + std::to_string(q) + "; refine the grid");
    }
  }

  // Nearest-branch unwrapping along a BFS tree of each support component.
  std::vector<double> theta(count, 0.0);
  std::vector<int> component(count, -1);
  int components = 0;
  const auto& nbrs = dom.neighbors();
  for (std::size_t root = 0; root < count; ++root) {
    if (!inS[root] || component[root] >= 0) continue;
    std::deque<std::size_t> queue{root};
    component[root] = components;
    theta[root] = phase[root];
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (std::size_t q : nbrs[p]) {
        if (!inS[q] || component[q] >= 0) continue;
        component[q] = components;
        theta[q] = theta[p] + wrap(phase[q] - phase[p]);
        queue.push_back(q);
      }
    }
    ++components;
  }

  // Integer defect of each directed support edge against the unwrapped phase.
  auto kappa = [&](std::size_t a, std::size_t b) -> long {
    if (a == b || !inS[a] || !inS[b]) return 0;
    const double d = theta[a] + wrap(phase[b] - phase[a]) - theta[b];
    return std::lround(d / (2.0 * std::numbers::pi));
  };
  bool consistent = true;
  for (const auto& [p, q] : dom.edges()) {
    if (kappa(p, q) != 0) {
      consistent = false;
      break;
    }
  }

  const auto& cells = dom.cells();
  std::vector<long> residue(cells.size(), 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = cells[c];
    for (int i = 0; i < 4; ++i) residue[c] += kappa(v[i], v[(i + 1) % 4]);
  }

  // Holes: complement nodes joined when they share a cell.
  std::vector<std::size_t> parent(count);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& v : cells) {
    std::optional<std::size_t> first;
    for (std::size_t node : v) {
      if (inS[node]) continue;
      if (!first) first = node;
      else parent[find(node)] = find(*first);
    }
  }
  const int outerRing = dom.radial() - 1;
  std::vector<char> touchesRim(count, 0);
  for (int j = 0; j < dom.angular(); ++j) {
    const std::size_t node = dom.node(outerRing, j);
    if (!inS[node]) touchesRim[find(node)] = 1;
  }
  std::map<std::size_t, long> holeWinding;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::optional<std::size_t> hole;
    for (std::size_t node : cells[c]) {
      if (!inS[node]) {
        hole = find(node);
        break;
      }
    }
    if (hole) {
      if (!touchesRim[*hole]) holeWinding[*hole] += residue[c];
    } else if (residue[c] != 0) {
      rep.windings.push_back(static_cast<int>(residue[c]));
    }
  }
  std::vector<int> holeList;
  for (const auto& [root, wnd] : holeWinding) holeList.push_back(static_cast<int>(wnd));
  rep.windings.insert(rep.windings.begin(), holeList.begin(), holeList.end());
  for (std::size_t i = 0; i < rep.windings.size(); ++i) {
    if (rep.windings[i] != 0 && rep.obstruction.empty()) {
      rep.obstruction = "phase winds " + std::to_string(rep.windings[i]) + " around " +
                        (i < holeList.size() ? "a hole in the support" : "a grid cell");
    }
  }
  rep.exists = consistent;
  if (!consistent && rep.obstruction.empty()) {
    rep.obstruction = "phase unwrapping is inconsistent on the support";
  }
  if (!rep.exists || !buildWitness) return rep;

  // Harmonic fill of the unwrapped phase over the complement: the graph
  // Laplacian with the support as Dirichlet data, solved directly.
  std::vector<Eigen::Index> slot(count, -1);
  Eigen::Index unknowns = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (!inS[k]) slot[k] = unknowns++;
  }
  if (unknowns == static_cast<Eigen::Index>(count)) {
    std::fill(theta.begin(), theta.end(), 0.0);
  } else if (unknowns > 0) {
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    for (std::size_t k = 0; k < count; ++k) {
      if (inS[k]) continue;
      const Eigen::Index row = slot[k];
      entries.emplace_back(row, row, static_cast<double>(nbrs[k].size()));
      for (std::size_t q : nbrs[k]) {
        if (inS[q]) rhs(row) += theta[q];
        else entries.emplace_back(row, slot[q], -1.0);
      }
    }
    Eigen::SparseMatrix<double> lap(unknowns, unknowns);
    lap.setFromTriplets(entries.begin(), entries.end());
    const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::NoWitness, "harmonic fill of the phase failed");
    }
    const Eigen::VectorXd filled = solver.solve(rhs);
    for (std::size_t k = 0; k < count; ++k) {
      if (!inS[k]) theta[k] = filled(slot[k]);
    }
  }
  GridElement witness = make_scalar(dom, [&](std::size_t k) { return std::polar(1.0, theta[k]); });
  double agreement = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (inS[k]) agreement = std::max(agreement, std::abs(witness.scalar(k) - std::polar(1.0, phase[k])));
  }
  rep.agreementResidual = agreement;
  rep.witnessModulus = witness.modulus();
  rep.witness = std::move(witness);
  return rep;
}

ExtensionReport polar_extension(const GridElement& ge, double delta, bool buildWitness) {
  if (ge.domain().kind() == DomainKind::Interval) return polar_extension_1d(ge, delta);
  return polar_extension_2d_scalar(ge, delta, buildWitness);
}

ExtensionReport cutdown_extension(const GridElement& ge, double delta, bool buildWitness) {
  const GridElement cut = lift_cutdown(ge, delta);
  const double tau = separate_from_spectrum(cut, 1e-6 * (1.0 + sup_norm(ge)));
  return polar_extension(cut, tau, buildWitness);
}

GridElement approximant_from_witness(const GridElement& ge, const GridElement& w, double delta,
                                     double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(w.domain() == ge.domain()) || w.rows() != ge.rows() || w.rows() != ge.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "witness does not match the element");
  }
  if (ge.is_scalar()) {
    return make_scalar(ge.domain(), [&](std::size_t k) {
      return w.scalar(k) * (eps + std::max(std::abs(ge.scalar(k)) - delta, 0.0));
    });
  }
  std::vector<ComplexMatrix> out(ge.size());
  for (std::size_t k = 0; k < ge.size(); ++k) {
    const ComplexMatrix absA = opcore::abs_of(ge.at(k));
    const ComplexMatrix shifted = opcore::apply_function(
        absA, opcore::ScalarFunction::ramp_cutdown(delta));
    out[k] = w.at(k) * (eps * ComplexMatrix::Identity(ge.cols(), ge.cols()) + shifted);
  }
  return GridElement(ge.domain(), std::move(out));
}

}  // namespace cstarreg::gridalg
