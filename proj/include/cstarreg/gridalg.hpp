#pragma once

// Grid discretizations of C(X, M_n) for X = [0,1] or the closed unit disk.
//
// A GridElement stores one matrix per grid node. Norms are sup norms over
// the nodes; continuity is tracked through the empirical modulus (largest
// jump across a grid edge). The extension routines decide whether the
// partial isometry v e_delta of an element extends to a continuous partial
// isometry on the whole domain.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cstarreg/opcore.hpp"

namespace cstarreg::gridalg {

enum class DomainKind { Interval, Disk };

std::string to_string(DomainKind kind);

/// Interval: nodes t_k = k / (n - 1).
/// Disk: a center node (index 0) plus rings r_i = i / (nr - 1), i >= 1, each
/// with ntheta nodes at angles 2 pi j / ntheta; node(i, j) = 1 + (i-1) ntheta + j.
class GridDomain {
 public:
  static GridDomain interval(int n);
  static GridDomain disk(int nr, int ntheta);

  DomainKind kind() const { return kind_; }
  int n() const { return n_; }
  int radial() const { return nr_; }
  int angular() const { return ntheta_; }

  std::size_t size() const;
  /// Largest distance between adjacent nodes in parameter space.
  double spacing() const;

  double t(std::size_t k) const;                // interval coordinate
  double radius(std::size_t k) const;
  double angle(std::size_t k) const;
  Complex point(std::size_t k) const;           // disk coordinate r e^{i theta}
  std::size_t node(int ring, int j) const;      // ring >= 1

  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  /// Counter-clockwise cells: center triangles (last entry repeated) and quads.
  const std::vector<std::array<std::size_t, 4>>& cells() const { return cells_; }
  const std::vector<std::vector<std::size_t>>& neighbors() const { return neighbors_; }

  bool operator==(const GridDomain& other) const {
    return kind_ == other.kind_ && n_ == other.n_ && nr_ == other.nr_ &&
           ntheta_ == other.ntheta_;
  }

 private:
  GridDomain() = default;
  void build_topology();

  DomainKind kind_ = DomainKind::Interval;
  int n_ = 0;
  int nr_ = 0;
  int ntheta_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::array<std::size_t, 4>> cells_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

inline constexpr int kMinIntervalPoints = 16;
inline constexpr int kMinAngularPoints = 64;

class GridElement {
 public:
  /// Validates shapes and finiteness and computes the modulus.
  GridElement(GridDomain domain, std::vector<ComplexMatrix> values);

  const GridDomain& domain() const { return domain_; }
  const std::vector<ComplexMatrix>& values() const { return values_; }
  const ComplexMatrix& at(std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  Eigen::Index rows() const { return values_.front().rows(); }
  Eigen::Index cols() const { return values_.front().cols(); }
  bool is_scalar() const { return rows() == 1 && cols() == 1; }
  Complex scalar(std::size_t k) const { return values_[k](0, 0); }
  /// max over edges of ||value_i - value_j||.
  double modulus() const { return modulus_; }

 private:
  GridDomain domain_;
  std::vector<ComplexMatrix> values_;
  double modulus_ = 0.0;
};

GridElement make_scalar(const GridDomain& domain, const std::function<Complex(std::size_t)>& fn);

double sup_norm(const GridElement& ge);
double sup_distance(const GridElement& a, const GridElement& b);

/// Pointwise application. Errors thrown at a node are rethrown with the node
/// index attached. Work is split across CSTARREG_THREADS workers.
GridElement lift(const GridElement& ge, const std::function<ComplexMatrix(const ComplexMatrix&)>& op);
GridElement lift_abs(const GridElement& ge);
GridElement lift_cutdown(const GridElement& ge, double delta);
/// v f(|a|) pointwise.
GridElement lift_polar_function(const GridElement& ge, const opcore::ScalarFunction& fn);

/// Singular values of every node, each descending.
std::vector<RealVector> singular_values(const GridElement& ge);
/// max over edges of max_i |sigma_i(a_p) - sigma_i(a_q)|.
double singular_value_modulus(const GridElement& ge);

struct GapReport {
  bool isRegular = false;
  double gap = 0.0;        // smallest singular value above zeroTol (inf if none)
  double threshold = 0.0;  // a gap must exceed this to count as resolved
};

/// Singular values at or below zeroTol count as zero. The spectrum of a*a in
/// C(X, M_n) is the union over nodes, so regularity means a uniform gap; a
/// measured gap only counts when it exceeds twice the singular-value modulus,
/// since finer gaps cannot be told apart from sampling of a continuum.
GapReport uniform_gap_regular(const GridElement& ge, double zeroTol);

struct ExtensionReport {
  bool exists = false;
  std::optional<GridElement> witness;
  /// 2-D: winding of the phase around each enclosed hole of the support,
  /// followed by any cell-level vortices inside the support.
  std::vector<int> windings;
  /// 1-D: edge index (k, k+1) with the largest witness jump when rejected.
  std::optional<std::size_t> failureIndex;
  std::string obstruction;
  double witnessModulus = 0.0;
  double modulusBound = 0.0;
  double agreementResidual = 0.0;  // max ||w e_delta - v e_delta||
  std::size_t supportSize = 0;
};

/// B_w = 10 mod(a_delta) / (delta - largest singular value below delta),
/// +inf when no singular value lies below delta.
double witness_modulus_bound(const GridElement& ge, double delta);

/// Throws SpectralCollision when some singular value is within
/// cut_separation(sup_norm) of delta.
void require_separated(const GridElement& ge, double delta);

ExtensionReport polar_extension_1d(const GridElement& ge, double delta);
ExtensionReport polar_extension_2d_scalar(const GridElement& ge, double delta,
                                          bool buildWitness = true);
/// Dispatches on the domain kind.
ExtensionReport polar_extension(const GridElement& ge, double delta, bool buildWitness = true);

/// Moves delta by multiples of 2 eta until it clears every singular value.
double separate_from_spectrum(const GridElement& ge, double delta);

/// Condition (4) at delta: the cut-down extends from its support, decided at
/// a small positive threshold.
ExtensionReport cutdown_extension(const GridElement& ge, double delta, bool buildWitness = false);

/// x = w (eps 1 + (|a| - delta)_+) pointwise; regular with gap >= eps when w
/// is unitary at every node.
GridElement approximant_from_witness(const GridElement& ge, const GridElement& w, double delta,
                                     double eps);

struct DistBracket {
  double lower = 0.0;
  double upper = 0.0;
  double certifiedEpsilon = 0.0;  // epsilon used by the constructive upper bound
  double probeDelta = 0.0;        // delta at which the approximant was built
  bool certified = false;         // upper comes from a verified regular element
};

/// Bisection on condition (4) over [0, sup_norm]; the upper end is then
/// certified by building w (eps + (|a| - delta)_+) and measuring its
/// distance.
DistBracket dist_to_regular(const GridElement& ge, double tolBisect);

/// Total phase variation of a scalar 1-D element on its support, counted
/// inward from each end of every support run up to the first step whose
/// phase jump exceeds pi/2.
double no_polar_decomposition_witness(const GridElement& ge);

}  // namespace cstarreg::gridalg
