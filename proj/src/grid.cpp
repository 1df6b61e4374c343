#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cstarreg/error.hpp"
#include "cstarreg/gridalg.hpp"
#include "parallel.hpp"

namespace cstarreg::gridalg {

using opcore::op_norm;

std::string to_string(DomainKind kind) {
  return kind == DomainKind::Interval ? "interval" : "disk";
}

GridDomain GridDomain::interval(int n) {
  if (n < kMinIntervalPoints) {
    throw Error(ErrorCode::InvalidArgument,
                "interval grid needs at least " + std::to_string(kMinIntervalPoints) + " points");
  }
  GridDomain d;
  d.kind_ = DomainKind::Interval;
  d.n_ = n;
  d.build_topology();
  return d;
}

GridDomain GridDomain::disk(int nr, int ntheta) {
  if (nr < 2) throw Error(ErrorCode::InvalidArgument, "disk grid needs at least 2 radial levels");
  if (ntheta < kMinAngularPoints) {
    throw Error(ErrorCode::InvalidArgument,
                "disk grid needs at least " + std::to_string(kMinAngularPoints) + " angles");
  }
  GridDomain d;
  d.kind_ = DomainKind::Disk;
  d.nr_ = nr;
  d.ntheta_ = ntheta;
  d.build_topology();
  return d;
}

std::size_t GridDomain::size() const {
  if (kind_ == DomainKind::Interval) return static_cast<std::size_t>(n_);
  return 1 + static_cast<std::size_t>(nr_ - 1) * static_cast<std::size_t>(ntheta_);
}

double GridDomain::spacing() const {
  if (kind_ == DomainKind::Interval) return 1.0 / (n_ - 1);
  return std::max(1.0 / (nr_ - 1), 2.0 * std::numbers::pi / ntheta_);
}

double GridDomain::t(std::size_t k) const {
  if (kind_ != DomainKind::Interval) return radius(k);
  return static_cast<double>(k) / (n_ - 1);
}

double GridDomain::radius(std::size_t k) const {
  if (kind_ == DomainKind::Interval) return t(k);
  if (k == 0) return 0.0;
  const auto ring = 1 + (k - 1) / static_cast<std::size_t>(ntheta_);
  return static_cast<double>(ring) / (nr_ - 1);
}

double GridDomain::angle(std::size_t k) const {
  if (kind_ == DomainKind::Interval || k == 0) return 0.0;
  const auto j = (k - 1) % static_cast<std::size_t>(ntheta_);
  return 2.0 * std::numbers::pi * static_cast<double>(j) / ntheta_;
}

Complex GridDomain::point(std::size_t k) const {
  if (kind_ == DomainKind::Interval) return {t(k), 0.0};
  return std::polar(radius(k), angle(k));
}

std::size_t GridDomain::node(int ring, int j) const {
  const int jj = ((j % ntheta_) + ntheta_) % ntheta_;
  return 1 + static_cast<std::size_t>(ring - 1) * ntheta_ + static_cast<std::size_t>(jj);
}

void GridDomain::build_topology() {
  edges_.clear();
  cells_.clear();
  if (kind_ == DomainKind::Interval) {
    for (int k = 0; k + 1 < n_; ++k) {
      edges_.emplace_back(k, k + 1);
    }
  } else {
    for (int j = 0; j < ntheta_; ++j) edges_.emplace_back(0, node(1, j));
    for (int i = 1; i < nr_; ++i) {
      for (int j = 0; j < ntheta_; ++j) {
        edges_.emplace_back(node(i, j), node(i, j + 1));
        if (i + 1 < nr_) edges_.emplace_back(node(i, j), node(i + 1, j));
      }
    }
    for (int j = 0; j < ntheta_; ++j) {
      const std::size_t a = node(1, j);
      const std::size_t b = node(1, j + 1);
      cells_.push_back({0, a, b, b});
    }
    for (int i = 1; i + 1 < nr_; ++i) {
      for (int j = 0; j < ntheta_; ++j) {
        cells_.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
      }
    }
  }
  neighbors_.assign(size(), {});
  for (const auto& [p, q] : edges_) {
    neighbors_[p].push_back(q);
    neighbors_[q].push_back(p);
  }
}

GridElement::GridElement(GridDomain domain, std::vector<ComplexMatrix> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(domain_.size()) +
                                              " node values, got " +
                                              std::to_string(values_.size()));
  }
  const Eigen::Index r = values_.front().rows();
  const Eigen::Index c = values_.front().cols();
  if (r == 0 || c == 0) throw Error(ErrorCode::ShapeMismatch, "node matrices must be non-empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k].rows() != r || values_[k].cols() != c) {
      throw Error(ErrorCode::ShapeMismatch, "node " + std::to_string(k) + " has a different shape");
    }
    if (!opcore::is_finite(values_[k])) {
      throw Error(ErrorCode::InvalidArgument, "node " + std::to_string(k) + " is not finite");
    }
  }
  const bool scalar = r == 1 && c == 1;
  for (const auto& [p, q] : domain_.edges()) {
    const double jump = scalar ? std::abs(values_[p](0, 0) - values_[q](0, 0))
                               : op_norm(values_[p] - values_[q]);
    modulus_ = std::max(modulus_, jump);
  }
}

GridElement make_scalar(const GridDomain& domain, const std::function<Complex(std::size_t)>& fn) {
  std::vector<ComplexMatrix> values(domain.size(), ComplexMatrix(1, 1));
  for (std::size_t k = 0; k < values.size(); ++k) values[k](0, 0) = fn(k);
  return GridElement(domain, std::move(values));
}

double sup_norm(const GridElement& ge) {
  double best = 0.0;
  for (std::size_t k = 0; k < ge.size(); ++k) {
    best = std::max(best, ge.is_scalar() ? std::abs(ge.scalar(k)) : op_norm(ge.at(k)));
  }
  return best;
}

double sup_distance(const GridElement& a, const GridElement& b) {
  if (!(a.domain() == b.domain()) || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "elements live on different grids or shapes");
  }
  double best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    best = std::max(best, a.is_scalar() ? std::abs(a.scalar(k) - b.scalar(k))
                                        : op_norm(a.at(k) - b.at(k)));
  }
  return best;
}

GridElement lift(const GridElement& ge,
                 const std::function<ComplexMatrix(const ComplexMatrix&)>& op) {
  std::vector<ComplexMatrix> out(ge.size());
  detail::parallel_for(ge.size(), [&](std::size_t k) {
    try {
      out[k] = op(ge.at(k));
    } catch (const Error& e) {
      throw Error(e.code(), "at node " + std::to_string(k) + ": " + e.message());
    }
  });
  return GridElement(ge.domain(), std::move(out));
}

GridElement lift_abs(const GridElement& ge) {
  if (ge.is_scalar()) {
    return make_scalar(ge.domain(), [&](std::size_t k) { return Complex(std::abs(ge.scalar(k))); });
  }
  return lift(ge, [](const ComplexMatrix& m) { return opcore::abs_of(m); });
}

GridElement lift_cutdown(const GridElement& ge, double delta) {
  if (delta < 0.0) throw Error(ErrorCode::InvalidArgument, "delta must be non-negative");
  if (ge.is_scalar()) {
    return make_scalar(ge.domain(), [&](std::size_t k) {
      const Complex z = ge.scalar(k);
      const double m = std::abs(z);
      return m > delta ? z * ((m - delta) / m) : Complex(0.0);
    });
  }
  return lift(ge, [delta](const ComplexMatrix& m) { return opcore::cutdown(m, delta); });
}

GridElement lift_polar_function(const GridElement& ge, const opcore::ScalarFunction& fn) {
  if (ge.is_scalar()) {
    return make_scalar(ge.domain(), [&](std::size_t k) {
      const Complex z = ge.scalar(k);
      const double m = std::abs(z);
      return m > 0.0 ? (z / m) * fn(m) : Complex(0.0);
    });
  }
  return lift(ge, [&fn](const ComplexMatrix& m) {
    const opcore::PolarParts p = opcore::polar(m);
    return ComplexMatrix(p.v * opcore::apply_function(p.absA, fn));
  });
}

std::vector<RealVector> singular_values(const GridElement& ge) {
  std::vector<RealVector> out(ge.size());
  if (ge.is_scalar()) {
    for (std::size_t k = 0; k < ge.size(); ++k) {
      out[k] = RealVector::Constant(1, std::abs(ge.scalar(k)));
    }
    return out;
  }
  detail::parallel_for(ge.size(), [&](std::size_t k) { out[k] = opcore::svd(ge.at(k)).values; });
  return out;
}

double singular_value_modulus(const GridElement& ge) {
  const std::vector<RealVector> s = singular_values(ge);
  double best = 0.0;
  for (const auto& [p, q] : ge.domain().edges()) {
    best = std::max(best, (s[p] - s[q]).cwiseAbs().maxCoeff());
  }
  return best;
}

GapReport uniform_gap_regular(const GridElement& ge, double zeroTol) {
  if (!(zeroTol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "zeroTol must be non-negative");
  const std::vector<RealVector> s = singular_values(ge);
  GapReport r;
  r.gap = std::numeric_limits<double>::infinity();
  for (const auto& values : s) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values(i) > zeroTol) r.gap = std::min(r.gap, values(i));
    }
  }
  double omega = 0.0;
  for (const auto& [p, q] : ge.domain().edges()) {
    omega = std::max(omega, (s[p] - s[q]).cwiseAbs().maxCoeff());
  }
  r.threshold = 2.0 * omega;
  r.isRegular = r.gap > r.threshold;
  return r;
}

}  // namespace cstarreg::gridalg
