#pragma once

// Dictionary expansions on [-1, 1] and their weighted-l1 geometry.

#include <numbers>
#include <span>

#include "lrsim/manifold.hpp"

namespace lrsim {

enum class BasisKind { Trigonometric };

/// A dictionary {phi_j}, j >= 1, of functions [-1,1] -> [-1,1] with
/// |phi_j'| <= j * c_phi.
class DictionaryBasis {
 public:
  static DictionaryBasis trigonometric() { return DictionaryBasis(BasisKind::Trigonometric, std::numbers::pi); }

  BasisKind kind() const { return kind_; }
  double c_phi() const { return c_phi_; }

  double eval(int j, double t) const;
  double derivative_bound(int j) const { return j * c_phi_; }

 private:
  DictionaryBasis(BasisKind kind, double c_phi) : kind_(kind), c_phi_(c_phi) {}
  BasisKind kind_;
  double c_phi_;
};

/// Non-normalized trigonometric system: phi_1 = 1, phi_{2j} = cos(pi j t),
/// phi_{2j+1} = sin(pi j t). Throws DomainError outside [-1, 1].
double eval_basis(int j, double t);

/// sum_j j |beta_j|
double weighted_l1_norm(std::span<const double> beta);
double weighted_l1_norm(const Vector& beta);

/// Largest index j with beta_j != 0, or 1 when beta is identically zero.
int active_dimension(const Vector& beta);

/// f = sum_{j<=M} beta_j phi_j with sum_j j|beta_j| <= budget.
class LinkFunction {
 public:
  /// Throws InvalidParameter when beta is empty or leaves the budget ball.
  LinkFunction(Vector beta, double budget);

  Index dimension() const { return beta_.size(); }
  const Vector& coefficients() const { return beta_; }
  double budget() const { return budget_; }
  double coefficient(int j) const { return beta_[j - 1]; }

  /// Index of the last nonzero coefficient; the label used when beta_M == 0.
  int active_dimension() const { return lrsim::active_dimension(beta_); }

  /// Upper bound on the sup norm, sum_j |beta_j|.
  double sup_norm_bound() const { return beta_.cwiseAbs().sum(); }

 private:
  Vector beta_;
  double budget_;
};

inline constexpr double kBallSlack = 1e-12;

double eval_link(const LinkFunction& f, double t);

/// Unchecked sum_j beta_j phi_j(t) for the sampler's inner loop; t must
/// already be known to lie in [-1, 1].
double eval_expansion(const double* beta, Index m, double t);

double weighted_l1_norm(const LinkFunction& f);

/// True iff sum_j j^{2k} beta_j^2 <= radius.
bool sobolev_ellipsoid_check(const LinkFunction& f, double k, double radius);
double sobolev_energy(const Vector& beta, double k);

}  // namespace lrsim
