#include "lrsim/dictionary.hpp"

#include <cmath>
#include <string>

#include "lrsim/errors.hpp"

namespace lrsim {

namespace {

void check_domain(double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw DomainError("link argument " + std::to_string(t) + " outside [-1, 1]");
  }
}

inline double trig_unchecked(int j, double t) {
  if (j == 1) return 1.0;
  const int freq = j / 2;
  const double arg = std::numbers::pi * freq * t;
  return (j % 2 == 0) ? std::cos(arg) : std::sin(arg);
}

}  // namespace

double DictionaryBasis::eval(int j, double t) const {
  switch (kind_) {
    case BasisKind::Trigonometric:
      return eval_basis(j, t);
  }
  throw std::logic_error("unknown basis kind");
}

double eval_basis(int j, double t) {
  if (j < 1) throw InvalidParameter("basis index starts at 1");
  check_domain(t);
  return trig_unchecked(j, t);
}

double weighted_l1_norm(std::span<const double> beta) {
  double s = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) s += static_cast<double>(j + 1) * std::abs(beta[j]);
  return s;
}

double weighted_l1_norm(const Vector& beta) {
  return weighted_l1_norm(std::span<const double>(beta.data(), static_cast<std::size_t>(beta.size())));
}

int active_dimension(const Vector& beta) {
  for (Index j = beta.size(); j >= 1; --j) {
    if (beta[j - 1] != 0.0) return static_cast<int>(j);
  }
  return 1;
}

LinkFunction::LinkFunction(Vector beta, double budget) : beta_(std::move(beta)), budget_(budget) {
  if (beta_.size() == 0) throw InvalidDimension("link function needs at least one coefficient");
  if (!(budget_ > 0.0)) throw InvalidParameter("coefficient budget must be positive");
  if (!beta_.allFinite()) throw InvalidParameter("coefficients must be finite");
  if (lrsim::weighted_l1_norm(beta_) > budget_ + kBallSlack) {
    throw InvalidParameter("coefficients leave the weighted l1 ball");
  }
}

double eval_expansion(const double* beta, Index m, double t) {
  double s = beta[0];
  for (Index j = 2; j <= m; ++j) s += beta[j - 1] * trig_unchecked(static_cast<int>(j), t);
  return s;
}

double eval_link(const LinkFunction& f, double t) {
  check_domain(t);
  return eval_expansion(f.coefficients().data(), f.dimension(), t);
}

double weighted_l1_norm(const LinkFunction& f) { return weighted_l1_norm(f.coefficients()); }

double sobolev_energy(const Vector& beta, double k) {
  double s = 0.0;
  for (Index j = 1; j <= beta.size(); ++j) s += std::pow(static_cast<double>(j), 2.0 * k) * beta[j - 1] * beta[j - 1];
  return s;
}

bool sobolev_ellipsoid_check(const LinkFunction& f, double k, double radius) {
  // Relative slack so boundary points such as beta_1 = sqrt(radius) stay inside.
  return sobolev_energy(f.coefficients(), k) <= radius * (1.0 + 1e-12);
}

}  // namespace lrsim
