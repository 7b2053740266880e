#pragma once

// Linear-algebra substrate: Haar orthogonal matrices, Dirichlet spectra and
// unit-Frobenius symmetric index matrices assembled from them.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lrsim/random.hpp"

namespace lrsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kFactorTolerance = 1e-9;
inline constexpr double kSimplexTolerance = 1e-12;

/// Orthogonal d x d matrix whose columns are eigenvectors.
class OrthogonalFactor {
 public:
  /// Throws InvalidParameter unless V^T V = I within `tol` entrywise.
  explicit OrthogonalFactor(Matrix v, double tol = kFactorTolerance);

  static OrthogonalFactor identity(Index d);

  const Matrix& matrix() const { return v_; }
  Index dim() const { return v_.rows(); }
  double determinant() const { return v_.determinant(); }

  /// Largest entry of |V^T V - I|.
  double orthogonality_error() const;

 private:
  Matrix v_;
};

/// Point of the probability simplex: squared eigenvalues of an index matrix.
class SpectrumSimplex {
 public:
  /// Throws InvalidParameter on negative entries or |sum - 1| > `tol`.
  explicit SpectrumSimplex(Vector gamma, double tol = kSimplexTolerance);

  const Vector& values() const { return gamma_; }
  Index dim() const { return gamma_.size(); }
  double operator[](Index i) const { return gamma_[i]; }

  /// Eigenvalues of the assembled matrix, gamma^{1/2}.
  Vector eigenvalues() const { return gamma_.cwiseSqrt(); }

 private:
  Vector gamma_;
};

/// Symmetric matrix with unit Frobenius norm, optionally carrying its
/// factorization B = V diag(gamma^{1/2}) V^T.
class IndexMatrix {
 public:
  /// Validates symmetry and unit Frobenius norm (tolerance 1e-9).
  static IndexMatrix from_dense(Matrix b);

  const Matrix& dense() const { return b_; }
  Index dim() const { return b_.rows(); }
  bool has_factors() const { return factors_.has_value(); }
  const OrthogonalFactor& factor() const;
  const SpectrumSimplex& spectrum() const;

  double frobenius_norm() const { return b_.norm(); }
  double symmetry_error() const;

  /// Eigenvalues in ascending order (dense path, independent of factors).
  Vector eigenvalues() const;

 private:
  friend IndexMatrix assemble_index_matrix(const OrthogonalFactor&, const SpectrumSimplex&);
  IndexMatrix(Matrix b, std::optional<std::pair<OrthogonalFactor, SpectrumSimplex>> factors)
      : b_(std::move(b)), factors_(std::move(factors)) {}

  Matrix b_;
  std::optional<std::pair<OrthogonalFactor, SpectrumSimplex>> factors_;
};

/// Haar-distributed orthogonal matrix via QR of a Gaussian matrix with the
/// diagonal of R made positive.
OrthogonalFactor sample_haar_orthogonal(Index d, Rng& rng);

/// Dirichlet draw via normalized Gamma variates. Shapes below one use
/// Gamma(a) = Gamma(a + 1) * U^{1/a}, kept in log space so tiny shapes do
/// not lose mass to underflow before normalization.
SpectrumSimplex sample_dirichlet(std::span<const double> alpha, Rng& rng);

IndexMatrix assemble_index_matrix(const OrthogonalFactor& v, const SpectrumSimplex& gamma);

/// trace(X B).
double trace_inner(const Matrix& x, const IndexMatrix& b);
double trace_inner(const Matrix& x, const Matrix& b);

/// Number of entries strictly greater than `eps`.
int effective_rank(std::span<const double> values, double eps);
int effective_rank(const Vector& values, double eps);

/// exp(S) for skew-symmetric S.
Matrix skew_exponential(const Matrix& s);

/// Re-orthonormalizes a nearly orthogonal matrix, keeping column signs.
Matrix reorthonormalize(const Matrix& v);

}  // namespace lrsim
