#include "lrsim/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "lrsim/errors.hpp"

namespace lrsim {

OrthogonalFactor::OrthogonalFactor(Matrix v, double tol) : v_(std::move(v)) {
  if (v_.rows() == 0 || v_.rows() != v_.cols()) {
    throw InvalidDimension("orthogonal factor must be square and non-empty");
  }
  if (orthogonality_error() > tol) {
    throw InvalidParameter("matrix is not orthogonal (error " +
                           std::to_string(orthogonality_error()) + ")");
  }
}

OrthogonalFactor OrthogonalFactor::identity(Index d) {
  if (d < 1) throw InvalidDimension("dimension must be at least 1");
  return OrthogonalFactor(Matrix::Identity(d, d));
}

double OrthogonalFactor::orthogonality_error() const {
  const Matrix gram = v_.transpose() * v_;
  return (gram - Matrix::Identity(v_.rows(), v_.cols())).cwiseAbs().maxCoeff();
}

SpectrumSimplex::SpectrumSimplex(Vector gamma, double tol) : gamma_(std::move(gamma)) {
  if (gamma_.size() == 0) throw InvalidDimension("empty spectrum");
  for (Index i = 0; i < gamma_.size(); ++i) {
    if (!(gamma_[i] >= 0.0)) throw InvalidParameter("spectrum entries must be nonnegative");
  }
  if (std::abs(gamma_.sum() - 1.0) > tol) {
    throw InvalidParameter("spectrum entries must sum to one");
  }
}

IndexMatrix IndexMatrix::from_dense(Matrix b) {
  if (b.rows() == 0 || b.rows() != b.cols()) {
    throw InvalidDimension("index matrix must be square and non-empty");
  }
  IndexMatrix out(std::move(b), std::nullopt);
  if (out.symmetry_error() > kFactorTolerance) throw InvalidParameter("index matrix is not symmetric");
  if (std::abs(out.frobenius_norm() - 1.0) > kFactorTolerance) {
    throw InvalidParameter("index matrix must have unit Frobenius norm");
  }
  return out;
}

const OrthogonalFactor& IndexMatrix::factor() const {
  if (!factors_) throw std::logic_error("index matrix has no cached factorization");
  return factors_->first;
}

const SpectrumSimplex& IndexMatrix::spectrum() const {
  if (!factors_) throw std::logic_error("index matrix has no cached factorization");
  return factors_->second;
}

double IndexMatrix::symmetry_error() const { return (b_ - b_.transpose()).cwiseAbs().maxCoeff(); }

Vector IndexMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(b_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

OrthogonalFactor sample_haar_orthogonal(Index d, Rng& rng) {
  if (d < 1) throw InvalidDimension("dimension must be at least 1");
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = standard_normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return OrthogonalFactor(std::move(q));
}

SpectrumSimplex sample_dirichlet(std::span<const double> alpha, Rng& rng) {
  if (alpha.empty()) throw InvalidDimension("Dirichlet needs at least one parameter");
  const auto d = static_cast<Index>(alpha.size());
  Vector log_g(d);
  for (Index i = 0; i < d; ++i) {
    const double a = alpha[static_cast<std::size_t>(i)];
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("Dirichlet parameters must be positive");
    if (a < 1.0) {
      const double g = std::gamma_distribution<double>(a + 1.0, 1.0)(rng);
      log_g[i] = std::log(g) + std::log(uniform_open_closed(rng)) / a;
    } else {
      log_g[i] = std::log(std::gamma_distribution<double>(a, 1.0)(rng));
    }
  }
  const double top = log_g.maxCoeff();
  Vector gamma = (log_g.array() - top).exp().matrix();
  gamma /= gamma.sum();
  // Summation order can leave |sum - 1| at a few ulps; one more pass pins it.
  gamma /= gamma.sum();
  return SpectrumSimplex(std::move(gamma));
}

IndexMatrix assemble_index_matrix(const OrthogonalFactor& v, const SpectrumSimplex& gamma) {
  if (v.dim() != gamma.dim()) throw InvalidDimension("factor and spectrum dimensions differ");
  const Matrix& vm = v.matrix();
  Matrix b = vm * gamma.eigenvalues().asDiagonal() * vm.transpose();
  b = 0.5 * (b + b.transpose());
  return IndexMatrix(std::move(b), std::make_pair(v, gamma));
}

double trace_inner(const Matrix& x, const Matrix& b) {
  if (x.rows() != b.rows() || x.cols() != b.cols() || x.rows() != x.cols()) {
    throw InvalidDimension("trace inner product needs equal square dimensions");
  }
  // trace(XB) = sum_ij X_ij B_ji
  return x.cwiseProduct(b.transpose()).sum();
}

double trace_inner(const Matrix& x, const IndexMatrix& b) { return trace_inner(x, b.dense()); }

int effective_rank(std::span<const double> values, double eps) {
  return static_cast<int>(std::count_if(values.begin(), values.end(), [eps](double v) { return v > eps; }));
}

int effective_rank(const Vector& values, double eps) {
  return effective_rank(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), eps);
}

Matrix skew_exponential(const Matrix& s) {
  if (s.size() == 0 || s.isZero(0.0)) return Matrix::Identity(s.rows(), s.cols());
  return s.exp();
}

Matrix reorthonormalize(const Matrix& v) {
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(v.rows(), v.cols());
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < v.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace lrsim
