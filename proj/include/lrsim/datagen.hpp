#pragma once

// Synthetic single-index data: ground truth (B*, f*), bounded designs and
// sub-exponential noise.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrsim/dictionary.hpp"
#include "lrsim/manifold.hpp"

namespace lrsim {

enum class NoiseKind { Gaussian, BoundedUniform };

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Gaussian;
  double sigma = 0.0;

  /// Moment-condition scale paired with sigma: sigma for Gaussian noise,
  /// the half-width sigma * sqrt(3) for bounded-uniform noise.
  double L() const;
};

/// Link of the data-generating model: a dictionary expansion or the closed
/// form C * tanh(t).
class TruthLink {
 public:
  enum class Kind { Dictionary, Tanh };

  static TruthLink dictionary(LinkFunction f) { return TruthLink(Kind::Dictionary, std::move(f), 0.0); }
  static TruthLink tanh(double scale);

  Kind kind() const { return kind_; }
  const LinkFunction& expansion() const;
  double scale() const { return scale_; }

  /// Throws DomainError outside [-1, 1].
  double operator()(double t) const;
  double eval_unchecked(double t) const;

 private:
  TruthLink(Kind kind, std::optional<LinkFunction> f, double scale)
      : kind_(kind), f_(std::move(f)), scale_(scale) {}
  Kind kind_;
  std::optional<LinkFunction> f_;
  double scale_;
};

struct LinkSpec {
  enum class Kind { Coefficients, Sobolev, Constant, Tanh };
  Kind kind = Kind::Sobolev;
  std::vector<double> beta;  // Coefficients
  double sobolev_k = 2.0;    // Sobolev
  int sobolev_terms = 16;    // Sobolev
  double value = 0.0;        // Constant
};

struct TruthSpec {
  Index d = 1;
  int rank = 1;
  IndexMatrix B_star;
  TruthLink f_star;
  double C = 1.0;
  std::optional<double> sobolev_k;

  /// One-line summary written into dataset headers.
  std::string describe() const;
};

/// Radius of the Sobolev ellipsoid used by the rate study, 6 C^2 / pi^2.
double sobolev_radius(double C);

/// beta_j proportional to j^{-(2k+1)/2} for j <= terms, scaled onto the
/// ellipsoid sum_j j^{2k} beta_j^2 = radius.
Vector sobolev_coefficients(double k, int terms, double radius);

/// Rank-r* truth with equal nonzero spectrum 1/r* and Haar eigenvectors.
/// Throws InvalidParameter when the link leaves F_M(C) or exceeds C in sup norm.
TruthSpec make_truth(Index d, int r_star, const LinkSpec& link, double C, Rng& rng);

/// Symmetrized Gaussian direction with Frobenius radius u^{1/2}, u ~ U(0, 1].
Matrix sample_design_matrix(Index d, Rng& rng);
std::vector<Matrix> sample_design(Index d, int n, Rng& rng);

Vector sample_noise(const NoiseSpec& spec, int n, Rng& rng);

/// n records; row i of `x` is X_i flattened row-major (d^2 entries).
struct LabeledDataset {
  Index d = 1;
  Matrix x;
  Vector y;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  std::string truth_description;
  std::optional<TruthSpec> truth;

  int n() const { return static_cast<int>(y.size()); }
  Matrix design(int i) const;
};

/// Row-major flattening of a square matrix.
Vector flatten(const Matrix& m);

/// Indices <X_i, B> for every record of a flattened design.
Vector index_values(const Matrix& flat_design, const Matrix& b);

/// Y_i = f*(<X_i, B*>) + eps_i, deterministic given the seed.
LabeledDataset generate(const TruthSpec& truth, int n, const NoiseSpec& noise, std::uint64_t seed);

/// Checks ||X_i||_F <= 1, |<X_i, B*>| <= 1 and |f*(<X_i, B*>)| <= C.
/// Throws InvalidParameter naming the first violation.
void validate_dataset(const LabeledDataset& data, const TruthSpec& truth);

}  // namespace lrsim
