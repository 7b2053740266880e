#include "lrsim/datagen.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lrsim/errors.hpp"

namespace lrsim {

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "bounded-uniform" || name == "uniform") return NoiseKind::BoundedUniform;
  throw InvalidParameter("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::Gaussian ? "gaussian" : "bounded-uniform";
}

double NoiseSpec::L() const {
  return kind == NoiseKind::Gaussian ? sigma : sigma * std::sqrt(3.0);
}

TruthLink TruthLink::tanh(double scale) {
  if (!(scale > 0.0)) throw InvalidParameter("tanh link scale must be positive");
  return TruthLink(Kind::Tanh, std::nullopt, scale);
}

const LinkFunction& TruthLink::expansion() const {
  if (!f_) throw std::logic_error("closed-form link has no dictionary expansion");
  return *f_;
}

double TruthLink::operator()(double t) const {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("link argument outside [-1, 1]");
  return eval_unchecked(t);
}

double TruthLink::eval_unchecked(double t) const {
  if (kind_ == Kind::Tanh) return scale_ * std::tanh(t);
  return eval_expansion(f_->coefficients().data(), f_->dimension(), t);
}

std::string TruthSpec::describe() const {
  std::ostringstream os;
  os << "rank=" << rank << ";C=" << C << ";link=";
  if (f_star.kind() == TruthLink::Kind::Tanh) {
    os << "tanh(" << f_star.scale() << ")";
  } else {
    os << "dictionary(M=" << f_star.expansion().dimension() << ")";
  }
  if (sobolev_k) os << ";sobolev_k=" << *sobolev_k;
  return os.str();
}

double sobolev_radius(double C) { return 6.0 * C * C / (std::numbers::pi * std::numbers::pi); }

Vector sobolev_coefficients(double k, int terms, double radius) {
  if (terms < 1) throw InvalidParameter("Sobolev truth needs at least one term");
  if (!(k >= 2.0)) throw InvalidParameter("Sobolev regularity must be at least 2");
  Vector beta(terms);
  for (int j = 1; j <= terms; ++j) beta[j - 1] = std::pow(static_cast<double>(j), -(2.0 * k + 1.0) / 2.0);
  beta *= std::sqrt(radius / sobolev_energy(beta, k));
  return beta;
}

namespace {

TruthLink build_link(const LinkSpec& spec, double C, std::optional<double>& sobolev_k) {
  switch (spec.kind) {
    case LinkSpec::Kind::Tanh:
      return TruthLink::tanh(C);
    case LinkSpec::Kind::Constant: {
      Vector beta(1);
      beta[0] = spec.value;
      if (std::abs(spec.value) > C) throw InvalidParameter("constant link exceeds C");
      return TruthLink::dictionary(LinkFunction(beta, C));
    }
    case LinkSpec::Kind::Sobolev: {
      sobolev_k = spec.sobolev_k;
      Vector beta = sobolev_coefficients(spec.sobolev_k, spec.sobolev_terms, sobolev_radius(C));
      if (weighted_l1_norm(beta) > C) throw InvalidParameter("Sobolev truth leaves F_M(C)");
      return TruthLink::dictionary(LinkFunction(beta, C));
    }
    case LinkSpec::Kind::Coefficients: {
      if (spec.beta.empty()) throw InvalidParameter("explicit link needs coefficients");
      Vector beta = Eigen::Map<const Vector>(spec.beta.data(), static_cast<Index>(spec.beta.size()));
      if (weighted_l1_norm(beta) > C + kBallSlack) throw InvalidParameter("explicit link leaves F_M(C)");
      return TruthLink::dictionary(LinkFunction(beta, C));
    }
  }
  throw std::logic_error("unknown link kind");
}

}  // namespace

TruthSpec make_truth(Index d, int r_star, const LinkSpec& link, double C, Rng& rng) {
  if (d < 1) throw InvalidDimension("d must be at least 1");
  if (r_star < 1 || r_star > d) throw InvalidParameter("rank must lie in [1, d]");
  if (!(C >= 1.0)) throw InvalidParameter("C must be at least 1");
  std::optional<double> k;
  TruthLink f = build_link(link, C, k);
  for (int i = 0; i <= 10000; ++i) {
    const double t = -1.0 + 2.0 * i / 10000.0;
    if (std::abs(f(t)) > C) throw InvalidParameter("truth link exceeds C in sup norm");
  }
  OrthogonalFactor v = sample_haar_orthogonal(d, rng);
  Vector gamma = Vector::Zero(d);
  gamma.head(r_star).setConstant(1.0 / r_star);
  IndexMatrix b = assemble_index_matrix(v, SpectrumSimplex(gamma));
  return TruthSpec{d, r_star, std::move(b), std::move(f), C, k};
}

Matrix sample_design_matrix(Index d, Rng& rng) {
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = standard_normal(rng);
  }
  Matrix x = 0.5 * (g + g.transpose());
  const double norm = x.norm();
  const double radius = std::sqrt(uniform_open_closed(rng));
  if (norm == 0.0) return Matrix::Zero(d, d);
  x *= radius / norm;
  return x;
}

std::vector<Matrix> sample_design(Index d, int n, Rng& rng) {
  if (n < 1) throw InvalidParameter("design needs n >= 1");
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(sample_design_matrix(d, rng));
  return out;
}

Vector sample_noise(const NoiseSpec& spec, int n, Rng& rng) {
  if (!(spec.sigma >= 0.0)) throw InvalidParameter("noise sigma must be nonnegative");
  Vector eps = Vector::Zero(n);
  if (spec.sigma == 0.0) return eps;
  if (spec.kind == NoiseKind::Gaussian) {
    std::normal_distribution<double> normal(0.0, spec.sigma);
    for (int i = 0; i < n; ++i) eps[i] = normal(rng);
  } else {
    const double a = spec.L();
    std::uniform_real_distribution<double> uni(-a, a);
    for (int i = 0; i < n; ++i) eps[i] = uni(rng);
  }
  return eps;
}

Matrix LabeledDataset::design(int i) const {
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) m(r, c) = x(i, r * d + c);
  }
  return m;
}

Vector flatten(const Matrix& m) {
  Vector out(m.size());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
  }
  return out;
}

Vector index_values(const Matrix& flat_design, const Matrix& b) {
  // trace(X B) = sum_rc X(r,c) B(c,r); row-major X against column-major B.
  const Eigen::Map<const Vector> b_col_major(b.data(), b.size());
  return flat_design * b_col_major;
}

LabeledDataset generate(const TruthSpec& truth, int n, const NoiseSpec& noise, std::uint64_t seed) {
  if (n < 1) throw InvalidParameter("dataset needs n >= 1");
  Rng design_rng = make_rng(seed, 0);
  Rng noise_rng = make_rng(seed, 1);
  LabeledDataset data;
  data.d = truth.d;
  data.noise = noise;
  data.seed = seed;
  data.truth_description = truth.describe();
  data.truth = truth;
  data.x.resize(n, truth.d * truth.d);
  for (int i = 0; i < n; ++i) data.x.row(i) = flatten(sample_design_matrix(truth.d, design_rng)).transpose();
  const Vector eps = sample_noise(noise, n, noise_rng);
  const Vector idx = index_values(data.x, truth.B_star.dense());
  data.y.resize(n);
  for (int i = 0; i < n; ++i) data.y[i] = truth.f_star(idx[i]) + eps[i];
  return data;
}

void validate_dataset(const LabeledDataset& data, const TruthSpec& truth) {
  if (data.d != truth.d) throw InvalidDimension("dataset and truth dimensions differ");
  const Vector idx = index_values(data.x, truth.B_star.dense());
  for (int i = 0; i < data.n(); ++i) {
    const std::string where = " at record " + std::to_string(i);
    if (data.x.row(i).norm() > 1.0 + 1e-12) throw InvalidParameter("||X||_F exceeds 1" + where);
    if (std::abs(idx[i]) > 1.0) throw InvalidParameter("|<X, B*>| exceeds 1" + where);
    if (std::abs(truth.f_star(idx[i])) > truth.C) throw InvalidParameter("|f*| exceeds C" + where);
    if (!std::isfinite(data.y[i])) throw InvalidParameter("non-finite response" + where);
  }
}

}  // namespace lrsim
