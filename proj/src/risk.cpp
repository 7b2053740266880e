#include "lrsim/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrsim/errors.hpp"
#include "lrsim/io.hpp"

namespace lrsim {

ModelConstants ModelConstants::with_lambda(double value) const {
  if (!(value >= 0.0)) throw InvalidParameter("inverse temperature must be nonnegative");
  ModelConstants out = *this;
  out.lambda = value;
  return out;
}

ModelConstants lambda_schedule(double C, double L, double sigma, int n, double c_phi) {
  if (!(C >= 1.0)) throw InvalidParameter("C must be at least 1");
  if (!(L > 0.0)) throw InvalidParameter("L must be positive");
  if (!(sigma >= 0.0)) throw InvalidParameter("sigma must be nonnegative");
  if (n < 1) throw InvalidParameter("n must be at least 1");
  ModelConstants k;
  k.C = C;
  k.L = L;
  k.sigma = sigma;
  k.c_phi = c_phi;
  k.n = n;
  k.w = 64.0 * (C + 1.0) * std::max(L, C + 1.0);
  k.c1 = 8.0 * ((C + 1.0) * (C + 1.0) + sigma * sigma);
  k.lambda = static_cast<double>(n) / (k.w + 2.0 * k.c1);
  return k;
}

double empirical_risk(const LabeledDataset& data, const IndexMatrix& b, const LinkFunction& f) {
  if (b.dim() != data.d) throw InvalidDimension("index matrix and dataset dimensions differ");
  const Vector idx = index_values(data.x, b.dense());
  double s = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double r = data.y[i] - eval_link(f, idx[i]);
    s += r * r;
  }
  return s / data.n();
}

DesignSampler default_design_sampler(Index d) {
  return [d](Rng& rng) { return sample_design_matrix(d, rng); };
}

namespace {

McEstimate mean_and_stderr(const Vector& values) {
  McEstimate out;
  out.n_mc = static_cast<int>(values.size());
  out.estimate = values.mean();
  if (values.size() > 1) {
    const double var = (values.array() - out.estimate).square().sum() / (values.size() - 1);
    out.std_error = std::sqrt(var / values.size());
  }
  return out;
}

}  // namespace

McEstimate excess_risk_mc(const IndexMatrix& b, const LinkFunction& f, const TruthSpec& truth,
                          const DesignSampler& x_sampler, int n_mc, Rng& rng) {
  if (n_mc < 1) throw InvalidParameter("n_mc must be at least 1");
  Vector sq(n_mc);
  for (int i = 0; i < n_mc; ++i) {
    const Matrix x = x_sampler(rng);
    const double diff = eval_link(f, trace_inner(x, b)) - truth.f_star(trace_inner(x, truth.B_star));
    sq[i] = diff * diff;
  }
  return mean_and_stderr(sq);
}

EvaluationSet::EvaluationSet(const TruthSpec& truth, const DesignSampler& x_sampler, int n_mc, Rng& rng) {
  if (n_mc < 1) throw InvalidParameter("n_mc must be at least 1");
  const Index d = truth.d;
  flat_.resize(n_mc, d * d);
  for (int i = 0; i < n_mc; ++i) flat_.row(i) = flatten(x_sampler(rng)).transpose();
  const Vector idx = index_values(flat_, truth.B_star.dense());
  truth_values_.resize(n_mc);
  for (int i = 0; i < n_mc; ++i) truth_values_[i] = truth.f_star(idx[i]);
}

McEstimate EvaluationSet::excess_risk(const Matrix& b, const Vector& beta) const {
  const Vector idx = index_values(flat_, b);
  Vector sq(idx.size());
  for (Index i = 0; i < idx.size(); ++i) {
    if (!(std::abs(idx[i]) <= 1.0)) throw DomainError("evaluation index outside [-1, 1]");
    const double diff = eval_expansion(beta.data(), beta.size(), idx[i]) - truth_values_[i];
    sq[i] = diff * diff;
  }
  return mean_and_stderr(sq);
}

PythagorasResult pythagoras_check(const IndexMatrix& b, const LinkFunction& f, const TruthSpec& truth,
                                  const DesignSampler& x_sampler, const NoiseSpec& noise, int n_mc, Rng& rng) {
  if (n_mc < 1) throw InvalidParameter("n_mc must be at least 1");
  Vector gap(n_mc);
  Vector excess(n_mc);
  for (int i = 0; i < n_mc; ++i) {
    const Matrix x = x_sampler(rng);
    const double fx = eval_link(f, trace_inner(x, b));
    const double fstar = truth.f_star(trace_inner(x, truth.B_star));
    const double eps = sample_noise(noise, 1, rng)[0];
    const double y = fstar + eps;
    const double risk_gap = (y - fx) * (y - fx) - (y - fstar) * (y - fstar);
    excess[i] = (fx - fstar) * (fx - fstar);
    gap[i] = risk_gap - excess[i];
  }
  const McEstimate g = mean_and_stderr(gap);
  PythagorasResult out;
  out.discrepancy = std::abs(g.estimate);
  out.std_error = g.std_error;
  out.excess = excess.mean();
  out.n_mc = n_mc;
  return out;
}

std::string RiskReport::csv_header() { return "n,d,M,lambda,emp_risk,excess,stderr,seed"; }

std::string RiskReport::csv_row() const {
  std::ostringstream os;
  os << n << ',' << d << ',' << M << ',' << format_double(lambda) << ',' << format_double(empirical_risk) << ','
     << format_double(excess_risk_estimate) << ',' << format_double(excess_risk_mc_stderr) << ',' << seed;
  return os.str();
}

}  // namespace lrsim
