#include "lrsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "lrsim/errors.hpp"

namespace lrsim {

long GridSpec::cell_count() const {
  const long matrix_cells = prior.d == 1 ? 1L : static_cast<long>(angle_bins) * spectrum_bins;
  long link_cells = beta1_bins;
  if (prior.dimension_cap() >= 2) link_cells += static_cast<long>(beta1_bins) * beta2_bins;
  return matrix_cells * link_cells;
}

double GridPosterior::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double GridPosterior::mean_beta1() const {
  double s = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) s += weights[k] * cells[k].beta1;
  return s;
}

double GridPosterior::mean_risk() const {
  double s = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) s += weights[k] * risks[k];
  return s;
}

double GridPosterior::probability_of_dimension(int m) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].M == m) s += weights[k];
  }
  return s;
}

std::vector<double> gibbs_weights(const std::vector<double>& log_prior_mass, const std::vector<double>& risks,
                                  double lambda) {
  if (log_prior_mass.size() != risks.size()) throw InvalidParameter("mass and risk vectors differ in length");
  std::vector<double> logw(risks.size());
  double top = kOutOfSupport;
  for (std::size_t k = 0; k < risks.size(); ++k) {
    logw[k] = log_prior_mass[k] == kOutOfSupport ? kOutOfSupport : log_prior_mass[k] - lambda * risks[k];
    top = std::max(top, logw[k]);
  }
  if (top == kOutOfSupport) throw InvalidParameter("grid carries no prior mass");
  std::vector<double> w(risks.size());
  double total = 0.0;
  for (std::size_t k = 0; k < risks.size(); ++k) {
    w[k] = logw[k] == kOutOfSupport ? 0.0 : std::exp(logw[k] - top);
    total += w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

namespace {

struct SufficientStats {
  double n = 0, y = 0, yy = 0, c = 0, cc = 0, yc = 0;

  // n * r_n at (b1, b2) for f = b1 + b2 cos(pi t).
  double scaled_risk(double b1, double b2) const {
    return yy - 2.0 * b1 * y - 2.0 * b2 * yc + n * b1 * b1 + 2.0 * b1 * b2 * c + b2 * b2 * cc;
  }
};

SufficientStats sufficient_stats(const Vector& indices, const Vector& y) {
  SufficientStats s;
  s.n = static_cast<double>(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    const double c = std::cos(std::numbers::pi * std::clamp(indices[i], -1.0, 1.0));
    s.y += y[i];
    s.yy += y[i] * y[i];
    s.c += c;
    s.cc += c * c;
    s.yc += y[i] * c;
  }
  return s;
}

struct MatrixCell {
  double angle;
  double gamma1;
  double log_mass;
  Matrix b;
};

double log_of(double x) { return x > 0.0 ? std::log(x) : kOutOfSupport; }

std::vector<MatrixCell> matrix_cells(const GridSpec& grid) {
  std::vector<MatrixCell> out;
  if (grid.prior.d == 1) {
    out.push_back({0.0, 1.0, 0.0, Matrix::Identity(1, 1)});
    return out;
  }
  const auto alpha = grid.prior.dirichlet_parameters();
  // gamma_1 ~ Beta(alpha_1, alpha_2); cells are uniform in the arcsine
  // coordinate gamma_1 = sin^2(phi), whose masses are exact for alpha = (1/2, 1/2).
  for (int a = 0; a < grid.angle_bins; ++a) {
    const double angle = (a + 0.5) * std::numbers::pi / grid.angle_bins;
    const double ca = std::cos(angle), sa = std::sin(angle);
    Matrix v(2, 2);
    v << ca, -sa, sa, ca;
    for (int g = 0; g < grid.spectrum_bins; ++g) {
      const double phi_lo = g * (std::numbers::pi / 2) / grid.spectrum_bins;
      const double phi_hi = (g + 1) * (std::numbers::pi / 2) / grid.spectrum_bins;
      const double phi_mid = 0.5 * (phi_lo + phi_hi);
      const double lo = std::pow(std::sin(phi_lo), 2), hi = std::pow(std::sin(phi_hi), 2);
      const double mass = boost::math::ibeta(alpha[0], alpha[1], std::min(hi, 1.0)) -
                          boost::math::ibeta(alpha[0], alpha[1], std::max(lo, 0.0));
      const double g1 = std::pow(std::sin(phi_mid), 2);
      Vector root(2);
      root << std::sqrt(g1), std::sqrt(1.0 - g1);
      Matrix b = v * root.asDiagonal() * v.transpose();
      out.push_back({angle, g1, log_of(mass) - std::log(static_cast<double>(grid.angle_bins)), b});
    }
  }
  return out;
}

}  // namespace

GridPosterior exact_posterior_oracle(const LabeledDataset& data, const ModelConstants& constants,
                                     const GridSpec& grid) {
  const PriorConfig& prior = grid.prior;
  prior.validate();
  if (prior.d > 2 || prior.d != data.d) throw InvalidParameter("grid oracle supports d <= 2 matching the data");
  if (prior.dimension_cap() > 2) throw InvalidParameter("grid oracle supports M <= 2 only");
  if (grid.angle_bins < 1 || grid.spectrum_bins < 1 || grid.beta1_bins < 1 || grid.beta2_bins < 1 ||
      grid.sub_samples < 1) {
    throw InvalidParameter("grid bin counts must be positive");
  }
  if (grid.cell_count() > kMaxOracleCells) {
    throw InvalidParameter("grid of " + std::to_string(grid.cell_count()) + " cells exceeds the oracle limit");
  }
  const double budget = prior.budget();
  const double lambda = constants.lambda;
  const int sub = grid.sub_samples;
  const bool two = prior.dimension_cap() >= 2;
  const double log_m1 = log_dimension_weight(1, prior);
  const double log_m2 = two ? log_dimension_weight(2, prior) : kOutOfSupport;

  GridPosterior post;
  std::vector<double> log_mass;
  const auto reserve = static_cast<std::size_t>(grid.cell_count());
  post.cells.reserve(reserve);
  post.risks.reserve(reserve);
  log_mass.reserve(reserve);

  // Every cell integrates exp(-lambda r_n) over sub-sample points; the cell's
  // risk is the tilted average over the same points.
  std::vector<double> sub_risk, sub_b1, sub_b2;
  auto push_cell = [&](OracleCell cell, double log_point_mass) {
    double top = kOutOfSupport;
    for (double r : sub_risk) top = std::max(top, -lambda * r);
    double z = 0.0, zr = 0.0, z1 = 0.0, z2 = 0.0;
    for (std::size_t q = 0; q < sub_risk.size(); ++q) {
      const double e = std::exp(-lambda * sub_risk[q] - top);
      z += e;
      zr += e * sub_risk[q];
      z1 += e * sub_b1[q];
      z2 += e * sub_b2[q];
    }
    cell.beta1 = z1 / z;
    cell.beta2 = z2 / z;
    post.cells.push_back(cell);
    post.risks.push_back(zr / z);
    log_mass.push_back(log_point_mass + top + std::log(z));
  };

  for (const MatrixCell& mc : matrix_cells(grid)) {
    const SufficientStats st = sufficient_stats(index_values(data.x, mc.b), data.y);
    const double n = st.n;
    // M = 1: beta_1 uniform on [-budget, budget].
    const double w1 = 2.0 * budget / grid.beta1_bins;
    for (int i = 0; i < grid.beta1_bins; ++i) {
      sub_risk.clear();
      sub_b1.clear();
      sub_b2.clear();
      const double lo = -budget + i * w1;
      for (int s = 0; s < sub; ++s) {
        const double b1 = lo + (s + 0.5) * w1 / sub;
        sub_risk.push_back(st.scaled_risk(b1, 0.0) / n);
        sub_b1.push_back(b1);
        sub_b2.push_back(0.0);
      }
      const double point_mass = std::log(w1 / sub / (2.0 * budget));
      push_cell({1, mc.angle, mc.gamma1, 0.0, 0.0}, mc.log_mass + log_m1 + point_mass);
    }
    if (!two) continue;
    // M = 2: beta uniform on |b1| + 2|b2| <= budget, area budget^2.
    const double h1 = 2.0 * budget / grid.beta1_bins;
    const double h2 = budget / grid.beta2_bins;
    const double point_mass = std::log(h1 * h2 / (sub * sub) / (budget * budget));
    for (int i = 0; i < grid.beta1_bins; ++i) {
      for (int j = 0; j < grid.beta2_bins; ++j) {
        sub_risk.clear();
        sub_b1.clear();
        sub_b2.clear();
        for (int s = 0; s < sub; ++s) {
          for (int t = 0; t < sub; ++t) {
            const double b1 = -budget + (i + (s + 0.5) / sub) * h1;
            const double b2 = -0.5 * budget + (j + (t + 0.5) / sub) * h2;
            if (std::abs(b1) + 2.0 * std::abs(b2) > budget) continue;
            sub_risk.push_back(st.scaled_risk(b1, b2) / n);
            sub_b1.push_back(b1);
            sub_b2.push_back(b2);
          }
        }
        if (sub_risk.empty()) continue;
        push_cell({2, mc.angle, mc.gamma1, 0.0, 0.0}, mc.log_mass + log_m2 + point_mass);
      }
    }
  }
  // Masses above already include exp(-lambda r); normalize with lambda = 0.
  post.weights = gibbs_weights(log_mass, std::vector<double>(log_mass.size(), 0.0), 0.0);
  return post;
}

}  // namespace lrsim
