#include "lrsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace lrsim {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double batch_means_stderr(std::span<const double> x, int batches) {
  const std::size_t size = x.size() / static_cast<std::size_t>(batches);
  if (batches < 2 || size == 0) return standard_error(x);
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) means.push_back(mean(x.subspan(static_cast<std::size_t>(b) * size, size)));
  return standard_error(means);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double kolmogorov_survival(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  // Stephens' small-sample correction of the asymptotic statistic.
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

double ks_distance(std::vector<double> x, double (*cdf)(double, const void*), const void* ctx) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i], ctx);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

TestResult chi_square_homogeneity(std::span<const long> a, std::span<const long> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("count vectors must match");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("empty count vector");
  // Pool trailing categories until every expected count is at least 5.
  std::vector<double> pa, pb;
  double ca = 0.0, cb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ca += static_cast<double>(a[k]);
    cb += static_cast<double>(b[k]);
    const double total = ca + cb;
    if (total * std::min(na, nb) / (na + nb) >= 5.0) {
      pa.push_back(ca);
      pb.push_back(cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (pa.empty()) {
      pa.push_back(ca);
      pb.push_back(cb);
    } else {
      pa.back() += ca;
      pb.back() += cb;
    }
  }
  if (pa.size() < 2) return {0.0, 1.0};
  double stat = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const double total = pa[k] + pb[k];
    const double ea = total * na / (na + nb);
    const double eb = total * nb / (na + nb);
    stat += (pa[k] - ea) * (pa[k] - ea) / ea + (pb[k] - eb) * (pb[k] - eb) / eb;
  }
  const boost::math::chi_squared dist(static_cast<double>(pa.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = mean(lx), my = mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const std::size_t dof = lx.size() - 2;
  if (dof > 0) {
    double sse = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - fit.intercept - fit.slope * lx[i];
      sse += r * r;
    }
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(dof) / sxx);
    const boost::math::students_t t(static_cast<double>(dof));
    const double q = boost::math::quantile(t, 0.975);
    fit.ci_low = fit.slope - q * fit.slope_stderr;
    fit.ci_high = fit.slope + q * fit.slope_stderr;
  } else {
    fit.ci_low = fit.ci_high = fit.slope;
  }
  return fit;
}

double potential_scale_reduction(const std::vector<std::vector<double>>& chains) {
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chains) len = std::min(len, c.size());
  if (chains.size() < 2 || len < 2) return 1.0;
  const double n = static_cast<double>(len);
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    std::span<const double> s(c.data(), len);
    means.push_back(mean(s));
    vars.push_back(variance(s));
  }
  const double w = mean(vars);
  const double b = n * variance(means);
  if (w <= 0.0) return 1.0;
  const double pooled = (n - 1.0) / n * w + b / n;
  return std::sqrt(pooled / w);
}

}  // namespace lrsim
