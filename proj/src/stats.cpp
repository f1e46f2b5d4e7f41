#include "gibbs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace gibbs::stats {

MeanEstimate mean_stderr(std::span<const double> xs) {
  MeanEstimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(e.n);
  if (e.n < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

MeanEstimate batch_means(std::span<const double> xs, std::size_t n_batches) {
  if (n_batches < 2 || xs.size() < 2 * n_batches) return mean_stderr(xs);
  const std::size_t len = xs.size() / n_batches;
  std::vector<double> means;
  means.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    const auto first = xs.begin() + static_cast<std::ptrdiff_t>(b * len);
    means.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) / static_cast<double>(len));
  }
  MeanEstimate e = mean_stderr(means);
  // Report the mean of all samples; batches only inform the error bar.
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  e.n = xs.size();
  return e;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_sf(double x, double dof) {
  if (dof <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d), 0.0};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d), 0.0};
}

TestResult chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b,
                                 double min_expected) {
  if (counts_a.size() != counts_b.size()) throw std::invalid_argument("chi_square_two_sample: bin mismatch");
  const double na = std::accumulate(counts_a.begin(), counts_a.end(), 0.0);
  const double nb = std::accumulate(counts_b.begin(), counts_b.end(), 0.0);
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("chi_square_two_sample: empty histogram");
  const double fa = na / (na + nb), fb = nb / (na + nb);

  std::vector<std::pair<double, double>> pooled;
  double ca = 0.0, cb = 0.0;
  for (std::size_t k = 0; k < counts_a.size(); ++k) {
    ca += counts_a[k];
    cb += counts_b[k];
    const double tot = ca + cb;
    if (tot * std::min(fa, fb) >= min_expected) {
      pooled.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (pooled.empty()) pooled.emplace_back(ca, cb);
    else {
      pooled.back().first += ca;
      pooled.back().second += cb;
    }
  }
  TestResult r;
  for (const auto& [oa, ob] : pooled) {
    const double tot = oa + ob;
    const double ea = tot * fa, eb = tot * fb;
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.dof = static_cast<double>(pooled.size()) - 1.0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size()) throw std::invalid_argument("chi_square_gof: bin mismatch");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> exp;
  for (double p : probs) exp.push_back(p * n);
  const double covered = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (covered < 1.0 - 1e-12) {
    obs.push_back(0.0);
    exp.push_back((1.0 - covered) * n);
  }
  std::vector<std::pair<double, double>> pooled;
  double co = 0.0, ce = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    co += obs[k];
    ce += exp[k];
    if (ce >= min_expected) {
      pooled.emplace_back(co, ce);
      co = ce = 0.0;
    }
  }
  if (ce > 0.0 || co > 0.0) {
    if (pooled.empty()) pooled.emplace_back(co, ce);
    else {
      pooled.back().first += co;
      pooled.back().second += ce;
    }
  }
  TestResult r;
  for (const auto& [o, e] : pooled)
    if (e > 0.0) r.statistic += (o - e) * (o - e) / e;
  r.dof = static_cast<double>(pooled.size()) - 1.0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (b - a) * x + 0.5 * (b + a);
    rule.weights[i] = 0.5 * (b - a) * w;
  }
  return rule;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace gibbs::stats
