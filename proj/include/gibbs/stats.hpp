#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gibbs::stats {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean with the iid standard error.
MeanEstimate mean_stderr(std::span<const double> xs);
/// Sample mean with a batch-means standard error (for correlated chain output).
MeanEstimate batch_means(std::span<const double> xs, std::size_t n_batches = 20);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_sf(double lambda);
double chi_square_sf(double x, double dof);

/// One-sample Kolmogorov-Smirnov distance against a continuous CDF, with asymptotic p-value.
TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov test.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Chi-square homogeneity test for two count histograms over the same bins.
/// Adjacent bins are pooled until each pooled bin has expected count >= min_expected.
TestResult chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b,
                                 double min_expected = 5.0);
/// Chi-square goodness of fit of observed counts against probabilities (which may not sum to 1:
/// the remainder forms a tail bin with zero observations).
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                          double min_expected = 5.0);

double total_variation(std::span<const double> p, std::span<const double> q);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

/// Composite Simpson rule with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace gibbs::stats
