#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gibbs/core.hpp"
#include "gibbs/energy.hpp"
#include "gibbs/marks.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/sampler.hpp"
#include "gibbs/stats.hpp"

namespace gibbs {

struct PartitionEstimate {
  double z_hat = 0.0;
  double std_error = 0.0;
  double log_z = 0.0;     // jackknife bias-corrected log of z_hat
  double log_z_se = 0.0;  // delta method: std_error / z_hat
  std::size_t n = 0;
  bool all_infinite = false;  // every proposal had H = +infinity; z_hat = 0
};

/// Importance sampling of E[exp(-H)] under the Poisson reference; n >= 1000.
PartitionEstimate partition_estimate(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                                     std::size_t n, Rng& rng);

struct ThermoSettings {
  int nodes = 8;
  /// Nodes at beta = s^power for Gauss-Legendre s; powers above 1 cluster them near beta = 0, where
  /// <H>_beta is singular for potentials with a hard repulsive core (like u^-12: beta^(-5/6) in d = 2).
  double beta_power = 1.0;
  ChainSettings chain;
};

struct LogZEstimate {
  double log_z = 0.0;
  double std_error = 0.0;
  std::vector<double> betas;
  std::vector<stats::MeanEstimate> mean_energy;  // <H> under the beta-scaled law at each node
};

/// log Z = -int_0^1 <H>_beta dbeta by Gauss-Legendre quadrature over chains targeting exp(-beta H).
/// Needs a model without infinite values.
LogZEstimate log_partition_ti(std::shared_ptr<const EnergyModel> model, const Window& lambda, double z,
                              const MarkLaw& law, const ThermoSettings& settings, Rng& rng);

/// Mean tame statistic over samples (>= 100) with batch-means standard error.
stats::MeanEstimate j_statistic(const std::vector<Configuration>& samples, double delta);

struct EntropyReport {
  double entropy = 0.0;  // I = -<H> - log Z
  double std_error = 0.0;
  double log_z = 0.0;
  double log_z_se = 0.0;
  double mean_energy = 0.0;
  double mean_energy_se = 0.0;
  double volume = 0.0;
  double per_volume = 0.0;
  double per_volume_se = 0.0;
  std::size_t n = 0;
  bool consistent = true;  // I >= -3 std_error
};

EntropyReport relative_entropy_estimate(const EnergyModel& model, const Window& lambda,
                                        const std::vector<Configuration>& samples, double log_z, double log_z_se);

struct EntropyCurveSettings {
  std::vector<int> n_list;
  int d = 2;
  double z = 1.0;
  double delta = 1.0;
  ChainSettings chain;  // beta = 1 chain for the energy, J and stability samples
  ThermoSettings thermo;
  std::size_t is_samples = 20000;  // used instead of thermodynamic integration for models with infinite values
  double c_audit = -std::numeric_limits<double>::infinity();  // stability constant from a separate audit
};

struct EntropyRow {
  int n = 0;
  EntropyReport entropy;
  stats::MeanEstimate j;
  double c_hat = 0.0;
  double ceiling = 0.0;  // c_hat J / |Lambda_n| + z
  double ceiling_se = 0.0;
};

std::vector<EntropyRow> specific_entropy_curve(std::shared_ptr<const EnergyModel> model, const MarkLaw& law,
                                               const EntropyCurveSettings& settings, Rng& rng);

using BlockSampler = std::function<Configuration(Rng&)>;

struct EmpiricalDraw {
  Configuration config = Configuration(1);
  Location shift{};
  std::size_t blocks = 0;
};

/// Shifted block field: iid copies of the block law on Lambda_n + 2n j, shifted by a uniform
/// kappa in {-n, ..., n-1}^d and restricted to the observation window.
EmpiricalDraw empirical_field_draw(const BlockSampler& block, int n, int d, const Window& observe, Rng& rng,
                                   std::size_t max_blocks = 4096);

struct TestFunctional {
  std::string id;
  std::function<double(const Configuration&, const Window&)> f;
};

/// Ten bounded local functionals of the configuration inside a box window.
const std::vector<TestFunctional>& functional_library();

struct DlrReport {
  std::string functional;
  double residual = 0.0;
  double std_error = 0.0;
  double k = 3.0;
  bool pass = true;
  std::size_t n_outer = 0;
  std::size_t n_inner = 0;
};

/// Draws inner configurations in Lambda given the points outside Lambda.
using KernelSampler = std::function<std::vector<Configuration>(const Configuration& exterior, std::size_t count, Rng&)>;

/// Exact kernel by rejection (H >= 0 models).
KernelSampler rejection_kernel(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law);
/// Kernel by a chain started at the empty configuration with the exterior as environment.
KernelSampler chain_kernel(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                           const ChainSettings& settings);

/// Paired nested estimate of E[F] - E[int F dXi_Lambda] for every library functional.
std::vector<DlrReport> dlr_residual(const std::vector<Configuration>& outer, const Window& lambda,
                                    const KernelSampler& kernel, std::size_t inner, Rng& rng, double k = 3.0);

}  // namespace gibbs
