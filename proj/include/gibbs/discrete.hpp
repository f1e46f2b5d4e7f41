#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gibbs/core.hpp"
#include "gibbs/energy.hpp"
#include "gibbs/marks.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/sampler.hpp"

namespace gibbs {

/// Finite model: points only at the given sites, at most one per site, radius marks from a
/// finite law, an optional cap on the number of points and a fixed environment outside the window.
/// The weight of a state is prod_points (z |W| / #sites) p_m times exp(-H(state | env)), which is
/// the law targeted by the birth-death-move-remark chain run in site mode.
struct DiscreteInstance {
  Window window = Window::cube(2, 1.0);
  std::vector<Location> sites;
  std::vector<double> marks;
  std::vector<double> mark_probs;
  double z = 1.0;
  std::optional<std::size_t> max_points;
  std::vector<MarkedPoint> env;

  /// [0,2)^2 split into 4 unit cells, marks {0.3, 0.6} with equal weights, N <= 3.
  static DiscreteInstance micro(double z = 1.0);

  /// (#marks + 1)^#sites; throws ConfigError beyond 1e5.
  std::size_t state_count() const;
  RadiusLaw mark_law() const;
  void validate() const;
};

/// Base-(#marks+1) digits per site: 0 empty, 1 + k for mark k.
std::size_t state_key(const DiscreteInstance& inst, const Configuration& gamma);
Configuration state_configuration(const DiscreteInstance& inst, std::size_t key);

/// Exact Gibbs probabilities indexed by state key (zero for infeasible or over-cap states).
std::vector<double> enumerate_gibbs(const EnergyModel& model, const DiscreteInstance& inst);

/// Empirical law of the site-mode chain over the same state space.
std::vector<double> chain_state_law(const EnergyModel& model, const DiscreteInstance& inst, ChainSettings settings,
                                    Rng& rng);

struct CompatReport {
  double tv = 0.0;       // total variation between the composed and the direct law on Delta
  double max_abs = 0.0;  // largest pointwise difference
  std::size_t states = 0;
};

/// Compose the exact inner kernel on the sites lambda_sites with the exterior marginal of the
/// exact kernel on the whole instance, and compare with the latter.
CompatReport kernel_compatibility_check(const EnergyModel& model, const DiscreteInstance& delta_inst,
                                        const std::vector<std::size_t>& lambda_sites);

}  // namespace gibbs
