#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gibbs/core.hpp"
#include "gibbs/energy.hpp"
#include "gibbs/marks.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

/// Poisson(z |Lambda|) points, iid uniform in Lambda, iid marks.
Configuration sample_poisson(const Window& lambda, double z, const MarkLaw& law, Rng& rng);

/// Exact sampler for densities exp(-H_Lambda(. | env)) with respect to the Poisson process,
/// valid when H >= 0. Aborts with NumericalError once at least 1e5 attempts have been made and
/// the acceptance rate is below 1e-4.
class RejectionSampler {
public:
  RejectionSampler(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                   std::vector<MarkedPoint> env = {});
  Configuration draw(Rng& rng);
  std::size_t attempts() const { return attempts_; }
  std::size_t accepted() const { return accepted_; }

private:
  const EnergyModel& model_;
  Window lambda_;
  double z_;
  const MarkLaw& law_;
  std::vector<MarkedPoint> env_;
  std::size_t attempts_ = 0, accepted_ = 0;
};

Configuration rejection_sample(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law, Rng& rng);

struct ProposalMix {
  double birth = 0.25;
  double death = 0.25;
  double move = 0.25;
  double remark = 0.25;
  double move_scale = 0.5;

  /// Probabilities in [0,1] summing to 1, birth == death, move_scale > 0.
  void validate() const;
};

/// Metropolis-Hastings acceptance probabilities of the birth-death-move-remark kernel.
double birth_acceptance(double z_volume, std::size_t n, const Energy& dh);
double death_acceptance(double z_volume, std::size_t n, const Energy& dh);
double local_acceptance(const Energy& dh);

class BoundaryCondition {
public:
  static BoundaryCondition free() { return BoundaryCondition(); }
  /// Throws PreconditionError unless xi is in M^t.
  static BoundaryCondition conditioned(Configuration xi, int t, double delta);

  bool is_free() const { return !xi_.has_value(); }
  const Configuration& environment() const { return *xi_; }
  int t() const { return t_; }

private:
  std::optional<Configuration> xi_;
  int t_ = 1;
};

struct ChainSettings {
  std::size_t steps = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  ProposalMix mix;
  std::optional<std::size_t> max_points;
  std::optional<double> mark_cap;  // births and remarks with |m| > cap are rejected
  /// Finite set of admissible locations (discretised instances); empty means the whole window.
  std::vector<Location> sites;
  std::size_t drift_interval = 10000;
};

struct MoveStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
};

struct ChainStats {
  MoveStats birth, death, move, remark;
  std::size_t drift_checks = 0;
  double max_drift = 0.0;
};

/// Birth-death-move-remark chain on Lambda with a fixed environment (points outside Lambda).
class Chain {
public:
  Chain(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law, std::vector<MarkedPoint> env,
        const ChainSettings& settings);

  /// One Metropolis-Hastings step.
  void step(Rng& rng);

  const std::vector<MarkedPoint>& points() const { return cur_; }
  Configuration configuration() const { return Configuration::trusted(lambda_.dim(), cur_); }
  Energy energy() const { return energy_; }
  /// H_Lambda(current | env) from scratch.
  Energy recompute() const;
  const ChainStats& stats() const { return stats_; }
  std::size_t steps_done() const { return steps_; }

private:
  bool occupied(const Location& x, std::ptrdiff_t skip) const;
  Location propose_birth(Rng& rng) const;
  bool propose_move(const Location& from, Rng& rng, Location& out) const;
  void check_drift();

  const EnergyModel& model_;
  Window lambda_;
  double z_volume_;
  const MarkLaw& law_;
  std::vector<MarkedPoint> env_;
  ChainSettings settings_;
  std::vector<MarkedPoint> cur_;
  Energy energy_;
  ChainStats stats_;
  std::size_t steps_ = 0;
};

using SampleCallback = std::function<void(const Configuration&, const Energy&, std::size_t step)>;

struct ChainResult {
  Configuration final_state;
  ChainStats stats;
};

/// Run the chain from the empty configuration; after burn-in, every thin-th state goes to the callback.
ChainResult run_chain(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                      const BoundaryCondition& bc, const ChainSettings& settings, Rng& rng,
                      const SampleCallback& on_sample = {});

/// Chain for the cut-off kernel: environment xi restricted to Delta minus Lambda and marks capped at m0.
ChainResult sample_cutoff_kernel(const EnergyModel& model, const Window& lambda, const Window& delta_window, double m0,
                                 const Configuration& xi, double z, const MarkLaw& law, ChainSettings settings, Rng& rng,
                                 const SampleCallback& on_sample = {});

}  // namespace gibbs
