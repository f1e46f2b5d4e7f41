#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gibbs/core.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

/// Law of a scalar radius mark on R+.
class RadiusLaw {
public:
  enum class Kind { point_mass, uniform, truncated_subbotin, table };

  static RadiusLaw point_mass(double r);
  /// Uniform on [0, b].
  static RadiusLaw uniform(double b);
  /// Density proportional to exp(-l^p) on [0, cutoff].
  static RadiusLaw truncated_subbotin(double p, double cutoff);
  /// Discrete law on the given values with the given (unnormalized) weights.
  static RadiusLaw table(std::vector<double> values, std::vector<double> weights);

  Kind kind() const { return kind_; }
  double sample(Rng& rng) const;
  /// Largest value in the support.
  double support_max() const;
  /// E[l^k] (exact for point mass, uniform and table; quadrature for Subbotin).
  double moment(double k) const;

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  nlohmann::json to_json() const;

private:
  RadiusLaw() = default;
  Kind kind_ = Kind::point_mass;
  double a_ = 0.0;  // point mass / uniform bound / Subbotin exponent
  double b_ = 0.0;  // Subbotin cutoff
  std::vector<double> values_, probs_, cdf_;  // table law
  std::vector<double> grid_, grid_cdf_;       // Subbotin inverse-CDF table
};

/// Radial potential V(x) = a |x|^p on R^2 (a = 0 gives V = 0).
struct Potential {
  double a = 0.0;
  double p = 2.0;

  double value(double x, double y) const;
  /// Gradient written into (gx, gy).
  void gradient(double x, double y, double& gx, double& gy) const;
  double radial(double r) const;
};

/// Euler-Maruyama discretisation of dX = -1/2 grad V(X) ds + dB on [0,1] with K steps, X_0 = 0.
struct LangevinSpec {
  Potential potential;
  int steps = 256;

  void validate() const;
  double h() const { return 1.0 / steps; }
  nlohmann::json to_json() const;
};

using MarkLaw = std::variant<RadiusLaw, LangevinSpec>;

Mark sample_mark(const MarkLaw& law, Rng& rng);
/// Euler-Maruyama path; when `noise` is non-null the Brownian increments are appended to it.
std::shared_ptr<const PathData> sample_langevin_path(const LangevinSpec& spec, Rng& rng,
                                                     std::vector<std::array<double, 2>>* noise = nullptr);

/// Max over grid samples of the Euclidean norm.
double sup_norm(const PathData& path);

MarkLaw mark_law_from_json(const nlohmann::json& j);
nlohmann::json mark_law_to_json(const MarkLaw& law);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  bool diverged = false;  // some sampled exponent overflows a double
  double max_exponent = 0.0;
  std::string diagnostic;
};

/// Monte Carlo estimate of E[exp(l^(d + 2 delta))] for l drawn from the norm law.
MomentEstimate super_exp_moment_estimate(const MarkLaw& law, int d, double delta, std::size_t n_samples, Rng& rng);
/// Same estimate over pre-drawn norms (used to compare exponents on a common sample).
MomentEstimate super_exp_moment_from_norms(const std::vector<double>& norms, int d, double delta);

struct InvariantReport {
  double ks_distance = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;
  bool diverged = false;
  bool pass = false;
  double threshold = 0.0;
};

/// Run one long Euler-Maruyama chain, record |X| every `thin` steps after burn-in and compare with
/// the radial law of density proportional to exp(-V). The chain is declared divergent once |X|
/// exceeds guard_radius.
InvariantReport langevin_invariant_check(const LangevinSpec& spec, std::size_t burn_in, std::size_t n_samples,
                                         std::size_t thin, Rng& rng, double ks_threshold = 0.02,
                                         double guard_radius = 50.0);

/// Law of |Y| for Y with density proportional to exp(-V) on R^2, tabulated by Simpson quadrature.
class RadialTarget {
public:
  explicit RadialTarget(const Potential& v, int n_cells = 20000);
  double cdf(double r) const;
  double r_max() const { return r_max_; }

private:
  double r_max_ = 0.0;
  std::vector<double> cdf_;
};

}  // namespace gibbs
