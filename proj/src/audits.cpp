#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "gibbs/energy.hpp"
#include "gibbs/errors.hpp"

namespace gibbs {

void stability_update(StabilityReport& rep, const EnergyModel& model, const Configuration& gamma, double delta,
                      bool two_sided) {
  ++rep.trials;
  if (gamma.empty()) return;
  const Energy h = model.energy(gamma);
  if (h.is_infinite()) {
    ++rep.infinite;
    return;
  }
  ++rep.used;
  double ratio;
  if (two_sided) {
    double w = 0.0;
    for (const auto& p : gamma.points()) w += 1.0 + std::pow(p.mark_norm, gamma.dim());
    ratio = std::abs(h.value()) / w;
  } else {
    ratio = -h.value() / tame_statistic(gamma, delta);
  }
  rep.c_hat = std::max(rep.c_hat, ratio);
}

StabilityReport stability_audit(const EnergyModel& model, const ConfigGenerator& gen, std::size_t n_trials,
                                double delta, Rng& rng, bool two_sided) {
  StabilityReport rep;
  for (std::size_t i = 0; i < n_trials; ++i) stability_update(rep, model, gen(rng), delta, two_sided);
  return rep;
}

StabilityReport local_stability_audit(const EnergyModel& model, const Window& lambda, int t, const ConfigGenerator& inner,
                                      const ConfigGenerator& env, std::size_t n_trials, double delta, Rng& rng) {
  StabilityReport rep;
  for (std::size_t i = 0; i < n_trials; ++i) {
    const Configuration g = inner(rng);
    const Configuration xi = env(rng);
    ++rep.trials;
    if (g.empty()) continue;
    const Energy h = conditional_energy(model, g, xi, lambda, t, delta);
    if (h.is_infinite()) {
      ++rep.infinite;
      continue;
    }
    ++rep.used;
    rep.c_hat = std::max(rep.c_hat, -h.value() / tame_statistic(g, delta));
  }
  return rep;
}

double tempered_count_bound(int t, double radius, int d) { return t * std::pow(std::ceil(radius), d); }

LjFloor lj_floor() {
  // d/du of 16((s/u)^12 - (s/u)^6) with s = 1.5
  auto dphi = [](double u) {
    const double s6 = std::pow(1.5 / u, 6);
    return 16.0 * (-12.0 * s6 * s6 + 6.0 * s6) / u;
  };
  boost::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(dphi, 1.5, 2.5, boost::math::tools::eps_tolerance<double>(52),
                                                         iters);
  LjFloor f;
  f.u_min = 0.5 * (bracket.first + bracket.second);
  f.phi_min = lj_pair(f.u_min);
  return f;
}

}  // namespace gibbs
