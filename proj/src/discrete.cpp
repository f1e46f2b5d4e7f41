#include "gibbs/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

constexpr std::size_t kMaxStates = 100000;

double log_sum_exp(const std::vector<double>& lw) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : lw) m = std::max(m, v);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double v : lw) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> normalize(const std::vector<double>& lw) {
  const double lz = log_sum_exp(lw);
  if (lz == -std::numeric_limits<double>::infinity())
    throw NumericalError("every state of the discrete instance has infinite energy");
  std::vector<double> p(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) p[i] = std::exp(lw[i] - lz);
  return p;
}

std::vector<std::size_t> digits(std::size_t key, std::size_t base, std::size_t n) {
  std::vector<std::size_t> d(n);
  for (std::size_t s = 0; s < n; ++s) {
    d[s] = key % base;
    key /= base;
  }
  return d;
}

double log_site_weight(const DiscreteInstance& inst, std::size_t mark) {
  return std::log(inst.z * inst.window.volume() / static_cast<double>(inst.sites.size()) * inst.mark_probs[mark]);
}

std::vector<MarkedPoint> points_of(const DiscreteInstance& inst, const std::vector<std::size_t>& dg,
                                   const std::vector<std::size_t>& which) {
  std::vector<MarkedPoint> pts;
  for (std::size_t s : which)
    if (dg[s] > 0) pts.emplace_back(inst.sites[s], Mark::radius(inst.marks[dg[s] - 1]));
  return pts;
}

double log_weight(const EnergyModel& model, const DiscreteInstance& inst, const std::vector<std::size_t>& dg,
                  const std::vector<std::size_t>& which, const std::vector<MarkedPoint>& env) {
  double lw = 0.0;
  for (std::size_t s : which)
    if (dg[s] > 0) lw += log_site_weight(inst, dg[s] - 1);
  const auto pts = points_of(inst, dg, which);
  const Energy h = interaction_energy(model, pts, env);
  if (h.is_infinite()) return -std::numeric_limits<double>::infinity();
  return lw - h.value();
}

}  // namespace

DiscreteInstance DiscreteInstance::micro(double z) {
  DiscreteInstance inst;
  inst.window = Window::box(2, {0.0, 0.0, 0.0}, {2.0, 2.0, 0.0});
  inst.sites = {{0.5, 0.5, 0.0}, {1.5, 0.5, 0.0}, {0.5, 1.5, 0.0}, {1.5, 1.5, 0.0}};
  inst.marks = {0.3, 0.6};
  inst.mark_probs = {0.5, 0.5};
  inst.z = z;
  inst.max_points = 3;
  return inst;
}

void DiscreteInstance::validate() const {
  if (sites.empty()) throw ConfigError("discrete instance without sites");
  if (marks.empty() || marks.size() != mark_probs.size()) throw ConfigError("discrete instance mark table mismatch");
  if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError("discrete instance intensity must be > 0");
  double tot = 0.0;
  for (double p : mark_probs) {
    if (!(p > 0.0)) throw ConfigError("discrete mark probabilities must be > 0");
    tot += p;
  }
  if (std::abs(tot - 1.0) > 1e-12) throw ConfigError("discrete mark probabilities must sum to 1");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!window.contains(sites[i])) throw ConfigError("site outside the window");
    for (std::size_t j = 0; j < i; ++j)
      if (sites[i] == sites[j]) throw ConfigError("repeated site");
  }
  for (const auto& p : env)
    if (window.contains(p.x)) throw ConfigError("environment point inside the window");
  state_count();
}

std::size_t DiscreteInstance::state_count() const {
  const std::size_t base = marks.size() + 1;
  std::size_t n = 1;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (n > kMaxStates / base) throw ConfigError("discrete state space exceeds 1e5 states");
    n *= base;
  }
  return n;
}

RadiusLaw DiscreteInstance::mark_law() const { return RadiusLaw::table(marks, mark_probs); }

std::size_t state_key(const DiscreteInstance& inst, const Configuration& gamma) {
  const std::size_t base = inst.marks.size() + 1;
  std::vector<std::size_t> dg(inst.sites.size(), 0);
  for (const auto& p : gamma.points()) {
    const auto s = std::find(inst.sites.begin(), inst.sites.end(), p.x);
    const auto m = std::find(inst.marks.begin(), inst.marks.end(), p.mark_norm);
    if (s == inst.sites.end() || m == inst.marks.end()) throw PreconditionError("point outside the discrete state space");
    dg[static_cast<std::size_t>(s - inst.sites.begin())] = 1 + static_cast<std::size_t>(m - inst.marks.begin());
  }
  std::size_t key = 0;
  for (std::size_t s = inst.sites.size(); s-- > 0;) key = key * base + dg[s];
  return key;
}

Configuration state_configuration(const DiscreteInstance& inst, std::size_t key) {
  std::vector<std::size_t> all(inst.sites.size());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
  const auto dg = digits(key, inst.marks.size() + 1, inst.sites.size());
  return Configuration::trusted(inst.window.dim(), points_of(inst, dg, all));
}

std::vector<double> enumerate_gibbs(const EnergyModel& model, const DiscreteInstance& inst) {
  inst.validate();
  const std::size_t n = inst.state_count();
  const std::size_t base = inst.marks.size() + 1;
  std::vector<std::size_t> all(inst.sites.size());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
  std::vector<double> lw(n);
  for (std::size_t key = 0; key < n; ++key) {
    const auto dg = digits(key, base, inst.sites.size());
    const auto occupied = static_cast<std::size_t>(std::count_if(dg.begin(), dg.end(), [](std::size_t v) { return v > 0; }));
    if (inst.max_points && occupied > *inst.max_points)
      lw[key] = -std::numeric_limits<double>::infinity();
    else
      lw[key] = log_weight(model, inst, dg, all, inst.env);
  }
  return normalize(lw);
}

std::vector<double> chain_state_law(const EnergyModel& model, const DiscreteInstance& inst, ChainSettings settings,
                                    Rng& rng) {
  inst.validate();
  settings.sites = inst.sites;
  settings.max_points = inst.max_points;
  const MarkLaw law = inst.mark_law();
  std::vector<double> counts(inst.state_count(), 0.0);
  double total = 0.0;
  Chain chain(model, inst.window, inst.z, law, inst.env, settings);
  if (settings.steps <= settings.burn_in) throw ConfigError("steps must exceed burn-in");
  if (settings.thin == 0) throw ConfigError("thinning must be >= 1");
  for (std::size_t s = 1; s <= settings.steps; ++s) {
    chain.step(rng);
    if (s > settings.burn_in && (s - settings.burn_in) % settings.thin == 0) {
      counts[state_key(inst, chain.configuration())] += 1.0;
      total += 1.0;
    }
  }
  for (double& c : counts) c /= total;
  return counts;
}

CompatReport kernel_compatibility_check(const EnergyModel& model, const DiscreteInstance& delta_inst,
                                        const std::vector<std::size_t>& lambda_sites) {
  delta_inst.validate();
  if (delta_inst.max_points) throw ConfigError("compatibility check needs an instance without a point cap");
  const std::size_t n_sites = delta_inst.sites.size();
  std::vector<bool> inner(n_sites, false);
  for (std::size_t s : lambda_sites) {
    if (s >= n_sites) throw ConfigError("inner site index out of range");
    if (inner[s]) throw ConfigError("repeated inner site");
    inner[s] = true;
  }
  std::vector<std::size_t> in_sites, out_sites;
  for (std::size_t s = 0; s < n_sites; ++s) (inner[s] ? in_sites : out_sites).push_back(s);

  const std::vector<double> direct = enumerate_gibbs(model, delta_inst);
  const std::size_t base = delta_inst.marks.size() + 1;
  const std::size_t n = direct.size();

  // Group states by their exterior digits.
  std::vector<std::size_t> pow(n_sites, 1);
  for (std::size_t s = 1; s < n_sites; ++s) pow[s] = pow[s - 1] * base;
  auto outer_part = [&](const std::vector<std::size_t>& dg) {
    std::size_t k = 0;
    for (std::size_t s : out_sites) k += dg[s] * pow[s];
    return k;
  };

  std::vector<double> composed(n, 0.0);
  std::vector<double> marginal(n, 0.0);
  for (std::size_t key = 0; key < n; ++key) marginal[outer_part(digits(key, base, n_sites))] += direct[key];

  std::vector<std::size_t> members;
  std::size_t inner_states = 1;
  for (std::size_t j = 0; j < in_sites.size(); ++j) inner_states *= base;
  for (std::size_t key = 0; key < n; ++key) {
    const auto dg = digits(key, base, n_sites);
    bool inner_empty = true;
    for (std::size_t s : in_sites) inner_empty = inner_empty && dg[s] == 0;
    if (!inner_empty) continue;
    // key enumerates each exterior filling once; its inner fillings are key + inner digits.
    const double m = marginal[key];
    if (m == 0.0) continue;
    std::vector<MarkedPoint> env = delta_inst.env;
    const auto outer_pts = points_of(delta_inst, dg, out_sites);
    env.insert(env.end(), outer_pts.begin(), outer_pts.end());
    members.clear();
    std::vector<double> lw;
    for (std::size_t ik = 0; ik < inner_states; ++ik) {
      const auto idg = digits(ik, base, in_sites.size());
      std::vector<std::size_t> full = dg;
      std::size_t full_key = key;
      for (std::size_t j = 0; j < in_sites.size(); ++j) {
        full[in_sites[j]] = idg[j];
        full_key += idg[j] * pow[in_sites[j]];
      }
      members.push_back(full_key);
      lw.push_back(log_weight(model, delta_inst, full, in_sites, env));
    }
    const auto q = normalize(lw);
    for (std::size_t j = 0; j < members.size(); ++j) composed[members[j]] = m * q[j];
  }

  CompatReport rep;
  rep.states = n;
  double tv = 0.0;
  for (std::size_t key = 0; key < n; ++key) {
    const double diff = std::abs(composed[key] - direct[key]);
    tv += diff;
    rep.max_abs = std::max(rep.max_abs, diff);
  }
  rep.tv = 0.5 * tv;
  return rep;
}

}  // namespace gibbs
