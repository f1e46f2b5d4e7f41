#include "gibbs/sampler.hpp"

#include <cmath>
#include <sstream>

#include "gibbs/errors.hpp"
#include "gibbs/serialization.hpp"
#include "gibbs/tempered.hpp"

namespace gibbs {

namespace {

Location uniform_in(const Window& w, Rng& rng) {
  const Location lo = w.lower(), hi = w.upper();
  for (;;) {
    Location x{};
    for (int i = 0; i < w.dim(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    if (w.contains(x)) return x;
  }
}

}  // namespace

Configuration sample_poisson(const Window& lambda, double z, const MarkLaw& law, Rng& rng) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw ConfigError("intensity must be finite and >= 0");
  const std::uint64_t n = z > 0.0 ? rng.poisson(z * lambda.volume()) : 0;
  std::vector<MarkedPoint> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Location x = uniform_in(lambda, rng);
    pts.emplace_back(x, sample_mark(law, rng));
  }
  return Configuration::trusted(lambda.dim(), std::move(pts));
}

RejectionSampler::RejectionSampler(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                                   std::vector<MarkedPoint> env)
    : model_(model), lambda_(lambda), z_(z), law_(law), env_(std::move(env)) {
  if (!model.nonnegative()) throw PreconditionError("rejection sampling needs a model with certified H >= 0");
}

Configuration RejectionSampler::draw(Rng& rng) {
  for (;;) {
    Configuration g = sample_poisson(lambda_, z_, law_, rng);
    const double u = rng.uniform();
    ++attempts_;
    const Energy h = interaction_energy(model_, g.points(), env_);
    if (h.is_finite() && u < std::exp(-h.value())) {
      ++accepted_;
      return g;
    }
    if (attempts_ >= 100000 && static_cast<double>(accepted_) < 1e-4 * static_cast<double>(attempts_)) {
      std::ostringstream msg;
      msg << "rejection sampler acceptance collapsed: " << accepted_ << " of " << attempts_ << " proposals accepted";
      throw NumericalError(msg.str());
    }
  }
}

Configuration rejection_sample(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law, Rng& rng) {
  RejectionSampler s(model, lambda, z, law);
  return s.draw(rng);
}

void ProposalMix::validate() const {
  for (double p : {birth, death, move, remark})
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("proposal probabilities must lie in [0, 1]");
  if (std::abs(birth + death + move + remark - 1.0) > 1e-12) throw ConfigError("proposal probabilities must sum to 1");
  if (birth != death) throw ConfigError("birth and death probabilities must be equal");
  if (!(move_scale > 0.0)) throw ConfigError("move scale must be > 0");
}

double birth_acceptance(double z_volume, std::size_t n, const Energy& dh) {
  if (dh.is_infinite()) return 0.0;
  return std::min(1.0, z_volume / static_cast<double>(n + 1) * std::exp(-dh.value()));
}

double death_acceptance(double z_volume, std::size_t n, const Energy& dh) {
  if (dh.is_infinite()) return 0.0;
  return std::min(1.0, static_cast<double>(n) / z_volume * std::exp(-dh.value()));
}

double local_acceptance(const Energy& dh) {
  if (dh.is_infinite()) return 0.0;
  return std::min(1.0, std::exp(-dh.value()));
}

BoundaryCondition BoundaryCondition::conditioned(Configuration xi, int t, double delta) {
  if (!is_tempered(xi, t, xi.dim(), delta).tempered)
    throw PreconditionError("boundary configuration is not in M^" + std::to_string(t));
  BoundaryCondition bc;
  bc.xi_ = std::move(xi);
  bc.t_ = t;
  return bc;
}

Chain::Chain(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law, std::vector<MarkedPoint> env,
             const ChainSettings& settings)
    : model_(model), lambda_(lambda), z_volume_(z * lambda.volume()), law_(law), env_(std::move(env)),
      settings_(settings) {
  settings_.mix.validate();
  if (!(z >= 0.0) || !std::isfinite(z)) throw ConfigError("chain intensity must be finite and >= 0");
  for (const auto& p : env_)
    if (lambda_.contains(p.x)) throw PreconditionError("environment point inside the chain window");
  for (const auto& s : settings_.sites)
    if (!lambda_.contains(s)) throw ConfigError("site outside the chain window");
  if (settings_.drift_interval == 0) settings_.drift_interval = 10000;
}

bool Chain::occupied(const Location& x, std::ptrdiff_t skip) const {
  for (std::size_t i = 0; i < cur_.size(); ++i)
    if (static_cast<std::ptrdiff_t>(i) != skip && cur_[i].x == x) return true;
  return false;
}

Location Chain::propose_birth(Rng& rng) const {
  if (!settings_.sites.empty()) return settings_.sites[rng.below(settings_.sites.size())];
  return uniform_in(lambda_, rng);
}

bool Chain::propose_move(const Location& from, Rng& rng, Location& out) const {
  if (!settings_.sites.empty()) {
    out = settings_.sites[rng.below(settings_.sites.size())];
    return true;
  }
  out = from;
  const double s = settings_.mix.move_scale;
  for (int i = 0; i < lambda_.dim(); ++i) out[i] += rng.uniform(-s, s);
  return lambda_.contains(out);
}

Energy Chain::recompute() const { return interaction_energy(model_, cur_, env_); }

void Chain::check_drift() {
  const Energy fresh = recompute();
  ++stats_.drift_checks;
  const double e = energy_.value();
  if (fresh.is_infinite()) throw NumericalError("chain reached an infinite-energy state");
  const double drift = std::abs(fresh.value() - e);
  stats_.max_drift = std::max(stats_.max_drift, drift);
  if (drift > 1e-9 * std::max(1.0, std::abs(fresh.value()))) {
    std::ostringstream msg;
    msg << "energy drift check failed at step " << steps_ << ": cached " << e << ", recomputed " << fresh.value()
        << "; state " << to_json(configuration()).dump();
    throw NumericalError(msg.str());
  }
  energy_ = fresh;
}

void Chain::step(Rng& rng) {
  const ProposalMix& mix = settings_.mix;
  const double u = rng.uniform();
  const std::size_t n = cur_.size();
  const PointView all{env_, cur_};

  if (u < mix.birth) {
    const Location x = propose_birth(rng);
    Mark m = sample_mark(law_, rng);
    const double acc = rng.uniform();
    ++stats_.birth.proposed;
    const bool capped = settings_.mark_cap && m.norm() > *settings_.mark_cap;
    const bool full = settings_.max_points && n >= *settings_.max_points;
    if (!capped && !full && !occupied(x, -1)) {
      MarkedPoint p(x, std::move(m));
      const Energy dh = model_.delta_add(all, p);
      if (acc < birth_acceptance(z_volume_, n, dh)) {
        cur_.push_back(std::move(p));
        energy_ += dh;
        ++stats_.birth.accepted;
      }
    }
  } else if (u < mix.birth + mix.death) {
    ++stats_.death.proposed;
    if (n > 0) {
      const auto i = static_cast<std::ptrdiff_t>(rng.below(n));
      const double acc = rng.uniform();
      const Energy removed = model_.delta_add(PointView{env_, cur_, i}, cur_[static_cast<std::size_t>(i)]);
      const Energy dh = Energy() - removed;
      if (acc < death_acceptance(z_volume_, n, dh)) {
        cur_.erase(cur_.begin() + i);
        energy_ += dh;
        ++stats_.death.accepted;
      }
    } else {
      rng.uniform();
    }
  } else if (n > 0) {
    const bool is_move = u < mix.birth + mix.death + mix.move;
    MoveStats& st = is_move ? stats_.move : stats_.remark;
    ++st.proposed;
    const auto i = static_cast<std::ptrdiff_t>(rng.below(n));
    const MarkedPoint& old = cur_[static_cast<std::size_t>(i)];
    Location x = old.x;
    bool ok = true;
    std::optional<Mark> m;
    if (is_move) {
      ok = propose_move(old.x, rng, x) && !occupied(x, i);
    } else {
      m = sample_mark(law_, rng);
      ok = !(settings_.mark_cap && m->norm() > *settings_.mark_cap);
    }
    const double acc = rng.uniform();
    if (ok) {
      MarkedPoint p(x, m ? *m : old.mark);
      const PointView rest{env_, cur_, i};
      const Energy before = model_.delta_add(rest, old);
      const Energy after = model_.delta_add(rest, p);
      const Energy dh = after - before;
      if (acc < local_acceptance(dh)) {
        cur_[static_cast<std::size_t>(i)] = std::move(p);
        energy_ += dh;
        ++st.accepted;
      }
    }
  } else {
    ++(u < mix.birth + mix.death + mix.move ? stats_.move : stats_.remark).proposed;
    rng.uniform();
  }

  ++steps_;
  if (steps_ % settings_.drift_interval == 0) check_drift();
}

namespace {

ChainResult drive(Chain& chain, const ChainSettings& settings, Rng& rng, const SampleCallback& on_sample) {
  if (settings.steps <= settings.burn_in) throw ConfigError("steps must exceed burn-in");
  if (settings.thin == 0) throw ConfigError("thinning must be >= 1");
  for (std::size_t s = 1; s <= settings.steps; ++s) {
    chain.step(rng);
    if (on_sample && s > settings.burn_in && (s - settings.burn_in) % settings.thin == 0)
      on_sample(chain.configuration(), chain.energy(), s);
  }
  return {chain.configuration(), chain.stats()};
}

}  // namespace

ChainResult run_chain(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                      const BoundaryCondition& bc, const ChainSettings& settings, Rng& rng,
                      const SampleCallback& on_sample) {
  std::vector<MarkedPoint> env;
  if (!bc.is_free()) {
    const Configuration outside = restrict_complement(bc.environment(), lambda);
    env.assign(outside.points().begin(), outside.points().end());
  }
  Chain chain(model, lambda, z, law, std::move(env), settings);
  return drive(chain, settings, rng, on_sample);
}

ChainResult sample_cutoff_kernel(const EnergyModel& model, const Window& lambda, const Window& delta_window, double m0,
                                 const Configuration& xi, double z, const MarkLaw& law, ChainSettings settings, Rng& rng,
                                 const SampleCallback& on_sample) {
  if (!(m0 >= 0.0)) throw ConfigError("mark cap m0 must be >= 0");
  const Configuration ring = restrict(restrict_complement(xi, lambda), delta_window);
  settings.mark_cap = m0;
  Chain chain(model, lambda, z, law, std::vector<MarkedPoint>(ring.points().begin(), ring.points().end()), settings);
  return drive(chain, settings, rng, on_sample);
}

}  // namespace gibbs
