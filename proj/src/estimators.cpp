#include "gibbs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/errors.hpp"

namespace gibbs {

PartitionEstimate partition_estimate(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                                     std::size_t n, Rng& rng) {
  if (n < 1000) throw ConfigError("partition estimate needs at least 1000 samples");
  std::vector<double> neg_h(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Configuration g = sample_poisson(lambda, z, law, rng);
    const Energy h = model.energy(g);
    neg_h[i] = h.is_infinite() ? -std::numeric_limits<double>::infinity() : -h.value();
    top = std::max(top, neg_h[i]);
  }
  PartitionEstimate est;
  est.n = n;
  if (top == -std::numeric_limits<double>::infinity()) {
    est.all_infinite = true;
    est.log_z = -std::numeric_limits<double>::infinity();
    return est;
  }
  // Weights scaled by exp(-top) to stay in range.
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(neg_h[i] - top);
    sum += w[i];
  }
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  const double se_scaled = std::sqrt(ss / (dn - 1.0) / dn);
  const double scale = std::exp(top);
  est.z_hat = mean * scale;
  est.std_error = se_scaled * scale;

  const double theta = std::log(mean) + top;
  est.log_z = theta;
  double jack_sum = 0.0;
  bool jack_ok = true;
  for (double v : w) {
    const double rest = sum - v;
    if (!(rest > 0.0)) {
      jack_ok = false;
      break;
    }
    jack_sum += std::log(rest / (dn - 1.0)) + top;
  }
  if (jack_ok) est.log_z = dn * theta - (dn - 1.0) * (jack_sum / dn);
  est.log_z_se = se_scaled / mean;
  return est;
}

LogZEstimate log_partition_ti(std::shared_ptr<const EnergyModel> model, const Window& lambda, double z,
                              const MarkLaw& law, const ThermoSettings& settings, Rng& rng) {
  if (model->may_be_infinite())
    throw PreconditionError("thermodynamic integration needs a model without infinite energies");
  if (settings.nodes < 1) throw ConfigError("thermodynamic integration needs at least one node");
  if (!(settings.beta_power >= 1.0) || !std::isfinite(settings.beta_power))
    throw ConfigError("thermodynamic integration beta power must be >= 1");
  const auto rule = stats::gauss_legendre(settings.nodes, 0.0, 1.0);
  const double q = settings.beta_power;
  LogZEstimate est;
  double var = 0.0;
  for (int k = 0; k < settings.nodes; ++k) {
    const double s = rule.nodes[static_cast<std::size_t>(k)];
    const double beta = std::pow(s, q);
    const double wk = rule.weights[static_cast<std::size_t>(k)] * q * std::pow(s, q - 1.0);
    const ScaledModel scaled(model, beta);
    std::vector<double> hs;
    Rng node_rng = rng.split(static_cast<std::uint64_t>(k));
    run_chain(scaled, lambda, z, law, BoundaryCondition::free(), settings.chain, node_rng,
              [&](const Configuration&, const Energy& e, std::size_t) { hs.push_back(e.value() / beta); });
    const auto m = stats::batch_means(hs);
    est.betas.push_back(beta);
    est.mean_energy.push_back(m);
    est.log_z -= wk * m.mean;
    var += wk * wk * m.std_error * m.std_error;
  }
  est.std_error = std::sqrt(var);
  return est;
}

stats::MeanEstimate j_statistic(const std::vector<Configuration>& samples, double delta) {
  if (samples.size() < 100) throw ConfigError("J statistic needs at least 100 samples");
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& g : samples) t.push_back(tame_statistic(g, delta));
  return stats::batch_means(t);
}

EntropyReport relative_entropy_estimate(const EnergyModel& model, const Window& lambda,
                                        const std::vector<Configuration>& samples, double log_z, double log_z_se) {
  if (samples.empty()) throw ConfigError("entropy estimate needs samples");
  if (!std::isfinite(log_z)) throw PreconditionError("log partition function estimate is not finite");
  std::vector<double> hs;
  hs.reserve(samples.size());
  for (const auto& g : samples) {
    const Energy h = model.energy(g);
    if (h.is_infinite()) throw PreconditionError("sample with infinite energy: mean energy is not finite");
    hs.push_back(h.value());
  }
  const auto m = stats::batch_means(hs);
  EntropyReport r;
  r.n = samples.size();
  r.mean_energy = m.mean;
  r.mean_energy_se = m.std_error;
  r.log_z = log_z;
  r.log_z_se = log_z_se;
  r.entropy = -m.mean - log_z;
  r.std_error = std::sqrt(m.std_error * m.std_error + log_z_se * log_z_se);
  r.volume = lambda.volume();
  r.per_volume = r.entropy / r.volume;
  r.per_volume_se = r.std_error / r.volume;
  r.consistent = r.entropy >= -3.0 * r.std_error;
  return r;
}

std::vector<EntropyRow> specific_entropy_curve(std::shared_ptr<const EnergyModel> model, const MarkLaw& law,
                                               const EntropyCurveSettings& settings, Rng& rng) {
  for (std::size_t i = 1; i < settings.n_list.size(); ++i)
    if (settings.n_list[i] <= settings.n_list[i - 1]) throw ConfigError("entropy n list must be increasing");
  std::vector<EntropyRow> rows;
  for (int n : settings.n_list) {
    if (n < 1) throw ConfigError("entropy n values must be >= 1");
    const Window lambda = Window::cube(settings.d, n);
    Rng nrng = rng.split(static_cast<std::uint64_t>(n));
    Rng chain_rng = nrng.split(0), z_rng = nrng.split(1);

    std::vector<Configuration> samples;
    run_chain(*model, lambda, settings.z, law, BoundaryCondition::free(), settings.chain, chain_rng,
              [&](const Configuration& g, const Energy&, std::size_t) { samples.push_back(g); });

    double log_z, log_z_se;
    if (model->may_be_infinite()) {
      const auto pe = partition_estimate(*model, lambda, settings.z, law, settings.is_samples, z_rng);
      if (pe.all_infinite) throw NumericalError("every importance sample had infinite energy");
      log_z = pe.log_z;
      log_z_se = pe.log_z_se;
    } else {
      const auto ti = log_partition_ti(model, lambda, settings.z, law, settings.thermo, z_rng);
      log_z = ti.log_z;
      log_z_se = ti.std_error;
    }

    EntropyRow row;
    row.n = n;
    row.entropy = relative_entropy_estimate(*model, lambda, samples, log_z, log_z_se);
    row.j = j_statistic(samples, settings.delta);
    StabilityReport st;
    st.c_hat = settings.c_audit;
    for (const auto& g : samples) stability_update(st, *model, g, settings.delta);
    row.c_hat = st.c_hat;
    const double vol = lambda.volume();
    row.ceiling = row.c_hat * row.j.mean / vol + settings.z;
    row.ceiling_se = std::abs(row.c_hat) * row.j.std_error / vol;
    rows.push_back(row);
  }
  return rows;
}

EmpiricalDraw empirical_field_draw(const BlockSampler& block, int n, int d, const Window& observe, Rng& rng,
                                   std::size_t max_blocks) {
  if (n < 1) throw ConfigError("block half-width n must be >= 1");
  if (d < 1 || d > kMaxDim || d != observe.dim()) throw ConfigError("dimension mismatch in empirical field draw");
  const double side = 2.0 * n;
  EmpiricalDraw out;
  out.config = Configuration(d);
  for (int i = 0; i < d; ++i) out.shift[i] = static_cast<double>(rng.below(2 * static_cast<std::uint64_t>(n))) - n;

  const Location lo = observe.lower(), hi = observe.upper();
  std::array<long, kMaxDim> jlo{}, jhi{};
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) {
    jlo[i] = static_cast<long>(std::floor((lo[i] - out.shift[i] - n) / side));
    jhi[i] = static_cast<long>(std::floor((hi[i] - out.shift[i] + n) / side));
    const auto span = static_cast<std::size_t>(jhi[i] - jlo[i] + 1);
    if (count > max_blocks / span + 1) throw ConfigError("observation window exceeds the materialized block set");
    count *= span;
  }
  if (count > max_blocks) throw ConfigError("observation window exceeds the materialized block set");

  std::vector<MarkedPoint> pts;
  std::array<long, kMaxDim> j = jlo;
  for (std::size_t b = 0; b < count; ++b) {
    Location offset{};
    for (int i = 0; i < d; ++i) offset[i] = side * static_cast<double>(j[i]) + out.shift[i];
    const Configuration g = block(rng);
    if (g.dim() != d) throw ConfigError("block sampler dimension mismatch");
    for (const auto& p : g.points()) {
      const Location y = p.x + offset;
      if (observe.contains(y)) pts.emplace_back(y, p.mark);
    }
    for (int i = 0; i < d; ++i) {
      if (++j[i] <= jhi[i]) break;
      j[i] = jlo[i];
    }
  }
  out.blocks = count;
  out.config = Configuration::trusted(d, std::move(pts));
  return out;
}

namespace {

struct BoxParts {
  Location lo, hi, mid;
  double min_side;
  int d;
};

BoxParts parts(const Window& w) {
  BoxParts b{w.lower(), w.upper(), {}, std::numeric_limits<double>::infinity(), w.dim()};
  for (int i = 0; i < b.d; ++i) {
    b.mid[i] = 0.5 * (b.lo[i] + b.hi[i]);
    b.min_side = std::min(b.min_side, b.hi[i] - b.lo[i]);
  }
  return b;
}

template <class Pred>
double count_if_in(const Configuration& g, const Window& w, Pred pred) {
  double c = 0.0;
  for (const auto& p : g.points())
    if (w.contains(p.x) && pred(p)) c += 1.0;
  return c;
}

std::vector<TestFunctional> build_library() {
  std::vector<TestFunctional> lib;
  auto any = [](const MarkedPoint&) { return true; };
  lib.push_back({"count", [any](const Configuration& g, const Window& w) { return std::min(10.0, count_if_in(g, w, any)); }});
  lib.push_back({"count_left", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   return std::min(10.0, count_if_in(g, w, [&](const MarkedPoint& p) { return p.x[0] < b.mid[0]; }));
                 }});
  lib.push_back({"count_lower", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   const int ax = b.d > 1 ? 1 : 0;
                   return std::min(10.0, count_if_in(g, w, [&](const MarkedPoint& p) { return p.x[ax] >= b.mid[ax]; }));
                 }});
  lib.push_back({"count_corner", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   return std::min(10.0, count_if_in(g, w, [&](const MarkedPoint& p) {
                     for (int i = 0; i < b.d; ++i)
                       if (p.x[i] >= b.mid[i]) return false;
                     return true;
                   }));
                 }});
  lib.push_back({"empty_ball", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   const double r = 0.25 * b.min_side;
                   return count_if_in(g, w, [&](const MarkedPoint& p) { return distance(p.x, b.mid) < r; }) == 0.0 ? 1.0 : 0.0;
                 }});
  lib.push_back({"empty_left", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   return count_if_in(g, w, [&](const MarkedPoint& p) { return p.x[0] < b.mid[0]; }) == 0.0 ? 1.0 : 0.0;
                 }});
  lib.push_back({"mark_sum", [](const Configuration& g, const Window& w) {
                   double s = 0.0;
                   for (const auto& p : g.points())
                     if (w.contains(p.x)) s += p.mark_norm;
                   return std::min(1.0, s);
                 }});
  lib.push_back({"mark_sum_left", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   double s = 0.0;
                   for (const auto& p : g.points())
                     if (w.contains(p.x) && p.x[0] < b.mid[0]) s += p.mark_norm;
                   return std::min(1.0, s);
                 }});
  lib.push_back({"pair_count", [](const Configuration& g, const Window& w) {
                   const auto b = parts(w);
                   const double r = 0.25 * b.min_side;
                   std::vector<Location> xs;
                   for (const auto& p : g.points())
                     if (w.contains(p.x)) xs.push_back(p.x);
                   double c = 0.0;
                   for (std::size_t i = 0; i < xs.size() && c < 5.0; ++i)
                     for (std::size_t k = 0; k < i; ++k)
                       if (distance(xs[i], xs[k]) <= r) c += 1.0;
                   return std::min(5.0, c);
                 }});
  lib.push_back({"max_mark", [](const Configuration& g, const Window& w) {
                   double m = 0.0;
                   for (const auto& p : g.points())
                     if (w.contains(p.x)) m = std::max(m, p.mark_norm);
                   return std::min(1.0, m);
                 }});
  return lib;
}

}  // namespace

const std::vector<TestFunctional>& functional_library() {
  static const std::vector<TestFunctional> lib = build_library();
  return lib;
}

KernelSampler rejection_kernel(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law) {
  return [&model, lambda, z, &law](const Configuration& exterior, std::size_t count, Rng& rng) {
    RejectionSampler s(model, lambda, z, law, std::vector<MarkedPoint>(exterior.points().begin(), exterior.points().end()));
    std::vector<Configuration> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(s.draw(rng));
    return out;
  };
}

KernelSampler chain_kernel(const EnergyModel& model, const Window& lambda, double z, const MarkLaw& law,
                           const ChainSettings& settings) {
  return [&model, lambda, z, &law, settings](const Configuration& exterior, std::size_t count, Rng& rng) {
    ChainSettings s = settings;
    if (s.thin == 0) s.thin = 1;
    s.steps = s.burn_in + count * s.thin;
    std::vector<Configuration> out;
    out.reserve(count);
    Chain chain(model, lambda, z, law, std::vector<MarkedPoint>(exterior.points().begin(), exterior.points().end()), s);
    for (std::size_t st = 1; st <= s.steps; ++st) {
      chain.step(rng);
      if (st > s.burn_in && (st - s.burn_in) % s.thin == 0) out.push_back(chain.configuration());
    }
    return out;
  };
}

std::vector<DlrReport> dlr_residual(const std::vector<Configuration>& outer, const Window& lambda,
                                    const KernelSampler& kernel, std::size_t inner, Rng& rng, double k) {
  if (inner < 100) throw ConfigError("DLR inner budget must be >= 100 kernel samples");
  if (outer.size() < 2) throw ConfigError("DLR residual needs at least two outer samples");
  const auto& lib = functional_library();
  std::vector<std::vector<double>> diffs(lib.size());
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Configuration exterior = restrict_complement(outer[i], lambda);
    Rng inner_rng = rng.split(i);
    const auto draws = kernel(exterior, inner, inner_rng);
    for (std::size_t f = 0; f < lib.size(); ++f) {
      double s = 0.0;
      for (const auto& g : draws) s += lib[f].f(g, lambda);
      diffs[f].push_back(lib[f].f(outer[i], lambda) - s / static_cast<double>(draws.size()));
    }
  }
  std::vector<DlrReport> out;
  for (std::size_t f = 0; f < lib.size(); ++f) {
    const auto m = stats::mean_stderr(diffs[f]);
    DlrReport r;
    r.functional = lib[f].id;
    r.residual = std::abs(m.mean);
    r.std_error = m.std_error;
    r.k = k;
    r.pass = r.residual <= k * r.std_error;
    r.n_outer = outer.size();
    r.n_inner = inner;
    out.push_back(r);
  }
  return out;
}

}  // namespace gibbs
