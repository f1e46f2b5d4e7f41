#include "gibbs/marks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gibbs/errors.hpp"
#include "gibbs/serialization.hpp"
#include "gibbs/stats.hpp"

namespace gibbs {

using nlohmann::json;

namespace {

constexpr int kSubbotinCells = 1 << 16;

std::size_t locate(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()) - 1, cdf.size() - 2);
}

}  // namespace

RadiusLaw RadiusLaw::point_mass(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("point-mass radius must be finite and >= 0");
  RadiusLaw law;
  law.kind_ = Kind::point_mass;
  law.a_ = r;
  return law;
}

RadiusLaw RadiusLaw::uniform(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("uniform radius bound must be finite and > 0");
  RadiusLaw law;
  law.kind_ = Kind::uniform;
  law.a_ = b;
  return law;
}

RadiusLaw RadiusLaw::truncated_subbotin(double p, double cutoff) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("Subbotin exponent must be > 0");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw ConfigError("Subbotin cutoff must be > 0");
  RadiusLaw law;
  law.kind_ = Kind::truncated_subbotin;
  law.a_ = p;
  law.b_ = cutoff;
  law.grid_.resize(kSubbotinCells + 1);
  law.grid_cdf_.resize(kSubbotinCells + 1);
  const double h = cutoff / kSubbotinCells;
  double acc = 0.0;
  double prev = 1.0;
  law.grid_[0] = 0.0;
  law.grid_cdf_[0] = 0.0;
  for (int i = 1; i <= kSubbotinCells; ++i) {
    const double x = i * h;
    const double mid = std::exp(-std::pow(x - 0.5 * h, p));
    const double f = std::exp(-std::pow(x, p));
    acc += h * (prev + 4.0 * mid + f) / 6.0;
    prev = f;
    law.grid_[i] = x;
    law.grid_cdf_[i] = acc;
  }
  for (double& c : law.grid_cdf_) c /= acc;
  return law;
}

RadiusLaw RadiusLaw::table(std::vector<double> values, std::vector<double> weights) {
  if (values.empty() || values.size() != weights.size()) throw ConfigError("table law needs matching values and weights");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) throw ConfigError("table law values must be finite and >= 0");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw ConfigError("table law weights must be >= 0");
    total += weights[i];
  }
  if (!(total > 0.0)) throw ConfigError("table law weights sum to zero");
  RadiusLaw law;
  law.kind_ = Kind::table;
  law.values_ = std::move(values);
  law.probs_.resize(weights.size());
  law.cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    law.probs_[i] = weights[i] / total;
    acc += law.probs_[i];
    law.cdf_[i] = acc;
  }
  law.cdf_.back() = 1.0;
  return law;
}

double RadiusLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  switch (kind_) {
    case Kind::point_mass:
      return a_;
    case Kind::uniform:
      return a_ * u;
    case Kind::truncated_subbotin: {
      const std::size_t k = locate(grid_cdf_, u);
      const double f0 = grid_cdf_[k], f1 = grid_cdf_[k + 1];
      const double t = f1 > f0 ? (u - f0) / (f1 - f0) : 0.0;
      return grid_[k] + t * (grid_[k + 1] - grid_[k]);
    }
    case Kind::table: {
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      return values_[std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), values_.size() - 1)];
    }
  }
  return 0.0;
}

double RadiusLaw::support_max() const {
  switch (kind_) {
    case Kind::point_mass:
    case Kind::uniform:
      return a_;
    case Kind::truncated_subbotin:
      return b_;
    case Kind::table:
      return *std::max_element(values_.begin(), values_.end());
  }
  return 0.0;
}

double RadiusLaw::moment(double k) const {
  switch (kind_) {
    case Kind::point_mass:
      return std::pow(a_, k);
    case Kind::uniform:
      return std::pow(a_, k) / (k + 1.0);
    case Kind::truncated_subbotin: {
      const double p = a_;
      const auto num = stats::simpson([&](double x) { return std::pow(x, k) * std::exp(-std::pow(x, p)); }, 0.0, b_, 20000);
      const auto den = stats::simpson([&](double x) { return std::exp(-std::pow(x, p)); }, 0.0, b_, 20000);
      return num / den;
    }
    case Kind::table: {
      double s = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) s += probs_[i] * std::pow(values_[i], k);
      return s;
    }
  }
  return 0.0;
}

json RadiusLaw::to_json() const {
  switch (kind_) {
    case Kind::point_mass:
      return json{{"kind", "point-mass"}, {"r", a_}};
    case Kind::uniform:
      return json{{"kind", "uniform"}, {"b", a_}};
    case Kind::truncated_subbotin:
      return json{{"kind", "truncated-subbotin"}, {"p", a_}, {"cutoff", b_}};
    case Kind::table:
      return json{{"kind", "table"}, {"values", values_}, {"weights", probs_}};
  }
  return json{};
}

double Potential::value(double x, double y) const {
  if (a == 0.0) return 0.0;
  return a * std::pow(std::hypot(x, y), p);
}

void Potential::gradient(double x, double y, double& gx, double& gy) const {
  if (a == 0.0) {
    gx = gy = 0.0;
    return;
  }
  const double r2 = x * x + y * y;
  if (r2 == 0.0) {
    gx = gy = 0.0;
    return;
  }
  const double c = a * p * std::pow(r2, 0.5 * p - 1.0);
  gx = c * x;
  gy = c * y;
}

double Potential::radial(double r) const { return a == 0.0 ? 0.0 : a * std::pow(r, p); }

void LangevinSpec::validate() const {
  if (steps < 2) throw ConfigError("Langevin step count K must be >= 2");
  if (!std::isfinite(potential.a) || potential.a < 0.0) throw ConfigError("potential coefficient must be finite and >= 0");
  if (!(potential.p >= 1.0) || !std::isfinite(potential.p)) throw ConfigError("potential exponent must be >= 1");
}

json LangevinSpec::to_json() const {
  return json{{"kind", "langevin"}, {"potential", {{"a", potential.a}, {"p", potential.p}}}, {"steps", steps}};
}

std::shared_ptr<const PathData> sample_langevin_path(const LangevinSpec& spec, Rng& rng,
                                                     std::vector<std::array<double, 2>>* noise) {
  const double h = spec.h();
  const double sh = std::sqrt(h);
  auto path = std::make_shared<PathData>();
  path->samples.resize(static_cast<std::size_t>(spec.steps) + 1);
  double x = 0.0, y = 0.0, sup = 0.0;
  path->samples[0] = {0.0, 0.0};
  for (int k = 1; k <= spec.steps; ++k) {
    double gx, gy;
    spec.potential.gradient(x, y, gx, gy);
    const double bx = sh * rng.normal();
    const double by = sh * rng.normal();
    if (noise) noise->push_back({bx, by});
    x += -0.5 * gx * h + bx;
    y += -0.5 * gy * h + by;
    path->samples[static_cast<std::size_t>(k)] = {x, y};
    sup = std::max(sup, std::hypot(x, y));
  }
  if (!std::isfinite(sup)) throw NumericalError("Langevin path diverged");
  path->sup_norm = sup;
  return path;
}

Mark sample_mark(const MarkLaw& law, Rng& rng) {
  if (const auto* r = std::get_if<RadiusLaw>(&law)) return Mark::radius(r->sample(rng));
  return Mark::path(sample_langevin_path(std::get<LangevinSpec>(law), rng));
}

double sup_norm(const PathData& path) {
  double s = 0.0;
  for (const auto& p : path.samples) s = std::max(s, std::hypot(p[0], p[1]));
  return s;
}

MarkLaw mark_law_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "point-mass") {
      check_keys(j, {"kind", "r"}, "marks");
      return RadiusLaw::point_mass(j.at("r").get<double>());
    }
    if (kind == "uniform") {
      check_keys(j, {"kind", "b"}, "marks");
      return RadiusLaw::uniform(j.at("b").get<double>());
    }
    if (kind == "truncated-subbotin") {
      check_keys(j, {"kind", "p", "cutoff"}, "marks");
      return RadiusLaw::truncated_subbotin(j.at("p").get<double>(), j.at("cutoff").get<double>());
    }
    if (kind == "table") {
      check_keys(j, {"kind", "values", "weights"}, "marks");
      return RadiusLaw::table(j.at("values").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>());
    }
    if (kind == "langevin") {
      check_keys(j, {"kind", "potential", "steps"}, "marks");
      LangevinSpec s;
      if (j.contains("potential")) {
        check_keys(j.at("potential"), {"a", "p"}, "marks.potential");
        s.potential.a = j.at("potential").value("a", 0.0);
        s.potential.p = j.at("potential").value("p", 2.0);
      }
      s.steps = j.value("steps", 256);
      s.validate();
      return s;
    }
    throw ConfigError("unknown mark law '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed mark law: ") + e.what());
  }
}

json mark_law_to_json(const MarkLaw& law) {
  return std::visit([](const auto& l) { return l.to_json(); }, law);
}

MomentEstimate super_exp_moment_from_norms(const std::vector<double>& norms, int d, double delta) {
  MomentEstimate est;
  est.n = norms.size();
  std::vector<double> vals;
  vals.reserve(norms.size());
  const double expo = d + 2.0 * delta;
  for (double l : norms) {
    const double e = std::pow(l, expo);
    est.max_exponent = std::max(est.max_exponent, e);
    // exp overflows a double a little above 709.78
    if (!(e < 709.0)) {
      est.diverged = true;
      continue;
    }
    vals.push_back(std::exp(e));
  }
  if (est.diverged) {
    est.mean = std::numeric_limits<double>::infinity();
    est.std_error = std::numeric_limits<double>::infinity();
    est.diagnostic = "moment diverges at sampled tail";
    return est;
  }
  const auto m = stats::mean_stderr(vals);
  est.mean = m.mean;
  est.std_error = m.std_error;
  return est;
}

MomentEstimate super_exp_moment_estimate(const MarkLaw& law, int d, double delta, std::size_t n_samples, Rng& rng) {
  if (n_samples < 1000) throw ConfigError("moment audit needs at least 1000 samples");
  if (d < 1 || !(delta > 0.0)) throw ConfigError("moment audit needs d >= 1 and delta > 0");
  std::vector<double> norms;
  norms.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) norms.push_back(sample_mark(law, rng).norm());
  return super_exp_moment_from_norms(norms, d, delta);
}

RadialTarget::RadialTarget(const Potential& v, int n_cells) {
  if (!(v.a > 0.0)) throw PreconditionError("radial target needs a confining potential (a > 0)");
  // exp(-V) is below e^-60 beyond this radius.
  r_max_ = std::pow(60.0 / v.a, 1.0 / v.p);
  const double h = r_max_ / n_cells;
  auto f = [&](double r) { return r * std::exp(-v.radial(r)); };
  cdf_.resize(static_cast<std::size_t>(n_cells) + 1);
  cdf_[0] = 0.0;
  double acc = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    const double a = i * h, b = a + h;
    acc += h * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) / 6.0;
    cdf_[static_cast<std::size_t>(i) + 1] = acc;
  }
  for (double& c : cdf_) c /= acc;
}

double RadialTarget::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= r_max_) return 1.0;
  const double pos = r / r_max_ * static_cast<double>(cdf_.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(k);
  return cdf_[k] + t * (cdf_[k + 1] - cdf_[k]);
}

InvariantReport langevin_invariant_check(const LangevinSpec& spec, std::size_t burn_in, std::size_t n_samples,
                                         std::size_t thin, Rng& rng, double ks_threshold, double guard_radius) {
  spec.validate();
  if (thin == 0 || n_samples == 0) throw ConfigError("invariant check needs thin >= 1 and n_samples >= 1");
  InvariantReport rep;
  rep.threshold = ks_threshold;
  const double h = spec.h();
  const double sh = std::sqrt(h);
  double x = 0.0, y = 0.0;
  std::vector<double> radii;
  radii.reserve(n_samples);
  const std::size_t total = burn_in + n_samples * thin;
  for (std::size_t step = 1; step <= total; ++step) {
    double gx, gy;
    spec.potential.gradient(x, y, gx, gy);
    x += -0.5 * gx * h + sh * rng.normal();
    y += -0.5 * gy * h + sh * rng.normal();
    const double r = std::hypot(x, y);
    if (!(r <= guard_radius)) {
      rep.diverged = true;
      rep.n = radii.size();
      return rep;
    }
    if (step > burn_in && (step - burn_in) % thin == 0) radii.push_back(r);
  }
  rep.n = radii.size();
  const RadialTarget target(spec.potential);
  const auto ks = stats::ks_one_sample(std::move(radii), [&](double r) { return target.cdf(r); });
  rep.ks_distance = ks.statistic;
  rep.p_value = ks.p_value;
  rep.pass = rep.ks_distance <= ks_threshold;
  return rep;
}

}  // namespace gibbs
