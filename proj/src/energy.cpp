#include "gibbs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/serialization.hpp"
#include "gibbs/tempered.hpp"

namespace gibbs {

using nlohmann::json;

Energy::Energy(double v) : v_(v) {
  if (std::isnan(v)) throw NumericalError("energy evaluated to NaN");
  if (v == -std::numeric_limits<double>::infinity()) throw NumericalError("energy evaluated to -infinity");
}

Energy& Energy::operator+=(const Energy& o) {
  if (is_infinite() || o.is_infinite()) {
    v_ = std::numeric_limits<double>::infinity();
    return *this;
  }
  *this = Energy(v_ + o.v_);
  return *this;
}

Energy operator-(const Energy& a, const Energy& b) {
  if (b.is_infinite()) throw NumericalError("cannot subtract an infinite energy");
  if (a.is_infinite()) return a;
  return Energy(a.v_ - b.v_);
}

Energy operator*(double beta, const Energy& e) {
  if (!(beta >= 0.0)) throw NumericalError("energy scale must be >= 0");
  if (e.is_infinite()) return e;
  return Energy(beta * e.v_);
}

Energy PairModel::energy(const Configuration& gamma) const {
  Energy h;
  const auto pts = gamma.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    h += self(pts[i]);
    for (std::size_t j = 0; j < i; ++j) {
      h += pair(pts[i], pts[j]);
      if (h.is_infinite()) return h;
    }
  }
  return h;
}

Energy PairModel::delta_add(const PointView& others, const MarkedPoint& p) const {
  Energy h = self(p);
  others.for_each([&](const MarkedPoint& q) {
    if (h.is_infinite()) return;
    const Energy e = pair(p, q);
    if (e.is_infinite() || e.value() != 0.0) h += e;
  });
  return h;
}

QuermassModel::QuermassModel(double a1, double a2, double a3) : a1_(a1), a2_(a2), a3_(a3) {
  if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3))
    throw ConfigError("Quermass coefficients must be finite");
}

json QuermassModel::params() const { return json{{"alpha", {a1_, a2_, a3_}}}; }

double QuermassModel::evaluate(const DiscSystem& discs) const {
  if (discs.empty()) return 0.0;
  const UnionMeasures m = measure_union(discs);
  return a1_ * m.area + a2_ * m.perimeter + a3_ * m.euler;
}

namespace {

Disc grain(const MarkedPoint& p) { return {p.x[0], p.x[1], p.mark_norm}; }

void require_plane(int dim) {
  if (dim != 2) throw PreconditionError("the Quermass model is defined in dimension 2 only");
}

// Slack on the grain-contact test so that perturbed near-tangencies are always included.
constexpr double kContactSlack = 1e-6;

}  // namespace

Energy QuermassModel::energy(const Configuration& gamma) const {
  if (gamma.empty()) return {};
  require_plane(gamma.dim());
  DiscSystem ds;
  ds.reserve(gamma.size());
  for (const auto& p : gamma.points()) ds.push_back(grain(p));
  return Energy(evaluate(ds));
}

Energy QuermassModel::delta_add(const PointView& others, const MarkedPoint& p) const {
  // By inclusion-exclusion only grains meeting the new grain change the functionals.
  DiscSystem touching;
  others.for_each([&](const MarkedPoint& q) {
    if (distance(p.x, q.x) <= p.mark_norm + q.mark_norm + kContactSlack) touching.push_back(grain(q));
  });
  const double before = evaluate(touching);
  touching.push_back(grain(p));
  return Energy(evaluate(touching) - before);
}

Energy HardSphereModel::pair(const MarkedPoint& p, const MarkedPoint& q) const {
  if (distance(p.x, q.x) < p.mark_norm + q.mark_norm) return Energy::infinite();
  return {};
}

NonNegPairModel::NonNegPairModel(Kind kind, double c, double p) : kind_(kind), c_(c), p_(p) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("pair potential scale must be finite and >= 0");
  if (kind == Kind::power && (!(p > 0.0) || !std::isfinite(p))) throw ConfigError("pair potential exponent must be > 0");
}

json NonNegPairModel::params() const {
  if (kind_ == Kind::constant) return json{{"phi", "constant"}, {"c", c_}};
  return json{{"phi", "power"}, {"c", c_}, {"p", p_}};
}

double NonNegPairModel::phi(double u) const {
  if (u <= 0.0) return 0.0;
  return kind_ == Kind::constant ? c_ : c_ * std::pow(u, p_);
}

Energy NonNegPairModel::pair(const MarkedPoint& p, const MarkedPoint& q) const {
  const double u = distance(p.x, q.x);
  if (u > p.mark_norm + q.mark_norm) return {};
  return Energy(phi(u));
}

double lj_pair(double u) {
  if (!(u > 0.0)) throw ConfigError("Lennard-Jones distance must be > 0");
  const double s6 = std::pow(1.5 / u, 6);
  return 16.0 * (s6 * s6 - s6);
}

DiffusionModel::DiffusionModel(double a0, double path_cap) : a0_(a0), cap_(path_cap) {
  if (!(a0 >= 0.0) || !std::isfinite(a0)) throw ConfigError("security distance a0 must be >= 0");
  if (!(path_cap > 0.0)) throw ConfigError("path cap must be > 0");
}

json DiffusionModel::params() const { return json{{"a0", a0_}, {"path_cap", cap_}}; }

Energy DiffusionModel::self(const MarkedPoint& p) const { return Energy(-1.0 - std::pow(p.mark_norm, 2.5)); }

double DiffusionModel::path_term(const Mark& m1, const Mark& m2) const {
  if (m1.kind() != Mark::Kind::path || m2.kind() != Mark::Kind::path)
    throw PreconditionError("the diffusion model needs path marks");
  const auto& a = m1.path_data().samples;
  const auto& b = m2.path_data().samples;
  if (a.size() != b.size()) throw PreconditionError("path marks on different time grids");
  const std::size_t k = a.size() - 1;
  auto g = [&](std::size_t i) {
    const double dx = a[i][0] - b[i][0], dy = a[i][1] - b[i][1];
    return std::min(dx * dx + dy * dy, cap_);
  };
  double s = 0.5 * (g(0) + g(k));
  for (std::size_t i = 1; i < k; ++i) s += g(i);
  return s / static_cast<double>(k);
}

Energy DiffusionModel::pair(const MarkedPoint& p, const MarkedPoint& q) const {
  const double u = distance(p.x, q.x);
  if (u > a0_ + p.mark_norm + q.mark_norm) return {};
  return Energy(lj_pair(u) + path_term(p.mark, q.mark));
}

ScaledModel::ScaledModel(std::shared_ptr<const EnergyModel> base, double beta) : base_(std::move(base)), beta_(beta) {
  if (!base_) throw ConfigError("null base model");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("scale must be finite and >= 0");
}

json ScaledModel::params() const { return json{{"base", base_->params()}, {"beta", beta_}}; }

std::shared_ptr<const EnergyModel> make_model(const json& j) {
  try {
    const auto id = j.at("id").get<std::string>();
    if (id == "poisson") {
      check_keys(j, {"id"}, "model");
      return std::make_shared<PoissonModel>();
    }
    if (id == "quermass") {
      check_keys(j, {"id", "alpha"}, "model");
      const auto a = j.at("alpha").get<std::vector<double>>();
      if (a.size() != 3) throw ConfigError("quermass alpha must have three entries");
      return std::make_shared<QuermassModel>(a[0], a[1], a[2]);
    }
    if (id == "hardcore") {
      check_keys(j, {"id"}, "model");
      return std::make_shared<HardSphereModel>();
    }
    if (id == "nonnegpair") {
      check_keys(j, {"id", "phi", "c", "p"}, "model");
      const auto kind = j.value("phi", std::string("constant"));
      if (kind == "constant") return std::make_shared<NonNegPairModel>(NonNegPairModel::Kind::constant, j.value("c", 1.0));
      if (kind == "power")
        return std::make_shared<NonNegPairModel>(NonNegPairModel::Kind::power, j.value("c", 1.0), j.value("p", 1.0));
      throw ConfigError("unknown pair potential '" + kind + "'");
    }
    if (id == "diffusion") {
      check_keys(j, {"id", "a0", "path_cap"}, "model");
      return std::make_shared<DiffusionModel>(j.value("a0", 1.5), j.value("path_cap", 1e6));
    }
    throw ConfigError("unknown model id '" + id + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model block: ") + e.what());
  }
}

double interaction_range(const Configuration& gamma, const Window& lambda, int t, int d, double delta) {
  return 2.0 * l_range(t, d, delta) + 2.0 * mark_sup(restrict(gamma, lambda)) + 1.0;
}

Energy interaction_energy(const EnergyModel& model, std::span<const MarkedPoint> inner,
                          std::span<const MarkedPoint> env) {
  Energy h;
  for (std::size_t k = 0; k < inner.size(); ++k) {
    h += model.delta_add(PointView{env, inner.first(k)}, inner[k]);
    if (h.is_infinite()) return h;
  }
  return h;
}

namespace {

void require_inside(const Configuration& gamma, const Window& lambda) {
  for (const auto& p : gamma.points())
    if (!lambda.contains(p.x)) throw PreconditionError("configuration is not supported in the window");
}

}  // namespace

Energy conditional_energy(const EnergyModel& model, const Configuration& gamma, const Configuration& xi,
                          const Window& lambda, int t, double delta) {
  require_inside(gamma, lambda);
  if (!is_tempered(xi, t, xi.dim(), delta).tempered)
    throw PreconditionError("environment is not in the tempered class M^" + std::to_string(t));
  const double r = interaction_range(gamma, lambda, t, gamma.dim(), delta);
  const Configuration env = restrict(restrict_complement(xi, lambda), dilate(lambda, r));
  return interaction_energy(model, gamma.points(), env.points());
}

Energy conditional_energy_untruncated(const EnergyModel& model, const Configuration& gamma, const Configuration& xi,
                                      const Window& lambda) {
  require_inside(gamma, lambda);
  const Configuration env = restrict_complement(xi, lambda);
  return interaction_energy(model, gamma.points(), env.points());
}

AdditivityResult additivity_check(const EnergyModel& model, const Configuration& gamma, const Configuration& gamma_alt,
                                  const Configuration& xi, const Window& lambda, const Window& delta_window) {
  require_inside(gamma, lambda);
  require_inside(gamma_alt, lambda);
  const Configuration outside = restrict_complement(xi, lambda);
  const Configuration ring = restrict(outside, delta_window);
  const Configuration far = restrict_complement(outside, delta_window);
  AdditivityResult res;
  auto gap = [&](const Configuration& g, bool& finite) {
    const Configuration inner_delta = merge(g, ring);
    const Energy hd = interaction_energy(model, inner_delta.points(), far.points());
    const Energy hl = interaction_energy(model, g.points(), outside.points());
    finite = hd.is_finite() && hl.is_finite();
    if (!finite) return 0.0;
    res.scale = std::max({res.scale, std::abs(hd.value()), std::abs(hl.value())});
    return hd.value() - hl.value();
  };
  bool f1 = false, f2 = false;
  const double g1 = gap(gamma, f1);
  const double g2 = gap(gamma_alt, f2);
  res.comparable = f1 && f2;
  res.residual = res.comparable ? g1 - g2 : 0.0;
  return res;
}

}  // namespace gibbs
