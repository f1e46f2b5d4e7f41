#include <doctest.h>

#include <cmath>
#include <set>

#include "gibbs/energy.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/estimators.hpp"
#include "gibbs/sampler.hpp"
#include "gibbs/stats.hpp"

using namespace gibbs;

namespace {

std::vector<Configuration> poisson_draws(const Window& w, double z, const MarkLaw& law, std::size_t n, Rng& rng) {
  std::vector<Configuration> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_poisson(w, z, law, rng));
  return out;
}

std::size_t count_in(const Configuration& g, const Window& w) {
  std::size_t c = 0;
  for (const auto& p : g.points()) c += w.contains(p.x) ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("partition estimate with zero energy") {
  Rng rng(71);
  const auto est = partition_estimate(PoissonModel(), Window::cube(2, 1), 2.0, RadiusLaw::uniform(1), 1000, rng);
  CHECK(est.z_hat == 1.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.log_z == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(est.all_infinite);
  CHECK_THROWS_AS(partition_estimate(PoissonModel(), Window::cube(2, 1), 2.0, RadiusLaw::uniform(1), 999, rng),
                  ConfigError);
}

TEST_CASE("partition estimate respects the empty-configuration floor") {
  Rng rng(72);
  const Window w = Window::cube(2, 1);
  const MarkLaw law = RadiusLaw::uniform(0.8);
  const std::vector<std::shared_ptr<const EnergyModel>> models{
      std::make_shared<HardSphereModel>(), std::make_shared<NonNegPairModel>(NonNegPairModel::Kind::constant, 3.0),
      std::make_shared<QuermassModel>(1.0, 0.5, 0.2), std::make_shared<QuermassModel>(-0.5, 0.2, 0.0)};
  for (const auto& m : models)
    for (double z : {0.5, 2.0}) {
      const auto est = partition_estimate(*m, w, z, law, 5000, rng);
      CHECK(est.z_hat >= std::exp(-z * w.volume()) * (1 - 3 * est.std_error));
    }
}

TEST_CASE("partition estimate on hard rods") {
  // Rods of length 1.6 on [0, 3): Z = exp(-zL) (1 + zL + z^2/2 I2), I2 = (L - 1.6)^2
  const double L = 3.0, z = 1.0, i2 = (L - 1.6) * (L - 1.6);
  const double exact = std::exp(-z * L) * (1 + z * L + 0.5 * z * z * i2);
  Rng rng(73);
  const auto est = partition_estimate(HardSphereModel(), Window::box(1, {0, 0, 0}, {L, 0, 0}), z,
                                      RadiusLaw::point_mass(0.8), 100000, rng);
  CHECK(std::abs(est.z_hat - exact) <= 3 * est.std_error);
  CHECK(std::abs(est.log_z - std::log(exact)) <= 3 * est.log_z_se);

  const auto jammed = partition_estimate(HardSphereModel(), Window::box(2, {0, 0, 0}, {1, 1, 0}), 60.0,
                                         RadiusLaw::point_mass(0.5), 1000, rng);
  CHECK(jammed.all_infinite);
  CHECK(jammed.z_hat == 0.0);
}

TEST_CASE("thermodynamic integration agrees with importance sampling") {
  Rng rng(74);
  const auto model = std::make_shared<NonNegPairModel>(NonNegPairModel::Kind::power, 1.0, 1.0);
  const Window w = Window::cube(2, 1);
  const MarkLaw law = RadiusLaw::uniform(0.5);
  const auto is = partition_estimate(*model, w, 1.5, law, 50000, rng);
  ThermoSettings ts;
  ts.nodes = 6;
  ts.chain.burn_in = 5000;
  ts.chain.thin = 20;
  ts.chain.steps = ts.chain.burn_in + 4000 * ts.chain.thin;
  const auto ti = log_partition_ti(model, w, 1.5, law, ts, rng);
  CHECK(ti.betas.size() == 6);
  CHECK(std::abs(ti.log_z - is.log_z) <= 4 * std::hypot(ti.std_error, is.log_z_se));

  CHECK_THROWS_AS(log_partition_ti(std::make_shared<HardSphereModel>(), w, 1.0, law, ts, rng), PreconditionError);
  const auto zero = log_partition_ti(std::make_shared<PoissonModel>(), w, 1.0, law, ts, rng);
  CHECK(zero.log_z == 0.0);
}

TEST_CASE("J statistic") {
  Rng rng(75);
  const Window w = Window::cube(2, 1.5);
  const MarkLaw law = RadiusLaw::uniform(1.0);
  const auto pois = j_statistic(poisson_draws(w, 1.2, law, 4000, rng), 1.0);
  CHECK(std::abs(pois.mean / w.volume() - 1.2 * 1.25) <= 3 * pois.std_error / w.volume());

  std::vector<Configuration> hard;
  const HardSphereModel hs;
  const MarkLaw small = RadiusLaw::uniform(0.3);
  for (int i = 0; i < 2000; ++i) hard.push_back(rejection_sample(hs, w, 1.2, small, rng));
  const auto jh = j_statistic(hard, 1.0);
  const double poisson_value = 1.2 * w.volume() * (1 + std::pow(0.3, 3) / 4);
  CHECK(jh.mean <= poisson_value + 3 * jh.std_error);

  std::vector<Configuration> empties(150, Configuration(2));
  CHECK(j_statistic(empties, 1.0).mean == 0.0);
  CHECK_THROWS_AS(j_statistic(std::vector<Configuration>(99, Configuration(2)), 1.0), ConfigError);
}

TEST_CASE("relative entropy") {
  Rng rng(76);
  const Window w = Window::cube(2, 1);
  const MarkLaw law = RadiusLaw::uniform(0.4);
  const auto zero = relative_entropy_estimate(PoissonModel(), w, poisson_draws(w, 1.0, law, 200, rng), 0.0, 0.0);
  CHECK(zero.entropy == 0.0);
  CHECK(zero.per_volume == 0.0);

  const HardSphereModel hs;
  std::vector<Configuration> samples;
  for (int i = 0; i < 5000; ++i) samples.push_back(rejection_sample(hs, w, 0.8, law, rng));
  const auto pe = partition_estimate(hs, w, 0.8, law, 50000, rng);
  const auto r = relative_entropy_estimate(hs, w, samples, pe.log_z, pe.log_z_se);
  CHECK(r.consistent);
  CHECK(r.entropy >= -3 * r.std_error);
  CHECK(r.per_volume == doctest::Approx(r.entropy / 4.0));
  CHECK(r.std_error >= 0.0);
  // for a hard-core law the entropy is -log Z exactly: the energy is 0 on every sample
  CHECK(r.entropy == doctest::Approx(-pe.log_z).epsilon(1e-12));

  CHECK_THROWS_AS(relative_entropy_estimate(hs, w, {}, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(relative_entropy_estimate(hs, w, samples, std::nan(""), 0.0), PreconditionError);
}

TEST_CASE("specific entropy curve") {
  Rng rng(77);
  EntropyCurveSettings s;
  s.n_list = {1, 2};
  s.z = 1.0;
  s.chain.burn_in = 2000;
  s.chain.thin = 20;
  s.chain.steps = s.chain.burn_in + 500 * s.chain.thin;
  s.thermo.nodes = 4;
  s.thermo.chain = s.chain;
  const MarkLaw law = RadiusLaw::uniform(0.5);

  const auto flat = specific_entropy_curve(std::make_shared<PoissonModel>(), law, s, rng);
  REQUIRE(flat.size() == 2);
  for (const auto& row : flat) CHECK(row.entropy.per_volume == 0.0);

  const auto rows = specific_entropy_curve(std::make_shared<QuermassModel>(0.2, 0.1, 0.05), law, s, rng);
  for (const auto& row : rows) {
    CHECK(row.entropy.entropy >= -3 * row.entropy.std_error);
    CHECK(row.entropy.per_volume <= row.ceiling + 3 * std::hypot(row.entropy.per_volume_se, row.ceiling_se));
    CHECK(row.j.n == 500);
  }

  s.n_list = {2, 1};
  CHECK_THROWS_AS(specific_entropy_curve(std::make_shared<PoissonModel>(), law, s, rng), ConfigError);
}

TEST_CASE("empirical field draw") {
  Rng rng(78);
  const MarkLaw law = RadiusLaw::point_mass(0.1);
  // blocks filled only on their left half, so unshifted windows would see very different counts
  const BlockSampler lopsided = [&law](Rng& r) {
    return sample_poisson(Window::box(2, {-1, -1, 0}, {0, 1, 0}), 2.0, law, r);
  };
  const Window a = Window::box(2, {0, 0, 0}, {1, 1, 0}), b = Window::box(2, {1, 0, 0}, {2, 1, 0});
  std::vector<double> ca(30, 0.0), cb(30, 0.0);
  std::set<double> shifts;
  for (int i = 0; i < 20000; ++i) {
    const auto d1 = empirical_field_draw(lopsided, 1, 2, a, rng);
    const auto d2 = empirical_field_draw(lopsided, 1, 2, b, rng);
    ca[std::min<std::size_t>(29, d1.config.size())] += 1;
    cb[std::min<std::size_t>(29, d2.config.size())] += 1;
    shifts.insert(d1.shift[0]);
    for (const auto& p : d1.config.points()) REQUIRE(a.contains(p.x));
  }
  CHECK(stats::chi_square_two_sample(ca, cb).p_value > 0.01);
  CHECK(shifts == std::set<double>{-1.0, 0.0});

  // n = 1 with a Poisson block law: Poisson counts with mean z |W|
  const BlockSampler pois = [&law](Rng& r) { return sample_poisson(Window::cube(2, 1), 1.5, law, r); };
  std::vector<double> tame;
  double in_unit = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const auto d = empirical_field_draw(pois, 1, 2, Window::cube(2, 1), rng);
    tame.push_back(tame_statistic(d.config, 1.0));
    in_unit += static_cast<double>(count_in(d.config, a));
  }
  const auto m = stats::mean_stderr(tame);
  CHECK(std::abs(m.mean - 4 * 1.5 * (1 + std::pow(0.1, 3))) <= 3 * m.std_error);
  CHECK(std::abs(in_unit / 20000 - 1.5) <= 3 * std::sqrt(1.5 / 20000));

  CHECK_THROWS_AS(empirical_field_draw(pois, 1, 2, Window::cube(2, 200), rng), ConfigError);
  CHECK_THROWS_AS(empirical_field_draw(pois, 0, 2, a, rng), ConfigError);
  CHECK_THROWS_AS(empirical_field_draw(pois, 1, 3, a, rng), ConfigError);
}

TEST_CASE("functional library") {
  const auto& lib = functional_library();
  CHECK(lib.size() == 10);
  std::set<std::string> ids;
  for (const auto& f : lib) ids.insert(f.id);
  CHECK(ids.size() == 10);

  Rng rng(79);
  const Window w = Window::cube(2, 0.5);
  for (int i = 0; i < 200; ++i) {
    const auto g = sample_poisson(Window::cube(2, 1), 20.0, RadiusLaw::uniform(0.5), rng);
    for (const auto& f : lib) {
      const double v = f.f(g, w);
      CHECK(v >= 0.0);
      CHECK(v <= 10.0);
      // locality: points outside the window do not matter
      CHECK(v == f.f(restrict(g, w), w));
    }
  }
  for (const auto& f : lib) {
    const double empty = f.f(Configuration(2), w);
    CHECK((f.id.rfind("empty", 0) == 0 ? empty == 1.0 : empty == 0.0));
  }
}

TEST_CASE("DLR residual for exact finite-volume laws") {
  Rng rng(80);
  const Window big = Window::cube(2, 1.5), inner = Window::cube(2, 0.5);
  const MarkLaw law = RadiusLaw::uniform(0.4);

  const PoissonModel zero;
  const auto pois = poisson_draws(big, 2.0, law, 300, rng);
  for (const auto& r : dlr_residual(pois, inner, rejection_kernel(zero, inner, 2.0, law), 100, rng)) CHECK(r.pass);

  const NonNegPairModel model(NonNegPairModel::Kind::constant, 1.5);
  std::vector<Configuration> outer;
  for (int i = 0; i < 400; ++i) outer.push_back(rejection_sample(model, big, 2.0, law, rng));
  const auto reps = dlr_residual(outer, inner, rejection_kernel(model, inner, 2.0, law), 100, rng);
  REQUIRE(reps.size() == 10);
  for (const auto& r : reps) {
    CHECK(r.pass);
    CHECK(r.residual >= 0.0);
    CHECK(r.n_outer == 400);
    CHECK(r.n_inner == 100);
  }

  ChainSettings cs;
  cs.burn_in = 2000;
  cs.thin = 20;
  const auto chained = dlr_residual(outer, inner, chain_kernel(model, inner, 2.0, law, cs), 100, rng);
  for (const auto& r : chained) CHECK(r.pass);

  CHECK_THROWS_AS(dlr_residual(outer, inner, rejection_kernel(model, inner, 2.0, law), 99, rng), ConfigError);
  CHECK_THROWS_AS(dlr_residual({outer[0]}, inner, rejection_kernel(model, inner, 2.0, law), 100, rng), ConfigError);
}
