#include <doctest.h>

#include <cmath>
#include <limits>

#include "gibbs/core.hpp"
#include "gibbs/energy.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/marks.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/tempered.hpp"

using namespace gibbs;

namespace {

MarkedPoint pt(double x, double y, double r) { return MarkedPoint({x, y, 0.0}, Mark::radius(r)); }

const LangevinSpec kPaths{Potential{1.0, 2.0}, 64};

MarkedPoint path_pt(double x, double y, Rng& rng) {
  return MarkedPoint({x, y, 0.0}, Mark::path(sample_langevin_path(kPaths, rng)));
}

Configuration radius_config(Rng& rng, std::size_t n, double lo, double hi, double rmax) {
  std::vector<MarkedPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(pt(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(0, rmax)));
  return Configuration(2, std::move(pts));
}

Configuration path_config(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<MarkedPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(path_pt(rng.uniform(lo, hi), rng.uniform(lo, hi), rng));
  return Configuration(2, std::move(pts));
}

// Poisson points in [-half, half)^2 outside the window, with path marks.
Configuration path_env(Rng& rng, const Window& lambda, double half, double intensity) {
  const auto n = rng.poisson(intensity * 4 * half * half);
  std::vector<MarkedPoint> pts;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Location x{rng.uniform(-half, half), rng.uniform(-half, half), 0.0};
    if (!lambda.contains(x)) pts.push_back(MarkedPoint(x, Mark::path(sample_langevin_path(kPaths, rng))));
  }
  return Configuration(2, std::move(pts));
}

double trapezoid_path_term(const PathData& a, const PathData& b) {
  const std::size_t k = a.samples.size() - 1;
  double s = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double dx = a.samples[i][0] - b.samples[i][0], dy = a.samples[i][1] - b.samples[i][1];
    s += (i == 0 || i == k ? 0.5 : 1.0) * (dx * dx + dy * dy);
  }
  return s / static_cast<double>(k);
}

std::vector<std::shared_ptr<const EnergyModel>> radius_models() {
  return {std::make_shared<PoissonModel>(), std::make_shared<QuermassModel>(1.0, -0.5, 0.3),
          std::make_shared<HardSphereModel>(), std::make_shared<NonNegPairModel>(NonNegPairModel::Kind::power, 2.0, 1.5)};
}

}  // namespace

TEST_CASE("energy arithmetic") {
  const Energy inf = Energy::infinite();
  CHECK((inf + Energy(-5.0)).is_infinite());
  CHECK((Energy(1.0) + inf).is_infinite());
  CHECK((inf - Energy(3.0)).is_infinite());
  CHECK_THROWS_AS(inf - inf, NumericalError);
  CHECK_THROWS_AS(Energy(1.0) - inf, NumericalError);
  CHECK((0.0 * inf).is_infinite());
  CHECK((2.0 * Energy(1.5)).value() == 3.0);
  CHECK_THROWS_AS(Energy(std::nan("")), NumericalError);
  CHECK_THROWS_AS(Energy(-std::numeric_limits<double>::infinity()), NumericalError);
  CHECK_THROWS_AS(-1.0 * Energy(1.0), NumericalError);
  CHECK(Energy().value() == 0.0);
}

TEST_CASE("empty configuration has zero energy") {
  for (const auto& m : radius_models()) CHECK(m->energy(Configuration(2)) == Energy(0.0));
  CHECK(DiffusionModel().energy(Configuration(2)) == Energy(0.0));
}

TEST_CASE("energy examples") {
  const QuermassModel area(1, 0, 0);
  CHECK(area.energy(Configuration(2, {pt(0, 0, 1)})).value() == doctest::Approx(M_PI).epsilon(1e-12));

  const HardSphereModel hs;
  CHECK(hs.energy(Configuration(2, {pt(0, 0, 1), pt(1.5, 0, 1)})).is_infinite());
  CHECK(hs.energy(Configuration(2, {pt(0, 0, 1), pt(2.5, 0, 1)})) == Energy(0.0));

  const NonNegPairModel c(NonNegPairModel::Kind::constant, 2.0);
  CHECK(c.energy(Configuration(2, {pt(0, 0, 1), pt(1.5, 0, 1), pt(9, 9, 0.1)})).value() == 2.0);
  CHECK(c.energy(Configuration(2, {pt(0, 0, 1), pt(2.5, 0, 1)})).value() == 0.0);

  CHECK_THROWS_AS(area.energy(Configuration(3, {MarkedPoint({0, 0, 0}, Mark::radius(1))})), PreconditionError);
}

TEST_CASE("model blocks") {
  CHECK(make_model({{"id", "quermass"}, {"alpha", {1, 2, 3}}})->id() == "quermass");
  CHECK(make_model({{"id", "diffusion"}})->interaction_pad() == 1.5);
  CHECK(make_model({{"id", "hardcore"}})->may_be_infinite());
  CHECK_THROWS_AS(make_model({{"id", "quermass"}, {"alpha", {1, 2}}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"id", "nope"}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"id", "hardcore"}, {"extra", 1}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"alpha", 1}}), ConfigError);
  CHECK_THROWS_AS(make_model({{"id", "nonnegpair"}, {"c", -1.0}}), ConfigError);
}

TEST_CASE("Lennard-Jones values") {
  CHECK(lj_pair(1.5) == 0.0);
  const double u = 1.5 * std::pow(2.0, 1.0 / 6.0);
  CHECK(std::abs(lj_pair(u) + 4.0) < 1e-12);
  CHECK(lj_pair(1e3) < 0.0);
  CHECK(lj_pair(1e3) > -1e-12);
  CHECK(lj_pair(1.0) > 0.0);
  for (double v = 1.5; v < 10; v += 0.01) CHECK(lj_pair(v) <= 0.0);
  CHECK_THROWS_AS(lj_pair(0.0), ConfigError);
  CHECK_THROWS_AS(lj_pair(-1.0), ConfigError);

  const auto f = lj_floor();
  CHECK(std::abs(f.u_min - u) < 1e-9);
  CHECK(std::abs(f.phi_min + 4.0) < 1e-9);
  for (double v = 0.8; v < 5; v += 0.001) CHECK(lj_pair(v) >= f.phi_min - 1e-12);
}

TEST_CASE("diffusion pair term and cutoff") {
  Rng rng(21);
  const DiffusionModel model;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = path_pt(0, 0, rng);
    const auto q = path_pt(rng.uniform(0.5, 6), 0, rng);
    const double u = q.x[0];
    const double reach = 1.5 + p.mark_norm + q.mark_norm;
    const Energy e = model.pair(p, q);
    if (u > reach) {
      CHECK(e.value() == 0.0);
    } else {
      const double expect = lj_pair(u) + trapezoid_path_term(p.mark.path_data(), q.mark.path_data());
      CHECK(e.value() == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(model.self(p).value() == doctest::Approx(-1 - std::pow(p.mark_norm, 2.5)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(model.pair(pt(0, 0, 1), pt(1, 0, 1)), PreconditionError);
}

TEST_CASE("interaction range examples") {
  const Window lam = Window::cube(2, 1);
  CHECK(interaction_range(Configuration(2, {pt(0, 0, 0)}), lam, 1, 2, 1) == doctest::Approx(9.0));
  CHECK(interaction_range(Configuration(2, {pt(0, 0, 0.5)}), lam, 1, 2, 1) == doctest::Approx(10.0));
  CHECK(interaction_range(Configuration(2), lam, 1, 2, 1) == doctest::Approx(9.0));
  CHECK(interaction_range(Configuration(2), lam, 3, 2, 1) == doctest::Approx(25.0));
  // marks outside the window do not count
  CHECK(interaction_range(Configuration(2, {pt(5, 5, 3)}), lam, 1, 2, 1) == doctest::Approx(9.0));
}

TEST_CASE("conditional energy examples") {
  Rng rng(22);
  const DiffusionModel model;
  const Window lam = Window::cube(2, 1);
  const auto x1 = path_pt(0.2, 0.1, rng);
  const Configuration g(2, {x1});
  CHECK(conditional_energy(model, g, Configuration(2), lam, 1, 1.0) == model.energy(g));

  const auto x2 = path_pt(1.6, 0.1, rng);
  REQUIRE(distance(x1.x, x2.x) <= 1.5 + x1.mark_norm + x2.mark_norm);
  const Configuration xi(2, {x2});
  const double t = is_tempered(xi, 1, 2, 1).minimal_t;
  const double expect = -1 - std::pow(x1.mark_norm, 2.5) + lj_pair(1.4) +
                        trapezoid_path_term(x1.mark.path_data(), x2.mark.path_data());
  CHECK(conditional_energy(model, g, xi, lam, static_cast<int>(t), 1.0).value() ==
        doctest::Approx(expect).epsilon(1e-12));

  // points inside the window are not environment
  const Configuration inside(2, {path_pt(0.5, 0.5, rng)});
  CHECK(conditional_energy(model, g, inside, lam, is_tempered(inside, 1, 2, 1).minimal_t, 1.0) == model.energy(g));

  CHECK_THROWS_AS(conditional_energy(model, Configuration(2, {path_pt(3, 3, rng)}), Configuration(2), lam, 1, 1.0),
                  PreconditionError);
  const Configuration wild(2, {pt(0.5, 0, 5.0)});
  CHECK_THROWS_AS(conditional_energy(model, g, wild, lam, 1, 1.0), PreconditionError);
}

TEST_CASE("conditional energy ignores the environment beyond the range") {
  Rng rng(23);
  const DiffusionModel model;
  const Window lam = Window::cube(2, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = path_config(rng, 1 + rng.below(4), -1, 1);
    const auto xi = path_env(rng, lam, 12, 0.3);
    const int t = is_tempered(xi, 1, 2, 1).minimal_t;
    const double r = interaction_range(g, lam, t, 2, 1);
    const Energy base = conditional_energy(model, g, xi, lam, t, 1.0);
    CHECK(base == conditional_energy_untruncated(model, g, restrict(xi, dilate(lam, r)), lam));

    std::vector<MarkedPoint> far(xi.points().begin(), xi.points().end());
    for (int k = 0; k < 5; ++k) {
      const double ang = rng.uniform(0, 2 * M_PI), rad = r + 1 + 1.5 * rng.uniform(0, 40);
      far.push_back(path_pt(rad * std::cos(ang), rad * std::sin(ang), rng));
    }
    const Configuration xi2(2, std::move(far));
    REQUIRE(is_tempered(xi2, t, 2, 1).tempered);
    const Energy moved = conditional_energy(model, g, xi2, lam, t, 1.0);
    CHECK(moved == base);
    CHECK(conditional_energy_untruncated(model, g, xi2, lam) == base);
  }
}

TEST_CASE("conditional energy with empty environment is the energy") {
  Rng rng(24);
  const Window lam = Window::cube(2, 2);
  for (const auto& m : radius_models())
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = radius_config(rng, rng.below(8), -2, 2, 0.8);
      const Energy a = conditional_energy(*m, g, Configuration(2), lam, 1, 1.0);
      const Energy b = m->energy(g);
      if (b.is_infinite())
        CHECK(a.is_infinite());
      else
        CHECK(a.value() == doctest::Approx(b.value()).epsilon(1e-9));
    }
}

TEST_CASE("incremental energy telescopes to the energy") {
  Rng rng(25);
  for (const auto& m : radius_models())
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = radius_config(rng, rng.below(12), 0, 5, 1.0);
      const Energy a = interaction_energy(*m, g.points(), {});
      const Energy b = m->energy(g);
      if (b.is_infinite())
        CHECK(a.is_infinite());
      else
        CHECK(std::abs(a.value() - b.value()) <= 1e-9 * std::max(1.0, std::abs(b.value())));
    }
  const DiffusionModel dm;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = path_config(rng, rng.below(10), 0, 4);
    CHECK(interaction_energy(dm, g.points(), {}).value() ==
          doctest::Approx(dm.energy(g).value()).epsilon(1e-9));
  }
}

TEST_CASE("translation invariance") {
  Rng rng(26);
  for (const auto& m : radius_models())
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = radius_config(rng, rng.below(10), 0, 4, 1.0);
      const Location v{rng.uniform(-100, 100), rng.uniform(-100, 100), 0.0};
      const Energy a = m->energy(g), b = m->energy(g.shifted(v));
      CHECK(a.is_infinite() == b.is_infinite());
      if (a.is_finite()) CHECK(std::abs(a.value() - b.value()) <= 1e-9 * std::max(1.0, std::abs(a.value())));
    }
  const DiffusionModel dm;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = path_config(rng, rng.below(8), 0, 4);
    const Location v{rng.uniform(-50, 50), rng.uniform(-50, 50), 0.0};
    CHECK(dm.energy(g.shifted(v)).value() == doctest::Approx(dm.energy(g).value()).epsilon(1e-9));
  }
}

TEST_CASE("additivity of conditional energies") {
  Rng rng(27);
  const Window lam = Window::cube(2, 1), del = Window::cube(2, 3);
  // free boundary: exterior only inside Delta
  for (const auto& m : radius_models())
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = radius_config(rng, rng.below(4), -1, 1, 0.5);
      const auto h = radius_config(rng, rng.below(4), -1, 1, 0.5);
      auto ring = restrict_complement(radius_config(rng, 6, -3, 3, 0.5), lam);
      const auto res = additivity_check(*m, g, h, ring, lam, del);
      if (res.comparable) CHECK(std::abs(res.residual) <= 1e-9 * res.scale);
    }
  const auto zero = additivity_check(PoissonModel(), radius_config(rng, 3, -1, 1, 1), radius_config(rng, 2, -1, 1, 1),
                                     radius_config(rng, 10, -8, 8, 1), lam, del);
  CHECK(zero.residual == 0.0);

  const DiffusionModel dm;
  for (int seed = 0; seed < 20; ++seed) {
    Rng r = rng.split(static_cast<std::uint64_t>(seed));
    const auto g = path_config(r, 1 + r.below(4), -1, 1);
    const auto h = path_config(r, 1 + r.below(4), -1, 1);
    const auto xi = path_env(r, lam, 10, 0.3);
    const auto res = additivity_check(dm, g, h, xi, lam, del);
    REQUIRE(res.comparable);
    CHECK(std::abs(res.residual) <= 1e-9 * res.scale);
  }

  const auto inf = additivity_check(HardSphereModel(), Configuration(2, {pt(0, 0, 1), pt(0.5, 0, 1)}),
                                    Configuration(2), Configuration(2), lam, del);
  CHECK_FALSE(inf.comparable);
}

TEST_CASE("stability audits") {
  Rng rng(28);
  auto small = [](Rng& r) { return radius_config(r, r.below(15), 0, 4, 1.0); };
  const NonNegPairModel np(NonNegPairModel::Kind::constant, 1.0);
  CHECK(stability_audit(np, small, 1000, 1.0, rng).c_hat <= 0.0);
  const auto hs = stability_audit(HardSphereModel(), small, 1000, 1.0, rng);
  CHECK(hs.c_hat <= 0.0);
  CHECK(hs.infinite > 0);
  CHECK(hs.trials == 1000);

  // |area| <= pi sum m^2, perimeter <= pi sum (1 + m^2), |chi| <= 2n
  const QuermassModel q(1.0, -0.5, 0.3);
  const double bound = M_PI * 1.0 + M_PI * 0.5 + 2 * 0.3;
  auto crowded = [](Rng& r) { return radius_config(r, r.below(30), 0, 3, 1.2); };
  const auto qa = stability_audit(q, crowded, 1000, 1.0, rng, true);
  CHECK(qa.c_hat <= bound);
  CHECK(qa.c_hat > 0.0);

  const DiffusionModel dm;
  auto gen = [](Rng& r) { return path_config(r, r.below(10), 0, 3); };
  const auto a = stability_audit(dm, gen, 1000, 1.0, rng);
  const auto b = stability_audit(dm, gen, 4000, 1.0, rng);
  CHECK(std::isfinite(a.c_hat));
  CHECK(std::isfinite(b.c_hat));
  CHECK(b.c_hat <= 2 * std::max(a.c_hat, 1.0));

  // pair terms never go below the Lennard-Jones floor
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = gen(rng);
    double self = 0.0;
    for (const auto& p : g.points()) self += dm.self(p).value();
    const double pairs = dm.energy(g).value() - self;
    const double n = static_cast<double>(g.size());
    CHECK(pairs >= -4.0 * n * (n - 1) / 2 - 1e-9);
  }
}

TEST_CASE("local stability against the interacting environment") {
  Rng rng(29);
  const DiffusionModel dm;
  const Window lam = Window::cube(2, 1);
  double c_local = -INFINITY;
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = path_config(rng, 1 + rng.below(5), -1, 1);
    const auto xi = path_env(rng, lam, 10, 0.4);
    const int t = is_tempered(xi, 1, 2, 1).minimal_t;
    const double h = conditional_energy(dm, g, xi, lam, t, 1.0).value();
    const double tame = tame_statistic(g, 1.0);
    c_local = std::max(c_local, -h / tame);

    // environment points within reach of some point of g
    const auto env = restrict_complement(xi, lam);
    double interacting = 0.0;
    for (const auto& y : env.points()) {
      bool hit = false;
      for (const auto& x : g.points()) hit = hit || distance(x.x, y.x) <= 1.5 + x.mark_norm + y.mark_norm;
      interacting += hit ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(g.size());
    CHECK(-h <= -dm.energy(g).value() + 4.0 * n * interacting + 1e-9);

    // interacting points lie in B(0, 2k + 1) for k = max(l(t), reach), so the tempered count bounds them
    const double reach = std::sqrt(2.0) + 1.5 + mark_sup(g);
    const double k = std::max(l_range(t, 2, 1), std::ceil(reach) + 1);
    CHECK(interacting <= tempered_count_bound(t, 2 * k + 1, 2));
    CHECK(-h / tame <= -dm.energy(g).value() / tame + 4.0 * tempered_count_bound(t, 2 * k + 1, 2) + 1e-9);
  }
  CHECK(std::isfinite(c_local));

  auto inner = [](Rng& r) { return path_config(r, 1 + r.below(5), -1, 1); };
  auto none = [](Rng&) { return Configuration(2); };
  Rng a(30), b(30);
  const auto loc = local_stability_audit(dm, lam, 1, inner, none, 500, 1.0, a);
  const auto glob = stability_audit(dm, inner, 500, 1.0, b);
  CHECK(loc.c_hat == doctest::Approx(glob.c_hat).epsilon(1e-12));
  const NonNegPairModel np(NonNegPairModel::Kind::constant, 1.0);
  auto env_r = [lam](Rng& r) { return restrict_complement(radius_config(r, 5, -4, 4, 0.5), lam); };
  auto inner_r = [](Rng& r) { return radius_config(r, 1 + r.below(4), -1, 1, 0.5); };
  CHECK(local_stability_audit(np, lam, 8, inner_r, env_r, 500, 1.0, rng).c_hat <= 0.0);
}

TEST_CASE("tempered count bound") {
  CHECK(tempered_count_bound(2, 3.2, 2) == 32.0);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = radius_config(rng, rng.below(50), -10, 10, 2.0);
    const int t = is_tempered(g, 1, 2, 1).minimal_t;
    for (double r : {1.0, 2.5, 7.0, 15.0}) {
      double c = 0.0;
      for (const auto& p : g.points()) c += norm(p.x) <= r ? 1.0 : 0.0;
      CHECK(c <= tempered_count_bound(t, r, 2));
    }
  }
}
