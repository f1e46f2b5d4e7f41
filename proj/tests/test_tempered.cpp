#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gibbs/core.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/tempered.hpp"

using namespace gibbs;

namespace {

MarkedPoint pt(double x, double y, double r) { return MarkedPoint({x, y, 0.0}, Mark::radius(r)); }

// Points scattered over a disc of the given radius, marks occasionally large.
Configuration random_config(Rng& rng, int d, double radius) {
  const std::size_t n = rng.below(40);
  std::vector<MarkedPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Location x{};
    for (int k = 0; k < d; ++k) x[k] = rng.uniform(-radius, radius);
    const double m = rng.uniform() < 0.1 ? rng.uniform(0, 0.6 * radius) : rng.uniform(0, 1.5);
    pts.emplace_back(x, Mark::radius(m));
  }
  return Configuration(d, std::move(pts));
}

double max_mark_in_ball(const Configuration& g, double l) {
  double m = 0.0;
  for (const auto& p : g.points())
    if (norm(p.x) <= l) m = std::max(m, p.mark_norm);
  return m;
}

}  // namespace

TEST_CASE("l1 examples") {
  CHECK(l1(1, 0.5, 2, 1) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(l1(2, 0.5, 2, 2) == doctest::Approx(std::sqrt(32.0)).epsilon(1e-14));
  CHECK(l1(1, 1.0 - 1e-9, 2, 1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(l1(1, 1.0 - 1e-9, 3, 0.5) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK_THROWS_AS(l1(1, 1.0, 2, 1), ConfigError);
  CHECK_THROWS_AS(l1(1, 0.0, 2, 1), ConfigError);
  CHECK_THROWS_AS(l1(0, 0.5, 2, 1), ConfigError);
}

TEST_CASE("l_range examples") {
  CHECK(l_range(1, 2, 1) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(l_range(16, 2, 1) == doctest::Approx(64.0).epsilon(1e-14));
  CHECK(l_range(1, 1, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("is_tempered examples") {
  const Configuration empty(2);
  for (int t : {1, 2, 7}) CHECK(is_tempered(empty, t, 2, 1).tempered);
  CHECK(is_tempered(empty, 1, 2, 1).minimal_t == 1);

  const Configuration origin(2, {pt(0, 0, 1.0)});
  const auto a = is_tempered(origin, 2, 2, 1);
  CHECK(a.tempered);
  CHECK(a.minimal_t == 2);
  CHECK_FALSE(is_tempered(origin, 1, 2, 1).tempered);

  const Configuration heavy(2, {pt(0.5, 0, std::cbrt(4.0))});
  const auto b = is_tempered(heavy, 2, 2, 1);
  CHECK_FALSE(b.tempered);
  REQUIRE(b.first_violation.has_value());
  CHECK(*b.first_violation == 1);
  CHECK(b.slack[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(b.minimal_t >= 5);

  const Configuration exact(2, {pt(0.5, 0, 2.0)});
  CHECK(is_tempered(exact, 1, 2, 1).minimal_t == 9);
}

TEST_CASE("minimal_t has non-negative slack and is minimal") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto g = random_config(rng, d, 12.0);
    const auto r = is_tempered(g, 1, d, 1.0);
    const auto at = is_tempered(g, r.minimal_t, d, 1.0);
    CHECK(at.tempered);
    for (double s : at.slack) CHECK(s >= 0.0);
    if (r.minimal_t > 1) CHECK_FALSE(is_tempered(g, r.minimal_t - 1, d, 1.0).tempered);
  }
}

TEST_CASE("temperedness is monotone in t") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_config(rng, 2, 10.0);
    bool seen = false;
    for (int t = 1; t <= 60; ++t) {
      const bool now = is_tempered(g, t, 2, 1.0).tempered;
      if (seen) CHECK(now);
      seen = seen || now;
    }
  }
}

TEST_CASE("underline class examples") {
  const Configuration empty(2);
  for (int l : {1, 3, 10}) CHECK(in_underline_M(empty, l).holds);

  const Configuration ok(2, {pt(10, 0, 1.0)});
  CHECK(in_underline_M(ok, 1).holds);

  const Configuration bad(2, {pt(10, 0, 9.5)});
  const auto r = in_underline_M(bad, 1);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness == 0);
  CHECK(r.k == 4);
  // k = 5 already needs |x| > 11, so from l = 5 on the point is unconstrained
  CHECK(in_underline_M(bad, 5).holds);
  CHECK_THROWS_AS(in_underline_M(bad, 0), ConfigError);
}

TEST_CASE("underline class matches an exhaustive k scan") {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = random_config(rng, 2, 15.0);
    const int l = 1 + static_cast<int>(rng.below(6));
    bool expect = true;
    for (const auto& p : g.points())
      for (int k = l; k <= 20; ++k)
        if (norm(p.x) > 2 * k + 1 && norm(p.x) - p.mark_norm < k) expect = false;
    CHECK(in_underline_M(g, l).holds == expect);
  }
}

TEST_CASE("range separation on tempered single points") {
  Rng rng(14);
  for (int seed = 0; seed < 100; ++seed) {
    Rng r = rng.split(static_cast<std::uint64_t>(seed));
    const double dist = r.uniform(0, 60);
    const double ang = r.uniform(0, 2 * M_PI);
    const Configuration g(2, {pt(dist * std::cos(ang), dist * std::sin(ang), r.uniform(0, 0.9 * dist + 1))});
    const int t = is_tempered(g, 1, 2, 1.0).minimal_t;
    const int l = static_cast<int>(std::ceil(l_range(t, 2, 1.0)));
    const auto s = range_separation_check(g, t, l, 1.0);
    CHECK(s.precondition_met);
    CHECK(s.holds);
  }
  CHECK(range_separation_check(Configuration(2), 1, 4, 1.0).holds);
}

TEST_CASE("range separation on random tempered configurations") {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto g = random_config(rng, d, 20.0);
    const int t = is_tempered(g, 1, d, 1.0).minimal_t;
    const int l = static_cast<int>(std::ceil(l_range(t, d, 1.0)));
    for (int extra : {0, 1, 5}) {
      const auto s = range_separation_check(g, t, l + extra, 1.0);
      CHECK(s.precondition_met);
      CHECK(s.holds);
    }
  }
}

TEST_CASE("range separation can fail without the precondition") {
  const Configuration g(2, {pt(10, 0, 9.5)});
  const auto s = range_separation_check(g, 1, 4, 1.0);
  CHECK_FALSE(s.precondition_met);
  CHECK_FALSE(s.holds);
  REQUIRE(s.witness.has_value());
  CHECK(*s.witness == 0);
}

TEST_CASE("tempered configurations lie in the underline class") {
  Rng rng(16);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto g = random_config(rng, d, 25.0);
    const int t = is_tempered(g, 1, d, 1.0).minimal_t;
    const int l = static_cast<int>(std::ceil(l_range(t, d, 1.0)));
    CHECK(in_underline_M(g, l).holds);
  }
}

TEST_CASE("marks are negligible beyond l1") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto g = random_config(rng, d, 25.0);
    const int t = is_tempered(g, 1, d, 1.0).minimal_t;
    const double start = l1(t, 0.5, d, 1.0);
    for (int l = static_cast<int>(std::ceil(start)); l <= static_cast<int>(std::ceil(start)) + 40; ++l)
      CHECK(max_mark_in_ball(g, l) <= 0.5 * l);
  }
}
