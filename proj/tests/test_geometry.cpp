#include <doctest.h>

#include <cmath>
#include <string>

#include "gibbs/geometry.hpp"
#include "gibbs/rng.hpp"

using namespace gibbs;

namespace {

double lens_area(double r, double d) { return 2 * r * r * std::acos(d / (2 * r)) - 0.5 * d * std::sqrt(4 * r * r - d * d); }

DiscSystem ring() {
  const double s = 1.9, R = s / std::sqrt(3.0);
  DiscSystem ds;
  for (int k = 0; k < 3; ++k) ds.push_back({R * std::cos(2 * M_PI * k / 3), R * std::sin(2 * M_PI * k / 3), 1.0});
  return ds;
}

DiscSystem random_system(Rng& rng) {
  for (;;) {
    const std::size_t n = 1 + rng.below(30);
    DiscSystem ds;
    for (std::size_t i = 0; i < n; ++i) ds.push_back({rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.2, 1.0)});
    if (min_feature_size(ds) >= bounding_extent(ds) / 1000.0) return ds;
  }
}

struct QuietWarnings {
  std::vector<std::string> seen;
  QuietWarnings() {
    set_geometry_warning_handler([this](const std::string& w) { seen.push_back(w); });
  }
  ~QuietWarnings() { set_geometry_warning_handler(nullptr); }
};

}  // namespace

TEST_CASE("single disc") {
  const DiscSystem one{{0.3, -0.2, 1.0}};
  CHECK(union_area(one) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(union_perimeter(one) == doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK(euler_characteristic(one) == 1);
}

TEST_CASE("two discs") {
  const DiscSystem apart{{0, 0, 1}, {3, 0, 1}};
  CHECK(union_area(apart) == doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK(union_perimeter(apart) == doctest::Approx(4 * M_PI).epsilon(1e-12));
  CHECK(euler_characteristic(apart) == 2);

  const DiscSystem lens{{0, 0, 1}, {1, 0, 1}};
  const double expected = 2 * M_PI - lens_area(1.0, 1.0);
  CHECK(std::abs(union_area(lens) - expected) < 1e-9);
  CHECK(std::abs(union_area(lens) - 5.0548) < 1e-4);
  CHECK(std::abs(union_perimeter(lens) - 8 * M_PI / 3) < 1e-9);
  CHECK(euler_characteristic(lens) == 1);
}

TEST_CASE("ring of three discs has a hole") {
  const auto ds = ring();
  const auto m = measure_union(ds);
  CHECK(m.euler == 0);
  CHECK(m.euler_turning == 0);
  CHECK_FALSE(m.nerve_truncated);
  Rng rng(1);
  const auto o = mc_geometry_oracle(ds, 100000, rng);
  CHECK(o.euler == 0);
  CHECK(o.grid >= 2048);
  CHECK(o.resolved);
}

TEST_CASE("oracle on one disc and on the empty system") {
  Rng rng(2);
  const auto o = mc_geometry_oracle({{0, 0, 1}}, 1000000, rng);
  CHECK(std::abs(o.area - M_PI) < 0.006);
  CHECK(std::abs(o.area - M_PI) < 4 * o.area_std_error);
  CHECK(o.euler == 1);
  const auto e = mc_geometry_oracle({}, 10000, rng);
  CHECK(e.area == 0.0);
  CHECK(e.area_std_error == 0.0);
  CHECK(e.euler == 0);
  const auto m = measure_union({});
  CHECK(m.area == 0.0);
  CHECK(m.euler == 0);
}

TEST_CASE("degenerate grains") {
  QuietWarnings q;
  const DiscSystem with_point{{0, 0, 1}, {5, 5, 0}};
  CHECK(union_area(with_point) == doctest::Approx(M_PI));
  CHECK(euler_characteristic(with_point) == 1);

  const DiscSystem nested{{0, 0, 2}, {0.5, 0, 1}};
  CHECK(union_area(nested) == doctest::Approx(4 * M_PI));
  CHECK(union_perimeter(nested) == doctest::Approx(4 * M_PI));
  CHECK(euler_characteristic(nested) == 1);

  const DiscSystem tangent{{0, 0, 1}, {2, 0, 1}};
  const auto m = measure_union(tangent);
  CHECK(m.perturbed);
  CHECK_FALSE(q.seen.empty());
  CHECK(m.area == doctest::Approx(2 * M_PI).epsilon(1e-6));
  CHECK(m.euler == 2);
}

TEST_CASE("invariances") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = random_system(rng);
    const auto m = measure_union(ds);

    DiscSystem shifted = ds, scaled = ds, more = ds;
    const double vx = rng.uniform(-100, 100), vy = rng.uniform(-100, 100), lam = rng.uniform(0.3, 3.0);
    for (auto& d : shifted) {
      d.cx += vx;
      d.cy += vy;
    }
    for (auto& d : scaled) {
      d.cx *= lam;
      d.cy *= lam;
      d.r *= lam;
    }
    more.push_back({rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.2, 1.0)});

    const auto ms = measure_union(shifted);
    CHECK(ms.area == doctest::Approx(m.area).epsilon(1e-10));
    CHECK(ms.perimeter == doctest::Approx(m.perimeter).epsilon(1e-10));
    CHECK(ms.euler == m.euler);

    const auto mc = measure_union(scaled);
    CHECK(mc.area == doctest::Approx(lam * lam * m.area).epsilon(1e-10));
    CHECK(mc.perimeter == doctest::Approx(lam * m.perimeter).epsilon(1e-10));
    CHECK(mc.euler == m.euler);

    CHECK(union_area(more) >= m.area - 1e-9);

    DiscSystem joined = ds;
    for (const auto& d : ds) joined.push_back({d.cx + 50, d.cy, d.r});
    const auto mj = measure_union(joined);
    CHECK(mj.area == doctest::Approx(2 * m.area).epsilon(1e-10));
    CHECK(mj.perimeter == doctest::Approx(2 * m.perimeter).epsilon(1e-10));
    CHECK(mj.euler == 2 * m.euler);
  }
}

TEST_CASE("exact functionals agree with the oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = random_system(rng);
    const auto m = measure_union(ds);
    CHECK(m.euler == m.euler_turning);
    const auto o = mc_geometry_oracle(ds, 200000, rng);
    CHECK(std::abs(m.area - o.area) <= 4 * o.area_std_error);
    if (o.resolved) CHECK(o.euler == m.euler);
  }
}

TEST_CASE("nerve budget falls back to the turning count") {
  DiscSystem ds;
  for (int i = 0; i < 12; ++i) ds.push_back({0.1 * i, 0.05 * (i % 3), 1.0 + 0.01 * i});
  const auto full = measure_union(ds);
  const auto cut = measure_union(ds, 5);
  CHECK_FALSE(full.nerve_truncated);
  CHECK(cut.nerve_truncated);
  CHECK(cut.euler == cut.euler_turning);
  CHECK(cut.euler == full.euler);
  CHECK(full.euler == 1);
}
