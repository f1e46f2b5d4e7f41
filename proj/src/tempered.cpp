#include "gibbs/tempered.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/errors.hpp"

namespace gibbs {

double l1(double t, double eta, int d, double delta) {
  if (!(t >= 1.0)) throw ConfigError("tempered class index must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (d < 1 || !(delta > 0.0)) throw ConfigError("l1 needs d >= 1 and delta > 0");
  return std::pow(t / std::pow(eta, d + delta), 1.0 / delta);
}

double l_range(double t, int d, double delta) { return 0.5 * l1(t, 0.5, d, delta); }

TemperednessReport is_tempered(const Configuration& gamma, int t, int d, double delta) {
  if (t < 1) throw ConfigError("tempered class index must be >= 1");
  TemperednessReport rep;
  std::vector<std::pair<double, double>> pts;  // (|x|, weight)
  pts.reserve(gamma.size());
  double rmax = 0.0;
  for (const auto& p : gamma.points()) {
    const double r = norm(p.x);
    pts.emplace_back(r, tame_weight(p.mark_norm, d, delta));
    rmax = std::max(rmax, r);
  }
  std::sort(pts.begin(), pts.end());
  const int L = std::max(1, static_cast<int>(std::ceil(rmax)) + 1);
  std::vector<double> stat(static_cast<std::size_t>(L));
  std::size_t k = 0;
  double acc = 0.0;
  for (int l = 1; l <= L; ++l) {
    while (k < pts.size() && pts[k].first <= l) acc += pts[k++].second;
    stat[static_cast<std::size_t>(l - 1)] = acc;
  }
  auto holds_at = [&](double tt) {
    for (int l = 1; l <= L; ++l)
      if (stat[static_cast<std::size_t>(l - 1)] > tt * std::pow(l, d)) return false;
    return true;
  };
  double ratio = 0.0;
  for (int l = 1; l <= L; ++l) ratio = std::max(ratio, stat[static_cast<std::size_t>(l - 1)] / std::pow(l, d));
  int tmin = std::max(1, static_cast<int>(std::ceil(ratio)));
  while (tmin > 1 && holds_at(tmin - 1)) --tmin;
  while (!holds_at(tmin)) ++tmin;
  rep.minimal_t = tmin;
  rep.slack.resize(static_cast<std::size_t>(L));
  for (int l = 1; l <= L; ++l) {
    const double s = t * std::pow(l, d) - stat[static_cast<std::size_t>(l - 1)];
    rep.slack[static_cast<std::size_t>(l - 1)] = s;
    if (s < 0.0 && !rep.first_violation) rep.first_violation = l;
  }
  rep.tempered = !rep.first_violation.has_value();
  return rep;
}

UnderlineReport in_underline_M(const Configuration& gamma, int l) {
  if (l < 1) throw ConfigError("l must be >= 1");
  UnderlineReport rep;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double r = norm(gamma[i].x);
    // largest integer k with 2k + 1 < r
    int kmax = static_cast<int>(std::ceil((r - 1.0) / 2.0)) - 1;
    while (2.0 * (kmax + 1) + 1.0 < r) ++kmax;
    while (kmax >= 0 && !(2.0 * kmax + 1.0 < r)) --kmax;
    if (kmax < l) continue;
    // the constraint tightens with k, so the largest k decides
    if (r - gamma[i].mark_norm < kmax) {
      rep.holds = false;
      rep.witness = i;
      rep.k = kmax;
      return rep;
    }
  }
  return rep;
}

SeparationReport range_separation_check(const Configuration& gamma, int t, int l, double delta) {
  SeparationReport rep;
  const int d = gamma.dim();
  rep.precondition_met = is_tempered(gamma, t, d, delta).tempered && l >= l_range(t, d, delta);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double r = norm(gamma[i].x);
    if (!(r > 2.0 * l + 1.0)) continue;
    if (!(r - gamma[i].mark_norm > l)) {
      rep.holds = false;
      rep.witness = i;
      return rep;
    }
  }
  return rep;
}

}  // namespace gibbs
