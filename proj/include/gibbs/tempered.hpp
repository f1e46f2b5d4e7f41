#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gibbs/core.hpp"

namespace gibbs {

/// l1(t, eta) = (t / eta^(d+delta))^(1/delta); t >= 1, 0 < eta < 1.
double l1(double t, double eta, int d, double delta);
/// Half of l1(t, 1/2).
double l_range(double t, int d, double delta);

struct TemperednessReport {
  bool tempered = false;  // at the requested t
  int minimal_t = 1;
  /// slack[l-1] = t l^d - <gamma_{B(0,l)}, 1 + |m|^(d+delta)> for l = 1..L (closed balls).
  std::vector<double> slack;
  std::optional<int> first_violation;  // smallest l where the bound fails
};

/// Decide gamma in M^t by scanning integer l up to ceil(max |x|) + 1.
TemperednessReport is_tempered(const Configuration& gamma, int t, int d, double delta);

struct UnderlineReport {
  bool holds = true;
  std::optional<std::size_t> witness;  // index of an offending point
  int k = 0;                           // largest offending k for that point
};

/// gamma in the enlarged class: for every k >= l and every point with |x| > 2k+1, |x| - |m| >= k.
UnderlineReport in_underline_M(const Configuration& gamma, int l);

struct SeparationReport {
  bool holds = true;
  bool precondition_met = true;  // gamma in M^t and l >= l_range(t)
  std::optional<std::size_t> witness;
};

/// Check pointwise that every point with |x| > 2l+1 has its closed grain disjoint from B(0, l).
SeparationReport range_separation_check(const Configuration& gamma, int t, int l, double delta);

}  // namespace gibbs
