#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gibbs/rng.hpp"

namespace gibbs {

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
};

using DiscSystem = std::vector<Disc>;

/// Receives degeneracy warnings (near tangencies). The default handler writes to stderr.
using GeometryWarningHandler = std::function<void(const std::string&)>;
void set_geometry_warning_handler(GeometryWarningHandler handler);

struct UnionMeasures {
  double area = 0.0;
  double perimeter = 0.0;
  int euler = 0;
  /// Euler characteristic from the boundary turning count, always computed.
  int euler_turning = 0;
  /// The nerve enumeration exceeded its simplex budget and euler fell back to euler_turning.
  bool nerve_truncated = false;
  bool perturbed = false;
};

/// Area, perimeter and Euler characteristic of the union of closed discs.
/// Zero-radius discs are dropped; near-tangent pairs are separated by 1e-7 with a warning.
UnionMeasures measure_union(const DiscSystem& discs, std::size_t simplex_budget = 200000);

double union_area(const DiscSystem& discs);
double union_perimeter(const DiscSystem& discs);
int euler_characteristic(const DiscSystem& discs);

struct OracleEstimate {
  double area = 0.0;
  double area_std_error = 0.0;
  int euler = 0;
  int grid = 0;          // pixels per side used by the flood fill
  bool resolved = true;  // pixel size at most 1/8 of the smallest geometric feature
};

/// Independent Monte Carlo oracle: hit-or-miss area over the bounding box and Euler
/// characteristic from a flood fill of a pixel grid (4-connected foreground, 8-connected background).
OracleEstimate mc_geometry_oracle(const DiscSystem& discs, std::size_t n_points, Rng& rng, int min_grid = 2048,
                                  int max_grid = 8192);

/// Smallest geometric feature of the system: gaps, overlap depths, chord lengths, disc diameters and
/// distances from pairwise intersection points to the other circles.
double min_feature_size(const DiscSystem& discs);

/// Side of the bounding square of the union.
double bounding_extent(const DiscSystem& discs);

}  // namespace gibbs
