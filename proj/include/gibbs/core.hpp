#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gibbs {

inline constexpr int kMaxDim = 3;

/// Point of R^d stored in fixed storage; coordinates beyond the dimension are zero.
using Location = std::array<double, kMaxDim>;

double distance(const Location& a, const Location& b);
double norm(const Location& a);
Location operator+(const Location& a, const Location& b);
Location operator-(const Location& a, const Location& b);

/// Grid-sampled planar path starting at the origin, with its sup-norm cached.
struct PathData {
  std::vector<std::array<double, 2>> samples;
  double sup_norm = 0.0;
};

/// Build a path from grid samples; samples[0] must be the origin.
std::shared_ptr<const PathData> make_path(std::vector<std::array<double, 2>> samples);

/// Element of the mark space: either a radius in R+ or a planar path.
///
/// Path payloads are shared and immutable, so copying a mark is cheap.
class Mark {
public:
  enum class Kind { radius, path };

  static Mark radius(double r);
  static Mark path(std::shared_ptr<const PathData> p);

  Kind kind() const { return kind_; }
  double radius_value() const;
  const PathData& path_data() const;
  const std::shared_ptr<const PathData>& path_ptr() const { return path_; }
  double norm() const;

  friend bool operator==(const Mark& a, const Mark& b);

private:
  Mark() = default;
  Kind kind_ = Kind::radius;
  double radius_ = 0.0;
  std::shared_ptr<const PathData> path_;
};

struct MarkedPoint {
  MarkedPoint(const Location& x, Mark m);

  Location x;
  Mark mark;
  double mark_norm;  // cached mark.norm()
};

/// Finite simple marked point measure in R^d.
class Configuration {
public:
  explicit Configuration(int dim);
  /// Validates dimension, coordinate padding and simplicity (no repeated location).
  Configuration(int dim, std::vector<MarkedPoint> points);

  /// Skip the simplicity check; callers guarantee the points come from a simple configuration.
  static Configuration trusted(int dim, std::vector<MarkedPoint> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const MarkedPoint> points() const { return points_; }
  const MarkedPoint& operator[](std::size_t i) const { return points_[i]; }

  /// Translate every location by v.
  Configuration shifted(const Location& v) const;

private:
  int dim_;
  std::vector<MarkedPoint> points_;
};

/// Observation/simulation window. Boxes are half-open so lattice tilings partition space.
class Window {
public:
  enum class Kind { box, ball, dilated_box };

  /// Centered cube [-n, n)^d.
  static Window cube(int dim, double n);
  static Window box(int dim, const Location& lo, const Location& hi);
  static Window ball(int dim, const Location& center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool contains(const Location& x) const;
  double volume() const;
  /// Axis-aligned bounding box [lower, upper].
  Location lower() const;
  Location upper() const;
  /// Smallest radius R with the window inside the closed ball B(0, R).
  double circumradius() const;

  const Location& box_lo() const { return lo_; }
  const Location& box_hi() const { return hi_; }
  const Location& center() const { return center_; }
  double radius() const { return radius_; }

  /// Minkowski dilation by the closed ball B(0, r); r >= 0.
  friend Window dilate(const Window& w, double r);

private:
  Window() = default;
  Kind kind_ = Kind::box;
  int dim_ = 1;
  Location lo_{}, hi_{};   // box / dilated_box base
  Location center_{};      // ball
  double radius_ = 0.0;    // ball radius or dilation radius
};

Window dilate(const Window& w, double r);

struct ModelParams {
  int d = 2;
  double delta = 1.0;
  double z = 1.0;

  /// Throws ConfigError unless d in [1, kMaxDim], delta > 0 and z > 0.
  void validate() const;
};

/// Atoms of gamma whose location lies in the window.
Configuration restrict(const Configuration& gamma, const Window& w);
/// Atoms of gamma whose location lies outside the window.
Configuration restrict_complement(const Configuration& gamma, const Window& w);
/// Union of two configurations with disjoint supports.
Configuration merge(const Configuration& a, const Configuration& b);

/// Sum over atoms of 1 + |m|^(d + delta).
double tame_statistic(const Configuration& gamma, double delta);
double tame_weight(double mark_norm, int d, double delta);

/// Largest mark norm; 0 for the empty configuration.
double mark_sup(const Configuration& gamma);

}  // namespace gibbs
