#include "gibbs/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gibbs/errors.hpp"

namespace gibbs {

double distance(const Location& a, const Location& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double norm(const Location& a) { return distance(a, Location{}); }

Location operator+(const Location& a, const Location& b) {
  Location r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

Location operator-(const Location& a, const Location& b) {
  Location r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] - b[i];
  return r;
}

std::shared_ptr<const PathData> make_path(std::vector<std::array<double, 2>> samples) {
  if (samples.size() < 2) throw ConfigError("path mark needs at least two grid samples");
  if (samples[0][0] != 0.0 || samples[0][1] != 0.0) throw ConfigError("path mark must start at the origin");
  auto p = std::make_shared<PathData>();
  double sup = 0.0;
  for (const auto& s : samples) {
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) throw ConfigError("path mark has non-finite sample");
    sup = std::max(sup, std::hypot(s[0], s[1]));
  }
  p->samples = std::move(samples);
  p->sup_norm = sup;
  return p;
}

Mark Mark::radius(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("radius mark must be finite and non-negative");
  Mark m;
  m.kind_ = Kind::radius;
  m.radius_ = r;
  return m;
}

Mark Mark::path(std::shared_ptr<const PathData> p) {
  if (!p) throw ConfigError("null path mark");
  Mark m;
  m.kind_ = Kind::path;
  m.path_ = std::move(p);
  return m;
}

double Mark::radius_value() const {
  if (kind_ != Kind::radius) throw PreconditionError("mark is not a radius");
  return radius_;
}

const PathData& Mark::path_data() const {
  if (kind_ != Kind::path) throw PreconditionError("mark is not a path");
  return *path_;
}

double Mark::norm() const { return kind_ == Kind::radius ? radius_ : path_->sup_norm; }

bool operator==(const Mark& a, const Mark& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ == Mark::Kind::radius) return a.radius_ == b.radius_;
  return a.path_ == b.path_ || a.path_->samples == b.path_->samples;
}

MarkedPoint::MarkedPoint(const Location& x_, Mark m) : x(x_), mark(std::move(m)), mark_norm(mark.norm()) {}

Configuration::Configuration(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

Configuration::Configuration(int dim, std::vector<MarkedPoint> points) : Configuration(dim) {
  for (const auto& p : points) {
    for (int i = 0; i < kMaxDim; ++i) {
      if (!std::isfinite(p.x[i])) throw ConfigError("non-finite location");
      if (i >= dim && p.x[i] != 0.0) throw ConfigError("location has coordinates beyond the dimension");
    }
  }
  std::vector<Location> locs;
  locs.reserve(points.size());
  for (const auto& p : points) locs.push_back(p.x);
  std::sort(locs.begin(), locs.end());
  if (std::adjacent_find(locs.begin(), locs.end()) != locs.end())
    throw ConfigError("configuration is not simple: repeated location");
  points_ = std::move(points);
}

Configuration Configuration::trusted(int dim, std::vector<MarkedPoint> points) {
  Configuration c(dim);
  c.points_ = std::move(points);
  return c;
}

Configuration Configuration::shifted(const Location& v) const {
  std::vector<MarkedPoint> pts = points_;
  for (auto& p : pts) p.x = p.x + v;
  return trusted(dim_, std::move(pts));
}

Window Window::cube(int dim, double n) {
  Location lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = -n;
    hi[i] = n;
  }
  return box(dim, lo, hi);
}

Window Window::box(int dim, const Location& lo, const Location& hi) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("window dimension out of range");
  Window w;
  w.kind_ = Kind::box;
  w.dim_ = dim;
  for (int i = 0; i < dim; ++i) {
    if (!(hi[i] > lo[i])) throw ConfigError("box window needs hi > lo in every coordinate");
    w.lo_[i] = lo[i];
    w.hi_[i] = hi[i];
  }
  return w;
}

Window Window::ball(int dim, const Location& center, double radius) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("window dimension out of range");
  if (!(radius > 0.0)) throw ConfigError("ball window needs a positive radius");
  Window w;
  w.kind_ = Kind::ball;
  w.dim_ = dim;
  for (int i = 0; i < dim; ++i) w.center_[i] = center[i];
  w.radius_ = radius;
  return w;
}

namespace {

double distance_to_box(const Location& x, const Location& lo, const Location& hi, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double t = 0.0;
    if (x[i] < lo[i]) t = lo[i] - x[i];
    else if (x[i] > hi[i]) t = x[i] - hi[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double unit_ball_volume(int d) { return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0); }

}  // namespace

bool Window::contains(const Location& x) const {
  for (int i = dim_; i < kMaxDim; ++i)
    if (x[i] != 0.0) return false;
  switch (kind_) {
    case Kind::box:
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] || x[i] >= hi_[i]) return false;
      return true;
    case Kind::ball:
      return distance(x, center_) < radius_;
    case Kind::dilated_box:
      return distance_to_box(x, lo_, hi_, dim_) <= radius_;
  }
  return false;
}

double Window::volume() const {
  switch (kind_) {
    case Kind::box: {
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
      return v;
    }
    case Kind::ball:
      return unit_ball_volume(dim_) * std::pow(radius_, dim_);
    case Kind::dilated_box: {
      // Steiner formula for a parallelotope.
      const double r = radius_;
      const double a = hi_[0] - lo_[0];
      if (dim_ == 1) return a + 2.0 * r;
      const double b = hi_[1] - lo_[1];
      if (dim_ == 2) return a * b + 2.0 * (a + b) * r + std::numbers::pi * r * r;
      const double c = hi_[2] - lo_[2];
      return a * b * c + 2.0 * (a * b + b * c + c * a) * r + std::numbers::pi * (a + b + c) * r * r +
             4.0 / 3.0 * std::numbers::pi * r * r * r;
    }
  }
  return 0.0;
}

Location Window::lower() const {
  Location l{};
  for (int i = 0; i < dim_; ++i)
    l[i] = kind_ == Kind::ball ? center_[i] - radius_ : lo_[i] - (kind_ == Kind::dilated_box ? radius_ : 0.0);
  return l;
}

Location Window::upper() const {
  Location u{};
  for (int i = 0; i < dim_; ++i)
    u[i] = kind_ == Kind::ball ? center_[i] + radius_ : hi_[i] + (kind_ == Kind::dilated_box ? radius_ : 0.0);
  return u;
}

double Window::circumradius() const {
  if (kind_ == Kind::ball) return norm(center_) + radius_;
  Location far{};
  for (int i = 0; i < dim_; ++i) far[i] = std::max(std::abs(lo_[i]), std::abs(hi_[i]));
  return norm(far) + (kind_ == Kind::dilated_box ? radius_ : 0.0);
}

Window dilate(const Window& w, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("dilation radius must be finite and non-negative");
  Window out = w;
  switch (w.kind_) {
    case Window::Kind::ball:
      out.radius_ = w.radius_ + r;
      break;
    case Window::Kind::box:
      out.kind_ = Window::Kind::dilated_box;
      out.radius_ = r;
      break;
    case Window::Kind::dilated_box:
      out.radius_ = w.radius_ + r;
      break;
  }
  return out;
}

void ModelParams::validate() const {
  if (d < 1 || d > kMaxDim) throw ConfigError("d must be in [1, " + std::to_string(kMaxDim) + "]");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be positive");
  if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError("z must be positive");
}

Configuration restrict(const Configuration& gamma, const Window& w) {
  std::vector<MarkedPoint> kept;
  for (const auto& p : gamma.points())
    if (w.contains(p.x)) kept.push_back(p);
  return Configuration::trusted(gamma.dim(), std::move(kept));
}

Configuration restrict_complement(const Configuration& gamma, const Window& w) {
  std::vector<MarkedPoint> kept;
  for (const auto& p : gamma.points())
    if (!w.contains(p.x)) kept.push_back(p);
  return Configuration::trusted(gamma.dim(), std::move(kept));
}

Configuration merge(const Configuration& a, const Configuration& b) {
  if (a.dim() != b.dim()) throw ConfigError("merge: dimension mismatch");
  std::vector<MarkedPoint> pts(a.points().begin(), a.points().end());
  pts.insert(pts.end(), b.points().begin(), b.points().end());
  return Configuration(a.dim(), std::move(pts));
}

double tame_weight(double mark_norm, int d, double delta) { return 1.0 + std::pow(mark_norm, d + delta); }

double tame_statistic(const Configuration& gamma, double delta) {
  double s = 0.0;
  for (const auto& p : gamma.points()) s += tame_weight(p.mark_norm, gamma.dim(), delta);
  return s;
}

double mark_sup(const Configuration& gamma) {
  double m = 0.0;
  for (const auto& p : gamma.points()) m = std::max(m, p.mark_norm);
  return m;
}

}  // namespace gibbs
