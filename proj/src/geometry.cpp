#include "gibbs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTangencyTol = 1e-9;
constexpr double kPerturbation = 1e-7;

GeometryWarningHandler& warning_handler() {
  static GeometryWarningHandler h = [](const std::string& msg) { std::cerr << "geometry warning: " << msg << '\n'; };
  return h;
}

void warn(const std::string& msg) {
  if (warning_handler()) warning_handler()(msg);
}

struct Prepared {
  std::vector<Disc> discs;  // centred on a reference point
  bool perturbed = false;
};

Prepared prepare(const DiscSystem& input) {
  Prepared out;
  for (const auto& d : input) {
    if (!std::isfinite(d.cx) || !std::isfinite(d.cy) || !std::isfinite(d.r)) throw ConfigError("disc with non-finite data");
    if (d.r < 0.0) throw ConfigError("disc with negative radius");
    if (d.r > 0.0) out.discs.push_back(d);
  }
  auto& ds = out.discs;
  if (ds.empty()) return out;
  // Work relative to the first centre so results do not depend on absolute position.
  const double ox = ds[0].cx, oy = ds[0].cy;
  for (auto& d : ds) {
    d.cx -= ox;
    d.cy -= oy;
  }

  for (int pass = 0; pass < 16; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (std::size_t j = i + 1; j < ds.size(); ++j) {
        const double dist = std::hypot(ds[i].cx - ds[j].cx, ds[i].cy - ds[j].cy);
        const bool ext = std::abs(dist - (ds[i].r + ds[j].r)) < kTangencyTol;
        const bool inn = std::abs(dist - std::abs(ds[i].r - ds[j].r)) < kTangencyTol;
        if (!ext && !inn) continue;
        Disc& small = ds[i].r < ds[j].r ? ds[i] : ds[j];
        small.r -= kPerturbation;
        changed = true;
        out.perturbed = true;
        warn(std::string(ext ? "external" : "internal") + " tangency between discs " + std::to_string(i) + " and " +
             std::to_string(j) + "; radius shrunk by 1e-7");
      }
    }
    if (!changed) break;
  }
  std::erase_if(ds, [](const Disc& d) { return !(d.r > 0.0); });

  // Discs inside another disc change none of the functionals.
  std::vector<char> drop(ds.size(), 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.size() && !drop[i]; ++j) {
      if (i == j || drop[j]) continue;
      const double dist = std::hypot(ds[i].cx - ds[j].cx, ds[i].cy - ds[j].cy);
      if (dist + ds[i].r <= ds[j].r) drop[i] = 1;
    }
  }
  std::vector<Disc> kept;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!drop[i]) kept.push_back(ds[i]);
  ds = std::move(kept);
  return out;
}

struct Interval {
  double s, e;
  int s_disc, e_disc;
};

struct Arc {
  int disc;
  double t1, t2;  // t1 < t2, counter-clockwise
  int j_start, j_end;  // discs whose circles cut the arc ends (-1 for a full circle)
};

std::vector<Arc> exposed_arcs(const std::vector<Disc>& ds) {
  std::vector<Arc> arcs;
  const int n = static_cast<int>(ds.size());
  std::vector<Interval> ivs;
  for (int i = 0; i < n; ++i) {
    ivs.clear();
    const Disc& a = ds[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Disc& b = ds[static_cast<std::size_t>(j)];
      const double dx = b.cx - a.cx, dy = b.cy - a.cy;
      const double dist = std::hypot(dx, dy);
      if (dist >= a.r + b.r || dist <= std::abs(a.r - b.r)) continue;
      const double phi = std::atan2(dy, dx);
      const double c = std::clamp((a.r * a.r + dist * dist - b.r * b.r) / (2.0 * a.r * dist), -1.0, 1.0);
      const double alpha = std::acos(c);
      double s = std::fmod(phi - alpha, kTwoPi);
      if (s < 0.0) s += kTwoPi;
      const double e = s + 2.0 * alpha;
      if (e > kTwoPi) {
        ivs.push_back({s, kTwoPi, j, -1});
        ivs.push_back({0.0, e - kTwoPi, -1, j});
      } else {
        ivs.push_back({s, e, j, j});
      }
    }
    if (ivs.empty()) {
      arcs.push_back({i, 0.0, kTwoPi, -1, -1});
      continue;
    }
    std::sort(ivs.begin(), ivs.end(), [](const Interval& x, const Interval& y) { return x.s < y.s; });
    std::vector<Interval> merged;
    Interval cur = ivs[0];
    for (std::size_t k = 1; k < ivs.size(); ++k) {
      if (ivs[k].s <= cur.e) {
        if (ivs[k].e > cur.e) {
          cur.e = ivs[k].e;
          cur.e_disc = ivs[k].e_disc;
        }
      } else {
        merged.push_back(cur);
        cur = ivs[k];
      }
    }
    merged.push_back(cur);
    for (std::size_t k = 0; k < merged.size(); ++k) {
      const Interval& lo = merged[k];
      const bool wrap = k + 1 == merged.size();
      const double t2 = wrap ? merged[0].s + kTwoPi : merged[k + 1].s;
      const int j_end = wrap ? merged[0].s_disc : merged[k + 1].s_disc;
      if (t2 - lo.e > 0.0) arcs.push_back({i, lo.e, t2, lo.e_disc, j_end});
    }
  }
  return arcs;
}

double corner_angle(const Disc& a, const Disc& b, double theta) {
  const double ux = std::cos(theta), uy = std::sin(theta);
  const double px = a.cx + a.r * ux, py = a.cy + a.r * uy;
  const double vx = px - b.cx, vy = py - b.cy;
  return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
}

struct PairPoints {
  bool crossing = false;
  double x[2], y[2];
};

PairPoints circle_intersections(const Disc& a, const Disc& b) {
  PairPoints pp;
  const double dx = b.cx - a.cx, dy = b.cy - a.cy;
  const double d = std::hypot(dx, dy);
  if (d >= a.r + b.r || d <= std::abs(a.r - b.r)) return pp;
  const double l = (a.r * a.r - b.r * b.r + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, a.r * a.r - l * l));
  const double mx = a.cx + l * dx / d, my = a.cy + l * dy / d;
  pp.crossing = true;
  pp.x[0] = mx - h * dy / d;
  pp.y[0] = my + h * dx / d;
  pp.x[1] = mx + h * dy / d;
  pp.y[1] = my - h * dx / d;
  return pp;
}

class Nerve {
public:
  explicit Nerve(const std::vector<Disc>& ds) : ds_(ds), n_(static_cast<int>(ds.size())) {
    adj_.assign(static_cast<std::size_t>(n_ * n_), 0);
    pts_.resize(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const double d = std::hypot(ds[i].cx - ds[j].cx, ds[i].cy - ds[j].cy);
        const char e = d <= ds[i].r + ds[j].r;
        adj_[idx(i, j)] = adj_[idx(j, i)] = e;
        pts_[idx(i, j)] = circle_intersections(ds[i], ds[j]);
      }
  }

  /// Alternating simplex count; returns false if the budget was exceeded.
  bool euler(std::size_t budget, long long& chi) {
    budget_ = budget;
    count_ = 0;
    chi_ = 0;
    std::vector<int> sigma;
    std::vector<int> cand(static_cast<std::size_t>(n_));
    std::iota(cand.begin(), cand.end(), 0);
    if (!extend(sigma, cand)) return false;
    chi = chi_;
    return true;
  }

private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }

  bool in_disc(double x, double y, int k) const {
    return std::hypot(x - ds_[k].cx, y - ds_[k].cy) <= ds_[k].r;
  }

  bool triangle(int a, int b, int c) {
    int s[3] = {a, b, c};
    std::sort(s, s + 3);
    const long long key = (static_cast<long long>(s[0]) * n_ + s[1]) * n_ + s[2];
    auto it = tri_.find(key);
    if (it != tri_.end()) return it->second;
    bool r = false;
    const int pairs[3][3] = {{s[0], s[1], s[2]}, {s[0], s[2], s[1]}, {s[1], s[2], s[0]}};
    for (const auto& p : pairs) {
      const PairPoints& pp = pts_[idx(p[0], p[1])];
      if (!pp.crossing) continue;
      if (in_disc(pp.x[0], pp.y[0], p[2]) || in_disc(pp.x[1], pp.y[1], p[2])) {
        r = true;
        break;
      }
    }
    tri_.emplace(key, r);
    return r;
  }

  bool extend(std::vector<int>& sigma, const std::vector<int>& cand) {
    for (std::size_t ci = 0; ci < cand.size(); ++ci) {
      const int v = cand[ci];
      if (++count_ > budget_) return false;
      // a k-simplex has k+1 vertices and sign (-1)^k
      chi_ += (sigma.size() % 2 == 0) ? 1 : -1;
      std::vector<int> next;
      for (std::size_t cj = ci + 1; cj < cand.size(); ++cj) {
        const int w = cand[cj];
        if (!adj_[idx(v, w)]) continue;
        bool ok = true;
        for (int a : sigma)
          if (!triangle(a, v, w)) {
            ok = false;
            break;
          }
        if (ok) next.push_back(w);
      }
      if (!next.empty()) {
        sigma.push_back(v);
        if (!extend(sigma, next)) return false;
        sigma.pop_back();
      }
    }
    return true;
  }

  const std::vector<Disc>& ds_;
  int n_;
  std::vector<char> adj_;
  std::vector<PairPoints> pts_;
  std::unordered_map<long long, bool> tri_;
  std::size_t budget_ = 0, count_ = 0;
  long long chi_ = 0;
};

}  // namespace

void set_geometry_warning_handler(GeometryWarningHandler handler) { warning_handler() = std::move(handler); }

UnionMeasures measure_union(const DiscSystem& discs, std::size_t simplex_budget) {
  UnionMeasures m;
  const Prepared prep = prepare(discs);
  const auto& ds = prep.discs;
  m.perturbed = prep.perturbed;
  if (ds.empty()) return m;

  const auto arcs = exposed_arcs(ds);
  double area = 0.0, per = 0.0, turn = 0.0, corners = 0.0;
  for (const auto& a : arcs) {
    const Disc& d = ds[static_cast<std::size_t>(a.disc)];
    const double dt = a.t2 - a.t1;
    area += 0.5 * (d.r * d.r * dt + d.cx * d.r * (std::sin(a.t2) - std::sin(a.t1)) -
                   d.cy * d.r * (std::cos(a.t2) - std::cos(a.t1)));
    per += d.r * dt;
    turn += dt;
    // each corner is shared by two arc ends
    if (a.j_start >= 0) corners += 0.5 * corner_angle(d, ds[static_cast<std::size_t>(a.j_start)], a.t1);
    if (a.j_end >= 0) corners += 0.5 * corner_angle(d, ds[static_cast<std::size_t>(a.j_end)], a.t2);
  }
  m.area = area;
  m.perimeter = per;
  m.euler_turning = static_cast<int>(std::lround((turn - corners) / kTwoPi));

  Nerve nerve(ds);
  long long chi = 0;
  if (nerve.euler(simplex_budget, chi)) {
    m.euler = static_cast<int>(chi);
  } else {
    m.nerve_truncated = true;
    m.euler = m.euler_turning;
  }
  return m;
}

double union_area(const DiscSystem& discs) { return measure_union(discs).area; }
double union_perimeter(const DiscSystem& discs) { return measure_union(discs).perimeter; }
int euler_characteristic(const DiscSystem& discs) { return measure_union(discs).euler; }

double bounding_extent(const DiscSystem& discs) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& d : discs) {
    if (!(d.r > 0.0)) continue;
    x0 = std::min(x0, d.cx - d.r);
    x1 = std::max(x1, d.cx + d.r);
    y0 = std::min(y0, d.cy - d.r);
    y1 = std::max(y1, d.cy + d.r);
  }
  if (x0 > x1) return 0.0;
  return std::max(x1 - x0, y1 - y0);
}

double min_feature_size(const DiscSystem& input) {
  std::vector<Disc> ds;
  for (const auto& d : input)
    if (d.r > 0.0) ds.push_back(d);
  double f = INFINITY;
  for (const auto& d : ds) f = std::min(f, 2.0 * d.r);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      const double d = std::hypot(ds[i].cx - ds[j].cx, ds[i].cy - ds[j].cy);
      const double sum = ds[i].r + ds[j].r, diff = std::abs(ds[i].r - ds[j].r);
      if (d >= sum) {
        f = std::min(f, d - sum);
        continue;
      }
      if (d <= diff) {
        f = std::min(f, diff - d);
        continue;
      }
      f = std::min({f, sum - d, d - diff});
      const PairPoints pp = circle_intersections(ds[i], ds[j]);
      f = std::min(f, std::hypot(pp.x[0] - pp.x[1], pp.y[0] - pp.y[1]));
      for (std::size_t k = 0; k < ds.size(); ++k) {
        if (k == i || k == j) continue;
        for (int s = 0; s < 2; ++s)
          f = std::min(f, std::abs(std::hypot(pp.x[s] - ds[k].cx, pp.y[s] - ds[k].cy) - ds[k].r));
      }
    }
  }
  return f;
}

namespace {

class UnionFind {
public:
  int make(long weight) {
    parent_.push_back(static_cast<int>(parent_.size()));
    weight_.push_back(weight);
    return parent_.back();
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    weight_[static_cast<std::size_t>(a)] += weight_[static_cast<std::size_t>(b)];
  }
  // Components with at least min_weight pixels.
  int components(long min_weight) {
    int c = 0;
    for (std::size_t i = 0; i < parent_.size(); ++i)
      if (find(static_cast<int>(i)) == static_cast<int>(i) && weight_[i] >= min_weight) ++c;
    return c;
  }

private:
  std::vector<int> parent_;
  std::vector<long> weight_;
};

struct Run {
  int lo, hi, id;
};

// Connect runs of the current row to runs of the previous row; `reach` is 0 for
// 4-connectivity and 1 for 8-connectivity.
void link_rows(const std::vector<Run>& prev, const std::vector<Run>& cur, int reach, UnionFind& uf) {
  std::size_t a = 0, b = 0;
  while (a < prev.size() && b < cur.size()) {
    if (prev[a].lo <= cur[b].hi + reach && cur[b].lo <= prev[a].hi + reach) uf.unite(prev[a].id, cur[b].id);
    if (prev[a].hi < cur[b].hi) ++a;
    else ++b;
  }
}

}  // namespace

OracleEstimate mc_geometry_oracle(const DiscSystem& input, std::size_t n_points, Rng& rng, int min_grid,
                                  int max_grid) {
  OracleEstimate est;
  std::vector<Disc> ds;
  for (const auto& d : input)
    if (d.r > 0.0) ds.push_back(d);
  if (ds.empty()) return est;
  if (n_points < 1) throw ConfigError("oracle needs at least one sample point");

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& d : ds) {
    x0 = std::min(x0, d.cx - d.r);
    x1 = std::max(x1, d.cx + d.r);
    y0 = std::min(y0, d.cy - d.r);
    y1 = std::max(y1, d.cy + d.r);
  }
  const double w = x1 - x0, h = y1 - y0;

  // Bucket grid for the hit-or-miss test.
  constexpr int G = 64;
  std::vector<std::vector<int>> buckets(G * G);
  for (int k = 0; k < static_cast<int>(ds.size()); ++k) {
    const auto& d = ds[static_cast<std::size_t>(k)];
    const int bx0 = std::clamp(static_cast<int>((d.cx - d.r - x0) / w * G), 0, G - 1);
    const int bx1 = std::clamp(static_cast<int>((d.cx + d.r - x0) / w * G), 0, G - 1);
    const int by0 = std::clamp(static_cast<int>((d.cy - d.r - y0) / h * G), 0, G - 1);
    const int by1 = std::clamp(static_cast<int>((d.cy + d.r - y0) / h * G), 0, G - 1);
    for (int by = by0; by <= by1; ++by)
      for (int bx = bx0; bx <= bx1; ++bx) buckets[static_cast<std::size_t>(by * G + bx)].push_back(k);
  }
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n_points; ++s) {
    const double x = x0 + w * rng.uniform();
    const double y = y0 + h * rng.uniform();
    const int bx = std::min(static_cast<int>((x - x0) / w * G), G - 1);
    const int by = std::min(static_cast<int>((y - y0) / h * G), G - 1);
    for (int k : buckets[static_cast<std::size_t>(by * G + bx)]) {
      const auto& d = ds[static_cast<std::size_t>(k)];
      const double dx = x - d.cx, dy = y - d.cy;
      if (dx * dx + dy * dy <= d.r * d.r) {
        ++hits;
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_points);
  est.area = p * w * h;
  est.area_std_error = w * h * std::sqrt(p * (1.0 - p) / static_cast<double>(n_points));

  // Flood fill by run-length union-find, one row at a time.
  const double extent = std::max(w, h);
  const double feature = min_feature_size(ds);
  int n = min_grid;
  if (feature > 0.0) {
    const double need = std::ceil(8.0 * extent / feature);
    if (need > n) n = static_cast<int>(std::min<double>(need, max_grid));
  } else {
    n = max_grid;
  }
  est.grid = n;
  const double px = extent / n;
  est.resolved = feature > 0.0 && px <= 0.125 * feature;
  const int cols = n + 2;  // one pad pixel each side
  const double ox = 0.5 * (x0 + x1) - 0.5 * extent - px;
  const double oy = 0.5 * (y0 + y1) - 0.5 * extent - px;

  UnionFind fg, bg;
  std::vector<Run> prev_fg, prev_bg, cur_fg, cur_bg;
  std::vector<std::pair<int, int>> spans;
  for (int row = 0; row < cols; ++row) {
    const double y = oy + (row + 0.5) * px;
    spans.clear();
    for (const auto& d : ds) {
      const double dy = y - d.cy;
      if (std::abs(dy) > d.r) continue;
      const double half = std::sqrt(d.r * d.r - dy * dy);
      const int lo = static_cast<int>(std::ceil((d.cx - half - ox) / px - 0.5));
      const int hi = static_cast<int>(std::floor((d.cx + half - ox) / px - 0.5));
      if (lo <= hi) spans.emplace_back(std::max(lo, 0), std::min(hi, cols - 1));
    }
    std::sort(spans.begin(), spans.end());
    cur_fg.clear();
    cur_bg.clear();
    int next_free = 0;
    for (std::size_t k = 0; k < spans.size();) {
      int lo = spans[k].first, hi = spans[k].second;
      ++k;
      while (k < spans.size() && spans[k].first <= hi + 1) hi = std::max(hi, spans[k++].second);
      if (lo > next_free) cur_bg.push_back({next_free, lo - 1, bg.make(lo - next_free)});
      cur_fg.push_back({lo, hi, fg.make(hi - lo + 1)});
      next_free = hi + 1;
    }
    if (next_free < cols) cur_bg.push_back({next_free, cols - 1, bg.make(cols - next_free)});
    link_rows(prev_fg, cur_fg, 0, fg);
    link_rows(prev_bg, cur_bg, 1, bg);
    std::swap(prev_fg, cur_fg);
    std::swap(prev_bg, cur_bg);
  }
  // Pixel islands at cusp tips (two boundaries meeting at a small angle) are not resolvable at any
  // grid size; drop components far smaller than a disc or hole of the minimal feature size.
  const long min_weight = feature > 0.0 ? std::max(1L, static_cast<long>((feature / px) * (feature / px) / 16.0)) : 1L;
  const int components = fg.components(min_weight);
  const int holes = bg.components(min_weight) - 1;
  est.euler = components - holes;
  return est;
}

}  // namespace gibbs
