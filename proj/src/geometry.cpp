#include "stablelike/geometry.hpp"

#include <algorithm>

namespace stablelike {

double unit_ball_volume(int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("unit_ball_volume: d must be in [1,3]");
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double sphere_surface_area(int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("sphere_surface_area: d must be in [1,3]");
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

bool contains(const Region& region, const Vec& x, int d) {
  if (const Ball* b = std::get_if<Ball>(&region)) {
    return dist(x, b->center, d) <= b->radius;
  }
  const Cube& c = std::get<Cube>(region);
  const double half = 0.5 * c.side;
  for (int i = 0; i < d; ++i) {
    if (std::abs(x[i] - c.center[i]) > half) return false;
  }
  return true;
}

bool strictly_inside(const Region& region, const Vec& x, int d) {
  if (const Ball* b = std::get_if<Ball>(&region)) {
    return dist(x, b->center, d) < b->radius;
  }
  const Cube& c = std::get<Cube>(region);
  const double half = 0.5 * c.side;
  for (int i = 0; i < d; ++i) {
    if (std::abs(x[i] - c.center[i]) >= half) return false;
  }
  return true;
}

double volume(const Region& region, int d) {
  if (const Ball* b = std::get_if<Ball>(&region)) {
    return unit_ball_volume(d) * std::pow(b->radius, d);
  }
  return std::pow(std::get<Cube>(region).side, d);
}

bool region_inside(const Region& inner, const Region& outer, int d) {
  if (const Ball* bi = std::get_if<Ball>(&inner)) {
    if (const Ball* bo = std::get_if<Ball>(&outer)) {
      return dist(bi->center, bo->center, d) + bi->radius <= bo->radius;
    }
    const Cube& co = std::get<Cube>(outer);
    for (int i = 0; i < d; ++i) {
      if (std::abs(bi->center[i] - co.center[i]) + bi->radius > 0.5 * co.side) return false;
    }
    return true;
  }
  const Cube& ci = std::get<Cube>(inner);
  if (const Ball* bo = std::get_if<Ball>(&outer)) {
    // farthest corner of the cube from the ball center
    double s2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double e = std::abs(ci.center[i] - bo->center[i]) + 0.5 * ci.side;
      s2 += e * e;
    }
    return std::sqrt(s2) <= bo->radius;
  }
  const Cube& co = std::get<Cube>(outer);
  for (int i = 0; i < d; ++i) {
    if (std::abs(ci.center[i] - co.center[i]) + 0.5 * ci.side > 0.5 * co.side) return false;
  }
  return true;
}

Polyline::Polyline(std::vector<PolylineVertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw std::invalid_argument("Polyline: need at least 2 vertices");
  if (vertices_.front().t != 0.0) throw std::invalid_argument("Polyline: first vertex must be at t = 0");
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    if (!(vertices_[i].t < vertices_[i + 1].t)) {
      throw std::invalid_argument("Polyline: vertex times must be strictly increasing");
    }
  }
  for (const auto& v : vertices_) {
    if (!all_finite(v.x, kMaxDim) || !std::isfinite(v.t)) {
      throw std::invalid_argument("Polyline: non-finite vertex");
    }
  }
}

Vec Polyline::value(double s, int d) const {
  if (s <= 0.0) return vertices_.front().x;
  if (s >= duration()) return vertices_.back().x;
  // find segment with t_i <= s < t_{i+1}
  std::size_t lo = 0, hi = vertices_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (vertices_[mid].t <= s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto& a = vertices_[lo];
  const auto& b = vertices_[hi];
  const double w = (s - a.t) / (b.t - a.t);
  Vec out = zero_vec();
  for (int i = 0; i < d; ++i) out[i] = a.x[i] + w * (b.x[i] - a.x[i]);
  return out;
}

}  // namespace stablelike
