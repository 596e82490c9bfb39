#pragma once

// Fixed-capacity points in R^d (d <= 3), axis-aligned regions, and
// piecewise-linear curves. The active dimension is carried by the caller
// (kernel bounds / config), not by the vector type.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace stablelike {

inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;

inline Vec zero_vec() { return {0.0, 0.0, 0.0}; }

inline Vec make_vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline Vec add(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec sub(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec scale(const Vec& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline Vec negate(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

inline double dot(const Vec& a, const Vec& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a, int d) { return dot(a, a, d); }

inline double norm(const Vec& a, int d) { return std::sqrt(norm2(a, d)); }

inline double dist(const Vec& a, const Vec& b, int d) { return norm(sub(a, b), d); }

inline bool all_finite(const Vec& a, int d) {
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// Surface area of the unit sphere in R^d (2, 2*pi, 4*pi for d = 1, 2, 3).
double sphere_surface_area(int d);

struct Ball {
  Vec center = zero_vec();
  double radius = 0.0;
};

struct Cube {
  Vec center = zero_vec();
  double side = 0.0;
};

using Region = std::variant<Ball, Cube>;

bool contains(const Region& region, const Vec& x, int d);
// Interior membership; boundary points are excluded (degenerate starts are
// rejected by preconditions, not simulated).
bool strictly_inside(const Region& region, const Vec& x, int d);
double volume(const Region& region, int d);

// Exact containment of one ball/cube inside another.
bool region_inside(const Region& inner, const Region& outer, int d);

// Finite union of pairwise disjoint balls/cubes. Disjointness of members is
// the caller's contract; volume() sums member volumes.
struct RegionUnion {
  std::vector<Region> members;

  bool empty() const { return members.empty(); }

  bool contains(const Vec& x, int d) const {
    for (const auto& r : members) {
      if (stablelike::contains(r, x, d)) return true;
    }
    return false;
  }

  double volume(int d) const {
    double v = 0.0;
    for (const auto& r : members) v += stablelike::volume(r, d);
    return v;
  }

  bool inside(const Region& outer, int d) const {
    for (const auto& r : members) {
      if (!region_inside(r, outer, d)) return false;
    }
    return true;
  }
};

struct PolylineVertex {
  double t = 0.0;
  Vec x = zero_vec();
};

// Continuous piecewise-linear curve phi(s) on [0, duration], vertices at
// strictly increasing times starting from 0.
class Polyline {
 public:
  explicit Polyline(std::vector<PolylineVertex> vertices);

  const std::vector<PolylineVertex>& vertices() const { return vertices_; }
  double duration() const { return vertices_.back().t; }
  const Vec& start() const { return vertices_.front().x; }

  Vec value(double s, int d) const;

 private:
  std::vector<PolylineVertex> vertices_;
};

}  // namespace stablelike
