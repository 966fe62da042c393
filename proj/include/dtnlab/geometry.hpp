#pragma once

namespace dtnlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist_sq(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace dtnlab
