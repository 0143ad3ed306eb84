#include "solace/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace solace {

void BBox::expand(Point2D p) {
  min_x = std::min(min_x, p.x);
  min_y = std::min(min_y, p.y);
  max_x = std::max(max_x, p.x);
  max_y = std::max(max_y, p.y);
}

void BBox::expand(const BBox& b) {
  if (b.empty()) return;
  expand(Point2D{b.min_x, b.min_y});
  expand(Point2D{b.max_x, b.max_y});
}

BBox bounds(std::span<const Point2D> pts) {
  BBox b;
  for (auto p : pts) b.expand(p);
  return b;
}

double signed_area(std::span<const Point2D> ring) {
  double a = 0.0;
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) a += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * a;
}

Point2D centroid(std::span<const Point2D> ring) {
  const double area = signed_area(ring);
  const size_t n = ring.size();
  if (n == 0) return {};
  if (std::abs(area) < 1e-12) {
    Point2D s;
    for (auto p : ring) s = s + p;
    return s * (1.0 / static_cast<double>(n));
  }
  double cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % n];
    const double c = cross(p, q);
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

bool point_in_polygon(Point2D p, std::span<const Point2D> ring) {
  const size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if (point_segment_distance(p, a, b) == 0.0) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(Point2D p, Point2D a, Point2D b) {
  const Point2D ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

namespace {

int orientation(Point2D a, Point2D b, Point2D c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Point2D a, Point2D b, Point2D p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Point2D a, Point2D b, Point2D c, Point2D d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double segment_segment_distance(Point2D a, Point2D b, Point2D c, Point2D d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double point_polygon_distance(Point2D p, std::span<const Point2D> ring) {
  if (point_in_polygon(p, ring)) return 0.0;
  double best = INFINITY;
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, ring[i], ring[(i + 1) % n]));
  return best;
}

double segment_polygon_distance(Point2D a, Point2D b, std::span<const Point2D> ring) {
  if (point_in_polygon(a, ring) || point_in_polygon(b, ring)) return 0.0;
  double best = INFINITY;
  const size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, segment_segment_distance(a, b, ring[i], ring[(i + 1) % n]));
    if (best == 0.0) break;
  }
  return best;
}

bool is_simple_polygon(std::span<const Point2D> ring) {
  const size_t n = ring.size();
  if (n < 3) return false;
  if (std::abs(signed_area(ring)) < 1e-12) return false;
  for (size_t i = 0; i < n; ++i) {
    const Point2D a = ring[i], b = ring[(i + 1) % n];
    if (a == b) return false;
    for (size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(a, b, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool polygons_intersect(std::span<const Point2D> a, std::span<const Point2D> b) {
  if (a.empty() || b.empty()) return false;
  const BBox ba = bounds(a), bb = bounds(b);
  if (ba.max_x < bb.min_x || bb.max_x < ba.min_x || ba.max_y < bb.min_y || bb.max_y < ba.min_y)
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
        return true;
  return point_in_polygon(a[0], b) || point_in_polygon(b[0], a);
}

Ring convex_hull(std::vector<Point2D> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Point2D p, Point2D q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Ring hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

Ring buffered_hull(std::span<const Point2D> ring, double width, int arc_segments) {
  if (width <= 0.0) return convex_hull({ring.begin(), ring.end()});
  std::vector<Point2D> pts;
  const int steps = std::max(4, arc_segments * 4);
  for (auto p : ring)
    for (int s = 0; s < steps; ++s) {
      const double a = 2.0 * std::numbers::pi * s / steps;
      pts.push_back({p.x + width * std::cos(a), p.y + width * std::sin(a)});
    }
  return convex_hull(std::move(pts));
}

}  // namespace solace
