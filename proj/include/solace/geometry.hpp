#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace solace {

// Planar coordinates in meters.
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
  Point2D operator+(Point2D o) const { return {x + o.x, y + o.y}; }
  Point2D operator-(Point2D o) const { return {x - o.x, y - o.y}; }
  Point2D operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D a) { return std::hypot(a.x, a.y); }
inline double distance(Point2D a, Point2D b) { return norm(a - b); }

struct BBox {
  double min_x = INFINITY;
  double min_y = INFINITY;
  double max_x = -INFINITY;
  double max_y = -INFINITY;

  void expand(Point2D p);
  void expand(const BBox& b);
  bool contains(Point2D p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  bool contains(const BBox& b) const {
    return b.min_x >= min_x && b.max_x <= max_x && b.min_y >= min_y && b.max_y <= max_y;
  }
  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }
};

// A polygon ring without the closing duplicate vertex.
using Ring = std::vector<Point2D>;

BBox bounds(std::span<const Point2D> pts);

double signed_area(std::span<const Point2D> ring);
Point2D centroid(std::span<const Point2D> ring);

// Boundary points count as inside.
bool point_in_polygon(Point2D p, std::span<const Point2D> ring);

double point_segment_distance(Point2D p, Point2D a, Point2D b);
bool segments_intersect(Point2D a, Point2D b, Point2D c, Point2D d);
double segment_segment_distance(Point2D a, Point2D b, Point2D c, Point2D d);

// Distance from p to the closed polygon region (0 when inside).
double point_polygon_distance(Point2D p, std::span<const Point2D> ring);
// Distance from segment ab to the closed polygon region (0 when they touch).
double segment_polygon_distance(Point2D a, Point2D b, std::span<const Point2D> ring);

// True when no two non-adjacent edges intersect and the ring has nonzero area.
bool is_simple_polygon(std::span<const Point2D> ring);

bool polygons_intersect(std::span<const Point2D> a, std::span<const Point2D> b);

// Polygonal approximation of the outward buffer of a convex-or-not ring:
// the convex hull of circles around each vertex. Exact only for convex rings.
Ring buffered_hull(std::span<const Point2D> ring, double width, int arc_segments = 8);

Ring convex_hull(std::vector<Point2D> pts);

}  // namespace solace
