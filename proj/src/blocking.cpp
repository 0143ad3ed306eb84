#include <algorithm>

#include "solace/geo.hpp"

namespace solace {

BBox DebrisZone::box() const {
  BBox b = bounds(footprint);
  b.min_x -= buffer;
  b.min_y -= buffer;
  b.max_x += buffer;
  b.max_y += buffer;
  return b;
}

double DebrisZone::distance_to_segment(Point2D a, Point2D b) const {
  return segment_polygon_distance(a, b, footprint);
}

bool debris_blocks_edge(const Environment& env, const DebrisZone& debris, int edge,
                        const BlockingRule& rule) {
  const auto& e = env.roads.edges[edge];
  const double gap = debris.distance_to_segment(env.roads.nodes[e.a], env.roads.nodes[e.b]) - debris.buffer;
  if (gap <= 0.0) return true;
  if (rule.mode == BlockingRule::Mode::WidthAware) {
    // Debris on one side leaves width/2 + gap of free carriageway.
    return 0.5 * e.width + gap < rule.passable_width;
  }
  return false;
}

std::vector<int> apply_debris_blocking(const Environment& env, std::span<const DebrisZone> debris,
                                       EdgeMask& blocked, const BlockingRule& rule) {
  const double reach = rule.mode == BlockingRule::Mode::WidthAware ? std::max(rule.passable_width, 0.0) : 0.0;
  for (const auto& d : debris) {
    BBox q = d.box();
    q.min_x -= reach;
    q.min_y -= reach;
    q.max_x += reach;
    q.max_y += reach;
    for (int e : env.index.candidates(ObjectKind::RoadEdge, q))
      if (!blocked.blocked(e) && debris_blocks_edge(env, d, e, rule)) blocked.block(e);
  }
  return blocked.ids();
}

}  // namespace solace
