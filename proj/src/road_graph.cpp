#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "solace/geo.hpp"

namespace solace {

std::vector<int> EdgeMask::ids() const {
  std::vector<int> out;
  for (size_t i = 0; i < flags_.size(); ++i)
    if (flags_[i]) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Hash grid with cell = snap so a merge candidate is always in the 3x3 neighbourhood.
class NodeSnapper {
 public:
  NodeSnapper(std::vector<Point2D>& nodes, double snap) : nodes_(nodes), snap_(snap) {}

  int find_or_add(Point2D p) {
    const auto [cx, cy] = cell(p);
    int best = -1;
    double best_d = INFINITY;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find(key(cx + dx, cy + dy));
        if (it == grid_.end()) continue;
        for (int n : it->second) {
          const double d = distance(nodes_[n], p);
          if (d <= snap_ && (d < best_d || (d == best_d && n < best))) {
            best = n;
            best_d = d;
          }
        }
      }
    if (best >= 0) return best;
    nodes_.push_back(p);
    const int id = static_cast<int>(nodes_.size()) - 1;
    grid_[key(cx, cy)].push_back(id);
    return id;
  }

 private:
  std::pair<long long, long long> cell(Point2D p) const {
    const double c = std::max(snap_, 1e-9);
    return {static_cast<long long>(std::floor(p.x / c)), static_cast<long long>(std::floor(p.y / c))};
  }
  static long long key(long long x, long long y) { return x * 73856093LL ^ y * 19349663LL; }

  std::vector<Point2D>& nodes_;
  double snap_;
  std::unordered_map<long long, std::vector<int>> grid_;
};

}  // namespace

RoadGraph build_road_graph(std::span<const RoadSegment> segments, double snap) {
  RoadGraph g;
  NodeSnapper snapper(g.nodes, snap);
  for (size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    if (seg.points.size() < 2)
      throw ValidationError("road segment " + std::to_string(s) + " has fewer than 2 points");
    int prev = snapper.find_or_add(seg.points[0]);
    for (size_t i = 1; i < seg.points.size(); ++i) {
      const int cur = snapper.find_or_add(seg.points[i]);
      if (cur == prev)
        throw ValidationError("road segment " + std::to_string(s) + " has zero length after snapping");
      const double len = distance(g.nodes[prev], g.nodes[cur]);
      g.edges.push_back({prev, cur, len, seg.width});
      prev = cur;
    }
  }
  g.adjacency.assign(g.nodes.size(), {});
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    g.adjacency[edge.a].push_back({static_cast<int>(e), edge.b});
    g.adjacency[edge.b].push_back({static_cast<int>(e), edge.a});
  }
  return g;
}

std::vector<std::vector<int>> connected_components(const RoadGraph& graph) {
  const size_t n = graph.nodes.size();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{static_cast<int>(start)};
    comp[start] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out[c].push_back(u);
      for (auto [e, v] : graph.adjacency[u])
        if (comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
    }
    std::sort(out[c].begin(), out[c].end());
  }
  return out;
}

void validate_connected(const RoadGraph& graph) {
  const auto comps = connected_components(graph);
  if (comps.size() <= 1) return;
  std::ostringstream msg;
  msg << "road graph is disconnected: " << comps.size() << " components";
  for (size_t c = 0; c < comps.size(); ++c) {
    msg << (c == 0 ? " " : "; ") << "[";
    for (size_t i = 0; i < comps[c].size() && i < 8; ++i) msg << (i ? "," : "") << comps[c][i];
    if (comps[c].size() > 8) msg << ",... (" << comps[c].size() << " nodes)";
    msg << "]";
  }
  throw ValidationError(msg.str());
}

}  // namespace solace
