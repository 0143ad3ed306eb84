#include <algorithm>
#include <cmath>
#include <queue>

#include "solace/geo.hpp"

namespace solace {

namespace {

bool close(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Dijkstra over unblocked edges from a set of sources; ties pop lower node first.
std::vector<double> distances_from(const RoadGraph& g, const EdgeMask& blocked,
                                   const std::vector<int>& sources, int stop_at = -1) {
  std::vector<double> dist(g.nodes.size(), INFINITY);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : sources) {
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == stop_at) break;
    for (auto [e, v] : g.adjacency[u]) {
      if (blocked.blocked(e)) continue;
      const double nd = d + g.edges[e].length;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return dist;
}

// Walks from `origin` to the zero set of `to_target`, choosing the smallest edge id
// among edges that stay on a shortest path of total length `total`.
Route trace_lexicographic(const RoadGraph& g, const EdgeMask& blocked, int origin,
                          const std::vector<double>& from_origin, const std::vector<double>& to_target,
                          double total) {
  Route r;
  r.nodes.push_back(origin);
  int u = origin;
  while (to_target[u] > 0.0) {
    int pick = -1;
    int next = -1;
    double best = INFINITY;
    for (auto [e, v] : g.adjacency[u]) {
      if (blocked.blocked(e) || !(to_target[v] < to_target[u])) continue;
      best = std::min(best, from_origin[u] + g.edges[e].length + to_target[v]);
    }
    for (auto [e, v] : g.adjacency[u]) {
      if (blocked.blocked(e) || !(to_target[v] < to_target[u])) continue;
      const double via = from_origin[u] + g.edges[e].length + to_target[v];
      if ((close(via, total) || close(via, best)) && (pick < 0 || e < pick)) {
        pick = e;
        next = v;
      }
    }
    r.edges.push_back(pick);
    r.nodes.push_back(next);
    r.length += g.edges[pick].length;
    u = next;
  }
  return r;
}

}  // namespace

std::optional<Route> route_from_node(const Environment& env, const EdgeMask& blocked, int origin) {
  const auto& g = env.roads;
  if (origin < 0 || origin >= static_cast<int>(g.nodes.size())) return std::nullopt;
  if (env.node_safe_area[origin] >= 0) {
    Route r;
    r.nodes.push_back(origin);
    r.safe_area = env.node_safe_area[origin];
    return r;
  }
  const auto from_origin = distances_from(g, blocked, {origin});
  double best = INFINITY;
  for (size_t n = 0; n < g.nodes.size(); ++n)
    if (env.node_safe_area[n] >= 0) best = std::min(best, from_origin[n]);
  if (!std::isfinite(best)) return std::nullopt;

  int area = -1;
  for (size_t n = 0; n < g.nodes.size(); ++n)
    if (env.node_safe_area[n] >= 0 && close(from_origin[n], best))
      area = area < 0 ? env.node_safe_area[n] : std::min(area, env.node_safe_area[n]);
  std::vector<int> targets;
  for (size_t n = 0; n < g.nodes.size(); ++n)
    if (env.node_safe_area[n] == area && close(from_origin[n], best)) targets.push_back(static_cast<int>(n));

  const auto to_target = distances_from(g, blocked, targets);
  Route r = trace_lexicographic(g, blocked, origin, from_origin, to_target, best);
  r.safe_area = area;
  return r;
}

std::optional<Route> route_to_nearest_safe_area(const Environment& env, const EdgeMask& blocked,
                                                Point2D from) {
  if (const int sa = env.safe_area_at(from); sa >= 0) {
    Route r;
    r.safe_area = sa;
    return r;
  }
  return route_from_node(env, blocked, env.nearest_node(from));
}

std::optional<Route> shortest_path(const Environment& env, const EdgeMask& blocked, int from_node,
                                   int to_node) {
  const auto& g = env.roads;
  if (from_node == to_node) {
    Route r;
    r.nodes.push_back(from_node);
    return r;
  }
  const auto from_origin = distances_from(g, blocked, {from_node});
  if (!std::isfinite(from_origin[to_node])) return std::nullopt;
  const auto to_target = distances_from(g, blocked, {to_node});
  return trace_lexicographic(g, blocked, from_node, from_origin, to_target, from_origin[to_node]);
}

std::vector<std::optional<Route>> route_table_serial(const Environment& env, const EdgeMask& blocked) {
  const int n = static_cast<int>(env.roads.nodes.size());
  std::vector<std::optional<Route>> table(n);
  for (int i = 0; i < n; ++i) table[i] = route_from_node(env, blocked, i);
  return table;
}

std::vector<std::optional<Route>> route_table_parallel(const Environment& env,
                                                       const EdgeMask& blocked) {
  const int n = static_cast<int>(env.roads.nodes.size());
  std::vector<std::optional<Route>> table(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) table[i] = route_from_node(env, blocked, i);
  return table;
}

}  // namespace solace
