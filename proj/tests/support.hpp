#pragma once

// Shared fixtures and brute-force oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "solace/config.hpp"
#include "solace/geo.hpp"

namespace testsupport {

using namespace solace;

inline std::filesystem::path source_dir() { return SOLACE_SOURCE_DIR; }
inline std::filesystem::path district_config() { return source_dir() / "configs" / "district_a.json"; }

inline const Environment& district() {
  static const Environment env = load_environment(load_config(district_config()).environment);
  return env;
}

inline Ring rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

// Street from (0,0) to (100,0) through (50,0), one 10 m home south-west of the
// middle node and a safe area around the east end.
inline Environment tiny_environment(std::string use = "home") {
  Environment env;
  const std::vector<RoadSegment> segs{{{{0, 0}, {50, 0}}, 6.0}, {{{50, 0}, {100, 0}}, 6.0}};
  env.roads = build_road_graph(segs);
  BuildingFootprint b;
  b.id = 1;
  b.polygon = rect(20, 10, 30, 20);
  b.height = 10.0;
  b.typology = "masonry";
  b.use = std::move(use);
  env.buildings.push_back(b);
  SafeArea s;
  s.id = 1;
  s.polygon = rect(95, -10, 115, 10);
  env.safe_areas.push_back(s);
  finalize_environment(env);
  return env;
}

// Jittered street grid with some edges removed (kept connected), a few buildings
// inside blocks and small safe areas centred on random nodes.
inline Environment random_environment(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dim(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int nx = dim(gen), ny = dim(gen);
  const double spacing = 40.0 + 40.0 * unit(gen);
  std::vector<std::vector<Point2D>> p(nx, std::vector<Point2D>(ny));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      p[i][j] = {i * spacing + (unit(gen) - 0.5) * 0.3 * spacing, j * spacing + (unit(gen) - 0.5) * 0.3 * spacing};

  std::vector<RoadSegment> all;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (i + 1 < nx) all.push_back({{p[i][j], p[i + 1][j]}, 4.0 + 6.0 * unit(gen)});
      if (j + 1 < ny) all.push_back({{p[i][j], p[i][j + 1]}, 4.0 + 6.0 * unit(gen)});
    }
  std::shuffle(all.begin(), all.end(), gen);
  std::vector<RoadSegment> kept = all;
  for (size_t k = 0; k < all.size() / 4; ++k) {
    auto trial = kept;
    trial.erase(trial.begin() + static_cast<long>(gen() % trial.size()));
    const auto g = build_road_graph(trial);
    if (g.nodes.size() == static_cast<size_t>(nx * ny) && connected_components(g).size() == 1) kept = trial;
  }

  Environment env;
  env.roads = build_road_graph(kept);
  int id = 1;
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) {
      if (unit(gen) < 0.3) continue;
      const double cx = 0.5 * (p[i][j].x + p[i + 1][j + 1].x), cy = 0.5 * (p[i][j].y + p[i + 1][j + 1].y);
      const double hw = spacing * (0.1 + 0.15 * unit(gen)), hh = spacing * (0.1 + 0.15 * unit(gen));
      BuildingFootprint b;
      b.id = id++;
      b.polygon = rect(cx - hw, cy - hh, cx + hw, cy + hh);
      b.height = 5.0 + 20.0 * unit(gen);
      b.typology = unit(gen) < 0.7 ? "masonry" : "concrete";
      b.use = "home";
      env.buildings.push_back(b);
    }
  const int areas = 1 + static_cast<int>(gen() % 3);
  for (int a = 0; a < areas; ++a) {
    const Point2D c = env.roads.nodes[gen() % env.roads.nodes.size()];
    SafeArea s;
    s.id = 10 + a;
    const double h = 2.0 + 4.0 * unit(gen);
    s.polygon = rect(c.x - h, c.y - h, c.x + h, c.y + h);
    env.safe_areas.push_back(s);
  }
  finalize_environment(env);
  return env;
}

// Brute-force object query: exact geometry test against every object.
inline std::vector<int> brute_neighbors(const Environment& env, Point2D c, double r, ObjectKind kind) {
  std::vector<int> out;
  auto ring_hit = [&](const Ring& ring) {
    if (point_in_polygon(c, ring)) return true;
    for (size_t i = 0; i < ring.size(); ++i)
      if (point_segment_distance(c, ring[i], ring[(i + 1) % ring.size()]) <= r) return true;
    return false;
  };
  switch (kind) {
    case ObjectKind::Building:
      for (const auto& b : env.buildings)
        if (ring_hit(b.polygon)) out.push_back(b.id);
      break;
    case ObjectKind::SafeArea:
      for (const auto& s : env.safe_areas)
        if (ring_hit(s.polygon)) out.push_back(s.id);
      break;
    case ObjectKind::SoilZone:
      for (const auto& z : env.soil_zones)
        if (ring_hit(z.polygon)) out.push_back(z.id);
      break;
    case ObjectKind::RoadNode:
      for (size_t n = 0; n < env.roads.nodes.size(); ++n)
        if (distance(c, env.roads.nodes[n]) <= r) out.push_back(static_cast<int>(n));
      break;
    case ObjectKind::RoadEdge:
      for (size_t e = 0; e < env.roads.edges.size(); ++e) {
        const auto& ed = env.roads.edges[e];
        if (point_segment_distance(c, env.roads.nodes[ed.a], env.roads.nodes[ed.b]) <= r)
          out.push_back(static_cast<int>(e));
      }
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All-pairs shortest paths over unblocked edges.
inline std::vector<std::vector<double>> floyd_warshall(const RoadGraph& g, const EdgeMask& mask) {
  const size_t n = g.nodes.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    if (mask.blocked(static_cast<int>(e))) continue;
    const auto& ed = g.edges[e];
    d[ed.a][ed.b] = std::min(d[ed.a][ed.b], ed.length);
    d[ed.b][ed.a] = std::min(d[ed.b][ed.a], ed.length);
  }
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Smallest id of a safe area a node lies in or within `tol` of, else -1.
inline int node_touches(const Environment& env, Point2D p, double tol) {
  for (const auto& s : env.safe_areas) {
    bool hit = point_in_polygon(p, s.polygon);
    for (size_t i = 0; i < s.polygon.size() && !hit; ++i)
      hit = point_segment_distance(p, s.polygon[i], s.polygon[(i + 1) % s.polygon.size()]) <= tol;
    if (hit) return s.id;
  }
  return -1;
}

inline int brute_nearest_node(const Environment& env, Point2D p) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (size_t n = 0; n < env.roads.nodes.size(); ++n)
    if (distance(p, env.roads.nodes[n]) < bd) {
      bd = distance(p, env.roads.nodes[n]);
      best = static_cast<int>(n);
    }
  return best;
}

// Expected escape length from a point (nullopt when no safe area is reachable).
inline std::optional<double> brute_escape_length(const Environment& env, const EdgeMask& mask, Point2D from) {
  for (const auto& s : env.safe_areas)
    if (point_in_polygon(from, s.polygon)) return 0.0;
  const auto d = floyd_warshall(env.roads, mask);
  const int o = brute_nearest_node(env, from);
  double best = std::numeric_limits<double>::infinity();
  for (size_t n = 0; n < env.roads.nodes.size(); ++n)
    if (node_touches(env, env.roads.nodes[n], env.options.snap_tolerance) >= 0) best = std::min(best, d[o][n]);
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

inline bool close_rel(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testsupport
