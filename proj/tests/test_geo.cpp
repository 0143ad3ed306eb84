#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "solace/geo.hpp"
#include "support.hpp"

using namespace solace;
using testsupport::rect;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json polygon_feature(int id, const Ring& ring, json props = json::object()) {
  json coords = json::array();
  for (auto p : ring) coords.push_back({p.x, p.y});
  coords.push_back({ring.front().x, ring.front().y});
  return {{"type", "Feature"}, {"id", id}, {"properties", props},
          {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({coords})}}}};
}

json line_feature(int id, std::vector<Point2D> pts, double width = 6.0) {
  json coords = json::array();
  for (auto p : pts) coords.push_back({p.x, p.y});
  return {{"type", "Feature"}, {"id", id}, {"properties", {{"width", width}}},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
}

void write(const fs::path& p, const json& features) {
  std::ofstream(p) << json{{"type", "FeatureCollection"}, {"features", features}}.dump();
}

struct Fixture {
  fs::path dir = fs::temp_directory_path() / "solace_geo_test";
  Fixture() {
    fs::remove_all(dir);
    fs::create_directories(dir);
    write(dir / "buildings.geojson",
          json::array({polygon_feature(7, rect(20, 10, 30, 20), {{"height", 10.0}, {"typology", "masonry"}})}));
    write(dir / "roads.geojson", json::array({line_feature(1, {{0, 0}, {50, 0}}), line_feature(2, {{50, 0}, {100, 0}})}));
    write(dir / "safe_areas.geojson", json::array({polygon_feature(1, rect(95, -10, 115, 10))}));
    write(dir / "soil.geojson", json::array());
  }
  Environment load() const {
    return load_environment(dir / "buildings.geojson", dir / "roads.geojson", dir / "safe_areas.geojson",
                            dir / "soil.geojson");
  }
};

// Independent blocking oracle: the edge comes within `buffer` of the footprint.
bool oracle_blocks(const Environment& env, const DebrisZone& d, int edge) {
  const auto& e = env.roads.edges[edge];
  const Point2D a = env.roads.nodes[e.a], b = env.roads.nodes[e.b];
  if (point_in_polygon(a, d.footprint) || point_in_polygon(b, d.footprint)) return true;
  double best = INFINITY;
  for (size_t i = 0; i < d.footprint.size(); ++i) {
    const Point2D p = d.footprint[i], q = d.footprint[(i + 1) % d.footprint.size()];
    if (segments_intersect(a, b, p, q)) return true;
    best = std::min({best, point_segment_distance(p, a, b), point_segment_distance(a, p, q),
                     point_segment_distance(b, p, q)});
  }
  return best <= d.buffer;
}

std::vector<DebrisZone> random_debris(const Environment& env, std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> ux(env.box.min_x, env.box.max_x), uy(env.box.min_y, env.box.max_y),
      us(1.0, 12.0), ub(0.0, 8.0);
  std::vector<DebrisZone> out;
  for (int i = 0; i < n; ++i) {
    const double x = ux(gen), y = uy(gen);
    out.push_back({i, rect(x, y, x + us(gen), y + us(gen)), ub(gen)});
  }
  return out;
}

// Shortest simple-path length by exhaustive enumeration.
double enumerate_best(const RoadGraph& g, const EdgeMask& mask, int u, const std::set<int>& targets,
                      std::vector<char>& seen, double so_far) {
  if (targets.contains(u)) return so_far;
  double best = INFINITY;
  seen[u] = 1;
  for (auto [e, v] : g.adjacency[u])
    if (!mask.blocked(e) && !seen[v]) best = std::min(best, enumerate_best(g, mask, v, targets, seen, so_far + g.edges[e].length));
  seen[u] = 0;
  return best;
}

}  // namespace

TEST_SUITE("geo") {
  TEST_CASE("minimal environment loads") {
    const Environment env = Fixture{}.load();
    CHECK(env.buildings.size() == 1);
    CHECK(env.roads.nodes.size() == 3);
    CHECK(env.roads.edges.size() == 2);
    CHECK(env.safe_areas.size() == 1);
    CHECK(env.soil_zones.empty());
    CHECK(env.buildings[0].id == 7);
    CHECK(env.box.contains(env.roads.nodes[1]));
  }

  TEST_CASE("degenerate building polygon is rejected with its feature id") {
    Fixture f;
    json bad = polygon_feature(42, rect(0, 0, 1, 1), {{"height", 5.0}});
    bad["geometry"]["coordinates"] = json::array({json::array({{0.0, 0.0}, {1.0, 1.0}})});
    write(f.dir / "buildings.geojson", json::array({bad}));
    try {
      (void)f.load();
      FAIL("expected a load error");
    } catch (const LoadError& e) {
      CHECK(e.feature() == "42");
      CHECK(std::string(e.what()).find("buildings.geojson") != std::string::npos);
    }
  }

  TEST_CASE("disconnected road network fails validation") {
    Fixture f;
    write(f.dir / "roads.geojson", json::array({line_feature(1, {{0, 0}, {50, 0}}), line_feature(2, {{52, 0}, {100, 0}})}));
    CHECK_THROWS_WITH_AS((void)f.load(), doctest::Contains("component"), ValidationError);
  }

  TEST_CASE("longitude/latitude ranges are refused") {
    Environment env;
    const std::vector<RoadSegment> segs{{{{5.70, 45.18}, {5.701, 45.18}}, 6.0}};
    env.roads = build_road_graph(segs, 0.0001);
    CHECK_THROWS_WITH_AS(finalize_environment(env), doctest::Contains("longitude"), ValidationError);
  }

  TEST_CASE("bundled district matches its manifest") {
    const Environment& env = testsupport::district();
    std::ifstream in(testsupport::source_dir() / "data" / "district_a" / "manifest.json");
    const json m = json::parse(in);
    CHECK(env.buildings.size() == m["buildings"].get<size_t>());
    CHECK(env.safe_areas.size() == m["safe_areas"].get<size_t>());
    CHECK(env.soil_zones.size() == m["soil_zones"].get<size_t>());
    CHECK(env.roads.edges.size() == m["road_segments"].get<size_t>());
    std::map<std::string, int> uses;
    for (const auto& b : env.buildings) ++uses[b.use];
    for (auto& [use, n] : m["buildings_by_use"].items()) CHECK(uses[use] == n.get<int>());
  }

  TEST_CASE("road graph snapping") {
    SUBCASE("shared endpoint") {
      const std::vector<RoadSegment> s{{{{0, 0}, {10, 0}}, 5}, {{{10, 0}, {10, 10}}, 5}};
      const auto g = build_road_graph(s);
      CHECK(g.nodes.size() == 3);
      CHECK(g.edges.size() == 2);
    }
    SUBCASE("endpoints 0.3 m apart merge") {
      const std::vector<RoadSegment> s{{{{0, 0}, {10, 0}}, 5}, {{{10.3, 0}, {20, 0}}, 5}};
      const auto g = build_road_graph(s);
      CHECK(g.nodes.size() == 3);
      CHECK(connected_components(g).size() == 1);
    }
    SUBCASE("endpoints 2 m apart stay separate") {
      const std::vector<RoadSegment> s{{{{0, 0}, {10, 0}}, 5}, {{{12, 0}, {20, 0}}, 5}};
      const auto g = build_road_graph(s);
      CHECK(g.nodes.size() == 4);
      CHECK(g.edges.size() == 2);
      CHECK_THROWS_AS(validate_connected(g), ValidationError);
    }
    SUBCASE("zero length after snapping is rejected") {
      const std::vector<RoadSegment> s{{{{0, 0}, {10, 0}}, 5}, {{{0, 0}, {0.2, 0}}, 5}};
      CHECK_THROWS_WITH_AS(build_road_graph(s), doctest::Contains("segment 1"), ValidationError);
    }
    SUBCASE("edge lengths equal node distances") {
      for (const auto& e : testsupport::district().roads.edges) {
        const auto& g = testsupport::district().roads;
        CHECK(testsupport::close_rel(e.length, distance(g.nodes[e.a], g.nodes[e.b]), 1e-6));
        CHECK(e.length > 0.0);
      }
    }
  }

  TEST_CASE("neighbors_within edge cases") {
    const Environment env = Fixture{}.load();
    CHECK(neighbors_within(env, {25, 15}, 0.0, ObjectKind::Building) == std::vector<int>{7});
    CHECK(neighbors_within(env, {0, 0}, 0.0, ObjectKind::Building).empty());
    const double big = env.box.diagonal() * 2;
    CHECK(neighbors_within(env, {0, 0}, big, ObjectKind::RoadNode) == std::vector<int>{0, 1, 2});
    CHECK(neighbors_within(env, {0, 0}, big, ObjectKind::RoadEdge).size() == 2);
    CHECK(neighbors_within(env, {0, 0}, big, ObjectKind::SafeArea) == std::vector<int>{1});
  }

  TEST_CASE("neighbors_within equals a linear scan") {
    std::mt19937_64 gen(11);
    for (int scene = 0; scene < 10; ++scene) {
      const Environment env = testsupport::random_environment(gen);
      std::uniform_real_distribution<double> ux(env.box.min_x, env.box.max_x), uy(env.box.min_y, env.box.max_y),
          ur(0.0, 80.0);
      for (int q = 0; q < 50; ++q) {
        const Point2D c{ux(gen), uy(gen)};
        const double r = ur(gen);
        for (auto kind : {ObjectKind::Building, ObjectKind::SafeArea, ObjectKind::RoadNode, ObjectKind::RoadEdge})
          CHECK(neighbors_within(env, c, r, kind) == testsupport::brute_neighbors(env, c, r, kind));
      }
    }
  }

  TEST_CASE("route inside a safe area is empty") {
    const Environment env = Fixture{}.load();
    const auto r = route_to_nearest_safe_area(env, EdgeMask(env.roads.edges.size()), {105, 0});
    REQUIRE(r);
    CHECK(r->edges.empty());
    CHECK(r->length == 0.0);
    CHECK(r->safe_area == 1);
  }

  TEST_CASE("route along a line graph") {
    const Environment env = Fixture{}.load();
    const auto r = route_to_nearest_safe_area(env, EdgeMask(env.roads.edges.size()), {1, 1});
    REQUIRE(r);
    CHECK(r->edges == std::vector<int>{0, 1});
    CHECK(r->length == doctest::Approx(100.0));
    EdgeMask cut(env.roads.edges.size());
    cut.block(1);
    CHECK_FALSE(route_to_nearest_safe_area(env, cut, {1, 1}));
  }

  TEST_CASE("route lengths equal an all-pairs oracle") {
    std::mt19937_64 gen(5);
    for (int scene = 0; scene < 20; ++scene) {
      const Environment env = testsupport::random_environment(gen);
      EdgeMask mask(env.roads.edges.size());
      for (size_t e = 0; e < env.roads.edges.size(); ++e)
        if (gen() % 6 == 0) mask.block(static_cast<int>(e));
      std::uniform_real_distribution<double> ux(env.box.min_x, env.box.max_x), uy(env.box.min_y, env.box.max_y);
      for (int q = 0; q < 10; ++q) {
        const Point2D from{ux(gen), uy(gen)};
        const auto got = route_to_nearest_safe_area(env, mask, from);
        const auto want = testsupport::brute_escape_length(env, mask, from);
        REQUIRE(got.has_value() == want.has_value());
        if (!got) continue;
        CHECK(testsupport::close_rel(got->length, *want));
        double sum = 0.0;
        for (size_t i = 0; i < got->edges.size(); ++i) {
          CHECK_FALSE(mask.blocked(got->edges[i]));
          sum += env.roads.edges[got->edges[i]].length;
        }
        CHECK(testsupport::close_rel(sum, got->length));
      }
    }
  }

  TEST_CASE("route is no longer than any enumerated path on small graphs") {
    std::mt19937_64 gen(17);
    int checked = 0;
    while (checked < 30) {
      const Environment env = testsupport::random_environment(gen);
      if (env.roads.nodes.size() > 12) continue;
      ++checked;
      const EdgeMask mask(env.roads.edges.size());
      std::set<int> targets;
      for (size_t n = 0; n < env.roads.nodes.size(); ++n)
        if (env.node_safe_area[n] >= 0) targets.insert(static_cast<int>(n));
      for (size_t n = 0; n < env.roads.nodes.size(); ++n) {
        const auto r = route_from_node(env, mask, static_cast<int>(n));
        std::vector<char> seen(env.roads.nodes.size(), 0);
        const double best = enumerate_best(env.roads, mask, static_cast<int>(n), targets, seen, 0.0);
        REQUIRE(r);
        CHECK(r->length <= best + 1e-9 * std::max(1.0, best));
      }
    }
  }

  TEST_CASE("route table variants and repeated calls agree") {
    std::mt19937_64 gen(23);
    const Environment env = testsupport::random_environment(gen);
    EdgeMask mask(env.roads.edges.size());
    mask.block(0);
    const auto a = route_table_serial(env, mask), b = route_table_parallel(env, mask), c = route_table_serial(env, mask);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].has_value() == b[i].has_value());
      if (!a[i]) continue;
      CHECK(a[i]->edges == b[i]->edges);
      CHECK(a[i]->edges == c[i]->edges);
      CHECK(a[i]->safe_area == b[i]->safe_area);
    }
  }

  TEST_CASE("debris blocking") {
    const Environment env = Fixture{}.load();
    EdgeMask mask(env.roads.edges.size());
    SUBCASE("no debris") { CHECK(apply_debris_blocking(env, {}, mask).empty()); }
    SUBCASE("debris across a centerline") {
      const std::vector<DebrisZone> d{{7, rect(20, -2, 30, 20), 0.0}};
      CHECK(apply_debris_blocking(env, d, mask) == std::vector<int>{0});
    }
    SUBCASE("buffer reaches the centerline") {
      const std::vector<DebrisZone> d{{7, rect(20, 10, 30, 20), 10.0}};
      CHECK(apply_debris_blocking(env, d, mask) == std::vector<int>{0});
      EdgeMask m2(env.roads.edges.size());
      const std::vector<DebrisZone> short_d{{7, rect(20, 10, 30, 20), 9.0}};
      CHECK(apply_debris_blocking(env, short_d, m2).empty());
    }
    SUBCASE("width-aware rule blocks narrow leftovers") {
      const std::vector<DebrisZone> d{{7, rect(20, 10, 30, 20), 9.5}};
      BlockingRule rule{BlockingRule::Mode::WidthAware, 4.0};
      CHECK(apply_debris_blocking(env, d, mask, rule) == std::vector<int>{0});
    }
  }

  TEST_CASE("debris blocking equals a geometric oracle and is monotone") {
    std::mt19937_64 gen(29);
    for (int scene = 0; scene < 10; ++scene) {
      const Environment env = testsupport::random_environment(gen);
      const auto debris = random_debris(env, gen, 30);
      EdgeMask mask(env.roads.edges.size());
      const auto got = apply_debris_blocking(env, debris, mask);
      std::vector<int> want;
      for (size_t e = 0; e < env.roads.edges.size(); ++e)
        for (const auto& d : debris)
          if (oracle_blocks(env, d, static_cast<int>(e))) {
            want.push_back(static_cast<int>(e));
            break;
          }
      CHECK(got == want);

      const std::span<const DebrisZone> first(debris.data(), 15);
      EdgeMask partial(env.roads.edges.size());
      const auto sub = apply_debris_blocking(env, first, partial);
      CHECK(std::includes(got.begin(), got.end(), sub.begin(), sub.end()));
    }
  }
}
