#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

#include "solace/geo.hpp"

namespace solace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SpatialIndex

SpatialIndex::SpatialIndex(const BBox& extent, double cell_size) : extent_(extent), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw ValidationError("spatial index cell size must be > 0");
  nx_ = std::max(1, static_cast<int>(std::ceil(extent.width() / cell_size)));
  ny_ = std::max(1, static_cast<int>(std::ceil(extent.height() / cell_size)));
}

SpatialIndex::CellRange SpatialIndex::range(const BBox& box) const {
  auto cx = [&](double x) {
    return std::clamp(static_cast<int>(std::floor((x - extent_.min_x) / cell_)), 0, nx_ - 1);
  };
  auto cy = [&](double y) {
    return std::clamp(static_cast<int>(std::floor((y - extent_.min_y) / cell_)), 0, ny_ - 1);
  };
  return {cx(box.min_x), cy(box.min_y), cx(box.max_x), cy(box.max_y)};
}

void SpatialIndex::insert(ObjectKind kind, int slot, const BBox& box) {
  auto& cells = cells_[kind];
  if (cells.empty()) cells.resize(static_cast<size_t>(nx_) * ny_);
  const auto r = range(box);
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) cells[static_cast<size_t>(y) * nx_ + x].push_back(slot);
}

std::vector<int> SpatialIndex::candidates(ObjectKind kind, const BBox& box) const {
  std::vector<int> out;
  auto it = cells_.find(kind);
  if (it == cells_.end()) return out;
  if (box.max_x < extent_.min_x || box.min_x > extent_.max_x || box.max_y < extent_.min_y ||
      box.min_y > extent_.max_y)
    return out;
  const auto r = range(box);
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) {
      const auto& cell = it->second[static_cast<size_t>(y) * nx_ + x];
      out.insert(out.end(), cell.begin(), cell.end());
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Environment

namespace {

template <class T>
const T* find_by_id(const std::vector<T>& v, int id) {
  auto it = std::lower_bound(v.begin(), v.end(), id, [](const T& o, int i) { return o.id < i; });
  return (it != v.end() && it->id == id) ? &*it : nullptr;
}

// Interiors overlap; shared boundaries are allowed.
bool interiors_overlap(const Ring& a, const Ring& b) {
  auto strictly_inside = [](Point2D p, const Ring& r) {
    if (!point_in_polygon(p, r)) return false;
    for (size_t i = 0; i < r.size(); ++i)
      if (point_segment_distance(p, r[i], r[(i + 1) % r.size()]) < 1e-9) return false;
    return true;
  };
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) {
      const Point2D p = a[i], q = a[(i + 1) % a.size()];
      const Point2D r = b[j], s = b[(j + 1) % b.size()];
      const double o1 = cross(q - p, r - p), o2 = cross(q - p, s - p);
      const double o3 = cross(s - r, p - r), o4 = cross(s - r, q - r);
      if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return true;
    }
  for (auto p : a)
    if (strictly_inside(p, b)) return true;
  for (auto p : b)
    if (strictly_inside(p, a)) return true;
  return strictly_inside(centroid(a), b) && strictly_inside(centroid(b), a);
}

template <class T>
void sort_and_check_ids(std::vector<T>& v, const char* what) {
  std::sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.id < b.id; });
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i].id == v[i - 1].id)
      throw ValidationError(std::string("duplicate ") + what + " id " + std::to_string(v[i].id));
}

}  // namespace

const BuildingFootprint* Environment::building(int id) const { return find_by_id(buildings, id); }
const SafeArea* Environment::safe_area(int id) const { return find_by_id(safe_areas, id); }

int Environment::safe_area_at(Point2D p) const {
  const auto ids = neighbors_within(*this, p, 0.0, ObjectKind::SafeArea);
  return ids.empty() ? -1 : ids.front();
}

int Environment::building_at(Point2D p) const {
  const auto ids = neighbors_within(*this, p, 0.0, ObjectKind::Building);
  return ids.empty() ? -1 : ids.front();
}

int Environment::nearest_node(Point2D p) const {
  if (roads.nodes.empty()) return -1;
  double radius = index.cell_size();
  const double limit = 2.0 * box.diagonal() + distance(p, {box.min_x, box.min_y}) + radius;
  for (;; radius *= 2.0) {
    const auto ids = neighbors_within(*this, p, radius, ObjectKind::RoadNode);
    if (!ids.empty()) {
      int best = ids.front();
      double best_d = distance(p, roads.nodes[best]);
      for (int n : ids) {
        const double d = distance(p, roads.nodes[n]);
        if (d < best_d) {
          best = n;
          best_d = d;
        }
      }
      return best;
    }
    if (radius > limit) break;
  }
  return -1;
}

void finalize_environment(Environment& env) {
  sort_and_check_ids(env.buildings, "building");
  sort_and_check_ids(env.safe_areas, "safe area");
  sort_and_check_ids(env.soil_zones, "soil zone");

  for (auto& b : env.buildings) {
    const std::string fid = std::to_string(b.id);
    if (b.polygon.size() < 3) throw ValidationError("building " + fid + ": polygon has fewer than 3 vertices");
    if (!is_simple_polygon(b.polygon)) throw ValidationError("building " + fid + ": polygon is not simple");
    if (!(b.height > 0.0)) throw ValidationError("building " + fid + ": height must be > 0");
    double prev = 0.0;
    for (auto [level, p] : b.damage_probabilities) {
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("building " + fid + ": damage probability outside [0,1]");
      if (p < prev)
        throw ValidationError("building " + fid + ": damage probabilities decrease with intensity");
      prev = p;
    }
    b.center = centroid(b.polygon);
  }
  for (auto& s : env.safe_areas) {
    const std::string fid = std::to_string(s.id);
    if (!is_simple_polygon(s.polygon)) throw ValidationError("safe area " + fid + ": polygon is degenerate");
    for (const auto& b : env.buildings)
      if (polygons_intersect(s.polygon, b.polygon))
        throw ValidationError("safe area " + fid + " intersects building " + std::to_string(b.id));
    s.center = centroid(s.polygon);
  }
  for (const auto& z : env.soil_zones) {
    const std::string fid = std::to_string(z.id);
    if (!is_simple_polygon(z.polygon)) throw ValidationError("soil zone " + fid + ": polygon is degenerate");
    if (z.intensity_modifier < -1 || z.intensity_modifier > 1)
      throw ValidationError("soil zone " + fid + ": intensity_modifier must be -1, 0 or +1");
  }
  for (size_t i = 0; i < env.soil_zones.size(); ++i)
    for (size_t j = i + 1; j < env.soil_zones.size(); ++j)
      if (interiors_overlap(env.soil_zones[i].polygon, env.soil_zones[j].polygon))
        throw ValidationError("soil zones " + std::to_string(env.soil_zones[i].id) + " and " +
                              std::to_string(env.soil_zones[j].id) + " overlap");

  for (size_t e = 0; e < env.roads.edges.size(); ++e) {
    const auto& edge = env.roads.edges[e];
    const double d = distance(env.roads.nodes[edge.a], env.roads.nodes[edge.b]);
    if (!(edge.length > 0.0) || std::abs(edge.length - d) > 1e-6 * d)
      throw ValidationError("road edge " + std::to_string(e) + ": length does not match node distance");
  }
  validate_connected(env.roads);

  BBox box;
  for (const auto& b : env.buildings) box.expand(bounds(b.polygon));
  for (const auto& s : env.safe_areas) box.expand(bounds(s.polygon));
  for (const auto& z : env.soil_zones) box.expand(bounds(z.polygon));
  box.expand(bounds(env.roads.nodes));
  if (box.empty()) throw ValidationError("environment is empty");
  if (box.min_x >= -180 && box.max_x <= 180 && box.min_y >= -90 && box.max_y <= 90 && box.diagonal() < 1.0)
    throw ValidationError("coordinates look like longitude/latitude; a projected meter CRS is required");
  env.box = box;

  env.index = SpatialIndex(box, env.options.cell_size);
  for (size_t i = 0; i < env.buildings.size(); ++i)
    env.index.insert(ObjectKind::Building, static_cast<int>(i), bounds(env.buildings[i].polygon));
  for (size_t i = 0; i < env.safe_areas.size(); ++i)
    env.index.insert(ObjectKind::SafeArea, static_cast<int>(i), bounds(env.safe_areas[i].polygon));
  for (size_t i = 0; i < env.soil_zones.size(); ++i)
    env.index.insert(ObjectKind::SoilZone, static_cast<int>(i), bounds(env.soil_zones[i].polygon));
  for (size_t i = 0; i < env.roads.nodes.size(); ++i) {
    BBox nb;
    nb.expand(env.roads.nodes[i]);
    env.index.insert(ObjectKind::RoadNode, static_cast<int>(i), nb);
  }
  for (size_t i = 0; i < env.roads.edges.size(); ++i) {
    BBox eb;
    eb.expand(env.roads.nodes[env.roads.edges[i].a]);
    eb.expand(env.roads.nodes[env.roads.edges[i].b]);
    env.index.insert(ObjectKind::RoadEdge, static_cast<int>(i), eb);
  }

  env.node_safe_area.assign(env.roads.nodes.size(), -1);
  for (size_t n = 0; n < env.roads.nodes.size(); ++n) {
    const auto ids =
        neighbors_within(env, env.roads.nodes[n], env.options.snap_tolerance, ObjectKind::SafeArea);
    if (!ids.empty()) env.node_safe_area[n] = ids.front();
  }
  env.roads.blocked.clear();
}

// ---------------------------------------------------------------------------
// Queries

std::vector<int> neighbors_within(const Environment& env, Point2D center, double radius,
                                  ObjectKind kind) {
  radius = std::max(radius, 0.0);
  BBox q;
  q.expand(Point2D{center.x - radius, center.y - radius});
  q.expand(Point2D{center.x + radius, center.y + radius});
  std::vector<int> out;
  for (int slot : env.index.candidates(kind, q)) {
    switch (kind) {
      case ObjectKind::Building:
        if (point_polygon_distance(center, env.buildings[slot].polygon) <= radius)
          out.push_back(env.buildings[slot].id);
        break;
      case ObjectKind::SafeArea:
        if (point_polygon_distance(center, env.safe_areas[slot].polygon) <= radius)
          out.push_back(env.safe_areas[slot].id);
        break;
      case ObjectKind::SoilZone:
        if (point_polygon_distance(center, env.soil_zones[slot].polygon) <= radius)
          out.push_back(env.soil_zones[slot].id);
        break;
      case ObjectKind::RoadNode:
        if (distance(center, env.roads.nodes[slot]) <= radius) out.push_back(slot);
        break;
      case ObjectKind::RoadEdge: {
        const auto& e = env.roads.edges[slot];
        if (point_segment_distance(center, env.roads.nodes[e.a], env.roads.nodes[e.b]) <= radius)
          out.push_back(slot);
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// GeoJSON loading

namespace {

json read_collection(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError(file.string(), "-", "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError(file.string(), "-", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array())
    throw LoadError(file.string(), "-", "expected a GeoJSON FeatureCollection");
  return doc;
}

struct FeatureCtx {
  std::string file;
  std::string fid;
  [[noreturn]] void fail(const std::string& msg) const { throw LoadError(file, fid, msg); }
};

Point2D parse_point(const json& c, const FeatureCtx& ctx) {
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number())
    ctx.fail("coordinate is not a [x, y] number pair");
  const Point2D p{c[0].get<double>(), c[1].get<double>()};
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) ctx.fail("non-finite coordinate");
  return p;
}

Ring parse_polygon(const json& geom, const FeatureCtx& ctx) {
  if (!geom.is_object() || geom.value("type", "") != "Polygon") ctx.fail("geometry must be a Polygon");
  const auto& rings = geom["coordinates"];
  if (!rings.is_array() || rings.empty()) ctx.fail("polygon has no rings");
  if (rings.size() > 1) ctx.fail("polygon holes are not supported");
  Ring ring;
  for (const auto& c : rings[0]) ring.push_back(parse_point(c, ctx));
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) ctx.fail("polygon needs at least 3 distinct vertices");
  if (!is_simple_polygon(ring)) ctx.fail("polygon is not simple");
  return ring;
}

int feature_id(const json& f, size_t index, const std::string& file) {
  if (!f.contains("id") || !f["id"].is_number_integer())
    throw LoadError(file, "#" + std::to_string(index), "feature needs an integer id");
  return f["id"].get<int>();
}

const json& properties(const json& f) {
  static const json empty = json::object();
  return (f.contains("properties") && f["properties"].is_object()) ? f["properties"] : empty;
}

double number_prop(const json& props, const char* key, const FeatureCtx& ctx) {
  if (!props.contains(key) || !props[key].is_number()) ctx.fail(std::string("missing numeric property '") + key + "'");
  return props[key].get<double>();
}

}  // namespace

Environment load_environment(const std::filesystem::path& building_file,
                             const std::filesystem::path& road_file,
                             const std::filesystem::path& safe_area_file,
                             const std::filesystem::path& soil_file,
                             const EnvironmentOptions& options) {
  Environment env;
  env.options = options;

  {
    const auto doc = read_collection(building_file);
    size_t i = 0;
    for (const auto& f : doc["features"]) {
      BuildingFootprint b;
      b.id = feature_id(f, i++, building_file.string());
      const FeatureCtx ctx{building_file.string(), std::to_string(b.id)};
      b.polygon = parse_polygon(f["geometry"], ctx);
      const auto& p = properties(f);
      b.height = number_prop(p, "height", ctx);
      if (!(b.height > 0.0)) ctx.fail("height must be > 0");
      b.typology = p.value("typology", "");
      b.vulnerability_class = p.value("vulnerability_class", "");
      b.use = p.value("use", "");
      if (p.contains("damage_probabilities")) {
        if (!p["damage_probabilities"].is_object()) ctx.fail("damage_probabilities must be an object");
        for (auto& [k, v] : p["damage_probabilities"].items()) {
          int level = 0;
          try {
            size_t used = 0;
            level = std::stoi(k, &used);
            if (used != k.size()) throw std::invalid_argument(k);
          } catch (const std::exception&) {
            ctx.fail("damage_probabilities key '" + k + "' is not an intensity level");
          }
          if (!v.is_number()) ctx.fail("damage probability for level " + k + " is not a number");
          const double prob = v.get<double>();
          if (!(prob >= 0.0 && prob <= 1.0)) ctx.fail("damage probability for level " + k + " outside [0,1]");
          b.damage_probabilities[level] = prob;
        }
        double prev = 0.0;
        for (auto [level, prob] : b.damage_probabilities) {
          if (prob < prev) ctx.fail("damage probabilities decrease with intensity");
          prev = prob;
        }
      }
      env.buildings.push_back(std::move(b));
    }
  }

  {
    const auto doc = read_collection(road_file);
    std::vector<RoadSegment> segments;
    size_t i = 0;
    for (const auto& f : doc["features"]) {
      const std::string fid = f.contains("id") ? f["id"].dump() : "#" + std::to_string(i);
      ++i;
      const FeatureCtx ctx{road_file.string(), fid};
      const auto& g = f["geometry"];
      if (!g.is_object() || g.value("type", "") != "LineString") ctx.fail("geometry must be a LineString");
      RoadSegment seg;
      for (const auto& c : g["coordinates"]) seg.points.push_back(parse_point(c, ctx));
      if (seg.points.size() < 2) ctx.fail("line string needs at least 2 points");
      seg.width = number_prop(properties(f), "width", ctx);
      if (!(seg.width > 0.0)) ctx.fail("width must be > 0");
      segments.push_back(std::move(seg));
    }
    try {
      env.roads = build_road_graph(segments, options.snap_tolerance);
    } catch (const ValidationError& e) {
      throw LoadError(road_file.string(), "-", e.what());
    }
  }

  {
    const auto doc = read_collection(safe_area_file);
    size_t i = 0;
    for (const auto& f : doc["features"]) {
      SafeArea s;
      s.id = feature_id(f, i++, safe_area_file.string());
      s.polygon = parse_polygon(f["geometry"], {safe_area_file.string(), std::to_string(s.id)});
      env.safe_areas.push_back(std::move(s));
    }
  }

  {
    const auto doc = read_collection(soil_file);
    size_t i = 0;
    for (const auto& f : doc["features"]) {
      SoilZone z;
      z.id = feature_id(f, i++, soil_file.string());
      const FeatureCtx ctx{soil_file.string(), std::to_string(z.id)};
      z.polygon = parse_polygon(f["geometry"], ctx);
      const auto& p = properties(f);
      if (!p.contains("intensity_modifier") || !p["intensity_modifier"].is_number_integer())
        ctx.fail("missing integer property 'intensity_modifier'");
      z.intensity_modifier = p["intensity_modifier"].get<int>();
      if (z.intensity_modifier < -1 || z.intensity_modifier > 1) ctx.fail("intensity_modifier must be -1, 0 or +1");
      env.soil_zones.push_back(std::move(z));
    }
  }

  finalize_environment(env);
  return env;
}

}  // namespace solace
