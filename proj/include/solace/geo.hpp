#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solace/geometry.hpp"

namespace solace {

class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& file, const std::string& feature, const std::string& what)
      : std::runtime_error(file + ": feature " + feature + ": " + what), file_(file), feature_(feature) {}
  const std::string& file() const { return file_; }
  const std::string& feature() const { return feature_; }

 private:
  std::string file_;
  std::string feature_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuildingFootprint {
  int id = 0;
  Ring polygon;
  double height = 0.0;
  std::string typology;
  std::string vulnerability_class;
  std::string use;  // home | work | school | public
  std::map<int, double> damage_probabilities;  // intensity level -> probability
  Point2D center;
};

struct SoilZone {
  int id = 0;
  Ring polygon;
  int intensity_modifier = 0;
};

struct SafeArea {
  int id = 0;
  Ring polygon;
  Point2D center;
};

struct RoadEdge {
  int a = 0;
  int b = 0;
  double length = 0.0;
  double width = 0.0;
};

struct RoadSegment {
  std::vector<Point2D> points;
  double width = 0.0;
};

struct Adjacent {
  int edge;
  int node;
};

struct RoadGraph {
  std::vector<Point2D> nodes;
  std::vector<RoadEdge> edges;
  std::vector<std::vector<Adjacent>> adjacency;
  std::vector<int> blocked;  // sorted edge ids; a run keeps its own copy in EdgeMask

  int other(int edge, int node) const { return edges[edge].a == node ? edges[edge].b : edges[edge].a; }
};

// Per-run blocked-edge flags. Only ever gains entries.
class EdgeMask {
 public:
  EdgeMask() = default;
  explicit EdgeMask(size_t edge_count) : flags_(edge_count, 0) {}
  bool blocked(int edge) const { return flags_[edge] != 0; }
  void block(int edge) { flags_[edge] = 1; }
  size_t size() const { return flags_.size(); }
  std::vector<int> ids() const;

 private:
  std::vector<unsigned char> flags_;
};

// Shared endpoints within `snap` meters merge into one node.
RoadGraph build_road_graph(std::span<const RoadSegment> segments, double snap = 0.5);

std::vector<std::vector<int>> connected_components(const RoadGraph& graph);
// Throws ValidationError listing the components when the graph is not connected.
void validate_connected(const RoadGraph& graph);

enum class ObjectKind { Building, SafeArea, SoilZone, RoadNode, RoadEdge };

// Uniform grid over the environment bounding box. Objects are registered in every
// cell their bounding box overlaps; queries filter candidates with exact geometry.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(const BBox& extent, double cell_size);

  void insert(ObjectKind kind, int slot, const BBox& box);
  // Candidate slots whose boxes overlap `box`, sorted and unique.
  std::vector<int> candidates(ObjectKind kind, const BBox& box) const;
  double cell_size() const { return cell_; }

 private:
  struct CellRange {
    int x0, y0, x1, y1;
  };
  CellRange range(const BBox& box) const;

  BBox extent_;
  double cell_ = 25.0;
  int nx_ = 0;
  int ny_ = 0;
  std::map<ObjectKind, std::vector<std::vector<int>>> cells_;
};

struct EnvironmentOptions {
  double snap_tolerance = 0.5;
  double cell_size = 25.0;
};

struct Environment {
  std::vector<BuildingFootprint> buildings;  // ascending id
  std::vector<SoilZone> soil_zones;          // ascending id
  std::vector<SafeArea> safe_areas;          // ascending id
  RoadGraph roads;
  SpatialIndex index;
  BBox box;
  EnvironmentOptions options;
  // Smallest id of a safe area each node touches, or -1.
  std::vector<int> node_safe_area;

  const BuildingFootprint* building(int id) const;
  const SafeArea* safe_area(int id) const;
  // Id of the smallest-id safe area containing p, or -1.
  int safe_area_at(Point2D p) const;
  // Id of the smallest-id building containing p, or -1.
  int building_at(Point2D p) const;
  int nearest_node(Point2D p) const;
};

// Validates invariants, builds the node/safe-area map and the spatial index.
void finalize_environment(Environment& env);

Environment load_environment(const std::filesystem::path& building_file,
                             const std::filesystem::path& road_file,
                             const std::filesystem::path& safe_area_file,
                             const std::filesystem::path& soil_file,
                             const EnvironmentOptions& options = {});

// Ids (feature ids for polygons, indices for nodes/edges) of objects of `kind`
// whose geometry intersects the closed disc, ascending.
std::vector<int> neighbors_within(const Environment& env, Point2D center, double radius,
                                  ObjectKind kind);

struct Route {
  std::vector<int> edges;
  std::vector<int> nodes;  // nodes.size() == edges.size() + 1
  double length = 0.0;
  int safe_area = -1;
};

std::optional<Route> route_to_nearest_safe_area(const Environment& env, const EdgeMask& blocked,
                                                Point2D from);
std::optional<Route> route_from_node(const Environment& env, const EdgeMask& blocked, int origin);
std::optional<Route> shortest_path(const Environment& env, const EdgeMask& blocked, int from_node,
                                   int to_node);

// Escape route from every road node, indexed by node. Serial reference and
// OpenMP variant produce identical tables.
std::vector<std::optional<Route>> route_table_serial(const Environment& env, const EdgeMask& blocked);
std::vector<std::optional<Route>> route_table_parallel(const Environment& env,
                                                       const EdgeMask& blocked);

// A debris footprint: the closed region within `buffer` meters of `footprint`.
struct DebrisZone {
  int source_building = -1;
  Ring footprint;
  double buffer = 0.0;

  BBox box() const;
  double distance_to_segment(Point2D a, Point2D b) const;
  Ring outline(int arc_segments = 8) const { return buffered_hull(footprint, buffer, arc_segments); }
};

struct BlockingRule {
  enum class Mode { Centerline, WidthAware };
  Mode mode = Mode::Centerline;
  double passable_width = 1.0;  // meters, WidthAware only
};

bool debris_blocks_edge(const Environment& env, const DebrisZone& debris, int edge,
                        const BlockingRule& rule);

// Adds every edge obstructed by some debris zone to `blocked`; returns the sorted set.
std::vector<int> apply_debris_blocking(const Environment& env, std::span<const DebrisZone> debris,
                                       EdgeMask& blocked, const BlockingRule& rule = {});

}  // namespace solace
