#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solace/geo.hpp"
#include "solace/rng.hpp"
#include "solace/social.hpp"

namespace solace {

enum class StateKind { Normal, PreEvacuating, Evacuating, Seeking, Leading, Following, Arrived, Trapped };
inline constexpr size_t kStateKinds = 8;
std::string_view to_string(StateKind s);

// Net per-tick transitions the engine is allowed to produce.
bool is_legal_transition(StateKind from, StateKind to);

enum class PreEvacKind { SeekFamily, Milling, Herding, ProtectProperty, SeekPets, HelpOthers };
inline constexpr size_t kPreEvacKinds = 6;
std::string_view to_string(PreEvacKind k);
std::optional<PreEvacKind> pre_evac_from_string(std::string_view s);

struct PreEvacBehavior {
  PreEvacKind kind;
  double duration = 0.0;
};

struct PreEvacEntry {
  double probability = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
};

struct PreEvacTable {
  std::array<PreEvacEntry, kPreEvacKinds> entries{};

  static PreEvacTable defaults();
  const PreEvacEntry& operator[](PreEvacKind k) const { return entries[static_cast<size_t>(k)]; }
  PreEvacEntry& operator[](PreEvacKind k) { return entries[static_cast<size_t>(k)]; }
  void validate() const;
};

struct PreEvacChoice {
  std::vector<PreEvacBehavior> behaviors;  // table order
  double delay = 0.0;
  bool includes(PreEvacKind k) const;
};

// Independent inclusion per behavior; durations uniform in [min,max]. Consumes a
// fixed number of draws regardless of the outcome.
PreEvacChoice choose_pre_evacuation(const PreEvacTable& table, Rng& rng);

struct BehaviorParams {
  PreEvacTable pre_evac = PreEvacTable::defaults();
  int quake_felt_threshold = 5;
  double presence_radius = 30.0;   // "at the expected location"
  double stale_after = 120.0;      // s before seeking falls back to the initial location
  double child_wait_limit = 300.0; // s a guarded child waits before leaving alone
  double gather_radius = 5.0;      // leaders wait until followers are this close
  double direct_walk_radius = 50.0;
  double arrive_tolerance = 1.0;
  int return_budget = 1;
  bool teachers_group = true;
};

// ---------------------------------------------------------------------------
// Beliefs

struct KinBelief {
  int agent = -1;
  RelationKind kind = RelationKind::Stranger;
  bool dependent = false;  // a child for a parent, a pupil for a teacher
  bool active = false;     // desire to secure this person is live
  bool in_view = false;
  bool missing = false;
  bool resolved = false;
  Point2D initial;
  Point2D last_known;
  double seen_at = -1e300;

  friend bool operator==(const KinBelief&, const KinBelief&) = default;
};

struct BeliefSet {
  bool self_unsafe = false;
  bool self_safe = false;
  double self_updated = -1e300;
  std::vector<KinBelief> kin;  // ascending agent id

  KinBelief* find(int agent);
  const KinBelief* find(int agent) const;

  friend bool operator==(const BeliefSet&, const BeliefSet&) = default;
};

enum class BeliefEvent { Perceived, Missing };
struct BeliefChange {
  BeliefEvent event;
  int subject;
};

struct BeliefInputs {
  std::span<const Percept> percepts;
  std::span<const PerceptionCandidate> positions;  // where perceived agents are
  Point2D self_position;
  bool at_safe_area = false;
  std::optional<int> felt_intensity;  // set on the tick the quake is felt
  double now = 0.0;
};

std::vector<BeliefChange> revise_beliefs(BeliefSet& beliefs, const BeliefInputs& in, const BehaviorParams& params);

// ---------------------------------------------------------------------------
// Desires and intentions

enum class DesireKind { BeSafe, KinSafe, StaySafe };
enum class PlanKind { Evacuate, Seek, Group, Follow, Stay };
std::string_view to_string(PlanKind p);

struct Desire {
  DesireKind kind;
  int target = -1;
  int priority = 1;  // 1 = highest
};

struct Intention {
  DesireKind desire;
  PlanKind plan;
  int target = -1;
};

struct DesireInputs {
  bool arrived = false;
  bool seek_family = false;  // SeekFamily pre-evacuation behaviour was chosen
  bool teacher = false;
  bool following = false;
};

// Desires ordered by priority: live kin desires (relation priority, then id) above
// the agent's own safety.
std::vector<Desire> build_desires(const BeliefSet& beliefs, const DesireInputs& in, const BondTable& bonds);
std::optional<Intention> select_intention(const BeliefSet& beliefs, std::span<const Desire> desires,
                                          const DesireInputs& in);

// ---------------------------------------------------------------------------
// Movement

// Advances along `waypoints` starting at index `cursor` by at most `budget` meters.
struct MoveResult {
  Point2D position;
  size_t cursor;
  double travelled;
};
MoveResult advance(Point2D from, std::span<const Point2D> waypoints, size_t cursor, double budget);

// Route nodes in order, plus a final point inside the safe area when the last
// node only touches its boundary. The walk from `from` to the first node is the
// caller's off-graph hop.
std::vector<Point2D> evacuation_waypoints(const Environment& env, Point2D from, const Route& route);

}  // namespace solace
