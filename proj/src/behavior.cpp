#include "solace/behavior.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace solace {

namespace {
constexpr std::array<std::string_view, kStateKinds> kStateNames = {
    "normal", "pre_evacuating", "evacuating", "seeking", "leading", "following", "arrived", "trapped"};
constexpr std::array<std::string_view, kPreEvacKinds> kPreEvacNames = {
    "seek_family", "milling", "herding", "protect_property", "seek_pets", "help_others"};
}  // namespace

std::string_view to_string(StateKind s) { return kStateNames[static_cast<size_t>(s)]; }
std::string_view to_string(PreEvacKind k) { return kPreEvacNames[static_cast<size_t>(k)]; }

std::optional<PreEvacKind> pre_evac_from_string(std::string_view s) {
  for (size_t i = 0; i < kPreEvacNames.size(); ++i)
    if (kPreEvacNames[i] == s) return static_cast<PreEvacKind>(i);
  return std::nullopt;
}

std::string_view to_string(PlanKind p) {
  switch (p) {
    case PlanKind::Evacuate: return "evacuate";
    case PlanKind::Seek: return "seek";
    case PlanKind::Group: return "group";
    case PlanKind::Follow: return "follow";
    case PlanKind::Stay: return "stay";
  }
  return "?";
}

bool is_legal_transition(StateKind from, StateKind to) {
  using S = StateKind;
  if (from == to) return true;
  switch (from) {
    case S::Normal: return to == S::PreEvacuating || to == S::Arrived;
    case S::PreEvacuating:
      return to == S::Evacuating || to == S::Seeking || to == S::Following || to == S::Trapped;
    case S::Evacuating:
      return to == S::Arrived || to == S::Trapped || to == S::Seeking || to == S::Following;
    case S::Seeking:
      return to == S::Evacuating || to == S::Leading || to == S::Trapped || to == S::Arrived;
    case S::Leading: return to == S::Arrived || to == S::Trapped || to == S::Evacuating;
    case S::Following:
      return to == S::Arrived || to == S::Trapped || to == S::Evacuating || to == S::PreEvacuating;
    case S::Arrived: return to == S::Seeking;
    case S::Trapped: return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Pre-evacuation

PreEvacTable PreEvacTable::defaults() {
  PreEvacTable t;
  t[PreEvacKind::SeekFamily] = {0.4, 0.0, 0.0};
  t[PreEvacKind::Milling] = {0.5, 10.0, 60.0};
  t[PreEvacKind::Herding] = {0.3, 5.0, 30.0};
  t[PreEvacKind::ProtectProperty] = {0.2, 20.0, 90.0};
  t[PreEvacKind::SeekPets] = {0.1, 15.0, 60.0};
  t[PreEvacKind::HelpOthers] = {0.15, 10.0, 60.0};
  return t;
}

void PreEvacTable::validate() const {
  for (size_t i = 0; i < kPreEvacKinds; ++i) {
    const auto& e = entries[i];
    const std::string name(kPreEvacNames[i]);
    if (!(e.probability >= 0.0 && e.probability <= 1.0))
      throw std::invalid_argument("pre-evacuation " + name + ": probability must be in [0,1]");
    if (!(e.min_s >= 0.0 && e.min_s <= e.max_s))
      throw std::invalid_argument("pre-evacuation " + name + ": duration range must satisfy 0 <= min <= max");
  }
}

bool PreEvacChoice::includes(PreEvacKind k) const {
  return std::any_of(behaviors.begin(), behaviors.end(), [k](const auto& b) { return b.kind == k; });
}

PreEvacChoice choose_pre_evacuation(const PreEvacTable& table, Rng& rng) {
  PreEvacChoice out;
  for (size_t i = 0; i < kPreEvacKinds; ++i) {
    const auto& e = table.entries[i];
    const bool take = rng.bernoulli(e.probability);
    const double duration = rng.uniform(e.min_s, e.max_s);
    if (!take) continue;
    out.behaviors.push_back({static_cast<PreEvacKind>(i), duration});
    out.delay += duration;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Beliefs

KinBelief* BeliefSet::find(int agent) {
  auto it = std::lower_bound(kin.begin(), kin.end(), agent, [](const KinBelief& k, int a) { return k.agent < a; });
  return (it != kin.end() && it->agent == agent) ? &*it : nullptr;
}

const KinBelief* BeliefSet::find(int agent) const { return const_cast<BeliefSet*>(this)->find(agent); }

std::vector<BeliefChange> revise_beliefs(BeliefSet& beliefs, const BeliefInputs& in, const BehaviorParams& params) {
  std::vector<BeliefChange> changes;
  if (in.felt_intensity && *in.felt_intensity >= params.quake_felt_threshold && !beliefs.self_unsafe) {
    beliefs.self_unsafe = true;
    beliefs.self_updated = in.now;
  }
  if (in.at_safe_area && !beliefs.self_safe) {
    beliefs.self_safe = true;
    beliefs.self_unsafe = false;
    beliefs.self_updated = in.now;
  }
  for (auto& kb : beliefs.kin) {
    const auto seen = std::find_if(in.percepts.begin(), in.percepts.end(),
                                   [&](const Percept& p) { return p.id == kb.agent; });
    if (seen != in.percepts.end()) {
      const auto pos = std::find_if(in.positions.begin(), in.positions.end(),
                                    [&](const PerceptionCandidate& c) { return c.id == kb.agent; });
      if (pos != in.positions.end()) kb.last_known = pos->position;
      kb.seen_at = in.now;
      kb.missing = false;
      if (!kb.in_view) changes.push_back({BeliefEvent::Perceived, kb.agent});
      kb.in_view = true;
      continue;
    }
    kb.in_view = false;
    if (kb.missing || kb.resolved) continue;
    if (in.at_safe_area || distance(in.self_position, kb.last_known) <= params.presence_radius) {
      kb.missing = true;
      changes.push_back({BeliefEvent::Missing, kb.agent});
    }
  }
  return changes;
}

// ---------------------------------------------------------------------------
// Desires and intentions

namespace {
bool is_family(RelationKind k) {
  return k == RelationKind::Child || k == RelationKind::Partner || k == RelationKind::Parent ||
         k == RelationKind::Sibling || k == RelationKind::Kin;
}
}  // namespace

std::vector<Desire> build_desires(const BeliefSet& beliefs, const DesireInputs& in, const BondTable& bonds) {
  std::vector<const KinBelief*> wanted;
  if (!in.following)
    for (const auto& kb : beliefs.kin) {
      if (kb.resolved) continue;
      const bool dependent = kb.dependent && kb.active;
      const bool sought = !kb.dependent && in.seek_family && kb.missing && is_family(kb.kind);
      if (dependent || sought) wanted.push_back(&kb);
    }
  std::stable_sort(wanted.begin(), wanted.end(), [&](const KinBelief* a, const KinBelief* b) {
    const auto ra = relation_rank(a->kind, bonds), rb = relation_rank(b->kind, bonds);
    if (ra != rb) return ra < rb;
    return a->agent < b->agent;
  });
  std::vector<Desire> out;
  int priority = 1;
  for (const auto* kb : wanted) out.push_back({DesireKind::KinSafe, kb->agent, priority++});
  if (in.arrived)
    out.push_back({DesireKind::StaySafe, -1, priority});
  else if (beliefs.self_unsafe)
    out.push_back({DesireKind::BeSafe, -1, priority});
  return out;
}

std::optional<Intention> select_intention(const BeliefSet& beliefs, std::span<const Desire> desires,
                                          const DesireInputs& in) {
  if (desires.empty()) return std::nullopt;
  const auto top = std::min_element(desires.begin(), desires.end(),
                                    [](const Desire& a, const Desire& b) { return a.priority < b.priority; });
  switch (top->kind) {
    case DesireKind::KinSafe: {
      const auto* kb = beliefs.find(top->target);
      const bool pupil = kb && kb->dependent && kb->kind == RelationKind::Colleague;
      return Intention{top->kind, in.teacher && pupil ? PlanKind::Group : PlanKind::Seek, top->target};
    }
    case DesireKind::BeSafe:
      return Intention{top->kind, in.following ? PlanKind::Follow : PlanKind::Evacuate, -1};
    case DesireKind::StaySafe: return Intention{top->kind, PlanKind::Stay, -1};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Movement

MoveResult advance(Point2D from, std::span<const Point2D> waypoints, size_t cursor, double budget) {
  MoveResult r{from, cursor, 0.0};
  while (r.cursor < waypoints.size() && budget > 0.0) {
    const Point2D target = waypoints[r.cursor];
    const double d = distance(r.position, target);
    if (d <= budget) {
      r.position = target;
      r.travelled += d;
      budget -= d;
      ++r.cursor;
    } else {
      r.position = r.position + (target - r.position) * (budget / d);
      r.travelled += budget;
      budget = 0.0;
    }
  }
  while (r.cursor < waypoints.size() && waypoints[r.cursor] == r.position) ++r.cursor;
  return r;
}

std::vector<Point2D> evacuation_waypoints(const Environment& env, Point2D from, const Route& route) {
  std::vector<Point2D> pts;
  if (route.nodes.empty()) return pts;
  for (int n : route.nodes) pts.push_back(env.roads.nodes[n]);
  if (const auto* area = env.safe_area(route.safe_area); area && !point_in_polygon(pts.back(), area->polygon)) {
    Point2D inside = area->center;
    if (!point_in_polygon(inside, area->polygon)) inside = (area->polygon[0] + area->center) * 0.5;
    pts.push_back(inside);
  }
  (void)from;
  return pts;
}

}  // namespace solace
