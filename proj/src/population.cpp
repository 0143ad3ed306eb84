#include "solace/population.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace solace {

namespace {
constexpr std::array<std::string_view, kAgeGroups> kGroupNames = {"child_0_2", "child_3_14", "adult_15_29",
                                                                  "adult_30_59", "elderly_60p"};
constexpr std::array<std::string_view, kLocationKinds> kLocationNames = {"home", "work", "school", "public",
                                                                        "outdoors"};
}  // namespace

std::string_view to_string(AgeGroup g) { return kGroupNames[static_cast<size_t>(g)]; }
std::string_view to_string(LocationKind l) { return kLocationNames[static_cast<size_t>(l)]; }
std::string_view to_string(TimeOfDay t) { return t == TimeOfDay::Day ? "day" : "night"; }
std::string_view to_string(Role r) {
  switch (r) {
    case Role::Parent: return "parent";
    case Role::Teacher: return "teacher";
    default: return "none";
  }
}

std::optional<AgeGroup> age_group_from_string(std::string_view s) {
  for (size_t i = 0; i < kGroupNames.size(); ++i)
    if (kGroupNames[i] == s) return static_cast<AgeGroup>(i);
  return std::nullopt;
}

std::optional<LocationKind> location_from_string(std::string_view s) {
  for (size_t i = 0; i < kLocationNames.size(); ++i)
    if (kLocationNames[i] == s) return static_cast<LocationKind>(i);
  return std::nullopt;
}

std::string_view building_use(LocationKind l) {
  return l == LocationKind::Outdoors ? std::string_view{} : to_string(l);
}

// ---------------------------------------------------------------------------
// PopulationSpec

PopulationSpec PopulationSpec::defaults() {
  PopulationSpec s;
  using L = LocationKind;
  auto set = [&](AgeGroup g, double lo, double hi, double cap,
                 std::initializer_list<std::pair<L, LocationCounts>> counts) {
    auto& gs = s[g];
    gs.disabled_lo_pct = lo;
    gs.disabled_hi_pct = hi;
    gs.speed_cap = cap;
    for (auto [loc, c] : counts) gs.counts[static_cast<size_t>(loc)] = c;
  };
  set(AgeGroup::Child0_2, 0, 0, 0.0, {{L::Home, {75, 83}}, {L::Outdoors, {8, 0}}});
  set(AgeGroup::Child3_14, 0, 0, 2.23, {{L::Home, {0, 331}}, {L::School, {298, 0}}, {L::Outdoors, {33, 0}}});
  set(AgeGroup::Adult15_29, 1.2, 2.8, 3.83,
      {{L::Home, {209, 1842}}, {L::Work, {547, 0}}, {L::School, {902, 0}}, {L::Outdoors, {184, 0}}});
  set(AgeGroup::Adult30_59, 1.3, 12.3, 3.83, {{L::Home, {0, 1243}}, {L::Work, {1119, 0}}, {L::Outdoors, {124, 0}}});
  set(AgeGroup::Elderly60p, 10.2, 36.1, 1.11,
      {{L::Home, {553, 853}}, {L::Work, {215, 0}}, {L::Outdoors, {85, 0}}});
  return s;
}

int PopulationSpec::count(AgeGroup g, LocationKind l, TimeOfDay t) const {
  const auto& c = (*this)[g].counts[static_cast<size_t>(l)];
  return t == TimeOfDay::Day ? c.day : c.night;
}

int PopulationSpec::group_total(AgeGroup g, TimeOfDay t) const {
  int n = 0;
  for (size_t l = 0; l < kLocationKinds; ++l) n += count(g, static_cast<LocationKind>(l), t);
  return n;
}

int PopulationSpec::total(TimeOfDay t) const {
  int n = 0;
  for (size_t g = 0; g < kAgeGroups; ++g) n += group_total(static_cast<AgeGroup>(g), t);
  return n;
}

void PopulationSpec::validate() const {
  for (size_t g = 0; g < kAgeGroups; ++g) {
    const auto& gs = groups[g];
    const std::string name(kGroupNames[g]);
    if (!(gs.disabled_lo_pct >= 0 && gs.disabled_lo_pct <= gs.disabled_hi_pct && gs.disabled_hi_pct <= 100))
      throw SynthesisError(name + ": disabled percent range must satisfy 0 <= lo <= hi <= 100");
    if (!(gs.speed_cap >= 0)) throw SynthesisError(name + ": speed cap must be >= 0");
    for (const auto& c : gs.counts)
      if (c.day < 0 || c.night < 0) throw SynthesisError(name + ": counts must be >= 0");
  }
  if (!(speed_floor_fraction >= 0 && speed_floor_fraction <= 1))
    throw SynthesisError("speed_floor_fraction must be in [0,1]");
  if (!(disabled_speed_factor >= 0 && disabled_speed_factor <= 1))
    throw SynthesisError("disabled_speed_factor must be in [0,1]");
}

// ---------------------------------------------------------------------------
// Per-agent sampling

std::array<double, kAgeGroups> draw_disability_rates(const PopulationSpec& spec, Rng& rng) {
  std::array<double, kAgeGroups> rates{};
  for (size_t g = 0; g < kAgeGroups; ++g) {
    const auto& gs = spec.groups[g];
    const double u = rng.uniform();
    rates[g] = is_child(static_cast<AgeGroup>(g))
                   ? 0.0
                   : (gs.disabled_lo_pct + (gs.disabled_hi_pct - gs.disabled_lo_pct) * u) / 100.0;
  }
  return rates;
}

bool sample_disability(AgeGroup group, double rate, Rng& rng) {
  const bool hit = rng.bernoulli(rate);
  return !is_child(group) && hit;
}

bool sample_disability(AgeGroup group, const PopulationSpec& spec, Rng& rng) {
  const auto rates = draw_disability_rates(spec, rng);
  return sample_disability(group, rates[static_cast<size_t>(group)], rng);
}

double sample_max_speed(AgeGroup group, bool disabled, const PopulationSpec& spec, Rng& rng) {
  const double cap = spec[group].speed_cap;
  const double u = rng.uniform();
  const double able = cap * (spec.speed_floor_fraction + (1.0 - spec.speed_floor_fraction) * u);
  return disabled ? able * spec.disabled_speed_factor : able;
}

Point2D random_point_in(const Ring& polygon, Rng& rng) {
  const BBox b = bounds(polygon);
  for (int attempt = 0; attempt < 256; ++attempt) {
    const Point2D p{rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y)};
    if (point_in_polygon(p, polygon)) return p;
  }
  return centroid(polygon);
}

// ---------------------------------------------------------------------------
// Households and roles

namespace {

std::vector<int> buildings_with_use(const Environment& env, std::string_view use) {
  std::vector<int> ids;
  for (const auto& b : env.buildings)
    if (b.use == use) ids.push_back(b.id);
  return ids;
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

}  // namespace

void build_households_and_roles(Population& pop, const Environment& env, Rng& rng,
                                const HouseholdOptions& options) {
  auto& agents = pop.agents;
  pop.households.clear();
  pop.network = SocialNetwork(agents.size(), pop.network.profile());
  for (auto& a : agents) {
    a.household = -1;
    a.role = Role::None;
  }
  const auto homes = buildings_with_use(env, "home");

  std::vector<int> children, outdoor_parents, other_parents;
  for (const auto& a : agents) {
    if (is_child(a.group)) children.push_back(a.id);
    if (a.group == AgeGroup::Adult30_59)
      (a.location == LocationKind::Outdoors ? outdoor_parents : other_parents).push_back(a.id);
  }
  rng.shuffle(children.begin(), children.end());
  rng.shuffle(outdoor_parents.begin(), outdoor_parents.end());
  rng.shuffle(other_parents.begin(), other_parents.end());

  // Families: 1..max_children children with 1-2 parents aged 30-59.
  std::vector<std::vector<int>> families;
  for (size_t i = 0; i < children.size();) {
    const size_t size = 1 + rng.below(static_cast<uint64_t>(std::max(1, options.max_children)));
    std::vector<int> fam(children.begin() + i, children.begin() + std::min(children.size(), i + size));
    i += fam.size();
    families.push_back(std::move(fam));
  }
  size_t outdoor_next = 0, other_next = 0;
  auto take_parent = [&](bool prefer_outdoor) -> int {
    if (prefer_outdoor && outdoor_next < outdoor_parents.size()) return outdoor_parents[outdoor_next++];
    if (other_next < other_parents.size()) return other_parents[other_next++];
    if (outdoor_next < outdoor_parents.size()) return outdoor_parents[outdoor_next++];
    return -1;
  };

  auto home_for = [&](const std::vector<int>& members) {
    for (int m : members)
      if (agents[m].location == LocationKind::Home && agents[m].building >= 0) return agents[m].building;
    if (homes.empty()) throw SynthesisError("no building with use 'home' for households");
    return pick(homes, rng);
  };
  auto settle = [&](Household& h) {
    std::vector<int> ids;
    for (auto [id, kind] : h.members) ids.push_back(id);
    h.home_building = home_for(ids);
    for (int id : ids) {
      agents[id].household = h.id;
      if (agents[id].location == LocationKind::Home) agents[id].building = h.home_building;
    }
  };

  int deficit = 0;
  for (const auto& fam : families) {
    bool outdoor_child = false;
    for (int c : fam) outdoor_child |= agents[c].location == LocationKind::Outdoors;
    const int first = take_parent(outdoor_child);
    if (first < 0) {
      ++deficit;
      continue;
    }
    Household h;
    h.id = static_cast<int>(pop.households.size());
    h.members.push_back({first, RelationKind::Parent});
    if (rng.bernoulli(options.two_parent_probability))
      if (const int second = take_parent(false); second >= 0) h.members.push_back({second, RelationKind::Parent});
    for (int c : fam) h.members.push_back({c, RelationKind::Child});
    settle(h);
    pop.households.push_back(std::move(h));
  }
  if (deficit > 0)
    throw SynthesisError("not enough adults aged 30-59 to parent all children: " + std::to_string(deficit) +
                         " families lack a parent");

  for (const auto& h : pop.households) {
    std::vector<int> parents, kids;
    for (auto [id, kind] : h.members) (kind == RelationKind::Parent ? parents : kids).push_back(id);
    for (int p : parents) {
      agents[p].role = Role::Parent;
      for (int c : kids) pop.network.link(p, c, RelationKind::Child);
    }
    if (parents.size() == 2) pop.network.link(parents[0], parents[1], RelationKind::Partner);
    for (size_t i = 0; i < kids.size(); ++i)
      for (size_t j = i + 1; j < kids.size(); ++j) pop.network.link(kids[i], kids[j], RelationKind::Sibling);
  }

  // Couples among the remaining adults of the same group.
  for (AgeGroup g : {AgeGroup::Adult15_29, AgeGroup::Adult30_59, AgeGroup::Elderly60p}) {
    std::vector<int> single;
    for (const auto& a : agents)
      if (a.group == g && a.household < 0) single.push_back(a.id);
    rng.shuffle(single.begin(), single.end());
    for (size_t i = 0; i + 1 < single.size(); i += 2) {
      if (!rng.bernoulli(options.couple_probability)) continue;
      Household h;
      h.id = static_cast<int>(pop.households.size());
      h.members = {{single[i], RelationKind::Partner}, {single[i + 1], RelationKind::Partner}};
      settle(h);
      pop.network.link(single[i], single[i + 1], RelationKind::Partner);
      pop.households.push_back(std::move(h));
    }
  }
  for (auto& a : agents)
    if (a.location == LocationKind::Home && a.building < 0) {
      if (homes.empty()) throw SynthesisError("no building with use 'home'");
      a.building = pick(homes, rng);
    }

  // Teachers: adults 30-59 working that day, moved to a school that has pupils.
  std::map<int, std::vector<int>> pupils_by_school;
  for (const auto& a : agents)
    if (a.group == AgeGroup::Child3_14 && a.location == LocationKind::School) pupils_by_school[a.building].push_back(a.id);
  if (!pupils_by_school.empty()) {
    std::vector<int> staff;
    for (const auto& a : agents)
      if (a.group == AgeGroup::Adult30_59 && a.location == LocationKind::Work && a.role == Role::None)
        staff.push_back(a.id);
    rng.shuffle(staff.begin(), staff.end());
    size_t next = 0;
    for (auto& [school, pupils] : pupils_by_school) {
      const size_t per = static_cast<size_t>(std::max(1, options.pupils_per_teacher));
      const size_t needed = (pupils.size() + per - 1) / per;
      if (next + needed > staff.size())
        throw SynthesisError("not enough working adults aged 30-59 to staff school " + std::to_string(school));
      std::vector<int> teachers(staff.begin() + next, staff.begin() + next + needed);
      next += needed;
      std::sort(teachers.begin(), teachers.end());
      for (int t : teachers) {
        agents[t].role = Role::Teacher;
        agents[t].building = school;
      }
      for (size_t i = 0; i < pupils.size(); ++i)
        pop.network.link(teachers[i % teachers.size()], pupils[i], RelationKind::Colleague);
    }
  }

  // Colleagues within each workplace.
  std::map<int, std::vector<int>> workers;
  for (const auto& a : agents)
    if (a.location == LocationKind::Work && a.building >= 0) workers[a.building].push_back(a.id);
  for (auto& [b, ids] : workers) {
    if (ids.size() < 2) continue;
    const size_t reach = std::min<size_t>(static_cast<size_t>(std::max(0, options.colleague_links)), ids.size() - 1);
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t k = 1; k <= reach; ++k) {
        const int other = ids[(i + k) % ids.size()];
        if (other != ids[i] && !pop.network.relation(ids[i], other))
          pop.network.link(ids[i], other, RelationKind::Colleague);
      }
  }
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

// Point on a random road (length-weighted), offset within its width, outside
// buildings and safe areas.
Point2D random_road_point(const Environment& env, const std::vector<double>& cumulative, Rng& rng) {
  const auto& g = env.roads;
  for (int attempt = 0; attempt < 512; ++attempt) {
    const double r = rng.uniform() * cumulative.back();
    const size_t e = std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin();
    const auto& edge = g.edges[std::min(e, g.edges.size() - 1)];
    const Point2D a = g.nodes[edge.a], b = g.nodes[edge.b];
    const Point2D dir = (b - a) * (1.0 / edge.length);
    const Point2D side{-dir.y, dir.x};
    const Point2D p = a + (b - a) * rng.uniform() + side * rng.uniform(-0.5 * edge.width, 0.5 * edge.width);
    if (env.safe_area_at(p) < 0 && env.building_at(p) < 0 && env.box.contains(p)) return p;
  }
  throw SynthesisError("could not find an outdoor point outside buildings and safe areas");
}

}  // namespace

Population synthesize_population(const PopulationSpec& spec, TimeOfDay time_of_day, bool include_disabled,
                                 const Environment& env, uint64_t seed, const HouseholdOptions& options) {
  spec.validate();
  Rng disability_rng(seed, "population.disability");
  Rng speed_rng(seed, "population.speed");
  Rng place_rng(seed, "population.placement");
  Rng household_rng(seed, "population.households");

  Population pop;
  pop.disability_rate = draw_disability_rates(spec, disability_rng);
  if (!include_disabled) pop.disability_rate.fill(0.0);

  std::map<LocationKind, std::vector<int>> by_use;
  for (size_t g = 0; g < kAgeGroups; ++g)
    for (size_t l = 0; l < kLocationKinds; ++l) {
      const auto group = static_cast<AgeGroup>(g);
      const auto loc = static_cast<LocationKind>(l);
      const int n = spec.count(group, loc, time_of_day);
      if (n > 0 && loc != LocationKind::Outdoors && !by_use.contains(loc)) {
        by_use[loc] = buildings_with_use(env, building_use(loc));
        if (by_use[loc].empty())
          throw SynthesisError(std::string(to_string(group)) + " agents at " + std::string(to_string(loc)) +
                               " but the environment has no building with use '" +
                               std::string(building_use(loc)) + "'");
      }
      for (int i = 0; i < n; ++i) {
        Agent a;
        a.id = static_cast<int>(pop.agents.size());
        a.group = group;
        a.location = loc;
        pop.agents.push_back(a);
      }
    }

  for (auto& a : pop.agents) {
    // Draw for every agent so the disabled flag does not reshuffle other streams.
    const bool hit = sample_disability(a.group, pop.disability_rate[static_cast<size_t>(a.group)], disability_rng);
    a.disabled = include_disabled && hit;
    a.vmax = sample_max_speed(a.group, a.disabled, spec, speed_rng);
  }

  for (auto& a : pop.agents)
    if (a.location != LocationKind::Home && a.location != LocationKind::Outdoors)
      a.building = pick(by_use[a.location], place_rng);

  build_households_and_roles(pop, env, household_rng, options);

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& e : env.roads.edges) cumulative.push_back(acc += e.length);
  for (auto& a : pop.agents) {
    if (a.location == LocationKind::Outdoors) {
      if (cumulative.empty()) throw SynthesisError("outdoor agents need a road network");
      a.position = random_road_point(env, cumulative, place_rng);
    } else {
      a.position = random_point_in(env.building(a.building)->polygon, place_rng);
    }
  }
  // Outdoor children stay with an outdoor parent of their household.
  for (const auto& h : pop.households) {
    int carrier = -1;
    for (auto [id, kind] : h.members)
      if (kind == RelationKind::Parent && pop.agents[id].location == LocationKind::Outdoors) {
        carrier = id;
        break;
      }
    if (carrier < 0) continue;
    for (auto [id, kind] : h.members)
      if (kind == RelationKind::Child && pop.agents[id].location == LocationKind::Outdoors)
        pop.agents[id].position = pop.agents[carrier].position;
  }
  return pop;
}

}  // namespace solace
