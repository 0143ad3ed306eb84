#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "solace/geo.hpp"
#include "solace/rng.hpp"
#include "solace/social.hpp"

namespace solace {

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AgeGroup { Child0_2, Child3_14, Adult15_29, Adult30_59, Elderly60p };
inline constexpr size_t kAgeGroups = 5;
enum class LocationKind { Home, Work, School, Public, Outdoors };
inline constexpr size_t kLocationKinds = 5;
enum class TimeOfDay { Day, Night };
enum class Role { None, Parent, Teacher };

std::string_view to_string(AgeGroup g);
std::string_view to_string(LocationKind l);
std::string_view to_string(TimeOfDay t);
std::string_view to_string(Role r);
std::optional<AgeGroup> age_group_from_string(std::string_view s);
std::optional<LocationKind> location_from_string(std::string_view s);
// Building `use` tag matching a location kind ("home", "work", ...); empty for Outdoors.
std::string_view building_use(LocationKind l);

inline bool is_child(AgeGroup g) { return g == AgeGroup::Child0_2 || g == AgeGroup::Child3_14; }

struct LocationCounts {
  int day = 0;
  int night = 0;
};

struct GroupSpec {
  double disabled_lo_pct = 0.0;
  double disabled_hi_pct = 0.0;
  double speed_cap = 0.0;  // m/s
  std::array<LocationCounts, kLocationKinds> counts{};
};

struct PopulationSpec {
  std::array<GroupSpec, kAgeGroups> groups{};
  double speed_floor_fraction = 0.5;  // able vmax ~ U[floor * cap, cap]
  double disabled_speed_factor = 0.5;

  // Census-derived distribution for the two Grenoble districts.
  static PopulationSpec defaults();

  const GroupSpec& operator[](AgeGroup g) const { return groups[static_cast<size_t>(g)]; }
  GroupSpec& operator[](AgeGroup g) { return groups[static_cast<size_t>(g)]; }
  int count(AgeGroup g, LocationKind l, TimeOfDay t) const;
  int group_total(AgeGroup g, TimeOfDay t) const;
  int total(TimeOfDay t) const;
  void validate() const;
};

struct HouseholdOptions {
  int max_children = 3;
  double two_parent_probability = 0.7;
  double couple_probability = 0.5;
  int pupils_per_teacher = 25;
  int colleague_links = 2;  // per side, within one workplace
};

struct Agent {
  int id = 0;
  AgeGroup group = AgeGroup::Adult15_29;
  bool disabled = false;
  double vmax = 0.0;
  Role role = Role::None;
  int household = -1;
  LocationKind location = LocationKind::Home;
  int building = -1;  // building id, -1 outdoors
  Point2D position;
};

struct Household {
  int id = 0;
  std::vector<std::pair<int, RelationKind>> members;  // Parent / Child / Partner
  int home_building = -1;
};

struct Population {
  std::vector<Agent> agents;
  std::vector<Household> households;
  SocialNetwork network;
  std::array<double, kAgeGroups> disability_rate{};
};

// One disability rate per group per run, drawn from its percent range.
std::array<double, kAgeGroups> draw_disability_rates(const PopulationSpec& spec, Rng& rng);
bool sample_disability(AgeGroup group, double rate, Rng& rng);
// Draws the group's rate from `rng`, then one Bernoulli trial with it.
bool sample_disability(AgeGroup group, const PopulationSpec& spec, Rng& rng);
double sample_max_speed(AgeGroup group, bool disabled, const PopulationSpec& spec, Rng& rng);

// Assigns households, parent/teacher roles and the social network. Agents must
// already carry group, location and (for indoor agents) building.
void build_households_and_roles(Population& pop, const Environment& env, Rng& rng,
                                const HouseholdOptions& options = {});

Population synthesize_population(const PopulationSpec& spec, TimeOfDay time_of_day, bool include_disabled,
                                 const Environment& env, uint64_t seed, const HouseholdOptions& options = {});

// Uniform point inside a polygon (rejection sampling within its bounds).
Point2D random_point_in(const Ring& polygon, Rng& rng);

}  // namespace solace
