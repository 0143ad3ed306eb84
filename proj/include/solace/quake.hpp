#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solace/geo.hpp"
#include "solace/rng.hpp"

namespace solace {

struct EarthquakeEvent {
  int intensity = 6;  // macroseismic level, 1..12
  double onset_time = 0.0;
  double duration = 30.0;
  std::optional<Point2D> epicentre;  // accepted, not used for attenuation
};

void validate(const EarthquakeEvent& event);

enum class DamageState { Intact, Damaged };

// Per-typology damage probability by intensity level; used for buildings that
// carry no table of their own.
using DamageTable = std::map<std::string, std::map<int, double>>;
DamageTable default_damage_table();

int local_intensity(const EarthquakeEvent& event, Point2D site, std::span<const SoilZone> soil);
int local_intensity(const EarthquakeEvent& event, const BuildingFootprint& building,
                    std::span<const SoilZone> soil);

// Probability at `level`, taken from the nearest defined level (lower on ties).
double damage_probability(const BuildingFootprint& building, int level, const DamageTable& defaults);

// Damaged iff `draw` < probability. One draw per building keeps outcomes monotone in level.
DamageState damage_from_draw(const BuildingFootprint& building, int level, const DamageTable& defaults,
                             double draw);
DamageState sample_damage(const BuildingFootprint& building, int level, const DamageTable& defaults, Rng& rng);

std::optional<DebrisZone> generate_debris(const BuildingFootprint& building, DamageState state,
                                          double width_fraction = 0.5);

struct QuakeImpact {
  std::vector<int> local_level;          // per building, env order
  std::vector<DamageState> damage;       // per building, env order
  std::vector<DebrisZone> debris;
  int damaged_count() const;
};

// Draws one uniform per building in ascending id from `rng`.
QuakeImpact assess_quake(const EarthquakeEvent& event, const Environment& env, const DamageTable& defaults,
                         Rng& rng, double width_fraction = 0.5);

}  // namespace solace
