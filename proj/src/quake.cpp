#include "solace/quake.hpp"

#include <algorithm>
#include <stdexcept>

namespace solace {

void validate(const EarthquakeEvent& event) {
  if (event.intensity < 1 || event.intensity > 12) throw std::invalid_argument("intensity must be in [1,12]");
  if (!(event.duration > 0.0)) throw std::invalid_argument("quake duration must be > 0");
}

DamageTable default_damage_table() {
  return {
      {"masonry", {{6, 0.25}, {8, 0.70}}},
      {"concrete", {{6, 0.05}, {8, 0.30}}},
  };
}

int local_intensity(const EarthquakeEvent& event, Point2D site, std::span<const SoilZone> soil) {
  int modifier = 0;
  for (const auto& z : soil)
    if (point_in_polygon(site, z.polygon)) {
      modifier = z.intensity_modifier;
      break;
    }
  return std::clamp(event.intensity + modifier, 1, 12);
}

int local_intensity(const EarthquakeEvent& event, const BuildingFootprint& building,
                    std::span<const SoilZone> soil) {
  return local_intensity(event, centroid(building.polygon), soil);
}

double damage_probability(const BuildingFootprint& building, int level, const DamageTable& defaults) {
  const std::map<int, double>* table = &building.damage_probabilities;
  if (table->empty()) {
    auto it = defaults.find(building.typology);
    if (it == defaults.end()) return 0.0;
    table = &it->second;
  }
  if (table->empty()) return 0.0;
  double best = 0.0;
  int best_gap = -1;
  for (auto [l, p] : *table) {
    const int gap = std::abs(l - level);
    if (best_gap < 0 || gap < best_gap) {  // ascending keys: lower level wins ties
      best_gap = gap;
      best = p;
    }
  }
  return best;
}

DamageState damage_from_draw(const BuildingFootprint& building, int level, const DamageTable& defaults,
                             double draw) {
  return draw < damage_probability(building, level, defaults) ? DamageState::Damaged : DamageState::Intact;
}

DamageState sample_damage(const BuildingFootprint& building, int level, const DamageTable& defaults, Rng& rng) {
  return damage_from_draw(building, level, defaults, rng.uniform());
}

std::optional<DebrisZone> generate_debris(const BuildingFootprint& building, DamageState state,
                                          double width_fraction) {
  if (width_fraction < 0.0) throw std::invalid_argument("debris width fraction must be >= 0");
  if (state == DamageState::Intact) return std::nullopt;
  return DebrisZone{building.id, building.polygon, width_fraction * building.height};
}

int QuakeImpact::damaged_count() const {
  return static_cast<int>(std::count(damage.begin(), damage.end(), DamageState::Damaged));
}

QuakeImpact assess_quake(const EarthquakeEvent& event, const Environment& env, const DamageTable& defaults,
                         Rng& rng, double width_fraction) {
  validate(event);
  QuakeImpact out;
  out.local_level.reserve(env.buildings.size());
  out.damage.reserve(env.buildings.size());
  for (const auto& b : env.buildings) {
    const int level = local_intensity(event, b, env.soil_zones);
    const auto state = sample_damage(b, level, defaults, rng);
    out.local_level.push_back(level);
    out.damage.push_back(state);
    if (auto d = generate_debris(b, state, width_fraction)) out.debris.push_back(std::move(*d));
  }
  return out;
}

}  // namespace solace
