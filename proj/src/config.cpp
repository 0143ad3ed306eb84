#include "solace/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace solace {

using nlohmann::json;

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const std::string& key, double& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) throw ConfigError(child(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void get(const std::string& key, uint64_t& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(child(key) + ": expected a non-negative integer");
      out = v->get<uint64_t>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = raw(key)) {
      if (!v->is_boolean()) throw ConfigError(child(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) throw ConfigError(child(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError("unknown key '" + child(key) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.empty()) return path;
  if (path.is_relative()) path = base / path;
  return std::filesystem::absolute(path).lexically_normal();
}

TimeOfDay parse_time(const std::string& s, const std::string& key) {
  if (s == "day") return TimeOfDay::Day;
  if (s == "night") return TimeOfDay::Night;
  throw ConfigError(key + ": expected \"day\" or \"night\", got \"" + s + "\"");
}

AttachmentProfile parse_profile(const std::string& s, const std::string& key) {
  if (s == "altruistic") return AttachmentProfile::Altruistic;
  if (s == "egoistic") return AttachmentProfile::Egoistic;
  throw ConfigError(key + ": expected \"altruistic\" or \"egoistic\", got \"" + s + "\"");
}

Point2D parse_point(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(key + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

void read_environment(Reader r, EnvironmentFiles& env, const std::filesystem::path& base) {
  std::string b = env.buildings.string(), rd = env.roads.string(), s = env.safe_areas.string(),
              so = env.soil.string();
  r.get("buildings", b);
  r.get("roads", rd);
  r.get("safe_areas", s);
  r.get("soil", so);
  r.get("snap_tolerance", env.options.snap_tolerance);
  r.get("cell_size", env.options.cell_size);
  r.finish();
  env.buildings = resolve(b, base);
  env.roads = resolve(rd, base);
  env.safe_areas = resolve(s, base);
  env.soil = resolve(so, base);
}

Scenario read_scenario(Reader r, Scenario sc) {
  r.get("name", sc.name);
  std::string tod(to_string(sc.time_of_day));
  r.get("time_of_day", tod);
  sc.time_of_day = parse_time(tod, r.child("time_of_day"));
  r.get("intensity", sc.intensity);
  r.get("include_disabled", sc.include_disabled);
  if (const json* k = r.raw("k")) {
    if (k->is_null())
      sc.k.reset();
    else if (k->is_number())
      sc.k = k->get<double>();
    else
      throw ConfigError(r.child("k") + ": expected a number or null");
  }
  std::string profile = sc.profile == AttachmentProfile::Egoistic ? "egoistic" : "altruistic";
  r.get("profile", profile);
  sc.profile = parse_profile(profile, r.child("profile"));
  r.finish();
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return sc;
}

void read_population(Reader r, PopulationSpec& spec) {
  r.get("speed_floor_fraction", spec.speed_floor_fraction);
  r.get("disabled_speed_factor", spec.disabled_speed_factor);
  if (const json* groups = r.raw("groups")) {
    Reader gr(*groups, r.child("groups"));
    for (size_t g = 0; g < kAgeGroups; ++g) {
      const auto group = static_cast<AgeGroup>(g);
      const std::string name(to_string(group));
      const json* gj = gr.raw(name);
      if (!gj) continue;
      Reader one(*gj, gr.child(name));
      auto& gs = spec[group];
      if (const json* pct = one.raw("disabled_pct")) {
        if (!pct->is_array() || pct->size() != 2 || !(*pct)[0].is_number() || !(*pct)[1].is_number())
          throw ConfigError(one.child("disabled_pct") + ": expected [low, high]");
        gs.disabled_lo_pct = (*pct)[0].get<double>();
        gs.disabled_hi_pct = (*pct)[1].get<double>();
      }
      one.get("speed_cap", gs.speed_cap);
      if (const json* counts = one.raw("counts")) {
        Reader cr(*counts, one.child("counts"));
        for (size_t l = 0; l < kLocationKinds; ++l) {
          const std::string loc(to_string(static_cast<LocationKind>(l)));
          if (const json* c = cr.raw(loc)) {
            Reader lr(*c, cr.child(loc));
            lr.get("day", gs.counts[l].day);
            lr.get("night", gs.counts[l].night);
            lr.finish();
          }
        }
        cr.finish();
      }
      one.finish();
    }
    gr.finish();
  }
  r.finish();
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("population: ") + e.what());
  }
}

void read_households(Reader r, HouseholdOptions& h) {
  r.get("max_children", h.max_children);
  r.get("two_parent_probability", h.two_parent_probability);
  r.get("couple_probability", h.couple_probability);
  r.get("pupils_per_teacher", h.pupils_per_teacher);
  r.get("colleague_links", h.colleague_links);
  r.finish();
  if (h.max_children < 1 || h.pupils_per_teacher < 1 || h.colleague_links < 0 ||
      !(h.two_parent_probability >= 0 && h.two_parent_probability <= 1) ||
      !(h.couple_probability >= 0 && h.couple_probability <= 1))
    throw ConfigError("households: values out of range");
}

void read_bonds(Reader r, BondTable& bonds) {
  for (size_t i = 0; i < kRelationKinds; ++i) {
    const auto kind = static_cast<RelationKind>(i);
    double v = bonds[kind];
    r.get(std::string(to_string(kind)), v);
    try {
      bonds.set(kind, v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.child(std::string(to_string(kind))) + ": " + e.what());
    }
  }
  r.finish();
}

void read_perception(Reader r, ModelConfig& m) {
  r.get("pd_normal", m.pd_normal);
  r.get("k_day", m.k_day);
  r.get("k_night", m.k_night);
  r.finish();
}

void read_behavior(Reader r, BehaviorParams& b) {
  if (const json* pe = r.raw("pre_evacuation")) {
    Reader pr(*pe, r.child("pre_evacuation"));
    for (size_t i = 0; i < kPreEvacKinds; ++i) {
      const auto kind = static_cast<PreEvacKind>(i);
      const std::string name(to_string(kind));
      if (const json* e = pr.raw(name)) {
        Reader er(*e, pr.child(name));
        er.get("probability", b.pre_evac[kind].probability);
        er.get("min_s", b.pre_evac[kind].min_s);
        er.get("max_s", b.pre_evac[kind].max_s);
        er.finish();
      }
    }
    pr.finish();
  }
  r.get("quake_felt_threshold", b.quake_felt_threshold);
  r.get("presence_radius", b.presence_radius);
  r.get("stale_after", b.stale_after);
  r.get("child_wait_limit", b.child_wait_limit);
  r.get("gather_radius", b.gather_radius);
  r.get("direct_walk_radius", b.direct_walk_radius);
  r.get("arrive_tolerance", b.arrive_tolerance);
  r.get("return_budget", b.return_budget);
  r.get("teachers_group", b.teachers_group);
  r.finish();
}

void read_quake(Reader r, ModelConfig& m) {
  if (const json* d = r.raw("damage")) {
    Reader dr(*d, r.child("damage"));
    DamageTable table;
    for (const auto& [typology, levels] : d->items()) {
      dr.raw(typology);
      Reader lr(levels, dr.child(typology));
      for (const auto& [level, p] : levels.items()) {
        lr.raw(level);
        int lv = 0;
        try {
          size_t used = 0;
          lv = std::stoi(level, &used);
          if (used != level.size()) throw std::invalid_argument(level);
        } catch (const std::exception&) {
          throw ConfigError(lr.child(level) + ": intensity level keys must be integers");
        }
        if (!p.is_number()) throw ConfigError(lr.child(level) + ": expected a number");
        table[typology][lv] = p.get<double>();
      }
    }
    m.damage = std::move(table);
  }
  r.get("debris_width_fraction", m.debris_width_fraction);
  r.get("duration", m.quake_duration);
  if (const json* e = r.raw("epicentre")) {
    if (e->is_null())
      m.epicentre.reset();
    else
      m.epicentre = parse_point(*e, r.child("epicentre"));
  }
  if (const json* b = r.raw("blocking")) {
    Reader br(*b, r.child("blocking"));
    std::string mode = m.blocking.mode == BlockingRule::Mode::WidthAware ? "width_aware" : "centerline";
    br.get("mode", mode);
    if (mode == "centerline")
      m.blocking.mode = BlockingRule::Mode::Centerline;
    else if (mode == "width_aware")
      m.blocking.mode = BlockingRule::Mode::WidthAware;
    else
      throw ConfigError(br.child("mode") + ": expected \"centerline\" or \"width_aware\"");
    br.get("passable_width", m.blocking.passable_width);
    br.finish();
  }
  r.finish();
}

void read_sim(Reader r, SimConfig& s) {
  r.get("dt", s.dt);
  r.get("horizon", s.horizon);
  r.get("cadence", s.cadence);
  r.get("parallel", s.parallel);
  r.get("record_trace", s.record_trace);
  r.finish();
}

}  // namespace

const Scenario* RunConfig::scenario(const std::string& name) const {
  for (const auto& s : scenarios)
    if (s.name == name) return &s;
  return nullptr;
}

RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  Reader r(doc, "");
  if (const json* e = r.raw("environment")) read_environment(Reader(*e, "environment"), c.environment, base_dir);
  if (const json* s = r.raw("scenarios")) {
    if (!s->is_array() || s->empty()) throw ConfigError("scenarios: expected a non-empty list");
    c.scenarios.clear();
    std::set<std::string> names;
    for (size_t i = 0; i < s->size(); ++i) {
      auto sc = read_scenario(Reader((*s)[i], "scenarios." + std::to_string(i)), Scenario{});
      if (!names.insert(sc.name).second) throw ConfigError("scenarios: duplicate name " + sc.name);
      c.scenarios.push_back(sc);
    }
  }
  r.get("seed", c.seed);
  if (const json* p = r.raw("population")) read_population(Reader(*p, "population"), c.model.population);
  if (const json* h = r.raw("households")) read_households(Reader(*h, "households"), c.model.households);
  if (const json* b = r.raw("bonds")) read_bonds(Reader(*b, "bonds"), c.model.bonds);
  if (const json* p = r.raw("perception")) read_perception(Reader(*p, "perception"), c.model);
  if (const json* b = r.raw("behavior")) read_behavior(Reader(*b, "behavior"), c.model.behavior);
  if (const json* q = r.raw("quake")) read_quake(Reader(*q, "quake"), c.model);
  if (const json* s = r.raw("sim")) read_sim(Reader(*s, "sim"), c.sim);
  r.finish();
  for (auto& sc : c.scenarios) sc.seed = c.seed;
  try {
    c.model.validate();
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["environment"] = {{"buildings", c.environment.buildings.string()},
                      {"roads", c.environment.roads.string()},
                      {"safe_areas", c.environment.safe_areas.string()},
                      {"soil", c.environment.soil.string()},
                      {"snap_tolerance", c.environment.options.snap_tolerance},
                      {"cell_size", c.environment.options.cell_size}};
  j["scenarios"] = json::array();
  for (const auto& s : c.scenarios) {
    json sj = {{"name", s.name},
               {"time_of_day", std::string(to_string(s.time_of_day))},
               {"intensity", s.intensity},
               {"include_disabled", s.include_disabled},
               {"profile", s.profile == AttachmentProfile::Egoistic ? "egoistic" : "altruistic"}};
    sj["k"] = s.k ? json(*s.k) : json(nullptr);
    j["scenarios"].push_back(sj);
  }
  j["seed"] = c.seed;

  const auto& pop = c.model.population;
  json groups = json::object();
  for (size_t g = 0; g < kAgeGroups; ++g) {
    const auto& gs = pop.groups[g];
    json counts = json::object();
    for (size_t l = 0; l < kLocationKinds; ++l)
      counts[std::string(to_string(static_cast<LocationKind>(l)))] = {{"day", gs.counts[l].day},
                                                                       {"night", gs.counts[l].night}};
    groups[std::string(to_string(static_cast<AgeGroup>(g)))] = {
        {"disabled_pct", {gs.disabled_lo_pct, gs.disabled_hi_pct}}, {"speed_cap", gs.speed_cap}, {"counts", counts}};
  }
  j["population"] = {{"speed_floor_fraction", pop.speed_floor_fraction},
                     {"disabled_speed_factor", pop.disabled_speed_factor},
                     {"groups", groups}};

  const auto& h = c.model.households;
  j["households"] = {{"max_children", h.max_children},
                     {"two_parent_probability", h.two_parent_probability},
                     {"couple_probability", h.couple_probability},
                     {"pupils_per_teacher", h.pupils_per_teacher},
                     {"colleague_links", h.colleague_links}};

  json bonds = json::object();
  for (size_t i = 0; i < kRelationKinds; ++i) {
    const auto kind = static_cast<RelationKind>(i);
    bonds[std::string(to_string(kind))] = c.model.bonds[kind];
  }
  j["bonds"] = bonds;
  j["perception"] = {{"pd_normal", c.model.pd_normal}, {"k_day", c.model.k_day}, {"k_night", c.model.k_night}};

  const auto& b = c.model.behavior;
  json pre = json::object();
  for (size_t i = 0; i < kPreEvacKinds; ++i) {
    const auto kind = static_cast<PreEvacKind>(i);
    pre[std::string(to_string(kind))] = {
        {"probability", b.pre_evac[kind].probability}, {"min_s", b.pre_evac[kind].min_s}, {"max_s", b.pre_evac[kind].max_s}};
  }
  j["behavior"] = {{"pre_evacuation", pre},
                   {"quake_felt_threshold", b.quake_felt_threshold},
                   {"presence_radius", b.presence_radius},
                   {"stale_after", b.stale_after},
                   {"child_wait_limit", b.child_wait_limit},
                   {"gather_radius", b.gather_radius},
                   {"direct_walk_radius", b.direct_walk_radius},
                   {"arrive_tolerance", b.arrive_tolerance},
                   {"return_budget", b.return_budget},
                   {"teachers_group", b.teachers_group}};

  json damage = json::object();
  for (const auto& [typology, levels] : c.model.damage) {
    json lv = json::object();
    for (const auto& [level, p] : levels) lv[std::to_string(level)] = p;
    damage[typology] = lv;
  }
  json quake = {{"damage", damage},
                {"debris_width_fraction", c.model.debris_width_fraction},
                {"duration", c.model.quake_duration},
                {"blocking",
                 {{"mode", c.model.blocking.mode == BlockingRule::Mode::WidthAware ? "width_aware" : "centerline"},
                  {"passable_width", c.model.blocking.passable_width}}}};
  quake["epicentre"] = c.model.epicentre ? json{c.model.epicentre->x, c.model.epicentre->y} : json(nullptr);
  j["quake"] = quake;

  j["sim"] = {{"dt", c.sim.dt},
              {"horizon", c.sim.horizon},
              {"cadence", c.sim.cadence},
              {"parallel", c.sim.parallel},
              {"record_trace", c.sim.record_trace}};
  return j;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    parts.push_back(part);
  }
  for (size_t i = 0; i < parts.size(); ++i) {
    const bool last = i + 1 == parts.size();
    const auto& p = parts[i];
    if (node->is_array()) {
      size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw ConfigError("override '" + assignment + "': '" + p + "' is not a list index");
      }
      if (idx >= node->size()) throw ConfigError("override '" + assignment + "': index " + p + " out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("override '" + assignment + "': '" + p + "' is not inside an object");
      node = &(*node)[p];
    }
    if (last) *node = value;
  }
}

RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  json doc = json::parse(in, nullptr, false, true);
  if (doc.is_discarded()) throw ConfigError(file.string() + ": not valid JSON");
  if (overrides.empty()) return config_from_json(doc, file.parent_path());
  // Overrides address the effective config, so keys the file omits can be set too.
  json effective = config_to_json(config_from_json(doc, file.parent_path()));
  for (const auto& o : overrides) apply_override(effective, o);
  doc = std::move(effective);
  return config_from_json(doc, file.parent_path());
}

Environment load_environment(const EnvironmentFiles& files) {
  return load_environment(files.buildings, files.roads, files.safe_areas, files.soil, files.options);
}

}  // namespace solace
