#include "solace/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace solace {

namespace {

constexpr double kForever = std::numeric_limits<double>::infinity();

int default_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool family_relation(RelationKind k) {
  return k == RelationKind::Child || k == RelationKind::Partner || k == RelationKind::Parent ||
         k == RelationKind::Sibling || k == RelationKind::Kin;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario and configuration

void Scenario::validate() const {
  if (name.empty()) throw std::invalid_argument("scenario name must not be empty");
  if (intensity < 1 || intensity > 12)
    throw std::invalid_argument("scenario " + name + ": intensity must be in 1..12, got " + std::to_string(intensity));
  if (k && !(*k > 0.0 && *k <= 1.0))
    throw std::invalid_argument("scenario " + name + ": visibility k must be in (0,1]");
}

std::vector<Scenario> standard_scenarios() {
  std::vector<Scenario> s(4);
  s[0].name = "S1";
  s[1].name = "S2";
  s[1].time_of_day = TimeOfDay::Night;
  s[2].name = "S3";
  s[2].include_disabled = true;
  s[3].name = "S4";
  s[3].intensity = 8;
  return s;
}

void ModelConfig::validate() const {
  population.validate();
  behavior.pre_evac.validate();
  if (!(pd_normal > 0.0)) throw std::invalid_argument("pd_normal must be positive");
  for (double k : {k_day, k_night})
    if (!(k > 0.0 && k <= 1.0)) throw std::invalid_argument("visibility k must be in (0,1]");
  if (!(debris_width_fraction >= 0.0)) throw std::invalid_argument("debris width fraction must be non-negative");
  if (!(blocking.passable_width >= 0.0)) throw std::invalid_argument("passable width must be non-negative");
  if (!(quake_duration >= 0.0)) throw std::invalid_argument("quake duration must be non-negative");
  for (const auto& [typology, levels] : damage)
    for (const auto& [level, p] : levels)
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("damage probability for " + typology + " at level " + std::to_string(level) +
                                    " must be in [0,1]");
  const auto& b = behavior;
  if (b.presence_radius < 0 || b.stale_after < 0 || b.child_wait_limit < 0 || b.gather_radius < 0 ||
      b.direct_walk_radius < 0 || !(b.arrive_tolerance > 0) || b.return_budget < 0)
    throw std::invalid_argument("behavior parameters must be non-negative (arrive tolerance positive)");
}

int SimConfig::ticks() const { return static_cast<int>(std::llround(horizon / dt)); }

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
  if (std::abs(ticks() * dt - horizon) > 1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument("horizon must be a multiple of dt");
  if (cadence < 1) throw std::invalid_argument("output cadence must be at least 1 tick");
}

// ---------------------------------------------------------------------------
// Metrics

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Adult: return "adult";
    case Category::Elderly: return "elderly";
    case Category::Child: return "child";
    case Category::Disabled: return "disabled";
    case Category::All: return "all";
  }
  return "?";
}

bool in_category(const Agent& a, Category c) {
  switch (c) {
    case Category::Adult: return a.group == AgeGroup::Adult15_29 || a.group == AgeGroup::Adult30_59;
    case Category::Elderly: return a.group == AgeGroup::Elderly60p;
    case Category::Child: return is_child(a.group);
    case Category::Disabled: return a.disabled;
    case Category::All: return true;
  }
  return false;
}

double MetricsFrame::fraction(Category c) const {
  const auto i = static_cast<size_t>(c);
  return population[i] == 0 ? 0.0 : static_cast<double>(arrived[i]) / population[i];
}

MetricsFrame record_frame(double t, std::span<const Agent> agents, std::span<const AgentRuntime> runtime) {
  MetricsFrame f;
  f.t = t;
  for (size_t i = 0; i < agents.size(); ++i) {
    const auto& rt = runtime[i];
    for (size_t c = 0; c < kCategories; ++c) {
      if (!in_category(agents[i], static_cast<Category>(c))) continue;
      ++f.population[c];
      if (rt.ever_arrived) ++f.arrived[c];
    }
    if (rt.ever_arrived) continue;
    switch (rt.state) {
      case StateKind::Trapped: ++f.trapped; break;
      case StateKind::PreEvacuating: ++f.preevac; break;
      case StateKind::Normal: ++f.normal; break;
      default: ++f.enroute; break;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(const Environment& env, const Scenario& scenario, const ModelConfig& model,
                       const SimConfig& sim)
    : Simulation(env,
                 synthesize_population(model.population, scenario.time_of_day, scenario.include_disabled, env,
                                       scenario.seed, model.households),
                 scenario, model, sim) {}

Simulation::Simulation(const Environment& env, Population population, const Scenario& scenario,
                       const ModelConfig& model, const SimConfig& sim)
    : env_(&env), scenario_(scenario), model_(model), sim_(sim), population_(std::move(population)) {
  scenario_.validate();
  sim_.validate();
  model_.validate();
  population_.network.set_profile(scenario_.profile);
  initialize();
}

void Simulation::initialize() {
  const Environment& env = *env_;
  const auto& bp = model_.behavior;
  const size_t n = population_.agents.size();

  EarthquakeEvent quake;
  quake.intensity = scenario_.intensity;
  quake.duration = model_.quake_duration;
  quake.epicentre = model_.epicentre;
  validate(quake);
  Rng damage_rng(scenario_.seed, "damage");
  impact_ = assess_quake(quake, env, model_.damage, damage_rng, model_.debris_width_fraction);
  blocked_ = EdgeMask(env.roads.edges.size());
  apply_debris_blocking(env, impact_.debris, blocked_, model_.blocking);
  routes_ = sim_.parallel ? route_table_parallel(env, blocked_) : route_table_serial(env, blocked_);

  std::map<int, size_t> building_slot;
  for (size_t b = 0; b < env.buildings.size(); ++b) building_slot[env.buildings[b].id] = b;

  cur_.assign(n, AgentRuntime{});
  pending_.assign(n, Pending{});
  const bool altruistic = scenario_.profile == AttachmentProfile::Altruistic;

  for (size_t i = 0; i < n; ++i) {
    const Agent& a = population_.agents[i];
    auto& rt = cur_[i];
    rt.position = a.position;
    if (!altruistic) continue;
    for (const auto& link : population_.network.links(static_cast<int>(i))) {
      const Agent& o = population_.agents[link.other];
      const bool pupil_link = link.kind == RelationKind::Colleague &&
                              ((a.role == Role::Teacher && is_child(o.group)) ||
                               (is_child(a.group) && o.role == Role::Teacher));
      if (!family_relation(link.kind) && !pupil_link) continue;
      KinBelief kb;
      kb.agent = link.other;
      kb.kind = link.kind;
      kb.dependent = (a.role == Role::Parent && link.kind == RelationKind::Child) ||
                     (a.role == Role::Teacher && pupil_link);
      kb.initial = kb.last_known = o.position;
      kb.seen_at = 0.0;
      rt.beliefs.kin.push_back(kb);
    }
    std::sort(rt.beliefs.kin.begin(), rt.beliefs.kin.end(),
              [](const KinBelief& x, const KinBelief& y) { return x.agent < y.agent; });
  }

  auto co_located = [&](int x, int y) {
    const Agent& a = population_.agents[x];
    const Agent& b = population_.agents[y];
    if (a.building >= 0 && a.building == b.building) return true;
    return distance(a.position, b.position) <= bp.presence_radius;
  };

  for (size_t i = 0; i < n; ++i) {
    const Agent& a = population_.agents[i];
    auto& rt = cur_[i];
    // Drawn for every agent so the stream layout does not depend on the outcome.
    Rng rng(scenario_.seed, "behavior", i);
    const auto choice = choose_pre_evacuation(bp.pre_evac, rng);

    const int area = env.safe_area_at(rt.position);
    int level = 0;
    if (a.building >= 0 && building_slot.contains(a.building))
      level = impact_.local_level[building_slot[a.building]];
    else
      level = local_intensity(quake, rt.position, env.soil_zones);

    for (auto& kb : rt.beliefs.kin)
      if (kb.dependent && co_located(static_cast<int>(i), kb.agent)) kb.active = true;

    BeliefInputs in;
    in.self_position = rt.position;
    in.at_safe_area = area >= 0;
    in.felt_intensity = level;
    in.now = 0.0;
    revise_beliefs(rt.beliefs, in, bp);
    for (auto& kb : rt.beliefs.kin) kb.missing = false;

    if (area >= 0) {
      rt.state = StateKind::Arrived;
      rt.ever_arrived = true;
      rt.arrival_time = 0.0;
      rt.arrived_area = area;
      continue;
    }
    if (!rt.beliefs.self_unsafe) continue;
    rt.state = StateKind::PreEvacuating;
    rt.unsafe = true;
    if (a.role == Role::Parent) rt.returns_left = bp.return_budget;

    if (is_child(a.group)) {
      bool guarded = false;
      for (const auto& link : population_.network.links(static_cast<int>(i))) {
        const Agent& g = population_.agents[link.other];
        const bool guardian = (link.kind == RelationKind::Parent && g.role == Role::Parent) ||
                              (link.kind == RelationKind::Colleague && g.role == Role::Teacher);
        if (guardian && co_located(static_cast<int>(i), link.other)) guarded = true;
      }
      rt.waiting = true;
      rt.timer = (a.vmax <= 0.0) ? kForever : (guarded ? bp.child_wait_limit : 0.0);
    } else {
      rt.timer = choice.delay;
      rt.seek_family = choice.includes(PreEvacKind::SeekFamily);
    }
  }

  if (sim_.record_trace)
    for (size_t i = 0; i < n; ++i)
      if (cur_[i].state != StateKind::Normal)
        trace_.push_back({0.0, static_cast<int>(i), std::string(to_string(cur_[i].state)), "normal"});
  next_ = cur_;
}

std::vector<PerceptionCandidate> Simulation::watch_positions(int id) const {
  std::vector<PerceptionCandidate> out;
  for (const auto& kb : cur_[id].beliefs.kin) out.push_back({kb.agent, cur_[kb.agent].position});
  return out;
}

std::vector<Percept> Simulation::perceive_kin(int id, std::span<const PerceptionCandidate> cands) const {
  PerceptionContext ctx;
  ctx.network = &population_.network;
  ctx.bonds = &model_.bonds;
  ctx.bias = EnvironmentBias{scenario_.visibility(model_.k_day, model_.k_night)};
  ctx.pd_normal = model_.pd_normal;
  return perceive(id, cur_[id].position, cands, ctx);
}

bool Simulation::adoptable(int id, const AgentRuntime& rt) const {
  if (rt.leader >= 0 || !rt.followers.empty()) return false;
  const Agent& a = population_.agents[id];
  if (is_child(a.group)) return rt.state == StateKind::PreEvacuating || rt.state == StateKind::Evacuating;
  return a.role == Role::None && rt.state == StateKind::PreEvacuating;
}

bool Simulation::kin_secure(int other, int self) const {
  (void)self;
  const auto& o = cur_[other];
  if (o.state == StateKind::Following || o.state == StateKind::Arrived) return true;
  if (is_child(population_.agents[other].group)) return false;
  return o.state == StateKind::Evacuating || o.state == StateKind::Leading || o.state == StateKind::Seeking;
}

double Simulation::group_speed(int id, const AgentRuntime& rt) const {
  double v = population_.agents[id].vmax;
  for (int f : rt.followers)
    if (!cur_[f].carried) v = std::min(v, population_.agents[f].vmax);
  return v;
}

bool Simulation::followers_gathered(int id, const AgentRuntime& rt) const {
  (void)id;
  for (int f : rt.followers)
    if (!cur_[f].carried && distance(cur_[f].position, rt.position) > model_.behavior.gather_radius) return false;
  return true;
}

bool Simulation::plan_route(int id, AgentRuntime& nx) const {
  (void)id;
  const Environment& env = *env_;
  nx.path.clear();
  nx.path_edges.clear();
  nx.cursor = 0;
  nx.has_goal = false;
  nx.route_version = mask_version_;
  if (env.safe_area_at(nx.position) >= 0) {
    nx.has_route = true;
    return true;
  }
  const int node = env.nearest_node(nx.position);
  if (node < 0 || !routes_[node]) {
    nx.has_route = false;
    return false;
  }
  const Route& r = *routes_[node];
  nx.path = evacuation_waypoints(env, nx.position, r);
  nx.path_edges.push_back(-1);
  for (int e : r.edges) nx.path_edges.push_back(e);
  while (nx.path_edges.size() < nx.path.size()) nx.path_edges.push_back(-1);
  nx.has_route = true;
  return true;
}

bool Simulation::plan_path_to(int id, AgentRuntime& nx, Point2D goal) const {
  (void)id;
  const Environment& env = *env_;
  nx.path.clear();
  nx.path_edges.clear();
  nx.cursor = 0;
  nx.has_route = false;
  nx.route_version = mask_version_;
  if (distance(nx.position, goal) <= model_.behavior.direct_walk_radius) {
    nx.path = {goal};
    nx.path_edges = {-1};
    return true;
  }
  const int from = env.nearest_node(nx.position);
  const int to = env.nearest_node(goal);
  if (from < 0 || to < 0) return false;
  const auto sp = shortest_path(env, blocked_, from, to);
  if (!sp) return false;
  for (int node : sp->nodes) nx.path.push_back(env.roads.nodes[node]);
  nx.path_edges.push_back(-1);
  for (int e : sp->edges) nx.path_edges.push_back(e);
  nx.path.push_back(goal);
  nx.path_edges.push_back(-1);
  return true;
}

void Simulation::move_on_path(int id, AgentRuntime& nx, double speed) const {
  (void)id;
  const auto r = advance(nx.position, nx.path, nx.cursor, speed * sim_.dt);
  nx.position = r.position;
  nx.cursor = r.cursor;
}

void Simulation::check_arrival(AgentRuntime& nx) const {
  if (nx.state != StateKind::Evacuating && nx.state != StateKind::Leading && nx.state != StateKind::Following)
    return;
  const int area = env_->safe_area_at(nx.position);
  if (area < 0) return;
  nx.state = StateKind::Arrived;
  nx.arrived_area = area;
  if (!nx.ever_arrived) {
    nx.ever_arrived = true;
    nx.arrival_time = t_ + sim_.dt;
  }
  nx.beliefs.self_safe = true;
  nx.beliefs.self_unsafe = false;
  nx.beliefs.self_updated = t_ + sim_.dt;
  nx.path.clear();
  nx.path_edges.clear();
  nx.cursor = 0;
  nx.has_route = false;
  nx.has_goal = false;
  nx.target = -1;
}

void Simulation::start_evacuation(int id, AgentRuntime& nx, Pending& out) const {
  (void)out;
  nx.state = nx.followers.empty() ? StateKind::Evacuating : StateKind::Leading;
  nx.target = -1;
  nx.has_goal = false;
  if (!plan_route(id, nx)) {
    nx.state = StateKind::Trapped;
    return;
  }
  if (nx.path.empty()) check_arrival(nx);
}

void Simulation::decide(int id, AgentRuntime& nx, Pending& out) const {
  const AgentRuntime& cur = cur_[id];
  const Agent& me = population_.agents[id];
  const auto& bp = model_.behavior;
  const double dt = sim_.dt;
  const double now = t_ + dt;

  if (cur.state == StateKind::Normal || cur.state == StateKind::Trapped) return;

  if (cur.state == StateKind::Following) {
    const auto& lead = cur_[cur.leader];
    const bool released = lead.state == StateKind::Trapped || lead.state == StateKind::Normal ||
                          lead.state == StateKind::PreEvacuating || lead.state == StateKind::Following ||
                          (lead.state == StateKind::Seeking && lead.ever_arrived);
    if (released) {
      nx.leader = -1;
      nx.carried = false;
      out.events.emplace_back("released", std::to_string(cur.leader));
      if (me.vmax <= 0.0) {
        nx.state = StateKind::PreEvacuating;
        nx.waiting = true;
        nx.timer = kForever;
      } else {
        start_evacuation(id, nx, out);
      }
      return;
    }
    if (cur.carried) return;  // placed with the carrier at commit
    const double d = distance(cur.position, lead.position);
    const double step = std::min(me.vmax * dt, d);
    if (d > 0.0) nx.position = cur.position + (lead.position - cur.position) * (step / d);
    check_arrival(nx);
    return;
  }

  const bool altruistic = scenario_.profile == AttachmentProfile::Altruistic;
  const bool may_return = me.role == Role::Parent && cur.returns_left > 0;
  if (altruistic && !cur.beliefs.kin.empty() && (cur.state != StateKind::Arrived || may_return)) {
    const auto cands = watch_positions(id);
    const auto percepts = perceive_kin(id, cands);
    BeliefInputs in;
    in.percepts = percepts;
    in.positions = cands;
    in.self_position = cur.position;
    in.at_safe_area = cur.state == StateKind::Arrived;
    in.now = now;
    for (const auto& ch : revise_beliefs(nx.beliefs, in, bp)) {
      if (ch.event == BeliefEvent::Perceived) {
        out.events.emplace_back("perceived", std::to_string(ch.subject));
      } else {
        out.events.emplace_back("missing", std::to_string(ch.subject));
        out.events.emplace_back("call", std::to_string(ch.subject));
      }
    }
    for (auto& kb : nx.beliefs.kin)
      if (!kb.resolved && kb.in_view && kin_secure(kb.agent, id)) kb.resolved = true;
  }

  DesireInputs din;
  din.arrived = cur.state == StateKind::Arrived;
  din.seek_family = cur.seek_family && !is_child(me.group);
  din.teacher = me.role == Role::Teacher && bp.teachers_group;

  if (cur.state == StateKind::PreEvacuating) {
    nx.timer = cur.timer - dt;
    if (nx.timer > 1e-9 || me.vmax <= 0.0) return;
    nx.timer = 0.0;
    if (cur.waiting) {
      nx.waiting = false;
      start_evacuation(id, nx, out);
      return;
    }
    const auto desires = build_desires(nx.beliefs, din, model_.bonds);
    const auto intent = select_intention(nx.beliefs, desires, din);
    if (intent && intent->desire == DesireKind::KinSafe && !is_child(me.group)) {
      nx.state = StateKind::Seeking;
      nx.target = -1;
      nx.has_goal = false;
      nx.has_route = false;
      return;
    }
    start_evacuation(id, nx, out);
    return;
  }

  if (cur.state == StateKind::Arrived) {
    if (!altruistic || !may_return) return;
    bool any = false;
    for (auto& kb : nx.beliefs.kin)
      if (kb.dependent && kb.missing && !kb.resolved) {
        kb.active = true;
        any = true;
      }
    if (!any) return;
    nx.returns_left = cur.returns_left - 1;
    nx.state = StateKind::Seeking;
    nx.followers.clear();
    nx.target = -1;
    nx.has_goal = false;
    nx.has_route = false;
    nx.path.clear();
    nx.path_edges.clear();
    nx.cursor = 0;
    nx.beliefs.self_safe = false;
    nx.beliefs.self_unsafe = true;
    out.events.emplace_back("re_entered", std::to_string(nx.arrived_area));
    return;
  }

  // Seeking, Evacuating or Leading.
  nx.followers.clear();
  for (int f : cur.followers)
    if (cur_[f].state == StateKind::Following && cur_[f].leader == id) nx.followers.push_back(f);

  const auto desires = build_desires(nx.beliefs, din, model_.bonds);
  const auto intent = select_intention(nx.beliefs, desires, din);
  const bool seek = intent && intent->desire == DesireKind::KinSafe && !is_child(me.group) &&
                    cur.state != StateKind::Leading &&
                    !(cur.state == StateKind::Evacuating && !nx.followers.empty());

  if (seek) {
    nx.state = StateKind::Seeking;
    const int target = intent->target;
    KinBelief* kb = nx.beliefs.find(target);
    if (cur.state != StateKind::Seeking || cur.target != target)
      out.events.emplace_back(intent->plan == PlanKind::Group ? "group" : "seek", std::to_string(target));

    // Infants are picked up on the spot, walkers join from where they stand.
    auto reachable = [&](int x) {
      return population_.agents[x].vmax > 0.0 || distance(cur.position, cur_[x].position) <= bp.arrive_tolerance;
    };
    std::vector<int> adopt;
    if (intent->plan == PlanKind::Group) {
      for (const auto& other : nx.beliefs.kin)
        if (other.dependent && other.active && !other.resolved && other.in_view &&
            adoptable(other.agent, cur_[other.agent]) && reachable(other.agent))
          adopt.push_back(other.agent);
    } else if (kb->in_view && adoptable(target, cur_[target]) && reachable(target)) {
      adopt.push_back(target);
    }
    if (!adopt.empty()) {
      out.adopt = std::move(adopt);
      return;
    }
    if (kb->in_view && !adoptable(target, cur_[target])) {
      // Seen but cannot be collected (already leading or being led elsewhere).
      kb->resolved = true;
      return;
    }

    Point2D goal = (now - kb->seen_at <= bp.stale_after) ? kb->last_known : kb->initial;
    if (distance(cur.position, goal) <= bp.arrive_tolerance) {
      if (distance(goal, kb->initial) > bp.arrive_tolerance) {
        kb->seen_at = -1e300;
        goal = kb->initial;
      } else {
        kb->resolved = true;
        nx.has_goal = false;
        out.events.emplace_back("gave_up", std::to_string(target));
        return;
      }
    }
    const bool replan = cur.target != target || !cur.has_goal || distance(cur.goal, goal) > bp.arrive_tolerance ||
                        cur.route_version != mask_version_;
    if (replan) {
      nx.target = target;
      nx.goal = goal;
      nx.has_goal = true;
      if (!plan_path_to(id, nx, goal)) {
        kb->resolved = true;
        nx.has_goal = false;
        out.events.emplace_back("gave_up", std::to_string(target));
        return;
      }
    }
    if (!followers_gathered(id, nx)) return;
    move_on_path(id, nx, group_speed(id, nx));
    return;
  }

  if (cur.state == StateKind::Seeking) {
    start_evacuation(id, nx, out);
    return;
  }
  {
    bool needs_route = !cur.has_route;
    if (!needs_route && cur.route_version != mask_version_) {
      for (size_t w = cur.cursor; w < cur.path_edges.size(); ++w)
        if (cur.path_edges[w] >= 0 && blocked_.blocked(cur.path_edges[w])) needs_route = true;
      // The edge being walked counts too.
      if (cur.cursor > 0 && cur.cursor - 1 < cur.path_edges.size()) {
        const int e = cur.path_edges[cur.cursor - 1];
        if (e >= 0 && blocked_.blocked(e)) needs_route = true;
      }
      if (!needs_route) nx.route_version = mask_version_;
      else out.events.emplace_back("reroute", "");
    }
    if (needs_route && !plan_route(id, nx)) {
      nx.state = StateKind::Trapped;
      return;
    }
  }
  if (!followers_gathered(id, nx)) return;
  move_on_path(id, nx, group_speed(id, nx));
  check_arrival(nx);
}

void Simulation::commit() {
  const size_t n = cur_.size();
  std::vector<std::string> adopted_by(n);
  for (size_t id = 0; id < n; ++id) {
    if (pending_[id].adopt.empty()) continue;
    auto& leader = next_[id];
    if (leader.state != StateKind::Seeking) continue;
    for (int x : pending_[id].adopt) {
      auto& f = next_[x];
      if (!adoptable(x, f)) continue;
      f.state = StateKind::Following;
      f.leader = static_cast<int>(id);
      f.carried = population_.agents[x].vmax <= 0.0;
      f.waiting = false;
      f.timer = 0.0;
      f.path.clear();
      f.path_edges.clear();
      f.cursor = 0;
      f.has_route = false;
      f.has_goal = false;
      f.target = -1;
      leader.followers.insert(std::lower_bound(leader.followers.begin(), leader.followers.end(), x), x);
      if (auto* kb = leader.beliefs.find(x)) kb->resolved = true;
      adopted_by[x] = std::to_string(id);
    }
  }
  for (size_t id = 0; id < n; ++id) {
    auto& f = next_[id];
    if (f.state != StateKind::Following || !f.carried) continue;
    f.position = next_[f.leader].position;
    check_arrival(f);
  }

  const double now = t_ + sim_.dt;
  for (size_t id = 0; id < n; ++id) {
    auto& p = pending_[id];
    if (cur_[id].state == StateKind::Arrived && next_[id].state == StateKind::Seeking) ++re_entered_;
    if (sim_.record_trace) {
      for (auto& [event, detail] : p.events) trace_.push_back({now, static_cast<int>(id), event, detail});
      if (!adopted_by[id].empty()) trace_.push_back({now, static_cast<int>(id), "adopted", adopted_by[id]});
      if (cur_[id].state != next_[id].state)
        trace_.push_back(
            {now, static_cast<int>(id), std::string(to_string(next_[id].state)), std::string(to_string(cur_[id].state))});
    }
    p.events.clear();
    p.adopt.clear();
  }
  std::swap(cur_, next_);
  t_ = now;
}

void Simulation::step() {
  if (sim_.parallel)
    step_parallel();
  else
    step_serial();
}

void Simulation::step_serial() {
  const int n = static_cast<int>(cur_.size());
  for (int i = 0; i < n; ++i) {
    next_[i] = cur_[i];
    decide(i, next_[i], pending_[i]);
  }
  commit();
}

void Simulation::step_parallel() {
  const int n = static_cast<int>(cur_.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < n; ++i) {
    next_[i] = cur_[i];
    decide(i, next_[i], pending_[i]);
  }
  commit();
}

void Simulation::block_edges(std::span<const int> edges) {
  bool changed = false;
  for (int e : edges) {
    if (e < 0 || static_cast<size_t>(e) >= blocked_.size())
      throw std::out_of_range("edge " + std::to_string(e) + " does not exist");
    if (!blocked_.blocked(e)) {
      blocked_.block(e);
      changed = true;
    }
  }
  if (!changed) return;
  ++mask_version_;
  routes_ = sim_.parallel ? route_table_parallel(*env_, blocked_) : route_table_serial(*env_, blocked_);
}

RunResult Simulation::run() {
  RunResult r;
  r.scenario = scenario_.name;
  r.seed = scenario_.seed;
  r.frames.push_back(frame());
  const int ticks = sim_.ticks();
  for (int k = 1; k <= ticks; ++k) {
    step();
    if (k % sim_.cadence == 0 || k == ticks) r.frames.push_back(frame());
  }
  r.final_tallies = frame();
  r.trace = trace_;
  for (size_t i = 0; i < cur_.size(); ++i) {
    const Agent& a = population_.agents[i];
    r.agents.push_back({a.group, a.disabled, cur_[i].state, cur_[i].arrival_time});
  }
  r.blocked_edges = blocked_.ids();
  r.damaged_buildings = impact_.damaged_count();
  r.re_entered = re_entered_;
  return r;
}

RunResult run(const Scenario& scenario, const Environment& env, const ModelConfig& model, const SimConfig& sim) {
  Simulation s(env, scenario, model, sim);
  return s.run();
}

// ---------------------------------------------------------------------------
// Batches

BatchResult batch_run(std::span<const Scenario> scenarios, std::span<const uint64_t> seeds, const Environment& env,
                      const ModelConfig& model, const SimConfig& sim, int threads) {
  if (threads <= 0)
    if (const char* v = std::getenv("SOLACE_THREADS")) threads = std::atoi(v);
  const int total = static_cast<int>(scenarios.size() * seeds.size());
  BatchResult out;
  out.runs.resize(total);
  std::vector<std::string> errors(total);
  SimConfig inner = sim;
  inner.parallel = false;

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads > 0 ? threads : default_threads())
  for (int k = 0; k < total; ++k) {
    Scenario sc = scenarios[k / seeds.size()];
    sc.seed = seeds[k % seeds.size()];
    try {
      out.runs[k] = run(sc, env, model, inner);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (int k = 0; k < total; ++k)
    if (!errors[k].empty()) throw BatchError(scenarios[k / seeds.size()].name, seeds[k % seeds.size()], errors[k]);
  out.summary = summarize(out.runs);
  out.paired = compare_paired(out.runs);
  return out;
}

std::vector<CategorySummary> summarize(std::span<const RunResult> runs) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunResult*>> by;
  for (const auto& r : runs) {
    if (!by.contains(r.scenario)) order.push_back(r.scenario);
    by[r.scenario].push_back(&r);
  }
  std::vector<CategorySummary> out;
  for (const auto& name : order) {
    const auto& rs = by[name];
    for (size_t c = 0; c < kCategories; ++c) {
      const auto cat = static_cast<Category>(c);
      CategorySummary s{name, cat, 0.0, 0.0, static_cast<int>(rs.size())};
      for (const auto* r : rs) s.mean_final += r->final_tallies.fraction(cat);
      s.mean_final /= rs.size();
      if (rs.size() > 1) {
        double ss = 0.0;
        for (const auto* r : rs) ss += std::pow(r->final_tallies.fraction(cat) - s.mean_final, 2);
        s.sd_final = std::sqrt(ss / (rs.size() - 1));
      }
      out.push_back(s);
    }
  }
  return out;
}

std::vector<PairedComparison> compare_paired(std::span<const RunResult> runs) {
  std::vector<std::string> order;
  std::map<std::string, std::map<uint64_t, double>> finals;
  for (const auto& r : runs) {
    if (!finals.contains(r.scenario)) order.push_back(r.scenario);
    finals[r.scenario][r.seed] = r.final_tallies.fraction(Category::All);
  }
  std::vector<PairedComparison> out;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j) {
      PairedComparison p{order[i], order[j], 0, 0, 0.0};
      for (const auto& [seed, a] : finals[order[i]]) {
        const auto it = finals[order[j]].find(seed);
        if (it == finals[order[j]].end()) continue;
        ++p.n;
        if (a > it->second) ++p.first_greater;
        p.mean_difference += a - it->second;
      }
      if (p.n > 0) p.mean_difference /= p.n;
      out.push_back(p);
    }
  return out;
}

}  // namespace solace
