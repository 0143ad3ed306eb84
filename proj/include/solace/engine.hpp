#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solace/behavior.hpp"
#include "solace/geo.hpp"
#include "solace/population.hpp"
#include "solace/quake.hpp"
#include "solace/social.hpp"

namespace solace {

struct Scenario {
  std::string name = "S1";
  TimeOfDay time_of_day = TimeOfDay::Day;
  int intensity = 6;
  bool include_disabled = false;
  std::optional<double> k;  // visibility override
  AttachmentProfile profile = AttachmentProfile::Altruistic;
  uint64_t seed = 1;

  double visibility(double k_day = 1.0, double k_night = 0.2) const {
    return k.value_or(time_of_day == TimeOfDay::Night ? k_night : k_day);
  }
  void validate() const;
};

// The four rows compared in the experiments: S1 day/6, S2 night/6, S3 day/6 with
// disabled agents, S4 day/8.
std::vector<Scenario> standard_scenarios();

struct ModelConfig {
  PopulationSpec population = PopulationSpec::defaults();
  HouseholdOptions households;
  BondTable bonds;
  BehaviorParams behavior;
  DamageTable damage = default_damage_table();
  double debris_width_fraction = 0.5;
  BlockingRule blocking;
  double pd_normal = 50.0;
  double k_day = 1.0;
  double k_night = 0.2;
  double quake_duration = 30.0;
  std::optional<Point2D> epicentre;

  void validate() const;
};

struct SimConfig {
  double dt = 1.0;
  double horizon = 1000.0;
  int cadence = 1;  // ticks between recorded frames
  bool parallel = false;
  bool record_trace = true;

  int ticks() const;
  void validate() const;
};

enum class Category { Adult, Elderly, Child, Disabled, All };
inline constexpr size_t kCategories = 5;
std::string_view to_string(Category c);
bool in_category(const Agent& a, Category c);

struct MetricsFrame {
  double t = 0.0;
  std::array<int, kCategories> arrived{};
  std::array<int, kCategories> population{};
  int trapped = 0;
  int enroute = 0;
  int preevac = 0;
  int normal = 0;

  // 0 for an empty category.
  double fraction(Category c) const;
  int tally_sum() const { return arrived[static_cast<size_t>(Category::All)] + trapped + enroute + preevac + normal; }
};

struct TraceEvent {
  double t = 0.0;
  int agent = -1;
  std::string event;
  std::string detail;
};

struct AgentRuntime {
  StateKind state = StateKind::Normal;
  Point2D position;
  double timer = 0.0;
  bool waiting = false;      // guarded child waiting to be collected
  bool seek_family = false;  // SeekFamily behaviour chosen
  bool unsafe = false;

  std::vector<Point2D> path;
  std::vector<int> path_edges;  // edge reaching each waypoint, -1 for off-graph hops
  size_t cursor = 0;
  bool has_route = false;
  int route_version = -1;

  int target = -1;
  Point2D goal;
  bool has_goal = false;

  int leader = -1;
  bool carried = false;
  std::vector<int> followers;  // ascending

  bool ever_arrived = false;
  double arrival_time = -1.0;
  int arrived_area = -1;
  int returns_left = 0;

  BeliefSet beliefs;

  friend bool operator==(const AgentRuntime&, const AgentRuntime&) = default;
};

MetricsFrame record_frame(double t, std::span<const Agent> agents, std::span<const AgentRuntime> runtime);

struct AgentOutcome {
  AgeGroup group;
  bool disabled;
  StateKind final_state;
  double arrival_time;  // -1 when never arrived
};

struct RunResult {
  std::string scenario;
  uint64_t seed = 0;
  std::vector<MetricsFrame> frames;
  MetricsFrame final_tallies;
  std::vector<TraceEvent> trace;
  std::vector<AgentOutcome> agents;
  std::vector<int> blocked_edges;
  int damaged_buildings = 0;
  int re_entered = 0;
};

class Simulation {
 public:
  Simulation(const Environment& env, const Scenario& scenario, const ModelConfig& model, const SimConfig& sim);
  // Uses a prepared population (households, network and positions as given).
  Simulation(const Environment& env, Population population, const Scenario& scenario, const ModelConfig& model,
             const SimConfig& sim);

  // One two-phase tick. Both variants produce identical states.
  void step();
  void step_serial();
  void step_parallel();

  RunResult run();

  // Blocks more edges between ticks; routes crossing them are recomputed.
  void block_edges(std::span<const int> edges);

  double time() const { return t_; }
  std::span<const Agent> agents() const { return population_.agents; }
  std::span<const AgentRuntime> runtime() const { return cur_; }
  AgentRuntime& runtime(int id) { return cur_[id]; }
  const Population& population() const { return population_; }
  const EdgeMask& blocked() const { return blocked_; }
  const QuakeImpact& impact() const { return impact_; }
  std::span<const TraceEvent> trace() const { return trace_; }
  MetricsFrame frame() const { return record_frame(t_, population_.agents, cur_); }
  bool same_state(const Simulation& other) const { return t_ == other.t_ && cur_ == other.cur_; }

 private:
  struct Pending {
    std::vector<std::pair<std::string, std::string>> events;
    std::vector<int> adopt;
  };

  void initialize();
  void decide(int id, AgentRuntime& next, Pending& out) const;
  void commit();

  // Helpers for decide(); all read the current snapshot only.
  std::vector<PerceptionCandidate> watch_positions(int id) const;
  std::vector<Percept> perceive_kin(int id, std::span<const PerceptionCandidate> cands) const;
  bool adoptable(int id, const AgentRuntime& rt) const;
  bool kin_secure(int other, int self) const;
  double group_speed(int id, const AgentRuntime& rt) const;
  bool followers_gathered(int id, const AgentRuntime& rt) const;
  void start_evacuation(int id, AgentRuntime& next, Pending& out) const;
  bool plan_route(int id, AgentRuntime& next) const;
  bool plan_path_to(int id, AgentRuntime& next, Point2D goal) const;
  void move_on_path(int id, AgentRuntime& next, double speed) const;
  void check_arrival(AgentRuntime& next) const;

  const Environment* env_;
  Scenario scenario_;
  ModelConfig model_;
  SimConfig sim_;
  Population population_;
  QuakeImpact impact_;
  EdgeMask blocked_;
  int mask_version_ = 0;
  std::vector<std::optional<Route>> routes_;
  std::vector<AgentRuntime> cur_;
  std::vector<AgentRuntime> next_;
  std::vector<Pending> pending_;
  std::vector<TraceEvent> trace_;
  int re_entered_ = 0;
  double t_ = 0.0;
};

RunResult run(const Scenario& scenario, const Environment& env, const ModelConfig& model, const SimConfig& sim);

struct CategorySummary {
  std::string scenario;
  Category category;
  double mean_final = 0.0;
  double sd_final = 0.0;
  int n = 0;
};

struct PairedComparison {
  std::string first;
  std::string second;
  int first_greater = 0;  // seeds where first's final all-arrived fraction is larger
  int n = 0;
  double mean_difference = 0.0;
};

struct BatchResult {
  std::vector<RunResult> runs;  // scenario-major, seeds in input order
  std::vector<CategorySummary> summary;
  std::vector<PairedComparison> paired;
};

class BatchError : public std::runtime_error {
 public:
  BatchError(const std::string& scenario, uint64_t seed, const std::string& what)
      : std::runtime_error("run " + scenario + " seed " + std::to_string(seed) + " failed: " + what),
        scenario_(scenario), seed_(seed) {}
  const std::string& scenario() const { return scenario_; }
  uint64_t seed() const { return seed_; }

 private:
  std::string scenario_;
  uint64_t seed_;
};

// Runs the scenario x seed cross product; `threads` <= 0 uses SOLACE_THREADS or the
// OpenMP default.
BatchResult batch_run(std::span<const Scenario> scenarios, std::span<const uint64_t> seeds, const Environment& env,
                      const ModelConfig& model, const SimConfig& sim, int threads = 0);

std::vector<CategorySummary> summarize(std::span<const RunResult> runs);
std::vector<PairedComparison> compare_paired(std::span<const RunResult> runs);

}  // namespace solace
