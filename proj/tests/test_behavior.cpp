#include "doctest.h"
#include "solace/behavior.hpp"

using namespace solace;

namespace {

PreEvacTable zero_table() {
  PreEvacTable t;
  for (auto& e : t.entries) e = {0.0, 0.0, 0.0};
  return t;
}

KinBelief kin(int agent, RelationKind kind, bool dependent) {
  KinBelief kb;
  kb.agent = agent;
  kb.kind = kind;
  kb.dependent = dependent;
  kb.active = dependent;
  return kb;
}

}  // namespace

TEST_SUITE("behavior") {
  TEST_CASE("pre-evacuation choice") {
    Rng rng(1, "behavior");
    const auto none = choose_pre_evacuation(zero_table(), rng);
    CHECK(none.behaviors.empty());
    CHECK(none.delay == 0.0);

    auto milling = zero_table();
    milling[PreEvacKind::Milling] = {1.0, 10.0, 20.0};
    for (int i = 0; i < 1000; ++i) {
      const auto c = choose_pre_evacuation(milling, rng);
      REQUIRE(c.behaviors.size() == 1);
      CHECK(c.includes(PreEvacKind::Milling));
      CHECK(c.delay >= 10.0);
      CHECK(c.delay <= 20.0);
    }
  }

  TEST_CASE("pre-evacuation inclusion rates") {
    const auto table = PreEvacTable::defaults();
    CHECK(table[PreEvacKind::SeekFamily].probability == 0.4);
    CHECK(table[PreEvacKind::Milling].probability == 0.5);
    CHECK(table[PreEvacKind::ProtectProperty].max_s == 90.0);
    Rng rng(2, "behavior");
    std::array<int, kPreEvacKinds> hits{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto c = choose_pre_evacuation(table, rng);
      double sum = 0.0;
      for (const auto& b : c.behaviors) {
        ++hits[static_cast<size_t>(b.kind)];
        CHECK(b.duration >= table[b.kind].min_s);
        CHECK(b.duration <= table[b.kind].max_s);
        sum += b.duration;
      }
      CHECK(c.delay == doctest::Approx(sum));
    }
    for (size_t k = 0; k < kPreEvacKinds; ++k)
      CHECK(std::abs(double(hits[k]) / n - table.entries[k].probability) <= 0.01);
  }

  TEST_CASE("pre-evacuation table validation") {
    auto t = PreEvacTable::defaults();
    CHECK_NOTHROW(t.validate());
    t[PreEvacKind::Herding] = {1.5, 0, 1};
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t[PreEvacKind::Herding] = {0.5, 5, 1};
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  }

  TEST_CASE("belief revision") {
    const BehaviorParams params;
    SUBCASE("strong shaking makes the agent feel unsafe") {
      BeliefSet b;
      BeliefInputs in;
      in.felt_intensity = 6;
      in.now = 0.0;
      revise_beliefs(b, in, params);
      CHECK(b.self_unsafe);
      CHECK(b.self_updated == 0.0);
    }
    SUBCASE("moderate shaking adds nothing") {
      BeliefSet b;
      b.kin.push_back(kin(3, RelationKind::Partner, false));
      b.kin[0].last_known = {500, 500};
      const BeliefSet before = b;
      BeliefInputs in;
      in.felt_intensity = 4;
      CHECK(revise_beliefs(b, in, params).empty());
      CHECK(b == before);
    }
    SUBCASE("perceived kin gets a fresh location") {
      BeliefSet b;
      b.kin.push_back(kin(3, RelationKind::Partner, false));
      const std::vector<Percept> seen{{3, RelationKind::Partner, 2.0}};
      const std::vector<PerceptionCandidate> where{{3, {2.0, 0.0}}};
      BeliefInputs in;
      in.percepts = seen;
      in.positions = where;
      in.now = 17.0;
      const auto changes = revise_beliefs(b, in, params);
      REQUIRE(changes.size() == 1);
      CHECK(changes[0].event == BeliefEvent::Perceived);
      CHECK(b.kin[0].seen_at == 17.0);
      CHECK(b.kin[0].last_known == Point2D{2.0, 0.0});
      CHECK(b.kin[0].in_view);
    }
    SUBCASE("kin absent from the expected place is missing") {
      BeliefSet b;
      b.kin.push_back(kin(3, RelationKind::Child, true));
      b.kin[0].last_known = {10, 0};
      BeliefInputs in;
      in.self_position = {0, 0};
      in.now = 5.0;
      const auto changes = revise_beliefs(b, in, params);
      REQUIRE(changes.size() == 1);
      CHECK(changes[0].event == BeliefEvent::Missing);
      CHECK(b.kin[0].missing);
      CHECK(revise_beliefs(b, in, params).empty());
    }
  }

  TEST_CASE("desires and intentions") {
    const BondTable bonds;
    SUBCASE("unsafe agent evacuates") {
      BeliefSet b;
      b.self_unsafe = true;
      const auto d = build_desires(b, {}, bonds);
      REQUIRE(d.size() == 1);
      CHECK(d[0].kind == DesireKind::BeSafe);
      const auto i = select_intention(b, d, {});
      REQUIRE(i);
      CHECK(i->plan == PlanKind::Evacuate);
    }
    SUBCASE("arrived parent with a missing child seeks it") {
      BeliefSet b;
      b.self_safe = true;
      b.kin.push_back(kin(4, RelationKind::Child, true));
      b.kin[0].missing = true;
      DesireInputs in;
      in.arrived = true;
      const auto d = build_desires(b, in, bonds);
      REQUIRE(d.size() == 2);
      const auto i = select_intention(b, d, in);
      REQUIRE(i);
      CHECK(i->plan == PlanKind::Seek);
      CHECK(i->target == 4);
    }
    SUBCASE("nothing to want") {
      BeliefSet b;
      const auto d = build_desires(b, {}, bonds);
      CHECK(d.empty());
      CHECK_FALSE(select_intention(b, d, {}));
    }
    SUBCASE("teachers group their pupils") {
      BeliefSet b;
      b.self_unsafe = true;
      b.kin.push_back(kin(8, RelationKind::Colleague, true));
      DesireInputs in;
      in.teacher = true;
      const auto i = select_intention(b, build_desires(b, in, bonds), in);
      REQUIRE(i);
      CHECK(i->plan == PlanKind::Group);
    }
    SUBCASE("priorities are unique and follow relation priority") {
      BeliefSet b;
      b.self_unsafe = true;
      for (auto [id, k] : {std::pair{2, RelationKind::Partner}, {5, RelationKind::Sibling}, {7, RelationKind::Parent}}) {
        b.kin.push_back(kin(id, k, false));
        b.kin.back().missing = true;
      }
      b.kin.push_back(kin(9, RelationKind::Child, true));
      DesireInputs in;
      in.seek_family = true;
      const auto d = build_desires(b, in, bonds);
      REQUIRE(d.size() == 5);
      std::vector<int> targets;
      for (size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i].priority == static_cast<int>(i) + 1);
        targets.push_back(d[i].target);
      }
      CHECK(targets == std::vector<int>{9, 2, 7, 5, -1});
      const auto again = build_desires(b, in, bonds);
      CHECK(select_intention(b, d, in)->target == select_intention(b, again, in)->target);
    }
    SUBCASE("followers do not pursue kin") {
      BeliefSet b;
      b.self_unsafe = true;
      b.kin.push_back(kin(9, RelationKind::Child, true));
      DesireInputs in;
      in.following = true;
      const auto i = select_intention(b, build_desires(b, in, bonds), in);
      REQUIRE(i);
      CHECK(i->plan == PlanKind::Follow);
    }
  }

  TEST_CASE("state machine") {
    using S = StateKind;
    for (auto [a, b] : {std::pair{S::Normal, S::PreEvacuating}, {S::PreEvacuating, S::Evacuating},
                        {S::PreEvacuating, S::Seeking}, {S::Seeking, S::Evacuating}, {S::Evacuating, S::Seeking},
                        {S::Evacuating, S::Arrived}, {S::Evacuating, S::Trapped}, {S::Arrived, S::Seeking}})
      CHECK(is_legal_transition(a, b));
    for (auto to : {S::Normal, S::PreEvacuating, S::Evacuating, S::Seeking, S::Arrived})
      CHECK_FALSE(is_legal_transition(S::Trapped, to));
    for (auto to : {S::Normal, S::PreEvacuating, S::Evacuating, S::Trapped, S::Following, S::Leading})
      CHECK_FALSE(is_legal_transition(S::Arrived, to));
    CHECK_FALSE(is_legal_transition(S::Evacuating, S::Normal));
  }

  TEST_CASE("advance respects the budget") {
    const std::vector<Point2D> wp{{10, 0}, {10, 10}};
    auto r = advance({0, 0}, wp, 0, 2.0);
    CHECK(r.position == Point2D{2, 0});
    CHECK(r.travelled == 2.0);
    r = advance({9, 0}, wp, 0, 3.0);
    CHECK(r.position == Point2D{10, 2});
    CHECK(r.cursor == 1);
    r = advance({10, 9}, wp, 1, 5.0);
    CHECK(r.position == Point2D{10, 10});
    CHECK(r.cursor == 2);
    CHECK(r.travelled == 1.0);
  }
}
