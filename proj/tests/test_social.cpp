#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "solace/social.hpp"

using namespace solace;

namespace {

// Hand evaluation of the perception-distance formula.
double oracle_pd(double pd, double k, double sd) { return std::exp(k * std::log(pd)) * (1.0 + sd / 10.0); }

}  // namespace

TEST_SUITE("social") {
  TEST_CASE("bond strengths") {
    const BondTable t;
    CHECK(bond_strength(t, RelationKind::Partner, AttachmentProfile::Altruistic) == 8.82);
    CHECK(bond_strength(t, RelationKind::Stranger, AttachmentProfile::Altruistic) == 2.17);
    CHECK(bond_strength(t, RelationKind::Partner, AttachmentProfile::Egoistic) == 0.0);
    CHECK(t[RelationKind::Parent] == 7.77);
    CHECK(t[RelationKind::Sibling] == 7.51);
    CHECK(t[RelationKind::Kin] == 5.29);
    CHECK(t[RelationKind::Friend] == 7.57);
    CHECK(t[RelationKind::Acquaintance] == 3.84);
    CHECK(t[RelationKind::Colleague] == t[RelationKind::Acquaintance]);
    CHECK(t[RelationKind::Child] > t[RelationKind::Partner]);
    CHECK(t[RelationKind::Self] == 0.0);
  }

  TEST_CASE("bond table rejects out-of-range values") {
    BondTable t;
    CHECK_THROWS_AS(t.set(RelationKind::Friend, 10.5), std::invalid_argument);
    CHECK_THROWS_AS(t.set(RelationKind::Friend, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(t.set(RelationKind::Self, 1.0), std::invalid_argument);
    t.set(RelationKind::Friend, 6.0);
    CHECK(t[RelationKind::Friend] == 6.0);
  }

  TEST_CASE("perception distance values") {
    CHECK(perception_distance(50, 0.2, 8.82) == doctest::Approx(4.115).epsilon(0.0005));
    CHECK(perception_distance(50, 1.0, 0.0) == 50.0);
    CHECK(perception_distance(50, 0.8, 8.82) == doctest::Approx(43.03).epsilon(0.0005));
    CHECK(perception_distance(50, 0.2, 2.17) == doctest::Approx(2.661).epsilon(0.0005));
    CHECK(EnvironmentBias::day().k == 1.0);
    CHECK(EnvironmentBias::night().k == 0.2);
    CHECK(EnvironmentBias::fog().k == 0.8);
  }

  TEST_CASE("perception distance domain") {
    CHECK_THROWS_AS(perception_distance(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(perception_distance(50, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(perception_distance(50, 1.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(perception_distance(50, 1, 11), std::invalid_argument);
    CHECK_THROWS_AS(perception_distance(50, 1, -0.1), std::invalid_argument);
  }

  TEST_CASE("perception distance properties") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> upd(1.5, 200.0), uk(0.05, 1.0), usd(0.0, 9.9), du(0.001, 0.1);
    for (int i = 0; i < 2000; ++i) {
      const double pd = upd(gen), k = uk(gen), sd = usd(gen), d = du(gen);
      CHECK(perception_distance(pd, k, sd) == doctest::Approx(oracle_pd(pd, k, sd)).epsilon(1e-12));
      CHECK(perception_distance(pd, k, std::min(10.0, sd + d)) > perception_distance(pd, k, sd));
      CHECK(perception_distance(pd, std::min(1.0, k + d), sd) > perception_distance(pd, k, sd));
      CHECK(perception_distance(pd + d, k, sd) > perception_distance(pd, k, sd));
      CHECK(perception_distance(pd, 1.0, 0.0) == pd);
    }
  }

  TEST_CASE("relation priority") {
    using R = RelationKind;
    const std::vector<std::pair<int, R>> a{{1, R::Partner}, {2, R::Child}};
    CHECK(relation_priority_order(a) == std::vector<int>{2, 1});
    const std::vector<std::pair<int, R>> b{{1, R::Stranger}};
    CHECK(relation_priority_order(b) == std::vector<int>{1});
    const std::vector<std::pair<int, R>> c{{1, R::Friend}, {2, R::Sibling}, {3, R::Kin}};
    CHECK(relation_priority_order(c) == std::vector<int>{1, 2, 3});
    const std::vector<std::pair<int, R>> d{{9, R::Parent}, {4, R::Friend}, {5, R::Partner}, {3, R::Child}};
    CHECK(relation_priority_order(d) == std::vector<int>{3, 5, 9, 4});
  }

  TEST_CASE("network symmetry") {
    SocialNetwork net(4);
    net.link(0, 1, RelationKind::Child);
    net.link(0, 2, RelationKind::Partner);
    net.link(1, 3, RelationKind::Friend);
    net.link(0, 1, RelationKind::Child);
    CHECK(net.relation(0, 1) == RelationKind::Child);
    CHECK(net.relation(1, 0) == RelationKind::Parent);
    CHECK(net.relation(2, 0) == RelationKind::Partner);
    CHECK(net.relation(3, 1) == RelationKind::Friend);
    CHECK_FALSE(net.relation(2, 3));
    CHECK(net.links(0).size() == 2);
    CHECK_NOTHROW(net.validate());
    CHECK_THROWS_AS(net.link(2, 2, RelationKind::Friend), std::logic_error);
  }

  TEST_CASE("perceive at night") {
    SocialNetwork net(3);
    net.link(0, 1, RelationKind::Partner);
    const BondTable bonds;
    PerceptionContext ctx{&net, &bonds, EnvironmentBias::night(), 50.0};
    const std::vector<PerceptionCandidate> partner{{1, {3.0, 0.0}}};
    const std::vector<PerceptionCandidate> stranger{{2, {3.0, 0.0}}};
    const auto seen = perceive(0, {0, 0}, partner, ctx);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].id == 1);
    CHECK(seen[0].kind == RelationKind::Partner);
    CHECK(perceive(0, {0, 0}, stranger, ctx).empty());
    net.set_profile(AttachmentProfile::Egoistic);
    CHECK(perceive(0, {0, 0}, partner, ctx).empty());
  }

  TEST_CASE("perceive on random scenes") {
    std::mt19937_64 gen(41);
    const BondTable bonds;
    std::uniform_real_distribution<double> u(-60.0, 60.0), uk(0.1, 1.0);
    const std::vector<RelationKind> kinds{RelationKind::Child, RelationKind::Partner, RelationKind::Parent,
                                          RelationKind::Sibling, RelationKind::Friend, RelationKind::Colleague};
    for (int scene = 0; scene < 50; ++scene) {
      const int n = 40;
      SocialNetwork net(n);
      for (int i = 1; i < n; ++i)
        if (gen() % 2) net.link(0, i, kinds[gen() % kinds.size()]);
      std::vector<PerceptionCandidate> cands;
      for (int i = 1; i < n; ++i) cands.push_back({i, {u(gen), u(gen)}});
      PerceptionContext ctx{&net, &bonds, {uk(gen)}, 50.0};
      const auto got = perceive(0, {0, 0}, cands, ctx);

      std::vector<int> want;
      for (const auto& c : cands) {
        const auto kind = net.relation(0, c.id).value_or(RelationKind::Stranger);
        if (std::hypot(c.position.x, c.position.y) <= oracle_pd(50.0, ctx.bias.k, bonds[kind])) want.push_back(c.id);
      }
      std::vector<int> ids;
      for (const auto& p : got) ids.push_back(p.id);
      std::vector<int> sorted = ids;
      std::sort(sorted.begin(), sorted.end());
      CHECK(sorted == want);

      auto shuffled = cands;
      std::shuffle(shuffled.begin(), shuffled.end(), gen);
      const auto again = perceive(0, {0, 0}, shuffled, ctx);
      std::vector<int> ids2;
      for (const auto& p : again) ids2.push_back(p.id);
      CHECK(ids == ids2);

      net.set_profile(AttachmentProfile::Egoistic);
      CHECK(perceive(0, {0, 0}, cands, ctx).empty());
    }
  }
}
