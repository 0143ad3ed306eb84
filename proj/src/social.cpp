#include "solace/social.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace solace {

namespace {
constexpr std::array<std::string_view, kRelationKinds> kNames = {
    "self", "child", "partner", "parent", "sibling", "kin", "friend", "acquaintance", "colleague", "stranger"};
}

std::string_view to_string(RelationKind kind) { return kNames[static_cast<size_t>(kind)]; }

std::optional<RelationKind> relation_from_string(std::string_view name) {
  for (size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<RelationKind>(i);
  return std::nullopt;
}

RelationKind reciprocal(RelationKind kind) {
  switch (kind) {
    case RelationKind::Child: return RelationKind::Parent;
    case RelationKind::Parent: return RelationKind::Child;
    default: return kind;
  }
}

BondTable::BondTable() {
  auto put = [&](RelationKind k, double v) { values_[static_cast<size_t>(k)] = v; };
  put(RelationKind::Self, 0.0);
  put(RelationKind::Child, 9.5);
  put(RelationKind::Partner, 8.82);
  put(RelationKind::Parent, 7.77);
  put(RelationKind::Sibling, 7.51);
  put(RelationKind::Kin, 5.29);
  put(RelationKind::Friend, 7.57);
  put(RelationKind::Acquaintance, 3.84);
  put(RelationKind::Colleague, 3.84);
  put(RelationKind::Stranger, 2.17);
}

void BondTable::set(RelationKind kind, double value) {
  if (!(value >= 0.0 && value <= 10.0))
    throw std::invalid_argument("bond strength for " + std::string(to_string(kind)) + " must be in [0,10]");
  if (kind == RelationKind::Self && value != 0.0) throw std::invalid_argument("bond strength to self must be 0");
  values_[static_cast<size_t>(kind)] = value;
}

double bond_strength(const BondTable& table, RelationKind relation, AttachmentProfile profile) {
  return profile == AttachmentProfile::Egoistic ? 0.0 : table[relation];
}

double perception_distance(double pd_normal, double k, double sd_bond) {
  if (!(pd_normal > 0.0) || !std::isfinite(pd_normal))
    throw std::invalid_argument("pd_normal must be > 0");
  if (!(k > 0.0 && k <= 1.0)) throw std::invalid_argument("k must be in (0,1]");
  if (!(sd_bond >= 0.0 && sd_bond <= 10.0)) throw std::invalid_argument("sd_bond must be in [0,10]");
  return std::pow(pd_normal, k) * (1.0 + sd_bond / 10.0);
}

std::pair<int, double> relation_rank(RelationKind kind, const BondTable& table) {
  switch (kind) {
    case RelationKind::Self: return {0, 0.0};
    case RelationKind::Child: return {1, 0.0};
    case RelationKind::Partner: return {2, 0.0};
    case RelationKind::Parent: return {3, 0.0};
    default: return {4, -table[kind]};
  }
}

std::vector<int> relation_priority_order(std::span<const std::pair<int, RelationKind>> relations,
                                         const BondTable& table) {
  std::vector<std::pair<int, RelationKind>> sorted(relations.begin(), relations.end());
  std::stable_sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
    const auto ra = relation_rank(a.second, table), rb = relation_rank(b.second, table);
    if (ra != rb) return ra < rb;
    return a.first < b.first;
  });
  std::vector<int> out;
  out.reserve(sorted.size());
  for (const auto& [id, kind] : sorted) out.push_back(id);
  return out;
}

void SocialNetwork::link(int a, int b, RelationKind kind) {
  if (a == b) throw std::logic_error("an agent cannot be linked to itself");
  auto insert = [&](int from, int to, RelationKind k) {
    auto& v = links_[from];
    auto it = std::lower_bound(v.begin(), v.end(), to, [](const SocialLink& l, int id) { return l.other < id; });
    if (it != v.end() && it->other == to) return;
    v.insert(it, {to, k});
  };
  insert(a, b, kind);
  insert(b, a, reciprocal(kind));
}

std::optional<RelationKind> SocialNetwork::relation(int from, int to) const {
  const auto& v = links_[from];
  auto it = std::lower_bound(v.begin(), v.end(), to, [](const SocialLink& l, int id) { return l.other < id; });
  if (it != v.end() && it->other == to) return it->kind;
  return std::nullopt;
}

void SocialNetwork::validate() const {
  for (size_t a = 0; a < links_.size(); ++a)
    for (const auto& l : links_[a]) {
      if (l.other == static_cast<int>(a)) throw std::logic_error("agent " + std::to_string(a) + " lists itself");
      const auto back = relation(l.other, static_cast<int>(a));
      if (!back || *back != reciprocal(l.kind))
        throw std::logic_error("relation " + std::to_string(a) + "->" + std::to_string(l.other) +
                               " has no reciprocal link");
    }
}

std::vector<Percept> perceive(int self, Point2D self_position,
                              std::span<const PerceptionCandidate> candidates,
                              const PerceptionContext& ctx) {
  std::vector<Percept> out;
  if (ctx.network->profile() == AttachmentProfile::Egoistic) return out;
  for (const auto& c : candidates) {
    if (c.id == self) continue;
    const RelationKind kind = ctx.network->relation(self, c.id).value_or(RelationKind::Stranger);
    const double d = distance(self_position, c.position);
    const double reach = perception_distance(ctx.pd_normal, ctx.bias.k, (*ctx.bonds)[kind]);
    if (d <= reach) out.push_back({c.id, kind, d});
  }
  std::sort(out.begin(), out.end(), [&](const Percept& a, const Percept& b) {
    const auto ra = relation_rank(a.kind, *ctx.bonds), rb = relation_rank(b.kind, *ctx.bonds);
    if (ra != rb) return ra < rb;
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  return out;
}

}  // namespace solace
