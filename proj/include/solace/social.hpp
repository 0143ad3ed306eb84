#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "solace/geometry.hpp"

namespace solace {

// Relation of the other agent to the reference agent ("Child" = the other is my child).
enum class RelationKind { Self, Child, Partner, Parent, Sibling, Kin, Friend, Acquaintance, Colleague, Stranger };
inline constexpr size_t kRelationKinds = 10;

std::string_view to_string(RelationKind kind);
std::optional<RelationKind> relation_from_string(std::string_view name);
RelationKind reciprocal(RelationKind kind);

enum class AttachmentProfile { Altruistic, Egoistic };

// Bond strength per relation on the 0..10 rating scale.
class BondTable {
 public:
  BondTable();  // French survey means; Child 9.5, Colleague = Acquaintance

  double operator[](RelationKind kind) const { return values_[static_cast<size_t>(kind)]; }
  // Throws std::invalid_argument outside [0,10] or for a nonzero Self bond.
  void set(RelationKind kind, double value);

 private:
  std::array<double, kRelationKinds> values_{};
};

double bond_strength(const BondTable& table, RelationKind relation, AttachmentProfile profile);

// Visibility bias, used as the exponent on the normal perception distance.
struct EnvironmentBias {
  double k = 1.0;
  static EnvironmentBias day() { return {1.0}; }
  static EnvironmentBias night() { return {0.2}; }
  static EnvironmentBias fog() { return {0.8}; }
};

// pd_normal^k * (1 + sd_bond / 10). Throws std::invalid_argument on domain violations.
double perception_distance(double pd_normal, double k, double sd_bond);

// Agent ids ordered child, partner, parent, then by descending bond (ties: ascending id).
std::vector<int> relation_priority_order(std::span<const std::pair<int, RelationKind>> relations,
                                         const BondTable& table = BondTable{});
// Sort key used by relation_priority_order; lower comes first.
std::pair<int, double> relation_rank(RelationKind kind, const BondTable& table = BondTable{});

struct SocialLink {
  int other;
  RelationKind kind;
};

class SocialNetwork {
 public:
  explicit SocialNetwork(size_t agents = 0, AttachmentProfile profile = AttachmentProfile::Altruistic)
      : links_(agents), profile_(profile) {}

  // Adds a -> b with `kind` and b -> a with the reciprocal kind. Ignores duplicates.
  void link(int a, int b, RelationKind kind);
  std::span<const SocialLink> links(int agent) const { return links_[agent]; }
  std::optional<RelationKind> relation(int from, int to) const;
  size_t size() const { return links_.size(); }
  AttachmentProfile profile() const { return profile_; }
  void set_profile(AttachmentProfile p) { profile_ = p; }
  // Throws std::logic_error on self links or asymmetric / non-reciprocal pairs.
  void validate() const;

 private:
  std::vector<std::vector<SocialLink>> links_;  // sorted by `other`
  AttachmentProfile profile_;
};

struct PerceptionCandidate {
  int id;
  Point2D position;
};

struct Percept {
  int id;
  RelationKind kind;
  double distance;
};

struct PerceptionContext {
  const SocialNetwork* network = nullptr;
  const BondTable* bonds = nullptr;
  EnvironmentBias bias;
  double pd_normal = 50.0;
};

// Candidates within their relation-specific perception distance, ordered by relation
// priority, then distance, then id. Empty for egoistic networks.
std::vector<Percept> perceive(int self, Point2D self_position,
                              std::span<const PerceptionCandidate> candidates,
                              const PerceptionContext& ctx);

}  // namespace solace
