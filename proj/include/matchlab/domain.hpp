#pragma once

// Explicit preference domains: one finite list of admissible preferences
// per agent. Profiles of a domain are indexed in mixed radix with man 1 as
// the most significant digit and the last woman as the least.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matchlab/core.hpp"

namespace matchlab {

inline constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
  return a > kSaturated - b ? kSaturated : a + b;
}

// Every strict order over n partners plus the outside option, in
// lexicographic order of outcome codes (partners by index, outside last).
inline std::vector<Ranking> all_rankings(int n) {
  std::vector<int> codes(static_cast<std::size_t>(n + 1));
  std::iota(codes.begin(), codes.end(), 0);
  std::vector<Ranking> out;
  do {
    out.push_back(Ranking::from_codes(codes, n));
  } while (std::next_permutation(codes.begin(), codes.end()));
  return out;
}

inline std::vector<Preference> all_preferences(AgentId owner, int opposite_count) {
  std::vector<Preference> out;
  for (Ranking& r : all_rankings(opposite_count)) out.emplace_back(owner, std::move(r));
  return out;
}

class PreferenceDomain {
 public:
  // `admissible` holds the p men's sets followed by the q women's sets.
  PreferenceDomain(int p, int q, std::vector<std::vector<Preference>> admissible)
      : p_(p), q_(q), sets_(std::move(admissible)) {
    if (p < 1 || q < 1) throw InvalidArgument("domain sides must be non-empty");
    if (sets_.size() != static_cast<std::size_t>(p + q))
      throw InvalidArgument("domain needs one admissible set per agent");
    for (std::size_t k = 0; k < sets_.size(); ++k) {
      const AgentId a = agent_at(k);
      const int opposite = a.side == Side::Man ? q : p;
      if (sets_[k].empty()) throw InvalidArgument("admissible set of " + to_string(a) + " is empty");
      for (std::size_t i = 0; i < sets_[k].size(); ++i) {
        const Preference& pref = sets_[k][i];
        if (pref.owner() != a) throw InvalidArgument("admissible set of " + to_string(a) + " holds a foreign preference");
        if (pref.opposite_count() != opposite)
          throw InvalidArgument("admissible preference of " + to_string(a) + " has the wrong dimension");
        for (std::size_t j = 0; j < i; ++j)
          if (sets_[k][j].ranking() == pref.ranking())
            throw InvalidArgument("admissible set of " + to_string(a) + " lists a preference twice");
      }
    }
  }

  static PreferenceDomain full(int p, int q) {
    std::vector<std::vector<Preference>> sets;
    for (int i = 0; i < p; ++i) sets.push_back(all_preferences(AgentId::man(i), q));
    for (int j = 0; j < q; ++j) sets.push_back(all_preferences(AgentId::woman(j), p));
    return PreferenceDomain(p, q, std::move(sets));
  }

  static PreferenceDomain singleton(const Profile& profile) {
    std::vector<std::vector<Preference>> sets;
    for (const AgentId a : profile.agents()) sets.push_back({profile.of(a)});
    return PreferenceDomain(profile.men_count(), profile.women_count(), std::move(sets));
  }

  // Every man gets a copy of `men_set`, every woman a copy of `women_set`;
  // the owners are rewritten.
  static PreferenceDomain anonymous(int p, int q, std::span<const Ranking> men_set, std::span<const Ranking> women_set) {
    std::vector<std::vector<Preference>> sets;
    for (int i = 0; i < p; ++i) {
      auto& s = sets.emplace_back();
      for (const Ranking& r : men_set) s.emplace_back(AgentId::man(i), r);
    }
    for (int j = 0; j < q; ++j) {
      auto& s = sets.emplace_back();
      for (const Ranking& r : women_set) s.emplace_back(AgentId::woman(j), r);
    }
    return PreferenceDomain(p, q, std::move(sets));
  }

  int men_count() const noexcept { return p_; }
  int women_count() const noexcept { return q_; }
  int agent_count() const noexcept { return p_ + q_; }

  std::size_t flat_index(AgentId a) const {
    const int limit = a.side == Side::Man ? p_ : q_;
    if (a.index < 0 || a.index >= limit) throw InvalidArgument("agent " + to_string(a) + " is not in this domain");
    return static_cast<std::size_t>(a.side == Side::Man ? a.index : p_ + a.index);
  }
  AgentId agent_at(std::size_t k) const noexcept {
    return k < static_cast<std::size_t>(p_) ? AgentId::man(static_cast<int>(k))
                                            : AgentId::woman(static_cast<int>(k) - p_);
  }
  std::vector<AgentId> agents() const {
    std::vector<AgentId> out;
    for (std::size_t k = 0; k < sets_.size(); ++k) out.push_back(agent_at(k));
    return out;
  }

  const std::vector<Preference>& admissible(AgentId a) const { return sets_[flat_index(a)]; }
  const std::vector<Preference>& admissible_at(std::size_t k) const { return sets_.at(k); }

  std::optional<std::size_t> position_of(const Preference& pref) const {
    const auto& set = admissible(pref.owner());
    for (std::size_t i = 0; i < set.size(); ++i)
      if (set[i].ranking().same_object(pref.ranking())) return i;
    for (std::size_t i = 0; i < set.size(); ++i)
      if (set[i].ranking() == pref.ranking()) return i;
    return std::nullopt;
  }

  bool admits(const Preference& pref) const {
    if (pref.owner().index < 0 || pref.owner().index >= (pref.owner().side == Side::Man ? p_ : q_)) return false;
    return position_of(pref).has_value();
  }

  std::uint64_t profile_count() const noexcept {
    std::uint64_t n = 1;
    for (const auto& s : sets_) n = saturating_mul(n, s.size());
    return n;
  }

  Profile profile_from_choices(std::span<const std::size_t> choices) const {
    if (choices.size() != sets_.size()) throw InvalidArgument("need one choice per agent");
    std::vector<Preference> men, women;
    for (std::size_t k = 0; k < sets_.size(); ++k) {
      const Preference& pref = sets_[k].at(choices[k]);
      (k < static_cast<std::size_t>(p_) ? men : women).push_back(pref);
    }
    return Profile(std::move(men), std::move(women));
  }

  std::vector<std::size_t> choices_at(std::uint64_t index) const {
    if (index >= profile_count()) throw InvalidArgument("profile index out of range");
    std::vector<std::size_t> choices(sets_.size());
    for (std::size_t k = sets_.size(); k-- > 0;) {
      choices[k] = static_cast<std::size_t>(index % sets_[k].size());
      index /= sets_[k].size();
    }
    return choices;
  }

  Profile profile_at(std::uint64_t index) const { return profile_from_choices(choices_at(index)); }

  std::optional<std::vector<std::size_t>> choices_of(const Profile& profile) const {
    if (profile.men_count() != p_ || profile.women_count() != q_) return std::nullopt;
    std::vector<std::size_t> choices(sets_.size());
    for (std::size_t k = 0; k < sets_.size(); ++k) {
      const auto pos = position_of(profile.of(agent_at(k)));
      if (!pos) return std::nullopt;
      choices[k] = *pos;
    }
    return choices;
  }

  std::optional<std::uint64_t> index_of(const Profile& profile) const {
    const auto choices = choices_of(profile);
    if (!choices) return std::nullopt;
    std::uint64_t index = 0;
    for (std::size_t k = 0; k < sets_.size(); ++k) index = index * sets_[k].size() + (*choices)[k];
    return index;
  }

  bool contains(const Profile& profile) const { return choices_of(profile).has_value(); }

  template <class Fn>
  void for_each_profile(Fn&& fn) const {
    const std::uint64_t n = profile_count();
    std::vector<std::size_t> choices(sets_.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      fn(i, profile_from_choices(choices));
      for (std::size_t k = sets_.size(); k-- > 0;) {
        if (++choices[k] < sets_[k].size()) break;
        choices[k] = 0;
      }
    }
  }

  template <class Rng>
  Profile sample(Rng& rng) const {
    std::vector<std::size_t> choices(sets_.size());
    for (std::size_t k = 0; k < sets_.size(); ++k)
      choices[k] = std::uniform_int_distribution<std::size_t>(0, sets_[k].size() - 1)(rng);
    return profile_from_choices(choices);
  }

  // Same domain with one agent's set replaced.
  PreferenceDomain with_set(AgentId a, std::vector<Preference> set) const {
    auto sets = sets_;
    sets[flat_index(a)] = std::move(set);
    return PreferenceDomain(p_, q_, std::move(sets));
  }

 private:
  int p_;
  int q_;
  std::vector<std::vector<Preference>> sets_;
};

// A prior (left-to-right) ordering of one side's agents.
class PriorOrdering {
 public:
  PriorOrdering(Side side, std::vector<int> order) : side_(side), order_(std::move(order)), pos_(order_.size(), -1) {
    for (std::size_t i = 0; i < order_.size(); ++i) {
      const int a = order_[i];
      if (a < 0 || static_cast<std::size_t>(a) >= order_.size() || pos_[static_cast<std::size_t>(a)] != -1)
        throw InvalidArgument("prior ordering must be a permutation of the side's agents");
      pos_[static_cast<std::size_t>(a)] = static_cast<int>(i);
    }
  }

  static PriorOrdering identity(Side side, int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    return PriorOrdering(side, std::move(order));
  }

  Side side() const noexcept { return side_; }
  int size() const noexcept { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const noexcept { return order_; }
  int position(int agent) const { return pos_.at(static_cast<std::size_t>(agent)); }
  bool before(int a, int b) const { return position(a) < position(b); }

 private:
  Side side_;
  std::vector<int> order_;
  std::vector<int> pos_;
};

}  // namespace matchlab
