#pragma once

// Domain-property deciders: top dominance, unrestricted top pairs, cyclical
// inclusion, anonymity, single-peakedness, and two constructions.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matchlab/core.hpp"
#include "matchlab/domain.hpp"

namespace matchlab {

enum class SideFilter { Men, Women, Both };

inline bool covers(SideFilter f, Side s) noexcept {
  return f == SideFilter::Both || (f == SideFilter::Men) == (s == Side::Man);
}

// ---- top dominance ---------------------------------------------------------

// Indices into the checked set plus the offending outcomes: x P y P z with
// y R ∅ under the first ranking, x P~ z P~ y with z R~ ∅ under the second.
struct TdConflict {
  std::size_t first = 0;
  std::size_t second = 0;
  Outcome x, y, z;
};

namespace detail {

// Outcomes strictly below x and weakly above ∅, as a bitmask over codes
// (partner index, outside = n).
inline std::uint32_t below_within_acceptable(const Ranking& r, int x) {
  const int n = r.opposite_count();
  std::uint32_t mask = 0;
  const int from = r.partner_position(x) + 1;
  const int to = r.outside_position();
  for (int i = from; i <= to; ++i) {
    const Outcome o = r.order()[static_cast<std::size_t>(i)];
    mask |= 1u << (o.is_outside() ? n : o.index());
  }
  return mask;
}

inline Outcome from_code(int c, int n) { return c == n ? Outcome::outside() : Outcome::partner(c); }

}  // namespace detail

// First conflict in scan order (first, second, x, y, z by code), or none.
inline std::optional<TdConflict> find_td_conflict(std::span<const Ranking> set) {
  if (set.empty()) return std::nullopt;
  const int n = set.front().opposite_count();
  if (n + 1 > 31) throw SizeGuardError("top dominance check supports at most 30 opposite agents");
  std::vector<std::vector<std::uint32_t>> below(set.size());
  for (std::size_t i = 0; i < set.size(); ++i)
    for (int x = 0; x < n; ++x) below[i].push_back(detail::below_within_acceptable(set[i], x));

  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = 0; b < set.size(); ++b) {
      if (a == b) continue;
      for (int x = 0; x < n; ++x) {
        const std::uint32_t by = below[a][static_cast<std::size_t>(x)];
        const std::uint32_t bz = below[b][static_cast<std::size_t>(x)];
        if (!by || !bz) continue;
        for (int y = 0; y <= n; ++y) {
          if (!(by >> y & 1u)) continue;
          const Outcome oy = detail::from_code(y, n);
          for (int z = 0; z <= n; ++z) {
            if (z == y || !(bz >> z & 1u)) continue;
            const Outcome oz = detail::from_code(z, n);
            if (set[a].prefers(oy, oz) && set[b].prefers(oz, oy))
              return TdConflict{a, b, Outcome::partner(x), oy, oz};
          }
        }
      }
    }
  }
  return std::nullopt;
}

struct TdViolation {
  AgentId agent;
  Preference p;
  Preference p_tilde;
  Outcome x, y, z;
};

inline std::vector<Ranking> rankings_of(std::span<const Preference> prefs) {
  std::vector<Ranking> out;
  out.reserve(prefs.size());
  for (const Preference& p : prefs) out.push_back(p.ranking());
  return out;
}

// None when the side satisfies top dominance.
inline std::optional<TdViolation> top_dominance_violation(const PreferenceDomain& d, Side side) {
  for (const AgentId a : d.agents()) {
    if (a.side != side) continue;
    const auto& set = d.admissible(a);
    const auto rankings = rankings_of(set);
    if (auto c = find_td_conflict(rankings)) return TdViolation{a, set[c->first], set[c->second], c->x, c->y, c->z};
  }
  return std::nullopt;
}

inline bool satisfies_top_dominance(const PreferenceDomain& d, Side side) {
  return !top_dominance_violation(d, side).has_value();
}

// ---- unrestricted top pairs -------------------------------------------------

struct UtpGap {
  AgentId agent;
  int clause = 0;  // 1: ordered top pair, 2: top then ∅, 3: ∅ on top
  Outcome first;
  Outcome second;

  std::string describe() const {
    const Side opp = agent.side;
    switch (clause) {
      case 1: return to_string(agent) + " lacks a preference starting " + to_string(first, opp) + " " + to_string(second, opp);
      case 2: return to_string(agent) + " lacks a preference starting " + to_string(first, opp) + " @";
      default: return to_string(agent) + " lacks a preference with @ on top";
    }
  }
};

inline std::optional<UtpGap> utp_gap_for(AgentId a, std::span<const Preference> set, int n) {
  // heads[x][y]: some preference starts with x then y (codes, outside = n)
  std::vector<std::vector<bool>> heads(static_cast<std::size_t>(n + 1), std::vector<bool>(static_cast<std::size_t>(n + 1)));
  auto code = [n](Outcome o) { return o.is_outside() ? n : o.index(); };
  bool empty_top = false;
  for (const Preference& p : set) {
    if (p.top().is_outside()) empty_top = true;
    if (p.order().size() >= 2)
      heads[static_cast<std::size_t>(code(p.order()[0]))][static_cast<std::size_t>(code(p.order()[1]))] = true;
  }
  for (int w = 0; w < n; ++w)
    for (int v = 0; v < n; ++v)
      if (w != v && !heads[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)])
        return UtpGap{a, 1, Outcome::partner(w), Outcome::partner(v)};
  for (int w = 0; w < n; ++w)
    if (!heads[static_cast<std::size_t>(w)][static_cast<std::size_t>(n)])
      return UtpGap{a, 2, Outcome::partner(w), Outcome::outside()};
  if (!empty_top) return UtpGap{a, 3, Outcome::outside(), Outcome::outside()};
  return std::nullopt;
}

inline std::optional<UtpGap> utp_gap(const PreferenceDomain& d, Side side) {
  const int n = side == Side::Man ? d.women_count() : d.men_count();
  for (const AgentId a : d.agents())
    if (a.side == side)
      if (auto g = utp_gap_for(a, d.admissible(a), n)) return g;
  return std::nullopt;
}

inline bool satisfies_unrestricted_top_pairs(const PreferenceDomain& d, Side side) { return !utp_gap(d, side); }

// Only the top-then-∅ clause; enough for MPDA uniqueness arguments.
inline bool satisfies_top_then_outside(const PreferenceDomain& d, Side side) {
  const int n = side == Side::Man ? d.women_count() : d.men_count();
  for (const AgentId a : d.agents()) {
    if (a.side != side) continue;
    for (int w = 0; w < n; ++w) {
      const bool found = std::any_of(d.admissible(a).begin(), d.admissible(a).end(), [&](const Preference& p) {
        return p.order()[0] == Outcome::partner(w) && p.order()[1].is_outside();
      });
      if (!found) return false;
    }
  }
  return true;
}

// Smallest set meeting all three clauses: every ordered pair on top
// (rest by index, ∅ last), every w then ∅, and ∅ first.
inline std::vector<Preference> minimal_utp_set(AgentId owner, int n) {
  std::vector<Preference> out;
  auto make = [&](std::vector<Outcome> head) {
    for (int i = 0; i < n; ++i)
      if (std::find(head.begin(), head.end(), Outcome::partner(i)) == head.end()) head.push_back(Outcome::partner(i));
    if (std::find(head.begin(), head.end(), Outcome::outside()) == head.end()) head.push_back(Outcome::outside());
    out.emplace_back(owner, std::move(head), n);
  };
  for (int w = 0; w < n; ++w) {
    for (int v = 0; v < n; ++v)
      if (v != w) make({Outcome::partner(w), Outcome::partner(v)});
    make({Outcome::partner(w), Outcome::outside()});
  }
  make({Outcome::outside()});
  return out;
}

// ---- cyclical inclusion -----------------------------------------------------

struct CiGap {
  AgentId agent;
  int clause = 0;  // 1: no ∅-top preference, 2: pair order not reversed
  Outcome first;   // clause 2: (· first · second · ∅ ·) present, reverse absent
  Outcome second;
};

inline std::optional<CiGap> cyclical_inclusion_gap(const PreferenceDomain& d, Side side) {
  const int n = side == Side::Man ? d.women_count() : d.men_count();
  for (const AgentId a : d.agents()) {
    if (a.side != side) continue;
    const auto& set = d.admissible(a);
    if (std::none_of(set.begin(), set.end(), [](const Preference& p) { return p.top().is_outside(); }))
      return CiGap{a, 1, Outcome::outside(), Outcome::outside()};
    std::vector<std::vector<bool>> above(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    for (const Preference& p : set) {
      const auto& o = p.order();
      const int cut = p.ranking().outside_position();
      for (int i = 0; i < cut; ++i)
        for (int j = i + 1; j < cut; ++j)
          above[static_cast<std::size_t>(o[static_cast<std::size_t>(i)].index())]
               [static_cast<std::size_t>(o[static_cast<std::size_t>(j)].index())] = true;
    }
    for (int w = 0; w < n; ++w)
      for (int v = 0; v < n; ++v)
        if (above[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)] &&
            !above[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
          return CiGap{a, 2, Outcome::partner(w), Outcome::partner(v)};
  }
  return std::nullopt;
}

inline bool satisfies_cyclical_inclusion(const PreferenceDomain& d, Side side) {
  return !cyclical_inclusion_gap(d, side);
}

// ---- anonymity --------------------------------------------------------------

inline bool is_anonymous(const PreferenceDomain& d) {
  auto erased = [&](AgentId a) {
    auto r = rankings_of(d.admissible(a));
    std::sort(r.begin(), r.end());
    return r;
  };
  for (const Side s : {Side::Man, Side::Woman}) {
    const int count = s == Side::Man ? d.men_count() : d.women_count();
    const auto first = erased(AgentId{s, 0});
    for (int i = 1; i < count; ++i)
      if (erased(AgentId{s, i}) != first) return false;
  }
  return true;
}

// ---- single-peakedness ------------------------------------------------------

// The outside option is unconstrained; only partner-vs-partner comparisons
// on one flank of the peak matter.
inline bool is_single_peaked(const Ranking& r, const PriorOrdering& ord) {
  const int n = r.opposite_count();
  if (ord.size() != n) throw InvalidArgument("prior ordering does not cover the ranked side");
  if (n == 0) return true;
  const int peak = ord.position(r.top_partner().index());
  // Walking outward from the peak, ranks must get worse on each flank.
  for (int i = peak; i + 1 < n; ++i)
    if (r.partner_position(ord.order()[static_cast<std::size_t>(i)]) >
        r.partner_position(ord.order()[static_cast<std::size_t>(i + 1)]))
      return false;
  for (int i = peak; i > 0; --i)
    if (r.partner_position(ord.order()[static_cast<std::size_t>(i)]) >
        r.partner_position(ord.order()[static_cast<std::size_t>(i - 1)]))
      return false;
  return true;
}

inline bool is_single_peaked(const Preference& p, const PriorOrdering& ord) {
  if (ord.side() == p.owner().side) throw InvalidArgument("prior ordering must be over the opposite side");
  return is_single_peaked(p.ranking(), ord);
}

inline constexpr int kMaxSinglePeakedSide = 8;

// Every single-peaked preference w.r.t. `ord`, in all_rankings order.
inline std::vector<Preference> generate_maximal_single_peaked(const PriorOrdering& ord, AgentId owner) {
  const int n = ord.size();
  if (n > kMaxSinglePeakedSide) throw SizeGuardError("single-peaked generation supports at most 8 agents per side");
  if (owner.side == ord.side()) throw InvalidArgument("prior ordering must be over the owner's opposite side");
  // Build peak-respecting partner orders by growing an interval around the
  // peak, then insert ∅ at each of the n+1 slots.
  std::vector<std::vector<int>> orders;
  std::vector<int> cur;
  auto grow = [&](auto&& self, int lo, int hi) -> void {
    if (lo == 0 && hi == n - 1) {
      orders.push_back(cur);
      return;
    }
    if (lo > 0) {
      cur.push_back(ord.order()[static_cast<std::size_t>(lo - 1)]);
      self(self, lo - 1, hi);
      cur.pop_back();
    }
    if (hi < n - 1) {
      cur.push_back(ord.order()[static_cast<std::size_t>(hi + 1)]);
      self(self, lo, hi + 1);
      cur.pop_back();
    }
  };
  for (int peak = 0; peak < n; ++peak) {
    cur.assign(1, ord.order()[static_cast<std::size_t>(peak)]);
    grow(grow, peak, peak);
  }
  std::vector<Ranking> rankings;
  if (n == 0) rankings.push_back(Ranking());
  for (const auto& o : orders) {
    for (int slot = 0; slot <= n; ++slot) {
      std::vector<int> codes(o.begin(), o.end());
      codes.insert(codes.begin() + slot, n);
      rankings.push_back(Ranking::from_codes(codes, n));
    }
  }
  std::sort(rankings.begin(), rankings.end());
  std::vector<Preference> out;
  for (Ranking& r : rankings) out.emplace_back(owner, std::move(r));
  return out;
}

inline bool is_single_peaked_domain(const PreferenceDomain& d, const PriorOrdering& men_ord,
                                    const PriorOrdering& women_ord) {
  for (const AgentId a : d.agents()) {
    const PriorOrdering& ord = a.side == Side::Man ? women_ord : men_ord;
    for (const Preference& p : d.admissible(a))
      if (!is_single_peaked(p, ord)) return false;
  }
  return true;
}

}  // namespace matchlab
