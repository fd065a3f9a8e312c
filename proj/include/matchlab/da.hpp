#pragma once

// Deferred acceptance, proposing side chosen by RuleId. Proposals happen in
// rounds: every proposer rejected in the previous step proposes at once,
// and each receiver keeps the best acceptable proposer among held and new
// proposals.

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matchlab/core.hpp"

namespace matchlab {

enum class RuleId { MPDA, WPDA };

inline std::string to_string(RuleId r) { return r == RuleId::MPDA ? "mpda" : "wpda"; }

inline Side proposing_side(RuleId r) noexcept { return r == RuleId::MPDA ? Side::Man : Side::Woman; }

struct DaStep {
  int step_number = 0;
  std::vector<std::pair<AgentId, AgentId>> proposals;   // (proposer, target)
  std::vector<std::pair<AgentId, AgentId>> rejections;  // (rejected, by)
  Matching tentative;
};

struct DaTrace {
  RuleId rule = RuleId::MPDA;
  std::vector<DaStep> steps;
};

struct DaResult {
  Matching matching;
  DaTrace trace;
};

namespace detail {

template <bool Record>
Matching da_kernel(RuleId rule, const Profile& profile, DaTrace* trace) {
  const Side pside = proposing_side(rule);
  const std::span<const Preference> proposers = pside == Side::Man ? profile.men() : profile.women();
  const std::span<const Preference> receivers = pside == Side::Man ? profile.women() : profile.men();
  const std::size_t np = proposers.size();
  const std::size_t nr = receivers.size();
  const int p = profile.men_count();
  const int q = profile.women_count();

  std::vector<std::size_t> next(np, 0);
  std::vector<int> held(nr, -1);
  std::vector<int> active;
  std::vector<int> rejected;
  active.reserve(np);
  rejected.reserve(np);
  for (std::size_t i = 0; i < np; ++i) active.push_back(static_cast<int>(i));

  auto build = [&] {
    std::vector<int> wives(static_cast<std::size_t>(p), -1);
    for (std::size_t r = 0; r < nr; ++r) {
      if (held[r] < 0) continue;
      if (pside == Side::Man)
        wives[static_cast<std::size_t>(held[r])] = static_cast<int>(r);
      else
        wives[r] = held[r];
    }
    return Matching::from_wives(q, std::move(wives));
  };
  auto id = [](Side s, int i) { return AgentId{s, i}; };

  for (int step = 1;; ++step) {
    std::vector<std::pair<AgentId, AgentId>> proposals_made;
    std::vector<std::pair<AgentId, AgentId>> rejections_made;
    rejected.clear();
    bool any_proposal = false;
    for (int x : active) {
      const auto& order = proposers[static_cast<std::size_t>(x)].order();
      auto& k = next[static_cast<std::size_t>(x)];
      if (k >= order.size() || order[k].is_outside()) continue;  // exhausted
      const int r = order[k].index();
      ++k;
      any_proposal = true;
      if constexpr (Record) proposals_made.emplace_back(id(pside, x), id(opposite(pside), r));
      const Ranking& rr = receivers[static_cast<std::size_t>(r)].ranking();
      int& h = held[static_cast<std::size_t>(r)];
      if (!rr.acceptable(x)) {
        rejected.push_back(x);
        if constexpr (Record) rejections_made.emplace_back(id(pside, x), id(opposite(pside), r));
      } else if (h < 0 || rr.partner_position(x) < rr.partner_position(h)) {
        if (h >= 0) {
          rejected.push_back(h);
          if constexpr (Record) rejections_made.emplace_back(id(pside, h), id(opposite(pside), r));
        }
        h = x;
      } else {
        rejected.push_back(x);
        if constexpr (Record) rejections_made.emplace_back(id(pside, x), id(opposite(pside), r));
      }
    }
    if (!any_proposal) break;
    if constexpr (Record) {
      std::sort(rejections_made.begin(), rejections_made.end());
      trace->steps.push_back(DaStep{step, std::move(proposals_made), std::move(rejections_made), build()});
    }
    if (rejected.empty()) break;
    std::sort(rejected.begin(), rejected.end());
    active.swap(rejected);
  }
  return build();
}

}  // namespace detail

// Outcome only; no trace is recorded.
inline Matching deferred_acceptance(RuleId rule, const Profile& profile) {
  return detail::da_kernel<false>(rule, profile, nullptr);
}

inline DaResult run_da(RuleId rule, const Profile& profile) {
  DaTrace trace{rule, {}};
  Matching m = detail::da_kernel<true>(rule, profile, &trace);
  return {std::move(m), std::move(trace)};
}

// Re-applies the recorded proposals and rejections from scratch.
inline Matching replay(const DaTrace& trace, int p, int q) {
  const Side pside = proposing_side(trace.rule);
  const int nr = pside == Side::Man ? q : p;
  std::vector<std::vector<int>> holding(static_cast<std::size_t>(nr));
  for (const DaStep& s : trace.steps) {
    for (auto [x, r] : s.proposals) holding.at(static_cast<std::size_t>(r.index)).push_back(x.index);
    for (auto [x, r] : s.rejections) {
      auto& h = holding.at(static_cast<std::size_t>(r.index));
      const auto it = std::find(h.begin(), h.end(), x.index);
      if (it == h.end()) throw InvalidArgument("trace rejects a proposal that was never made");
      h.erase(it);
    }
  }
  std::vector<int> wives(static_cast<std::size_t>(p), -1);
  for (int r = 0; r < nr; ++r) {
    const auto& h = holding[static_cast<std::size_t>(r)];
    if (h.size() > 1) throw InvalidArgument("trace leaves a receiver holding several proposals");
    if (h.empty()) continue;
    if (pside == Side::Man)
      wives[static_cast<std::size_t>(h.front())] = r;
    else
      wives[static_cast<std::size_t>(r)] = h.front();
  }
  return Matching::from_wives(q, std::move(wives));
}

// True iff every proposer weakly prefers the DA match to its match under
// every stable matching (brute-force stable set).
inline bool proposer_optimality_check(RuleId rule, const Profile& profile, bool force = false) {
  const Matching da = deferred_acceptance(rule, profile);
  const Side side = proposing_side(rule);
  const int n = side == Side::Man ? profile.men_count() : profile.women_count();
  for (const Matching& mu : stable_set(profile, force)) {
    for (int i = 0; i < n; ++i) {
      const AgentId a{side, i};
      if (!profile.of(a).weakly_prefers(da.partner(a), mu.partner(a))) return false;
    }
  }
  return true;
}

}  // namespace matchlab
