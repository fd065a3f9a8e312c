#pragma once

// Coalition/misreport enumeration shared by the one-to-one and the
// college-admissions manipulation searches.
//
// A Market adapter exposes agents 0..n-1 in canonical order and, per agent,
// a list of misreport options (never the truthful report). Coalitions are
// visited by size, then lexicographically; joint misreports by odometer
// with the first coalition member varying slowest.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "matchlab/domain.hpp"

namespace matchlab {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

struct SearchOptions {
  int max_coalition = 1;
  // Joint-misreport evaluations allowed per base profile.
  std::uint64_t budget = kDefaultBudget;
  // When set and the budget is exceeded, coalitions with more joint
  // misreports than this are sampled instead of enumerated.
  std::optional<std::uint64_t> samples_per_coalition;
  std::uint64_t seed = 42;
};

struct SearchStats {
  std::uint64_t planned = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t witnesses = 0;
  bool sampled = false;
};

namespace detail {

template <class M>
concept CoalitionMarket = requires(M& m, const M& cm, std::size_t a, std::size_t opt, std::span<const std::size_t> c) {
  { cm.agent_count() } -> std::convertible_to<std::size_t>;
  { cm.option_count(a) } -> std::convertible_to<std::size_t>;
  { cm.eligible(a) } -> std::convertible_to<bool>;
  m.apply(a, opt);
  m.restore(a);
  { m.evaluate(c) } -> std::convertible_to<bool>;
};

// Visit(coalition, options) -> bool (false stops the search). It is called
// only for successful manipulations; the market still holds the outcome.
template <CoalitionMarket Market, class Visit>
SearchStats search_coalitions(Market& market, const SearchOptions& opts, Visit&& visit) {
  if (opts.max_coalition < 1) throw InvalidArgument("max_coalition must be at least 1");
  std::vector<std::size_t> candidates;
  for (std::size_t a = 0; a < market.agent_count(); ++a)
    if (market.option_count(a) > 0 && market.eligible(a)) candidates.push_back(a);

  const std::size_t kmax = std::min<std::size_t>(static_cast<std::size_t>(opts.max_coalition), candidates.size());

  // Elementary symmetric sums of the option counts give the exhaustive cost.
  std::vector<std::uint64_t> e(kmax + 1, 0);
  e[0] = 1;
  for (std::size_t a : candidates) {
    const std::uint64_t n = market.option_count(a);
    for (std::size_t k = kmax; k >= 1; --k) e[k] = saturating_add(e[k], saturating_mul(e[k - 1], n));
  }
  SearchStats stats;
  for (std::size_t k = 1; k <= kmax; ++k) stats.planned = saturating_add(stats.planned, e[k]);
  if (stats.planned > opts.budget) {
    if (!opts.samples_per_coalition) throw BudgetExceeded("coalition search", stats.planned, opts.budget);
    stats.sampled = true;
  }

  std::vector<std::size_t> coalition;
  std::vector<std::size_t> options;
  std::uint64_t combo_rank = 0;

  auto run_joint = [&]() -> bool {
    for (std::size_t i = 0; i < coalition.size(); ++i) market.apply(coalition[i], options[i]);
    ++stats.evaluations;
    if (market.evaluate(std::span<const std::size_t>(coalition))) {
      ++stats.witnesses;
      if (!visit(std::span<const std::size_t>(coalition), std::span<const std::size_t>(options))) return false;
    }
    return true;
  };

  auto run_coalition = [&]() -> bool {
    ++combo_rank;
    std::uint64_t product = 1;
    for (std::size_t a : coalition) product = saturating_mul(product, market.option_count(a));
    options.assign(coalition.size(), 0);
    bool go = true;
    if (stats.sampled && product > *opts.samples_per_coalition) {
      std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                        static_cast<std::uint32_t>(coalition.size()), static_cast<std::uint32_t>(combo_rank)};
      std::mt19937_64 rng(seq);
      for (std::uint64_t s = 0; go && s < *opts.samples_per_coalition; ++s) {
        for (std::size_t i = 0; i < coalition.size(); ++i)
          options[i] = std::uniform_int_distribution<std::size_t>(0, market.option_count(coalition[i]) - 1)(rng);
        go = run_joint();
      }
    } else {
      while (go) {
        go = run_joint();
        bool advanced = false;
        for (std::size_t i = coalition.size(); i-- > 0;) {
          if (++options[i] < market.option_count(coalition[i])) {
            advanced = true;
            break;
          }
          options[i] = 0;
        }
        if (!advanced) break;
      }
    }
    for (std::size_t a : coalition) market.restore(a);
    return go;
  };

  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      coalition.clear();
      for (std::size_t i : idx) coalition.push_back(candidates[i]);
      if (!run_coalition()) return stats;
      // next k-combination of candidate positions
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == candidates.size() - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return stats;
}

}  // namespace detail
}  // namespace matchlab
