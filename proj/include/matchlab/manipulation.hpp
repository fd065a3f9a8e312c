#pragma once

// Strategy-proofness and group strategy-proofness over explicit domains,
// for any matching rule given as a function from profiles to matchings.

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "matchlab/core.hpp"
#include "matchlab/da.hpp"
#include "matchlab/detail/coalition_search.hpp"
#include "matchlab/domain.hpp"

namespace matchlab {

inline constexpr std::uint64_t kExhaustiveProfileLimit = 100'000;

class RuleFunction {
 public:
  using Fn = std::function<Matching(const Profile&)>;

  RuleFunction(std::string name, Fn fn, bool stable_on_domain)
      : name_(std::move(name)), fn_(std::move(fn)), stable_on_domain_(stable_on_domain) {}

  Matching operator()(const Profile& p) const { return fn_(p); }
  const std::string& name() const noexcept { return name_; }
  bool stable_on_domain() const noexcept { return stable_on_domain_; }

 private:
  std::string name_;
  Fn fn_;
  bool stable_on_domain_;
};

inline RuleFunction da_rule(RuleId rule) {
  return RuleFunction(to_string(rule), [rule](const Profile& p) { return deferred_acceptance(rule, p); }, true);
}

struct ManipulationWitness {
  Profile base;
  std::vector<AgentId> coalition;       // sorted
  std::vector<Preference> misreports;   // aligned with coalition
  Matching outcome_before;
  Matching outcome_after;

  Profile reported() const {
    Profile out = base;
    for (const Preference& p : misreports) out.assign(p);
    return out;
  }
};

namespace detail {

class OneToOneMarket {
 public:
  OneToOneMarket(const RuleFunction& rule, const PreferenceDomain& domain, const Profile& base,
                 std::optional<Side> only_side)
      : rule_(rule), domain_(domain), truth_(base), work_(base), before_(rule(base)), after_(before_),
        agents_(base.agents()) {
    const auto choices = domain.choices_of(base);
    if (!choices) throw PreconditionError("base profile is not admissible in the domain");
    options_.resize(agents_.size());
    eligible_.resize(agents_.size());
    for (std::size_t k = 0; k < agents_.size(); ++k) {
      const auto& set = domain.admissible_at(k);
      for (std::size_t i = 0; i < set.size(); ++i)
        if (i != (*choices)[k]) options_[k].push_back(i);
      const AgentId a = agents_[k];
      // An agent already holding its top outcome cannot strictly gain.
      eligible_[k] = (!only_side || a.side == *only_side) && before_.partner(a) != truth_.of(a).top();
    }
  }

  std::size_t agent_count() const noexcept { return agents_.size(); }
  std::size_t option_count(std::size_t k) const noexcept { return options_[k].size(); }
  bool eligible(std::size_t k) const noexcept { return eligible_[k]; }

  void apply(std::size_t k, std::size_t opt) { work_.assign(domain_.admissible_at(k)[options_[k][opt]]); }
  void restore(std::size_t k) { work_.assign(truth_.of(agents_[k])); }

  bool evaluate(std::span<const std::size_t> coalition) {
    after_ = rule_(work_);
    for (std::size_t k : coalition) {
      const AgentId a = agents_[k];
      if (!truth_.of(a).ranking().prefers(after_.partner(a), before_.partner(a))) return false;
    }
    return true;
  }

  ManipulationWitness witness(std::span<const std::size_t> coalition, std::span<const std::size_t> opts) const {
    ManipulationWitness w{truth_, {}, {}, before_, after_};
    for (std::size_t i = 0; i < coalition.size(); ++i) {
      const std::size_t k = coalition[i];
      w.coalition.push_back(agents_[k]);
      w.misreports.push_back(domain_.admissible_at(k)[options_[k][opts[i]]]);
    }
    return w;
  }

 private:
  const RuleFunction& rule_;
  const PreferenceDomain& domain_;
  Profile truth_;
  Profile work_;
  Matching before_;
  Matching after_;
  std::vector<AgentId> agents_;
  std::vector<std::vector<std::size_t>> options_;
  std::vector<bool> eligible_;
};

}  // namespace detail

// Calls fn(witness) for every manipulation at `base` in canonical order
// until fn returns false. `only_side` restricts coalitions to one side.
template <class Fn>
SearchStats for_each_manipulation(const RuleFunction& rule, const PreferenceDomain& domain, const Profile& base,
                                  const SearchOptions& opts, Fn&& fn, std::optional<Side> only_side = std::nullopt) {
  detail::OneToOneMarket market(rule, domain, base, only_side);
  return detail::search_coalitions(market, opts, [&](std::span<const std::size_t> c, std::span<const std::size_t> o) {
    return static_cast<bool>(fn(market.witness(c, o)));
  });
}

inline std::optional<ManipulationWitness> find_manipulation(const RuleFunction& rule, const PreferenceDomain& domain,
                                                            const Profile& base, const SearchOptions& opts,
                                                            std::optional<Side> only_side = std::nullopt) {
  std::optional<ManipulationWitness> found;
  for_each_manipulation(
      rule, domain, base, opts,
      [&](ManipulationWitness w) {
        found = std::move(w);
        return false;
      },
      only_side);
  return found;
}

struct DomainScanOptions {
  std::uint64_t profile_limit = kExhaustiveProfileLimit;
  std::uint64_t budget = kDefaultBudget;  // per base profile
};

namespace detail {
inline std::optional<ManipulationWitness> scan_domain(const RuleFunction& rule, const PreferenceDomain& domain,
                                                      int max_coalition, const DomainScanOptions& opts) {
  const std::uint64_t n = domain.profile_count();
  if (n > opts.profile_limit) throw BudgetExceeded("exhaustive domain scan", n, opts.profile_limit);
  SearchOptions search;
  search.max_coalition = max_coalition;
  search.budget = opts.budget;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (auto w = find_manipulation(rule, domain, domain.profile_at(i), search)) return w;
  }
  return std::nullopt;
}
}  // namespace detail

// First single-agent manipulation over the whole domain, or none when the
// rule is strategy-proof on it.
inline std::optional<ManipulationWitness> is_strategy_proof(const RuleFunction& rule, const PreferenceDomain& domain,
                                                            const DomainScanOptions& opts = {}) {
  return detail::scan_domain(rule, domain, 1, opts);
}

inline std::optional<ManipulationWitness> is_group_strategy_proof(const RuleFunction& rule,
                                                                  const PreferenceDomain& domain,
                                                                  const DomainScanOptions& opts = {}) {
  return detail::scan_domain(rule, domain, domain.agent_count(), opts);
}

struct SampledScan {
  std::optional<ManipulationWitness> witness;
  std::uint64_t bases = 0;
  std::uint64_t evaluations = 0;
  bool sampled_coalitions = false;
};

// Refutation-only scan over `trials` seeded random base profiles.
inline SampledScan sampled_manipulation_scan(const RuleFunction& rule, const PreferenceDomain& domain,
                                             const SearchOptions& search, std::uint64_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SampledScan out;
  for (std::uint64_t t = 0; t < trials && !out.witness; ++t) {
    const Profile base = domain.sample(rng);
    ++out.bases;
    const SearchStats stats = for_each_manipulation(rule, domain, base, search, [&](ManipulationWitness w) {
      out.witness = std::move(w);
      return false;
    });
    out.evaluations += stats.evaluations;
    out.sampled_coalitions = out.sampled_coalitions || stats.sampled;
  }
  return out;
}

// Re-checks a witness from scratch; returns a description of the first
// problem, or none when the witness is valid.
inline std::optional<std::string> witness_problem(const RuleFunction& rule, const ManipulationWitness& w,
                                                  const PreferenceDomain* domain = nullptr) {
  if (w.coalition.empty()) return "empty coalition";
  if (w.coalition.size() != w.misreports.size()) return "coalition and misreports differ in length";
  for (std::size_t i = 0; i < w.coalition.size(); ++i) {
    const AgentId a = w.coalition[i];
    if (i > 0 && !(w.coalition[i - 1] < a)) return "coalition is not sorted and duplicate-free";
    if (w.misreports[i].owner() != a) return "misreport of " + to_string(a) + " has a foreign owner";
    if (w.misreports[i].ranking() == w.base.of(a).ranking()) return to_string(a) + " reports the truth";
    if (domain && !domain->admits(w.misreports[i])) return "misreport of " + to_string(a) + " is not admissible";
  }
  if (domain && !domain->contains(w.base)) return "base profile is not admissible";
  if (rule(w.base) != w.outcome_before) return "outcome_before does not match the rule";
  if (rule(w.reported()) != w.outcome_after) return "outcome_after does not match the rule";
  for (const AgentId a : w.coalition)
    if (!w.base.of(a).prefers(w.outcome_after.partner(a), w.outcome_before.partner(a)))
      return to_string(a) + " is not strictly better off";
  return std::nullopt;
}

enum class Shift { Better, Same, Worse };

inline std::string to_string(Shift s) {
  switch (s) {
    case Shift::Better: return "better";
    case Shift::Same: return "same";
    case Shift::Worse: return "worse";
  }
  return "?";
}

struct WelfareReport {
  std::vector<Shift> men;
  std::vector<Shift> women;
  bool men_weakly_worse = true;
  bool women_weakly_better = true;
  bool unmatched_unchanged = true;
};

// Per-agent welfare change from outcome_before to outcome_after, judged by
// true preferences.
inline WelfareReport welfare_shift(const RuleFunction& rule, const Profile& base, const ManipulationWitness& w) {
  if (!(w.base == base)) throw InvalidArgument("witness was found at a different base profile");
  if (auto problem = witness_problem(rule, w)) throw InvalidArgument("invalid witness: " + *problem);
  WelfareReport r;
  for (const AgentId a : base.agents()) {
    const Outcome before = w.outcome_before.partner(a);
    const Outcome after = w.outcome_after.partner(a);
    const Ranking& pref = base.of(a).ranking();
    const Shift s = after == before ? Shift::Same : pref.prefers(after, before) ? Shift::Better : Shift::Worse;
    if (a.side == Side::Man) {
      r.men.push_back(s);
      r.men_weakly_worse = r.men_weakly_worse && s != Shift::Better;
    } else {
      r.women.push_back(s);
      r.women_weakly_better = r.women_weakly_better && s != Shift::Worse;
    }
    r.unmatched_unchanged = r.unmatched_unchanged && (before.is_outside() == after.is_outside());
  }
  return r;
}

}  // namespace matchlab
