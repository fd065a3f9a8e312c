#pragma once

// Existence of stable strategy-proof rules on explicit domains: the
// alternating-sequence incompatibility certificate, a constraint search over
// rule tables, and the single-peaked four-way equivalence report.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "matchlab/core.hpp"
#include "matchlab/da.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/manipulation.hpp"
#include "matchlab/properties.hpp"

namespace matchlab {

// ---- alternating sequences --------------------------------------------------

struct AlternatingSequenceWitness {
  std::vector<int> men;            // m^1..m^k
  std::vector<int> women;          // w^1..w^k
  std::vector<Preference> chain;   // P_{w^i} for i = 2..k
  Preference p_first;              // P_{w^1}
  Preference p_tilde_first;        // P~_{w^1}
  Outcome z;                       // a man or the outside option

  int length() const noexcept { return static_cast<int>(men.size()); }
};

namespace detail {

inline bool chain_link_holds(const Ranking& r, int hi, int lo) {
  return r.prefers(Outcome::partner(hi), Outcome::partner(lo)) && r.acceptable(lo);
}

inline bool pivot_holds(const Ranking& p, const Ranking& pt, int m1, int mk, Outcome z) {
  const Outcome a = Outcome::partner(m1);
  const Outcome b = Outcome::partner(mk);
  if (z == a || z == b) return false;
  return p.prefers(a, b) && p.acceptable(mk) && p.prefers(b, z) && pt.weakly_prefers(z, Outcome::outside()) &&
         pt.prefers(a, z) && pt.prefers(z, b);
}

}  // namespace detail

// Description of the first failed condition, or none when the witness holds.
inline std::optional<std::string> alternating_witness_problem(const PreferenceDomain& d,
                                                              const AlternatingSequenceWitness& w) {
  const int k = w.length();
  if (k < 2) return "sequence needs at least two pairs";
  if (static_cast<int>(w.women.size()) != k) return "men and women lists differ in length";
  if (static_cast<int>(w.chain.size()) != k - 1) return "need one chain preference per pair after the first";
  auto distinct = [](std::vector<int> v, int limit) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end() && v.front() >= 0 && v.back() < limit;
  };
  if (!distinct(w.men, d.men_count()) || !distinct(w.women, d.women_count())) return "agents are not distinct";
  for (int i = 1; i < k; ++i) {
    const Preference& p = w.chain[static_cast<std::size_t>(i - 1)];
    if (p.owner() != AgentId::woman(w.women[static_cast<std::size_t>(i)]) || !d.admits(p))
      return "chain preference " + std::to_string(i + 1) + " is not admissible for its woman";
    if (!detail::chain_link_holds(p.ranking(), w.men[static_cast<std::size_t>(i)], w.men[static_cast<std::size_t>(i - 1)]))
      return "chain condition fails at position " + std::to_string(i + 1);
  }
  const AgentId w1 = AgentId::woman(w.women.front());
  if (w.p_first.owner() != w1 || w.p_tilde_first.owner() != w1 || !d.admits(w.p_first) || !d.admits(w.p_tilde_first))
    return "pivot preferences are not admissible for the first woman";
  if (!w.z.is_outside() && (w.z.index() < 0 || w.z.index() >= d.men_count())) return "pivot is not a man";
  if (!detail::pivot_holds(w.p_first.ranking(), w.p_tilde_first.ranking(), w.men.front(), w.men.back(), w.z))
    return "pivot condition fails";
  return std::nullopt;
}

// Search over k = 2..min(p,q), ordered sequences, preference pairs and pivots
// (men by index, then ∅). Requires unrestricted top pairs for men.
inline std::optional<AlternatingSequenceWitness> find_incompatibility_witness(const PreferenceDomain& d) {
  if (auto gap = utp_gap(d, Side::Man))
    throw PreconditionError("domain lacks unrestricted top pairs for men: " + gap->describe());
  const int p = d.men_count();
  const int q = d.women_count();

  std::vector<int> men, women;
  std::vector<bool> man_used(static_cast<std::size_t>(p)), woman_used(static_cast<std::size_t>(q));
  std::optional<AlternatingSequenceWitness> found;

  auto first_link = [&](int wi, int hi, int lo) -> std::optional<Preference> {
    for (const Preference& pr : d.admissible(AgentId::woman(wi)))
      if (detail::chain_link_holds(pr.ranking(), hi, lo)) return pr;
    return std::nullopt;
  };

  auto try_close = [&]() {
    const int k = static_cast<int>(men.size());
    AlternatingSequenceWitness w{men, women, {}, Preference(AgentId::woman(0), Ranking(std::vector<Outcome>{Outcome::outside()}, 0)),
                                 Preference(AgentId::woman(0), Ranking(std::vector<Outcome>{Outcome::outside()}, 0)),
                                 Outcome::outside()};
    for (int i = 1; i < k; ++i) {
      auto link = first_link(women[static_cast<std::size_t>(i)], men[static_cast<std::size_t>(i)],
                             men[static_cast<std::size_t>(i - 1)]);
      if (!link) return false;
      w.chain.push_back(*link);
    }
    const auto& set = d.admissible(AgentId::woman(women.front()));
    for (const Preference& pf : set) {
      for (const Preference& pt : set) {
        for (int zc = 0; zc <= p; ++zc) {
          const Outcome z = zc == p ? Outcome::outside() : Outcome::partner(zc);
          if (detail::pivot_holds(pf.ranking(), pt.ranking(), men.front(), men.back(), z)) {
            w.p_first = pf;
            w.p_tilde_first = pt;
            w.z = z;
            found = std::move(w);
            return true;
          }
        }
      }
    }
    return false;
  };

  auto extend = [&](auto&& self, int k) -> bool {
    if (static_cast<int>(men.size()) == k) return try_close();
    for (int m = 0; m < p; ++m) {
      if (man_used[static_cast<std::size_t>(m)]) continue;
      for (int wi = 0; wi < q; ++wi) {
        if (woman_used[static_cast<std::size_t>(wi)]) continue;
        // Prune: the new link must be realizable before going deeper.
        if (!men.empty() && !first_link(wi, m, men.back())) continue;
        man_used[static_cast<std::size_t>(m)] = woman_used[static_cast<std::size_t>(wi)] = true;
        men.push_back(m);
        women.push_back(wi);
        const bool done = self(self, k);
        men.pop_back();
        women.pop_back();
        man_used[static_cast<std::size_t>(m)] = woman_used[static_cast<std::size_t>(wi)] = false;
        if (done) return true;
      }
    }
    return false;
  };

  for (int k = 2; k <= std::min(p, q); ++k)
    if (extend(extend, k)) return found;
  return std::nullopt;
}

// ---- stable strategy-proof rule existence -----------------------------------

enum class RulePath { General, Fast };
enum class PathChoice { Auto, General, Fast };

inline std::string to_string(RulePath p) { return p == RulePath::General ? "general" : "fast"; }

struct StableSpRuleResult {
  RulePath path = RulePath::General;
  std::optional<RuleId> fast_candidate;  // set on the fast path
  std::vector<Matching> table;           // one entry per profile index; empty when no rule exists
  std::uint64_t nodes = 0;               // search decisions (general path)
  std::optional<RuleFunction> rule;

  bool exists() const noexcept { return rule.has_value(); }
};

// A rule defined by an explicit table over the profiles of `domain`.
inline RuleFunction table_rule(std::string name, const PreferenceDomain& domain, std::vector<Matching> table) {
  if (table.size() != domain.profile_count()) throw InvalidArgument("rule table must cover every profile");
  auto d = std::make_shared<const PreferenceDomain>(domain);
  auto t = std::make_shared<const std::vector<Matching>>(std::move(table));
  return RuleFunction(std::move(name), [d, t](const Profile& p) {
    const auto i = d->index_of(p);
    if (!i) throw PreconditionError("profile is outside the rule's domain");
    return (*t)[static_cast<std::size_t>(*i)];
  }, true);
}

inline constexpr std::uint64_t kDefaultNodeLimit = 50'000'000;

namespace detail {

// Variables are profiles, values are their stable matchings, and every pair
// of profiles differing in one agent's report carries the two-way
// no-profitable-deviation constraint for that agent. Arc consistency is
// maintained during a depth-first search in canonical profile order.
class StableSpCsp {
 public:
  explicit StableSpCsp(const PreferenceDomain& d) : d_(d), agents_(d.agents()) {
    n_ = d.profile_count();
    const std::size_t na = agents_.size();
    stride_.assign(na, 1);
    for (std::size_t k = na; k-- > 1;) stride_[k - 1] = stride_[k] * d.admissible_at(k).size();
    // rank_[k][c][code]: position of outcome code under agent k's c-th preference
    rank_.resize(na);
    for (std::size_t k = 0; k < na; ++k) {
      const int n = agents_[k].side == Side::Man ? d.women_count() : d.men_count();
      for (const Preference& pr : d.admissible_at(k)) {
        std::vector<int> r(static_cast<std::size_t>(n + 1));
        for (int c = 0; c <= n; ++c) r[static_cast<std::size_t>(c)] = pr.ranking().position_unchecked(code_outcome(c, n));
        rank_[k].push_back(std::move(r));
      }
    }
    stable_.resize(n_);
    outcome_.resize(n_);
    domain_.resize(n_);
    d.for_each_profile([&](std::uint64_t i, const Profile& prof) {
      stable_[i] = stable_set(prof);
      if (stable_[i].size() > 64) throw SizeGuardError("more than 64 stable matchings at one profile");
      auto& oc = outcome_[i];
      for (const Matching& m : stable_[i])
        for (std::size_t k = 0; k < na; ++k) {
          const Outcome o = m.partner(agents_[k]);
          const int n = agents_[k].side == Side::Man ? d.women_count() : d.men_count();
          oc.push_back(o.is_outside() ? n : o.index());
        }
      domain_[i] = stable_[i].size() == 64 ? ~0ull : (1ull << stable_[i].size()) - 1;
    });
  }

  std::optional<std::vector<Matching>> solve(std::uint64_t node_limit, std::uint64_t& nodes) {
    queued_.assign(n_, false);
    for (std::uint64_t i = 0; i < n_; ++i) enqueue(i);
    if (!propagate()) return std::nullopt;

    struct Frame {
      std::uint64_t var;
      std::uint64_t options;
      std::size_t mark;
    };
    std::vector<Frame> stack;
    std::uint64_t cursor = 0;
    while (true) {
      while (cursor < n_ && std::popcount(domain_[cursor]) == 1) ++cursor;
      if (cursor == n_) break;
      stack.push_back(Frame{cursor, domain_[cursor], trail_.size()});
      bool placed = false;
      while (!placed) {
        if (stack.empty()) return std::nullopt;
        Frame& f = stack.back();
        undo(f.mark);
        if (f.options == 0) {
          stack.pop_back();
          continue;
        }
        const std::uint64_t bit = f.options & (~f.options + 1);
        f.options &= ~bit;
        if (++nodes > node_limit) throw BudgetExceeded("stable rule search nodes", nodes, node_limit);
        set(f.var, bit);
        enqueue(f.var);
        placed = propagate();
        if (!placed) clear_queue();
        cursor = f.var;
      }
    }
    std::vector<Matching> table;
    table.reserve(n_);
    for (std::uint64_t i = 0; i < n_; ++i)
      table.push_back(stable_[i][static_cast<std::size_t>(std::countr_zero(domain_[i]))]);
    return table;
  }

 private:
  static Outcome code_outcome(int c, int n) { return c == n ? Outcome::outside() : Outcome::partner(c); }

  std::size_t choice(std::uint64_t i, std::size_t k) const {
    return static_cast<std::size_t>((i / stride_[k]) % d_.admissible_at(k).size());
  }

  int out(std::uint64_t i, std::size_t v, std::size_t k) const { return outcome_[i][v * agents_.size() + k]; }

  // v at profile i and w at profile j are jointly admissible for agent k.
  bool compatible(std::uint64_t i, std::size_t v, std::uint64_t j, std::size_t w, std::size_t k) const {
    const int a = out(i, v, k);
    const int b = out(j, w, k);
    if (a == b) return true;
    const auto& ri = rank_[k][choice(i, k)];
    const auto& rj = rank_[k][choice(j, k)];
    return ri[static_cast<std::size_t>(a)] <= ri[static_cast<std::size_t>(b)] &&
           rj[static_cast<std::size_t>(b)] <= rj[static_cast<std::size_t>(a)];
  }

  void set(std::uint64_t i, std::uint64_t mask) {
    if (domain_[i] == mask) return;
    trail_.emplace_back(i, domain_[i]);
    domain_[i] = mask;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      domain_[trail_.back().first] = trail_.back().second;
      trail_.pop_back();
    }
  }

  void enqueue(std::uint64_t i) {
    if (!queued_[i]) {
      queued_[i] = true;
      queue_.push_back(i);
    }
  }

  void clear_queue() {
    for (std::uint64_t i : queue_) queued_[i] = false;
    queue_.clear();
    head_ = 0;
  }

  // Revise every neighbour against each dequeued profile.
  bool propagate() {
    while (head_ < queue_.size()) {
      const std::uint64_t j = queue_[head_++];
      queued_[j] = false;
      for (std::size_t k = 0; k < agents_.size(); ++k) {
        const std::size_t cj = choice(j, k);
        const std::size_t size = d_.admissible_at(k).size();
        for (std::size_t c = 0; c < size; ++c) {
          if (c == cj) continue;
          const std::uint64_t i = j - cj * stride_[k] + c * stride_[k];
          std::uint64_t keep = 0;
          for (std::uint64_t m = domain_[i]; m; m &= m - 1) {
            const auto v = static_cast<std::size_t>(std::countr_zero(m));
            for (std::uint64_t mm = domain_[j]; mm; mm &= mm - 1) {
              if (compatible(i, v, j, static_cast<std::size_t>(std::countr_zero(mm)), k)) {
                keep |= 1ull << v;
                break;
              }
            }
          }
          if (keep != domain_[i]) {
            if (keep == 0) return false;
            set(i, keep);
            enqueue(i);
          }
        }
      }
    }
    clear_queue();
    return true;
  }

  const PreferenceDomain& d_;
  std::vector<AgentId> agents_;
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> stride_;
  std::vector<std::vector<std::vector<int>>> rank_;
  std::vector<std::vector<Matching>> stable_;
  std::vector<std::vector<int>> outcome_;
  std::vector<std::uint64_t> domain_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> trail_;
  std::vector<std::uint64_t> queue_;
  std::size_t head_ = 0;
  std::vector<bool> queued_;
};

}  // namespace detail

struct RuleSearchOptions {
  PathChoice path = PathChoice::Auto;
  std::uint64_t profile_limit = kExhaustiveProfileLimit;
  std::uint64_t node_limit = kDefaultNodeLimit;
};

// Fast path: with unrestricted top pairs for men (women) the only candidate
// is MPDA (WPDA), so that rule is tested directly. General path: constraint
// search for any stable table with no profitable single-agent deviation.
inline StableSpRuleResult exists_stable_sp_rule(const PreferenceDomain& d, const RuleSearchOptions& opts = {}) {
  const std::uint64_t n = d.profile_count();
  if (n > opts.profile_limit) throw BudgetExceeded("rule search profiles", n, opts.profile_limit);

  std::optional<RuleId> candidate;
  if (opts.path != PathChoice::General) {
    if (satisfies_unrestricted_top_pairs(d, Side::Man))
      candidate = RuleId::MPDA;
    else if (satisfies_unrestricted_top_pairs(d, Side::Woman))
      candidate = RuleId::WPDA;
    else if (opts.path == PathChoice::Fast)
      throw PreconditionError("fast path needs unrestricted top pairs on one side");
  }

  StableSpRuleResult result;
  if (candidate) {
    result.path = RulePath::Fast;
    result.fast_candidate = candidate;
    const RuleFunction da = da_rule(*candidate);
    DomainScanOptions scan;
    scan.profile_limit = opts.profile_limit;
    if (is_strategy_proof(da, d, scan)) return result;
    result.table.reserve(n);
    d.for_each_profile([&](std::uint64_t, const Profile& p) { result.table.push_back(da(p)); });
  } else {
    result.path = RulePath::General;
    detail::StableSpCsp csp(d);
    auto table = csp.solve(opts.node_limit, result.nodes);
    if (!table) return result;
    result.table = std::move(*table);
  }
  result.rule = table_rule(result.path == RulePath::Fast ? to_string(*candidate) + "-table" : "stable-sp-table", d,
                           result.table);
  return result;
}

// ---- single-peaked equivalence ------------------------------------------------

struct EquivalenceReport {
  bool top_dominance = false;      // (a) on at least one side
  bool td_men = false;
  bool td_women = false;
  bool stable_sp_rule = false;     // (b)
  bool stable_gsp_rule = false;    // (c)
  bool da_stable_sp = false;       // (d), strategy-proofness reading
  bool mpda_sp = false, mpda_gsp = false, wpda_sp = false, wpda_gsp = false;
  RulePath path = RulePath::General;
  std::optional<ManipulationWitness> rule_gsp_witness;  // when (b) holds but the table is not GSP

  bool agree() const noexcept {
    return top_dominance == stable_sp_rule && stable_sp_rule == stable_gsp_rule && stable_gsp_rule == da_stable_sp;
  }
};

inline EquivalenceReport theorem3_equivalence_suite(const PreferenceDomain& d, const PriorOrdering& men_ord,
                                                    const PriorOrdering& women_ord,
                                                    const RuleSearchOptions& opts = {}) {
  if (men_ord.side() != Side::Man || women_ord.side() != Side::Woman)
    throw InvalidArgument("orderings must be given as (men, women)");
  if (!is_anonymous(d)) throw PreconditionError("domain is not anonymous");
  if (!is_single_peaked_domain(d, men_ord, women_ord)) throw PreconditionError("domain is not single-peaked");
  if (!satisfies_cyclical_inclusion(d, Side::Man) || !satisfies_cyclical_inclusion(d, Side::Woman))
    throw PreconditionError("domain lacks cyclical inclusion on some side");

  EquivalenceReport r;
  r.td_men = satisfies_top_dominance(d, Side::Man);
  r.td_women = satisfies_top_dominance(d, Side::Woman);
  r.top_dominance = r.td_men || r.td_women;

  DomainScanOptions scan;
  scan.profile_limit = opts.profile_limit;
  const RuleFunction mpda = da_rule(RuleId::MPDA);
  const RuleFunction wpda = da_rule(RuleId::WPDA);
  r.mpda_sp = !is_strategy_proof(mpda, d, scan);
  r.wpda_sp = !is_strategy_proof(wpda, d, scan);
  r.mpda_gsp = r.mpda_sp && !is_group_strategy_proof(mpda, d, scan);
  r.wpda_gsp = r.wpda_sp && !is_group_strategy_proof(wpda, d, scan);
  r.da_stable_sp = r.mpda_sp || r.wpda_sp;

  const StableSpRuleResult found = exists_stable_sp_rule(d, opts);
  r.path = found.path;
  r.stable_sp_rule = found.exists();
  if (found.exists()) {
    r.rule_gsp_witness = is_group_strategy_proof(*found.rule, d, scan);
    r.stable_gsp_rule = !r.rule_gsp_witness.has_value();
  }
  return r;
}

}  // namespace matchlab
