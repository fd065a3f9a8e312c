#pragma once

// Named verification suites. Each returns a SuiteReport with a verdict, the
// checking mode (exhaustive or sampled), and a re-checked counterexample on
// failure. Reports are deterministic for fixed parameters.

#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "matchlab/core.hpp"
#include "matchlab/da.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/fixtures.hpp"
#include "matchlab/io.hpp"
#include "matchlab/manipulation.hpp"
#include "matchlab/mto.hpp"
#include "matchlab/properties.hpp"
#include "matchlab/rule_search.hpp"

namespace matchlab::suites {

struct SuiteParams {
  std::optional<int> men;
  std::optional<int> women;
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> trials;
  std::uint64_t budget = kDefaultBudget;
  // Joint misreports tried per coalition once a base exceeds the budget.
  std::uint64_t samples_per_coalition = 2000;
  int jobs = 1;
};

struct SuiteReport {
  std::string suite;
  int men = 0;
  int women = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> trials;
  std::uint64_t budget = 0;
  bool pass = true;
  bool sampled = false;
  std::uint64_t cases = 0;
  Json details = Json::object();
  std::optional<Json> counterexample;
  double runtime_ms = 0;

  Json to_json(bool timing = false) const {
    Json params{{"men", men}, {"women", women}, {"seed", seed}, {"budget", budget}};
    params["trials"] = trials ? Json(*trials) : Json(nullptr);
    Json out{{"schema_version", kSchemaVersion}, {"suite", suite}, {"params", params},
             {"verdict", pass ? "pass" : "fail"}, {"mode", sampled ? "sampled" : "exhaustive"},
             {"cases", cases}, {"details", details}};
    out["counterexample"] = counterexample ? *counterexample : Json(nullptr);
    if (timing) out["runtime_ms"] = runtime_ms;
    return out;
  }

  std::string to_text(bool timing = false) const {
    std::string out = suite + ": " + (pass ? "PASS" : "FAIL") + " (" + (sampled ? "sampled" : "exhaustive") + ", " +
                      std::to_string(men) + "x" + std::to_string(women) + ", " + std::to_string(cases) + " cases";
    if (timing) out += ", " + std::to_string(static_cast<long long>(runtime_ms)) + " ms";
    out += ")\n";
    for (auto it = details.begin(); it != details.end(); ++it) out += "  " + it.key() + ": " + it.value().dump() + "\n";
    if (counterexample) out += "  counterexample: " + counterexample->dump() + "\n";
    return out;
  }
};

inline const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"theorem1",   "prop-welfare", "prop-unmatched",  "corollary-dubins",
                                            "prop-gsp-existence", "theorem2", "example1", "prop4",
                                            "theorem3",   "blocking-lemma", "lemma-c1", "lemma-c2", "example2"};
  return ids;
}

namespace detail {

// Runs fn(i) for i in [0, n) on `jobs` threads; results are kept by index
// and the first exception (by index) is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t start, std::size_t step) {
    for (std::size_t i = start; i < n; i += step) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline void require_two_per_side(int p, int q) {
  if (p < 2 || q < 2) throw PreconditionError("this suite needs at least two agents on each side");
}

inline std::uint64_t default_trials(int p, int q) { return std::max(p, q) <= 3 ? 1000 : 200; }

inline SuiteReport start(const std::string& id, int p, int q, const SuiteParams& params) {
  SuiteReport r;
  r.suite = id;
  r.men = p;
  r.women = q;
  r.seed = params.seed;
  r.trials = params.trials;
  r.budget = params.budget;
  return r;
}

inline PreferenceDomain domain_from_rankings(int p, int q, const std::vector<std::vector<Ranking>>& sets) {
  std::vector<std::vector<Preference>> prefs;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const AgentId a = k < static_cast<std::size_t>(p) ? AgentId::man(static_cast<int>(k))
                                                      : AgentId::woman(static_cast<int>(k) - p);
    auto& s = prefs.emplace_back();
    for (const Ranking& r : sets[k]) s.emplace_back(a, r);
  }
  return PreferenceDomain(p, q, std::move(prefs));
}

// Random non-empty subset of `pool` with at most `cap` elements, kept in
// pool order.
inline std::vector<Ranking> random_subset(const std::vector<Ranking>& pool, std::size_t cap, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(cap, pool.size()))(rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<Ranking> out;
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

// Random set free of top-dominance conflicts, grown greedily.
inline std::vector<Ranking> random_td_set(const std::vector<Ranking>& pool, std::size_t cap, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const std::size_t target = std::uniform_int_distribution<std::size_t>(1, std::min(cap, pool.size()))(rng);
  std::vector<Ranking> out;
  for (std::size_t i : idx) {
    if (out.size() == target) break;
    out.push_back(pool[i]);
    if (find_td_conflict(out)) out.pop_back();
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Domains with unrestricted top pairs for men: each man holds the minimal
// set plus a random selection of the other orders; women hold random sets.
inline PreferenceDomain random_utp_men_domain(int p, int q, std::size_t women_cap, std::mt19937_64& rng) {
  std::vector<std::vector<Ranking>> sets;
  const auto all_men = all_rankings(q);
  for (int i = 0; i < p; ++i) {
    std::vector<Ranking> s;
    for (const Preference& pr : minimal_utp_set(AgentId::man(i), q)) s.push_back(pr.ranking());
    for (const Ranking& r : all_men)
      if (std::find(s.begin(), s.end(), r) == s.end() && (rng() & 1u)) s.push_back(r);
    std::sort(s.begin(), s.end());
    sets.push_back(std::move(s));
  }
  const auto all_women = all_rankings(p);
  for (int j = 0; j < q; ++j) sets.push_back(random_subset(all_women, women_cap, rng));
  return domain_from_rankings(p, q, sets);
}

inline std::size_t set_cap(int p, int q, double target) {
  const double cap = std::floor(std::pow(target, 1.0 / (p + q)) + 1e-9);
  return static_cast<std::size_t>(std::max(1.0, cap));
}

// ---- witness scans over the full domain ----------------------------------

struct WitnessFinding {
  std::uint64_t bases = 0;
  std::uint64_t witnesses = 0;
  std::uint64_t evaluations = 0;
  bool sampled = false;
  std::optional<ManipulationWitness> coalition_violation;  // proposer in the coalition
  std::optional<ManipulationWitness> welfare_violation;
  std::optional<ManipulationWitness> unmatched_violation;
};

// Every witness at every base (all profiles when the domain is small and
// no trial count is forced, else seeded random bases).
inline WitnessFinding scan_witnesses(RuleId rule_id, int p, int q, const SuiteParams& params,
                                     std::optional<Side> only_side = std::nullopt) {
  const PreferenceDomain d = PreferenceDomain::full(p, q);
  const RuleFunction rule = da_rule(rule_id);
  const Side proposers = proposing_side(rule_id);
  const bool exhaustive = !params.trials && d.profile_count() <= kExhaustiveProfileLimit;
  const std::uint64_t bases = exhaustive ? d.profile_count() : params.trials.value_or(default_trials(p, q));
  SearchOptions search;
  search.max_coalition = p + q;
  search.budget = params.budget;
  search.samples_per_coalition = params.samples_per_coalition;
  search.seed = params.seed;

  auto one = [&](std::size_t i) {
    WitnessFinding f;
    f.bases = 1;
    Profile base = [&] {
      if (exhaustive) return d.profile_at(i);
      auto rng = trial_rng(params.seed, i);
      return d.sample(rng);
    }();
    const SearchStats st = for_each_manipulation(
        rule, d, base, search,
        [&](const ManipulationWitness& w) {
          ++f.witnesses;
          if (!f.coalition_violation &&
              std::any_of(w.coalition.begin(), w.coalition.end(), [&](AgentId a) { return a.side == proposers; }))
            f.coalition_violation = w;
          const WelfareReport wr = welfare_shift(rule, base, w);
          const auto& prop = proposers == Side::Man ? wr.men : wr.women;
          const auto& recv = proposers == Side::Man ? wr.women : wr.men;
          const bool ok = std::none_of(prop.begin(), prop.end(), [](Shift s) { return s == Shift::Better; }) &&
                          std::none_of(recv.begin(), recv.end(), [](Shift s) { return s == Shift::Worse; });
          if (!f.welfare_violation && !ok) f.welfare_violation = w;
          if (!f.unmatched_violation && !wr.unmatched_unchanged) f.unmatched_violation = w;
          return true;
        },
        only_side);
    f.evaluations = st.evaluations;
    f.sampled = st.sampled || !exhaustive;
    return f;
  };
  const auto parts = parallel_map<WitnessFinding>(static_cast<std::size_t>(bases), params.jobs, one);
  WitnessFinding total;
  total.sampled = !exhaustive;
  for (const auto& f : parts) {
    total.bases += f.bases;
    total.witnesses += f.witnesses;
    total.evaluations += f.evaluations;
    total.sampled = total.sampled || f.sampled;
    if (!total.coalition_violation) total.coalition_violation = f.coalition_violation;
    if (!total.welfare_violation) total.welfare_violation = f.welfare_violation;
    if (!total.unmatched_violation) total.unmatched_violation = f.unmatched_violation;
  }
  return total;
}

// A failing witness must survive an independent re-check before it is
// reported.
inline Json confirmed(const RuleFunction& rule, const ManipulationWitness& w) {
  if (auto problem = witness_problem(rule, w))
    throw std::logic_error("internal error: reported witness does not re-check: " + *problem);
  return matchlab::to_json(w);
}

inline SuiteReport witness_suite(const std::string& id, const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start(id, p, q, params);
  const auto t0 = std::chrono::steady_clock::now();
  const WitnessFinding f = scan_witnesses(RuleId::MPDA, p, q, params);
  r.cases = f.bases;
  r.sampled = f.sampled;
  r.details["witnesses"] = f.witnesses;
  r.details["evaluations"] = f.evaluations;
  const std::optional<ManipulationWitness>& bad = id == "theorem1"       ? f.coalition_violation
                                                  : id == "prop-welfare" ? f.welfare_violation
                                                                         : f.unmatched_violation;
  if (bad) {
    r.pass = false;
    r.counterexample = confirmed(da_rule(RuleId::MPDA), *bad);
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---- individual suites -------------------------------------------------------

inline SuiteReport corollary_dubins(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start("corollary-dubins", p, q, params);
  const WitnessFinding f = scan_witnesses(RuleId::MPDA, p, q, params, Side::Man);
  r.cases = f.bases;
  r.sampled = f.sampled;
  r.details["men_only_witnesses"] = f.witnesses;
  if (f.witnesses > 0) {
    // any men-only witness refutes the claim; rescan for the first one
    r.pass = false;
    const PreferenceDomain d = PreferenceDomain::full(p, q);
    SearchOptions search;
    search.max_coalition = p;
    search.budget = params.budget;
    search.samples_per_coalition = params.samples_per_coalition;
    for (std::uint64_t i = 0; i < f.bases && !r.counterexample; ++i) {
      Profile base = d.profile_count() <= kExhaustiveProfileLimit && !params.trials
                         ? d.profile_at(i)
                         : [&] { auto rng = trial_rng(params.seed, i); return d.sample(rng); }();
      if (auto w = find_manipulation(da_rule(RuleId::MPDA), d, base, search, Side::Man))
        r.counterexample = confirmed(da_rule(RuleId::MPDA), *w);
    }
  }
  return r;
}

inline SuiteReport prop_gsp_existence(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start("prop-gsp-existence", p, q, params);
  const std::uint64_t n = params.trials.value_or(50);
  const std::size_t cap = std::min<std::size_t>(6, set_cap(p, q, 2000));
  const auto men_pool = all_rankings(q);
  const auto women_pool = all_rankings(p);
  const RuleFunction mpda = da_rule(RuleId::MPDA);

  auto make = [&](std::size_t i) -> PreferenceDomain {
    if (i == 0 && p == 2 && q == 2) return fixtures::td_women_2x2();
    auto rng = trial_rng(params.seed, i);
    std::vector<std::vector<Ranking>> sets;
    for (int a = 0; a < p; ++a) sets.push_back(random_subset(men_pool, cap, rng));
    for (int b = 0; b < q; ++b) sets.push_back(random_td_set(women_pool, cap, rng));
    return domain_from_rankings(p, q, sets);
  };
  struct Out {
    std::optional<ManipulationWitness> w;
    bool td = true;
    std::uint64_t profiles = 0;
  };
  const auto outs = parallel_map<Out>(static_cast<std::size_t>(n), params.jobs, [&](std::size_t i) {
    const PreferenceDomain d = make(i);
    DomainScanOptions scan;
    scan.budget = params.budget;
    return Out{is_group_strategy_proof(mpda, d, scan), satisfies_top_dominance(d, Side::Woman), d.profile_count()};
  });
  std::uint64_t profiles = 0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (!outs[i].td) throw std::logic_error("internal error: generated domain lacks top dominance for women");
    profiles += outs[i].profiles;
    if (outs[i].w && r.pass) {
      r.pass = false;
      r.counterexample = Json{{"domain", matchlab::to_json(make(i))}, {"witness", confirmed(mpda, *outs[i].w)}};
    }
  }
  r.cases = n;
  r.details["profiles_checked"] = profiles;
  return r;
}

inline SuiteReport theorem2(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start("theorem2", p, q, params);
  const std::uint64_t n = params.trials.value_or(64);
  const std::size_t cap = p == 2 && q == 2 ? 6 : set_cap(p, q, 4000);
  const RuleFunction mpda = da_rule(RuleId::MPDA);
  const RuleFunction wpda = da_rule(RuleId::WPDA);

  struct Out {
    bool exists = false;
    std::string problem;
  };
  auto domain_at = [&](std::size_t i) {
    auto rng = trial_rng(params.seed, i);
    return random_utp_men_domain(p, q, cap, rng);
  };
  const auto outs = parallel_map<Out>(static_cast<std::size_t>(n), params.jobs, [&](std::size_t i) {
    const PreferenceDomain d = domain_at(i);
    Out o;
    DomainScanOptions scan;
    scan.budget = params.budget;
    const auto fast = exists_stable_sp_rule(d);
    RuleSearchOptions general_opts;
    general_opts.path = PathChoice::General;
    const auto general = exists_stable_sp_rule(d, general_opts);
    o.exists = fast.exists();
    const bool mpda_sp = !is_strategy_proof(mpda, d, scan);
    const bool mpda_gsp = !is_group_strategy_proof(mpda, d, scan);
    const bool wpda_sp = !is_strategy_proof(wpda, d, scan);
    const bool wpda_gsp = !is_group_strategy_proof(wpda, d, scan);
    if (fast.exists() != general.exists())
      o.problem = "fast and general rule searches disagree";
    else if (fast.exists() != mpda_gsp)
      o.problem = "rule existence differs from MPDA passing the group check";
    else if (mpda_sp != mpda_gsp)
      o.problem = "MPDA is strategy-proof but not group strategy-proof";
    else if (wpda_sp != wpda_gsp)
      o.problem = "WPDA is strategy-proof but not group strategy-proof";
    if (o.problem.empty() && fast.exists()) {
      if (is_group_strategy_proof(*general.rule, d, scan)) o.problem = "returned rule fails the group check";
      std::uint64_t i2 = 0;
      d.for_each_profile([&](std::uint64_t idx, const Profile& prof) {
        const Matching m = deferred_acceptance(RuleId::MPDA, prof);
        if (o.problem.empty() && (general.table[idx] != m || fast.table[idx] != m))
          o.problem = "returned rule differs from MPDA at profile " + std::to_string(idx);
        ++i2;
      });
    }
    return o;
  });
  std::uint64_t with_rule = 0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    with_rule += outs[i].exists;
    if (!outs[i].problem.empty() && r.pass) {
      r.pass = false;
      r.counterexample = Json{{"problem", outs[i].problem}, {"domain", matchlab::to_json(domain_at(i))}};
    }
  }
  r.cases = n;
  r.details["domains_with_rule"] = with_rule;
  return r;
}

inline SuiteReport example1(const SuiteParams& params) {
  SuiteReport r = start("example1", 2, 2, params);
  const Profile p1 = fixtures::example1_p1(), p2 = fixtures::example1_p2(), p3 = fixtures::example1_p3();
  const Matching mu = fixtures::example1_mu(), mt = fixtures::example1_mu_tilde();
  std::vector<std::pair<std::string, bool>> checks;
  checks.emplace_back("stable_set_p1", stable_set(p1) == std::vector<Matching>{mu, mt} ||
                                           stable_set(p1) == std::vector<Matching>{mt, mu});
  checks.emplace_back("stable_set_p2", stable_set(p2) == std::vector<Matching>{mu});
  checks.emplace_back("stable_set_p3", stable_set(p3) == std::vector<Matching>{mt});
  checks.emplace_back("mpda_p1", deferred_acceptance(RuleId::MPDA, p1) == mu);
  checks.emplace_back("wpda_p1", deferred_acceptance(RuleId::WPDA, p1) == mt);
  const PreferenceDomain full = PreferenceDomain::full(2, 2);
  const Preference w1_misreport = p3.woman(0);
  const Preference m1_misreport = p2.man(0);
  auto manipulates = [&](RuleId id, const Preference& mis) {
    const RuleFunction rule = da_rule(id);
    const Profile reported = p1.with(mis);
    ManipulationWitness w{p1, {mis.owner()}, {mis}, rule(p1), rule(reported)};
    return !witness_problem(rule, w, &full).has_value();
  };
  checks.emplace_back("w1_manipulates_mpda", manipulates(RuleId::MPDA, w1_misreport));
  checks.emplace_back("m1_manipulates_wpda", manipulates(RuleId::WPDA, m1_misreport));
  // The search finds w1's misreport first.
  const auto first = find_manipulation(da_rule(RuleId::MPDA), full, p1, SearchOptions{});
  checks.emplace_back("first_mpda_witness_is_w1",
                      first && first->coalition == std::vector<AgentId>{AgentId::woman(0)} &&
                          first->misreports.front().ranking() == w1_misreport.ranking());
  Json failed = Json::array();
  for (auto& [name, ok] : checks) {
    r.details[name] = ok;
    if (!ok) failed.push_back(name);
  }
  r.cases = checks.size();
  if (!failed.empty()) {
    r.pass = false;
    r.counterexample = Json{{"failed_checks", failed}};
  }
  return r;
}

inline SuiteReport prop4(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start("prop4", p, q, params);
  const PreferenceDomain d =
      fixtures::maximal_single_peaked(PriorOrdering::identity(Side::Man, p), PriorOrdering::identity(Side::Woman, q));
  RuleSearchOptions general;
  general.path = PathChoice::General;
  const auto rule_general = exists_stable_sp_rule(d, general);
  const auto rule_auto = exists_stable_sp_rule(d);
  const auto witness = find_incompatibility_witness(d);
  const bool witness_ok = witness && !alternating_witness_problem(d, *witness);
  r.details["rule_exists_general"] = rule_general.exists();
  r.details["rule_exists_auto"] = rule_auto.exists();
  r.details["auto_path"] = to_string(rule_auto.path);
  r.details["incompatibility_witness"] = witness_ok;
  if (witness) r.details["witness_length"] = witness->length();
  r.cases = d.profile_count();
  r.pass = !rule_general.exists() && !rule_auto.exists() && witness_ok;
  if (!r.pass) {
    r.counterexample = Json{{"domain", matchlab::to_json(d)}};
    if (rule_general.exists()) r.counterexample->operator[]("rule") = "a stable strategy-proof table was found";
  }
  return r;
}

// Every anonymous 2x2 domain whose common sets are single-peaked and have
// cyclical inclusion.
inline std::vector<PreferenceDomain> theorem3_family() {
  auto valid_sets = [](Side side) {
    const PriorOrdering ord = PriorOrdering::identity(opposite(side), 2);
    const auto pool = rankings_of(generate_maximal_single_peaked(ord, AgentId{side, 0}));
    const auto other = all_rankings(2);
    std::vector<std::vector<Ranking>> out;
    for (unsigned mask = 1; mask < (1u << pool.size()); ++mask) {
      std::vector<Ranking> set;
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (mask >> i & 1u) set.push_back(pool[i]);
      const PreferenceDomain probe = side == Side::Man ? PreferenceDomain::anonymous(2, 2, set, other)
                                                       : PreferenceDomain::anonymous(2, 2, other, set);
      if (satisfies_cyclical_inclusion(probe, side)) out.push_back(std::move(set));
    }
    return out;
  };
  const auto men = valid_sets(Side::Man);
  const auto women = valid_sets(Side::Woman);
  std::vector<PreferenceDomain> out;
  for (const auto& m : men)
    for (const auto& w : women) out.push_back(PreferenceDomain::anonymous(2, 2, m, w));
  return out;
}

inline SuiteReport theorem3(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  if (p != 2 || q != 2) throw PreconditionError("the single-peaked domain family is generated for 2x2 markets only");
  SuiteReport r = start("theorem3", p, q, params);
  auto family = theorem3_family();
  if (params.trials && *params.trials < family.size()) {
    std::mt19937_64 rng(params.seed);
    std::shuffle(family.begin(), family.end(), rng);
    family.erase(family.begin() + static_cast<std::ptrdiff_t>(*params.trials), family.end());
    r.sampled = true;
  }
  const PriorOrdering mo = PriorOrdering::identity(Side::Man, 2), wo = PriorOrdering::identity(Side::Woman, 2);
  const auto reports = parallel_map<EquivalenceReport>(
      family.size(), params.jobs, [&](std::size_t i) { return theorem3_equivalence_suite(family[i], mo, wo); });
  std::uint64_t td = 0, rule = 0, gsp_gap = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& e = reports[i];
    td += e.top_dominance;
    rule += e.stable_sp_rule;
    gsp_gap += e.da_stable_sp && !(e.mpda_gsp || e.wpda_gsp);
    if (!e.agree() && r.pass) {
      r.pass = false;
      r.counterexample = Json{{"domain", matchlab::to_json(family[i])},
                              {"top_dominance", e.top_dominance},
                              {"stable_sp_rule", e.stable_sp_rule},
                              {"stable_gsp_rule", e.stable_gsp_rule},
                              {"da_stable_sp", e.da_stable_sp}};
    }
  }
  r.cases = family.size();
  r.details["domains_with_top_dominance"] = td;
  r.details["domains_with_rule"] = rule;
  r.details["da_sp_but_not_gsp"] = gsp_gap;
  return r;
}

// Returns a problem description when the blocking property fails for the
// individually rational matching `mu`; nullopt when it holds or when no man
// strictly prefers mu to the man-optimal stable matching.
inline std::optional<std::string> check_blocking_lemma(const Profile& prof, const Matching& mu) {
  if (!is_individually_rational(mu, prof)) throw PreconditionError("matching is not individually rational");
  const Matching opt = deferred_acceptance(RuleId::MPDA, prof);
  std::vector<bool> better(static_cast<std::size_t>(prof.men_count()));
  bool any = false;
  for (int i = 0; i < prof.men_count(); ++i) {
    const AgentId m = AgentId::man(i);
    better[static_cast<std::size_t>(i)] = prof.of(m).prefers(mu.partner(m), opt.partner(m));
    any = any || better[static_cast<std::size_t>(i)];
  }
  if (!any) return std::nullopt;
  for (const auto& [m, w] : blocking_pairs(mu, prof)) {
    if (better[static_cast<std::size_t>(m)]) continue;
    const Outcome h = mu.partner(AgentId::woman(w));
    if (!h.is_outside() && better[static_cast<std::size_t>(h.index())]) return std::nullopt;
  }
  return std::string("no blocking pair joins a man outside M' with a woman matched into M'");
}

inline SuiteReport blocking_lemma(const SuiteParams& params) {
  const int p = params.men.value_or(3);
  const int q = params.women.value_or(3);
  require_two_per_side(p, q);
  SuiteReport r = start("blocking-lemma", p, q, params);
  r.sampled = true;
  const std::uint64_t n = params.trials.value_or(10'000);
  const PreferenceDomain d = PreferenceDomain::full(p, q);
  const std::vector<Matching> all = enumerate_matchings(p, q);
  std::mt19937_64 rng(params.seed);
  std::uint64_t draws = 0, applicable = 0;
  const std::uint64_t max_draws = 1000 * n + 1000;
  while (applicable < n && draws < max_draws) {
    ++draws;
    const Profile prof = d.sample(rng);
    std::vector<const Matching*> ir;
    for (const Matching& m : all)
      if (is_individually_rational(m, prof)) ir.push_back(&m);
    const Matching& mu = *ir[std::uniform_int_distribution<std::size_t>(0, ir.size() - 1)(rng)];
    const Matching opt = deferred_acceptance(RuleId::MPDA, prof);
    bool any = false;
    for (int i = 0; i < p; ++i)
      any = any || prof.of(AgentId::man(i)).prefers(mu.partner(AgentId::man(i)), opt.partner(AgentId::man(i)));
    if (!any) continue;
    ++applicable;
    if (auto problem = check_blocking_lemma(prof, mu); problem && r.pass) {
      r.pass = false;
      r.counterexample = Json{{"profile", matchlab::to_json(prof)}, {"matching", matchlab::to_json(mu)},
                              {"problem", *problem}};
    }
  }
  r.cases = applicable;
  r.details["draws"] = draws;
  if (applicable < n) {
    r.pass = false;
    r.details["shortfall"] = "too few draws had a man preferring the random matching";
  }
  return r;
}

// Domains with unrestricted top pairs for men; the 2x2 family starts with
// the full and the maximal single-peaked domain.
inline PreferenceDomain utp_family_member(int p, int q, std::uint64_t seed, std::size_t i) {
  if (p == 2 && q == 2) {
    if (i == 0) return PreferenceDomain::full(2, 2);
    if (i == 1) return fixtures::maximal_single_peaked_2x2();
  }
  auto rng = trial_rng(seed, i);
  return random_utp_men_domain(p, q, p == 2 && q == 2 ? 6 : set_cap(p, q, 4000), rng);
}

inline SuiteReport lemma_c1(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start("lemma-c1", p, q, params);
  const std::uint64_t n = params.trials.value_or(64);
  const auto problems = parallel_map<std::pair<bool, std::string>>(static_cast<std::size_t>(n), params.jobs, [&](std::size_t i) {
    const PreferenceDomain d = utp_family_member(p, q, params.seed, i);
    RuleSearchOptions opts;
    opts.path = PathChoice::General;
    const auto found = exists_stable_sp_rule(d, opts);
    std::string problem;
    if (found.exists())
      d.for_each_profile([&](std::uint64_t idx, const Profile& prof) {
        if (problem.empty() && found.table[idx] != deferred_acceptance(RuleId::MPDA, prof))
          problem = "stable strategy-proof table differs from MPDA at profile " + std::to_string(idx);
      });
    return std::pair{found.exists(), problem};
  });
  std::uint64_t with_rule = 0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    with_rule += problems[i].first;
    if (!problems[i].second.empty() && r.pass) {
      r.pass = false;
      r.counterexample = Json{{"problem", problems[i].second}, {"domain", matchlab::to_json(utp_family_member(p, q, params.seed, i))}};
    }
  }
  r.cases = n;
  r.details["domains_with_rule"] = with_rule;
  return r;
}

inline SuiteReport lemma_c2(const SuiteParams& params) {
  const int p = params.men.value_or(2);
  const int q = params.women.value_or(2);
  require_two_per_side(p, q);
  SuiteReport r = start("lemma-c2", p, q, params);
  const std::uint64_t n = params.trials.value_or(64);
  struct Out {
    bool witness = false;
    std::string problem;
  };
  const auto outs = parallel_map<Out>(static_cast<std::size_t>(n), params.jobs, [&](std::size_t i) {
    const PreferenceDomain d = utp_family_member(p, q, params.seed, i);
    Out o;
    const auto w = find_incompatibility_witness(d);
    if (!w) return o;
    o.witness = true;
    if (auto bad = alternating_witness_problem(d, *w)) {
      o.problem = "witness does not re-check: " + *bad;
      return o;
    }
    RuleSearchOptions opts;
    opts.path = PathChoice::General;
    if (exists_stable_sp_rule(d, opts).exists()) o.problem = "a stable strategy-proof rule exists despite a witness";
    return o;
  });
  std::uint64_t witnesses = 0;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    witnesses += outs[i].witness;
    if (!outs[i].problem.empty() && r.pass) {
      r.pass = false;
      r.counterexample = Json{{"problem", outs[i].problem}, {"domain", matchlab::to_json(utp_family_member(p, q, params.seed, i))}};
    }
  }
  r.cases = n;
  r.details["domains_with_witness"] = witnesses;
  return r;
}

inline SuiteReport example2(const SuiteParams& params) {
  SuiteReport r = start("example2", 5, 3, params);
  r.sampled = true;
  const auto fx = fixtures::mixed_coalition_counterexample();
  const MtoProfile& base = fx.base;
  std::vector<std::pair<std::string, bool>> checks;
  bool responsive = true;
  for (int c = 0; c < 3; ++c)
    for (const auto& pc : fx.domain.colleges(c)) responsive = responsive && !is_responsive(pc);
  checks.emplace_back("colleges_responsive", responsive);
  {
    // students as men, colleges as women ranking by induced preference
    std::vector<std::vector<Preference>> sets;
    for (int s = 0; s < 5; ++s) sets.push_back(fx.domain.students(s));
    for (int c = 0; c < 3; ++c) {
      auto& set = sets.emplace_back();
      for (const auto& pc : fx.domain.colleges(c)) set.push_back(induced_preference(pc));
    }
    const PreferenceDomain induced(5, 3, std::move(sets));
    checks.emplace_back("students_utp", satisfies_unrestricted_top_pairs(induced, Side::Man));
    checks.emplace_back("colleges_top_dominance", satisfies_top_dominance(induced, Side::Woman));
  }
  const MtoMatching truthful = spda(base);
  checks.emplace_back("truthful_outcome", truthful == fixtures::example2_truthful_outcome());
  checks.emplace_back("truthful_outcome_stable", is_stable_mto(truthful, base));
  checks.emplace_back("manipulated_outcome", spda(fixtures::example2_manipulated_profile()) == fixtures::example2_manipulated_outcome());
  checks.emplace_back("witness_valid", !mto_witness_problem(fx.witness, &fx.domain));
  const bool mixed = fx.witness.coalition.size() == 2 && fx.witness.coalition[0].side == MtoSide::Student &&
                     fx.witness.coalition[1].side == MtoSide::College;
  checks.emplace_back("coalition_mixed", mixed);
  checks.emplace_back("college_gains",
                      mto_gains(base, MtoAgent::college(0), fx.witness.outcome_before, fx.witness.outcome_after));
  checks.emplace_back("unmatched_changes",
                      fx.witness.outcome_before.unmatched_students() != fx.witness.outcome_after.unmatched_students());
  SearchOptions pair_search;
  pair_search.max_coalition = 2;
  pair_search.budget = params.budget;
  const auto first = find_manipulation_mto(fx.domain, base, pair_search);
  checks.emplace_back("first_witness_matches", first && first->coalition == fx.witness.coalition &&
                                                   first->misreports.size() == 2 &&
                                                   first->misreports == fx.witness.misreports);
  // No single agent gains anywhere in the sampled bases.
  SearchOptions single;
  single.max_coalition = 1;
  single.budget = params.budget;
  const std::uint64_t trials = params.trials.value_or(500);
  const auto scan = sampled_manipulation_scan_mto(fx.domain, single, trials, params.seed);
  checks.emplace_back("no_single_agent_gain", !scan.witness);
  r.details["sp_bases"] = scan.bases;
  Json failed = Json::array();
  for (auto& [name, ok] : checks) {
    r.details[name] = ok;
    if (!ok) failed.push_back(name);
  }
  r.cases = checks.size() + scan.bases;
  if (!failed.empty()) {
    r.pass = false;
    Json cx{{"failed_checks", failed}};
    if (scan.witness) {
      if (auto bad = mto_witness_problem(*scan.witness, &fx.domain))
        throw std::logic_error("internal error: reported witness does not re-check: " + *bad);
      cx["witness"] = matchlab::to_json(*scan.witness);
    }
    r.counterexample = cx;
  }
  return r;
}

}  // namespace detail

class UnknownSuite : public InvalidArgument {
 public:
  explicit UnknownSuite(const std::string& id) : InvalidArgument("unknown suite '" + id + "'") {}
};

inline SuiteReport run_suite(const std::string& id, const SuiteParams& params = {}) {
  using namespace detail;
  static const std::map<std::string, std::function<SuiteReport(const SuiteParams&)>> table{
      {"theorem1", [](const SuiteParams& p) { return witness_suite("theorem1", p); }},
      {"prop-welfare", [](const SuiteParams& p) { return witness_suite("prop-welfare", p); }},
      {"prop-unmatched", [](const SuiteParams& p) { return witness_suite("prop-unmatched", p); }},
      {"corollary-dubins", corollary_dubins},
      {"prop-gsp-existence", prop_gsp_existence},
      {"theorem2", theorem2},
      {"example1", example1},
      {"prop4", prop4},
      {"theorem3", theorem3},
      {"blocking-lemma", blocking_lemma},
      {"lemma-c1", lemma_c1},
      {"lemma-c2", lemma_c2},
      {"example2", example2},
  };
  const auto it = table.find(id);
  if (it == table.end()) throw UnknownSuite(id);
  if (id == "example1" && (params.men.value_or(2) != 2 || params.women.value_or(2) != 2))
    throw PreconditionError("example1 is fixed at two men and two women");
  if (id == "example2" && (params.men.value_or(5) != 5 || params.women.value_or(3) != 3))
    throw PreconditionError("example2 is fixed at five students and three colleges");
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport r = it->second(params);
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace matchlab::suites
