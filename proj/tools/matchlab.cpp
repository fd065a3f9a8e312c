// matchlab command-line tool: solve, stable-set, manipulate, check-domain,
// verify. Exit codes: 0 ok/pass, 1 fail, 2 budget or size guard, 64 bad
// input or unmet precondition, 70 internal error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "matchlab/matchlab.hpp"

namespace ml = matchlab;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

std::uint64_t default_budget() {
  if (const char* env = std::getenv("MATCHLAB_BUDGET")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw ml::FormatError("MATCHLAB_BUDGET", "expected a positive integer");
  }
  return ml::kDefaultBudget;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string rule = "mpda";
  std::string market;
  bool trace = false;
  bool text = false;
};

int run_solve(const SolveArgs& a) {
  const ml::Json j = ml::read_json_file(a.market);
  if (ml::is_college_market(j)) {
    if (a.rule != "spda") throw ml::FormatError("--rule", "college markets are solved with spda");
    const ml::MtoProfile prof = ml::mto_profile_from_json(j);
    const ml::MtoResult r = ml::run_spda(prof);
    if (a.trace) std::cout << ml::trace_json_lines(r.trace);
    std::cout << (a.text ? ml::to_string(r.matching) : ml::to_json(r.matching).dump()) << "\n";
    return 0;
  }
  if (a.rule == "spda") throw ml::FormatError("--rule", "spda needs a college market");
  const ml::RuleId rule = a.rule == "wpda" ? ml::RuleId::WPDA : ml::RuleId::MPDA;
  const ml::Profile prof = ml::profile_from_json(j);
  const ml::DaResult r = ml::run_da(rule, prof);
  if (a.trace) std::cout << ml::trace_json_lines(r.trace);
  std::cout << (a.text ? ml::to_string(r.matching) : ml::to_json(r.matching).dump()) << "\n";
  return 0;
}

// ---- stable-set -------------------------------------------------------------

int run_stable_set(const std::string& market, bool text) {
  const ml::Profile prof = ml::profile_from_json(ml::read_json_file(market));
  const auto set = ml::stable_set(prof);
  if (text) {
    for (const auto& m : set) std::cout << ml::to_string(m) << "\n";
    return 0;
  }
  ml::Json out = ml::Json::array();
  for (const auto& m : set) out.push_back(ml::to_json(m));
  std::cout << out.dump() << "\n";
  return 0;
}

// ---- manipulate -------------------------------------------------------------

struct ManipulateArgs {
  std::string rule = "mpda";
  int max_coalition = 1;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 42;
  bool all = false;
  std::string market;
  std::string domain;
};

int run_manipulate(const ManipulateArgs& a) {
  const ml::Json mj = ml::read_json_file(a.market);
  const ml::Json dj = ml::read_json_file(a.domain);
  ml::SearchOptions opts;
  opts.max_coalition = a.max_coalition;
  opts.budget = a.budget.value_or(default_budget());
  opts.samples_per_coalition = a.samples;
  opts.seed = a.seed;
  bool any = false;
  ml::SearchStats stats;
  if (a.rule == "spda") {
    if (!ml::is_college_market(mj)) throw ml::FormatError("--rule", "spda needs a college market");
    const ml::MtoProfile base = ml::mto_profile_from_json(mj);
    const ml::MtoDomain d = ml::mto_domain_from_json(dj);
    stats = ml::for_each_manipulation_mto(d, base, opts, [&](const ml::MtoWitness& w) {
      any = true;
      std::cout << ml::to_json(w).dump() << "\n";
      return a.all;
    });
  } else {
    if (ml::is_college_market(mj)) throw ml::FormatError("--rule", "college markets are searched with spda");
    const ml::Profile base = ml::profile_from_json(mj);
    const ml::PreferenceDomain d = ml::domain_from_json(dj);
    const ml::RuleFunction rule = ml::da_rule(a.rule == "wpda" ? ml::RuleId::WPDA : ml::RuleId::MPDA);
    stats = ml::for_each_manipulation(rule, d, base, opts, [&](const ml::ManipulationWitness& w) {
      any = true;
      std::cout << ml::to_json(w).dump() << "\n";
      return a.all;
    });
  }
  if (!any) std::cout << "\"none\"\n";
  if (stats.sampled) std::cerr << "note: some coalitions were sampled, not enumerated\n";
  return 0;
}

// ---- check-domain -----------------------------------------------------------

struct CheckArgs {
  std::string property;
  std::string side = "both";
  std::string domain;
  std::string orderings;
  bool json = false;
};

int run_check(const CheckArgs& a) {
  const ml::PreferenceDomain d = ml::domain_from_json(ml::read_json_file(a.domain));
  std::vector<ml::Side> sides;
  if (a.side != "women") sides.push_back(ml::Side::Man);
  if (a.side != "men") sides.push_back(ml::Side::Woman);

  bool holds = true;
  std::string reason;
  if (a.property == "anonymity") {
    holds = ml::is_anonymous(d);
    if (!holds) reason = "some side's agents hold different admissible sets";
  } else if (a.property == "single-peaked") {
    const ml::OrderingPair ord =
        a.orderings.empty()
            ? ml::OrderingPair{ml::PriorOrdering::identity(ml::Side::Man, d.men_count()),
                               ml::PriorOrdering::identity(ml::Side::Woman, d.women_count())}
            : ml::orderings_from_json(ml::read_json_file(a.orderings), d.men_count(), d.women_count());
    for (const ml::AgentId ag : d.agents()) {
      if (std::find(sides.begin(), sides.end(), ag.side) == sides.end() || !holds) continue;
      const ml::PriorOrdering& o = ag.side == ml::Side::Man ? ord.women : ord.men;
      for (const ml::Preference& p : d.admissible(ag))
        if (holds && !ml::is_single_peaked(p, o)) {
          holds = false;
          reason = ml::to_string(p) + " is not single-peaked";
        }
    }
  } else {
    for (const ml::Side s : sides) {
      if (!holds) break;
      if (a.property == "top-dominance") {
        if (auto v = ml::top_dominance_violation(d, s)) {
          holds = false;
          reason = ml::to_string(v->agent) + ": " + ml::to_string(v->p) + " and " + ml::to_string(v->p_tilde) +
                   " conflict below " + ml::to_string(v->x, v->agent.side);
        }
      } else if (a.property == "utp") {
        if (auto g = ml::utp_gap(d, s)) {
          holds = false;
          reason = g->describe();
        }
      } else if (a.property == "cyclical-inclusion") {
        if (auto g = ml::cyclical_inclusion_gap(d, s)) {
          holds = false;
          reason = g->clause == 1 ? ml::to_string(g->agent) + " lacks a preference with @ on top"
                                  : ml::to_string(g->agent) + " ranks " + ml::to_string(g->first, g->agent.side) +
                                        " over " + ml::to_string(g->second, g->agent.side) +
                                        " above @ but never the reverse";
        }
      }
    }
  }
  if (a.json) {
    ml::Json out{{"schema_version", ml::kSchemaVersion}, {"property", a.property}, {"side", a.side}, {"holds", holds}};
    out["reason"] = reason.empty() ? ml::Json(nullptr) : ml::Json(reason);
    std::cout << out.dump() << "\n";
  } else {
    std::cout << (holds ? "true" : "false") << "\n";
    if (!reason.empty()) std::cout << "  " << reason << "\n";
  }
  return holds ? 0 : kExitFail;
}

// ---- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  std::optional<int> men, women;
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> budget;
  int jobs = 1;
  bool json = false;
  bool timing = false;
};

int run_verify(const VerifyArgs& a) {
  ml::suites::SuiteParams p;
  p.men = a.men;
  p.women = a.women;
  p.seed = a.seed;
  p.trials = a.trials;
  p.budget = a.budget.value_or(default_budget());
  p.jobs = a.jobs;
  std::vector<std::string> ids;
  if (a.suite == "all")
    ids = ml::suites::suite_ids();
  else
    ids.push_back(a.suite);
  bool pass = true;
  ml::Json reports = ml::Json::array();
  for (const auto& id : ids) {
    const ml::suites::SuiteReport r = ml::suites::run_suite(id, p);
    pass = pass && r.pass;
    if (a.json)
      reports.push_back(r.to_json(a.timing));
    else
      std::cout << r.to_text(a.timing);
  }
  if (a.json) std::cout << (ids.size() == 1 ? reports.front() : reports).dump(2) << "\n";
  return pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matchlab: two-sided matching markets, deferred acceptance and manipulation search"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run a deferred acceptance rule on a market");
  s->add_option("--rule", solve.rule, "mpda, wpda or spda")->check(CLI::IsMember({"mpda", "wpda", "spda"}));
  s->add_flag("--trace", solve.trace, "emit one JSON line per step before the matching");
  s->add_flag("--text", solve.text, "print a readable matching instead of JSON");
  s->add_option("market", solve.market, "market JSON file")->required();

  std::string stable_market;
  bool stable_text = false;
  auto* st = app.add_subcommand("stable-set", "list every stable matching of a marriage market");
  st->add_flag("--text", stable_text, "one readable matching per line");
  st->add_option("market", stable_market, "market JSON file")->required();

  ManipulateArgs man;
  auto* m = app.add_subcommand("manipulate", "search for a profitable coalition misreport");
  m->add_option("--rule", man.rule, "mpda, wpda or spda")->check(CLI::IsMember({"mpda", "wpda", "spda"}));
  m->add_option("--max-coalition", man.max_coalition, "largest coalition tried")->check(CLI::PositiveNumber);
  m->add_option("--budget", man.budget, "evaluations allowed per base (default 1e7 or MATCHLAB_BUDGET)");
  m->add_option("--samples", man.samples, "sample this many joint misreports per coalition once over budget");
  m->add_option("--seed", man.seed, "seed for sampled coalitions");
  m->add_flag("--all", man.all, "stream every witness, one JSON line each");
  m->add_option("market", man.market, "market JSON file")->required();
  m->add_option("domain", man.domain, "domain JSON file")->required();

  CheckArgs chk;
  auto* c = app.add_subcommand("check-domain", "decide a property of a preference domain");
  c->add_option("--property", chk.property)
      ->required()
      ->check(CLI::IsMember({"top-dominance", "utp", "cyclical-inclusion", "anonymity", "single-peaked"}));
  c->add_option("--side", chk.side)->check(CLI::IsMember({"men", "women", "both"}));
  c->add_flag("--json", chk.json, "JSON output");
  c->add_option("domain", chk.domain, "domain JSON file")->required();
  c->add_option("orderings", chk.orderings, "prior orderings JSON (single-peaked; identity if absent)");

  VerifyArgs ver;
  bool ver_text = false;
  auto* v = app.add_subcommand("verify", "run a verification suite");
  std::vector<std::string> choices = ml::suites::suite_ids();
  choices.push_back("all");
  v->add_option("--suite", ver.suite)->required()->check(CLI::IsMember(choices));
  v->add_option("--men", ver.men)->check(CLI::PositiveNumber);
  v->add_option("--women", ver.women)->check(CLI::PositiveNumber);
  v->add_option("--seed", ver.seed);
  v->add_option("--trials", ver.trials)->check(CLI::PositiveNumber);
  v->add_option("--budget", ver.budget)->check(CLI::PositiveNumber);
  v->add_option("--jobs", ver.jobs)->check(CLI::PositiveNumber);
  auto* json_flag = v->add_flag("--json", ver.json, "JSON report");
  v->add_flag("--text", ver_text, "readable report (default)")->excludes(json_flag);
  v->add_flag("--timing", ver.timing, "include runtimes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*s) return run_solve(solve);
    if (*st) return run_stable_set(stable_market, stable_text);
    if (*m) return run_manipulate(man);
    if (*c) return run_check(chk);
    if (*v) return run_verify(ver);
  } catch (const ml::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ml::SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ml::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ml::PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
