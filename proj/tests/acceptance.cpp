// Acceptance run: one PASS/FAIL line per criterion, each with its time
// limit. Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

struct Outcome8 {
  bool ok = false;
  std::string note;
};

// Three 3x3 markets where every agent may report one of three random orders.
PreferenceDomain seeded_market(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Preference>> sets;
  auto pick = [&](AgentId a, int n) {
    auto all = all_preferences(a, n);
    std::shuffle(all.begin(), all.end(), rng);
    all.erase(all.begin() + 3, all.end());
    return all;
  };
  for (int i = 0; i < 3; ++i) sets.push_back(pick(AgentId::man(i), 3));
  for (int j = 0; j < 3; ++j) sets.push_back(pick(AgentId::woman(j), 3));
  return PreferenceDomain(3, 3, std::move(sets));
}

Outcome8 criterion1() {
  const auto r = suites::run_suite("example1");
  return {r.pass, r.pass ? "stable sets, DA outcomes and both misreports reproduced" : r.to_text()};
}

Outcome8 criterion2() {
  const auto r = suites::run_suite("example2");
  return {r.pass, r.pass ? "SPDA outcomes, ({s5, c1}) witness and responsiveness reproduced" : r.to_text()};
}

Outcome8 criterion3() {
  suites::SuiteParams small;
  const auto a = suites::detail::scan_witnesses(RuleId::MPDA, 2, 2, small);
  suites::SuiteParams large;
  large.trials = 1000;
  const auto b = suites::detail::scan_witnesses(RuleId::MPDA, 3, 3, large);
  std::string note = std::to_string(a.bases) + " profiles at 2x2 (" + std::to_string(a.witnesses) + " witnesses), " +
                     std::to_string(b.bases) + " at 3x3 (" + std::to_string(b.witnesses) + " witnesses)";
  bool ok = a.bases == 1296 && b.bases == 1000 && !a.sampled;
  for (const auto* f : {&a, &b}) {
    if (f->coalition_violation) ok = false, note += "; coalition with a man: " + to_json(*f->coalition_violation).dump();
    if (f->welfare_violation) ok = false, note += "; welfare: " + to_json(*f->welfare_violation).dump();
    if (f->unmatched_violation) ok = false, note += "; unmatched: " + to_json(*f->unmatched_violation).dump();
  }
  if (b.sampled) note += "; coalitions over budget were sampled at 3x3";
  return {ok, note};
}

Outcome8 criterion4() {
  suites::SuiteParams p;
  p.trials = 64;
  const auto r = suites::run_suite("theorem2", p);
  return {r.pass && r.cases >= 50,
          std::to_string(r.cases) + " domains, " + r.details["domains_with_rule"].dump() + " with a rule" +
              (r.pass ? "" : "; " + r.to_text())};
}

Outcome8 criterion5() {
  const auto r = suites::run_suite("prop4");
  return {r.pass, r.pass ? "no rule; witness of length " + r.details["witness_length"].dump() : r.to_text()};
}

Outcome8 criterion6() {
  const auto r = suites::run_suite("theorem3");
  return {r.pass && r.cases >= 30, std::to_string(r.cases) + " domains" + (r.pass ? "" : "; " + r.to_text())};
}

Outcome8 criterion7() {
  suites::SuiteParams p;
  p.men = p.women = 3;
  p.trials = 10'000;
  const auto r = suites::run_suite("blocking-lemma", p);
  return {r.pass && r.cases == 10'000,
          std::to_string(r.cases) + " applicable pairs" + (r.pass ? "" : "; " + r.to_text())};
}

Outcome8 criterion8() {
  std::uint64_t profiles = 0;
  for (const std::uint64_t seed : {42ull, 43ull, 44ull}) {
    const PreferenceDomain d = seeded_market(seed);
    std::string problem;
    d.for_each_profile([&](std::uint64_t idx, const Profile& prof) {
      if (!problem.empty()) return;
      ++profiles;
      const Matching mpda = deferred_acceptance(RuleId::MPDA, prof);
      const auto stable = stable_set(prof, true);
      if (std::find(stable.begin(), stable.end(), mpda) == stable.end()) problem = "MPDA outcome is not stable";
      for (const Matching& mu : stable) {
        for (int i = 0; i < 3; ++i)
          if (!prof.of(AgentId::man(i)).weakly_prefers(mpda.partner(AgentId::man(i)), mu.partner(AgentId::man(i))))
            problem = "a man prefers another stable matching";
        for (int j = 0; j < 3; ++j)
          if (!prof.of(AgentId::woman(j)).weakly_prefers(mu.partner(AgentId::woman(j)), mpda.partner(AgentId::woman(j))))
            problem = "a woman is worse off in another stable matching";
      }
      if (to_one_to_one(spda(from_one_to_one(prof))) != mpda) problem = "quota-1 SPDA differs from MPDA";
      if (!problem.empty()) problem += " (market seed " + std::to_string(seed) + ", profile " + std::to_string(idx) + ")";
    });
    if (!problem.empty()) return {false, problem};
  }
  return {true, std::to_string(profiles) + " profiles over three markets"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome8()> run;
  };
  const std::vector<Criterion> all{
      {1, "example 1 reproduction", 1, criterion1},
      {2, "example 2 reproduction", 1, criterion2},
      {3, "MPDA witnesses: coalition, welfare, unmatched set", 300, criterion3},
      {4, "stable SP rule existence vs group check (UTP men)", 600, criterion4},
      {5, "maximal single-peaked 2x2: no rule, valid witness", 60, criterion5},
      {6, "single-peaked four-way equivalence", 600, criterion6},
      {7, "blocking lemma property", 60, criterion7},
      {8, "DA oracle equivalence", 60, criterion8},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome8 o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < c.limit_s;
    const bool pass = o.ok && in_time;
    failed += !pass;
    std::printf("criterion %d [%s]: %s (%.2f s, limit %.0f s) %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", s,
                c.limit_s, o.note.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
