#pragma once

// Named example markets and domains used by suites, tests and the CLI.

#include <string>
#include <vector>

#include "matchlab/core.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/mto.hpp"
#include "matchlab/properties.hpp"

namespace matchlab::fixtures {

// ---- two men, two women -------------------------------------------------------
// P1 is the base; P2 changes only m1, P3 changes only w1.

inline Profile example1_p1() { return parse_profile(2, 2, {"w1 w2 @", "w2 w1 @", "m2 m1 @", "m1 m2 @"}); }
inline Profile example1_p2() { return parse_profile(2, 2, {"w1 @ w2", "w2 w1 @", "m2 m1 @", "m1 m2 @"}); }
inline Profile example1_p3() { return parse_profile(2, 2, {"w1 w2 @", "w2 w1 @", "m2 @ m1", "m1 m2 @"}); }

inline Matching example1_mu() { return Matching::from_wives(2, {0, 1}); }
inline Matching example1_mu_tilde() { return Matching::from_wives(2, {1, 0}); }

inline Profile all_outside_first(int p, int q) {
  std::vector<std::string> rows;
  auto row = [](char prefix, int n) {
    std::string r = "@";
    for (int i = 0; i < n; ++i) r += " " + std::string(1, prefix) + std::to_string(i + 1);
    return r;
  };
  for (int i = 0; i < p; ++i) rows.push_back(row('w', q));
  for (int j = 0; j < q; ++j) rows.push_back(row('m', p));
  return parse_profile(p, q, rows);
}

inline std::vector<Ranking> rankings(int n, const std::vector<std::string>& rows, Side owner_side) {
  std::vector<Ranking> out;
  for (const auto& r : rows) out.push_back(parse_preference(AgentId{owner_side, 0}, r, n).ranking());
  return out;
}

// Men unrestricted; each woman holds {m1 m2 @, @ m1 m2}. Top dominance
// holds for women.
inline PreferenceDomain td_women_2x2() {
  const auto men = all_rankings(2);
  const auto women = rankings(2, {"m1 m2 @", "@ m1 m2"}, Side::Woman);
  return PreferenceDomain::anonymous(2, 2, men, women);
}

// Same women; men restricted to one preference each.
inline PreferenceDomain td_women_2x2_men_singleton() {
  const auto men = rankings(2, {"w1 w2 @"}, Side::Man);
  const auto women = rankings(2, {"m1 m2 @", "@ m1 m2"}, Side::Woman);
  return PreferenceDomain::anonymous(2, 2, men, women);
}

inline PreferenceDomain maximal_single_peaked(const PriorOrdering& men_ord, const PriorOrdering& women_ord) {
  std::vector<std::vector<Preference>> sets;
  for (int i = 0; i < men_ord.size(); ++i) sets.push_back(generate_maximal_single_peaked(women_ord, AgentId::man(i)));
  for (int j = 0; j < women_ord.size(); ++j) sets.push_back(generate_maximal_single_peaked(men_ord, AgentId::woman(j)));
  return PreferenceDomain(men_ord.size(), women_ord.size(), std::move(sets));
}

inline PreferenceDomain maximal_single_peaked_2x2() {
  return maximal_single_peaked(PriorOrdering::identity(Side::Man, 2), PriorOrdering::identity(Side::Woman, 2));
}

// Anonymous single-peaked domain where women share {m1 @ m2, @ m1 m2}.
inline PreferenceDomain single_peaked_women_narrow_2x2() {
  const auto men = all_rankings(2);
  const auto women = rankings(2, {"m1 @ m2", "@ m1 m2"}, Side::Woman);
  return PreferenceDomain::anonymous(2, 2, men, women);
}

// Both sides hold one peak order plus an @-first order.
inline PreferenceDomain single_peaked_degenerate_2x2() {
  const auto men = rankings(2, {"w1 @ w2", "@ w1 w2"}, Side::Man);
  const auto women = rankings(2, {"m1 @ m2", "@ m1 m2"}, Side::Woman);
  return PreferenceDomain::anonymous(2, 2, men, women);
}

// ---- college admissions -------------------------------------------------------
// Three colleges (c1 quota 2, others 1) and five students.

inline CollegePreference college_from_lists(int c, int students, int quota, const std::vector<std::vector<int>>& sets) {
  std::vector<StudentSet> order;
  for (const auto& s : sets) {
    StudentSet m = 0;
    for (int k : s) m |= 1u << (k - 1);
    order.push_back(m);
  }
  return CollegePreference(c, students, quota, std::move(order));
}

inline Preference student_pref(int s, const std::string& row) { return parse_preference(AgentId::man(s), row, 3, 'c'); }

inline CollegePreference example2_pc1() {
  return college_from_lists(0, 5, 2,
                            {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}, {1}, {2}, {3}, {4}, {}, {1, 5}, {2, 5},
                             {3, 5}, {4, 5}, {5}});
}

inline CollegePreference example2_pc1_tilde() {
  return college_from_lists(0, 5, 2,
                            {{1, 4}, {2, 4}, {3, 4}, {1, 2}, {1, 3}, {2, 3}, {4}, {1}, {2}, {3}, {}, {4, 5}, {1, 5},
                             {2, 5}, {3, 5}, {5}});
}

inline CollegePreference example2_pc2() { return college_from_lists(1, 5, 1, {{4}, {5}, {}, {1}, {2}, {3}}); }
inline CollegePreference example2_pc3() { return college_from_lists(2, 5, 1, {{2}, {5}, {1}, {}, {3}, {4}}); }

// Students' lists are completed with the remaining colleges by index.
inline MtoProfile example2_profile() {
  return MtoProfile({student_pref(0, "c3 c1 c2 @"), student_pref(1, "c1 c3 c2 @"), student_pref(2, "c1 @ c2 c3"),
                     student_pref(3, "c1 c2 c3 @"), student_pref(4, "c2 @ c1 c3")},
                    {example2_pc1(), example2_pc2(), example2_pc3()});
}

inline Preference example2_ps5_tilde() { return student_pref(4, "c3 c2 c1 @"); }

inline MtoProfile example2_manipulated_profile() {
  MtoProfile p = example2_profile();
  p.assign(example2_ps5_tilde());
  p.assign(example2_pc1_tilde());
  return p;
}

inline MtoMatching example2_truthful_outcome() { return MtoMatching::from_assignment({2, 1, 1}, {2, 0, 0, 1, -1}); }
inline MtoMatching example2_manipulated_outcome() { return MtoMatching::from_assignment({2, 1, 1}, {0, 2, -1, 0, 1}); }

// Every student may report any strict order (s5's list starts with the
// truth and the coalition misreport); c1 may swap to its alternative order,
// c2 and c3 are fixed.
inline MtoDomain example2_domain() {
  const MtoProfile base = example2_profile();
  std::vector<std::vector<Preference>> students;
  for (int s = 0; s < 5; ++s) {
    auto& set = students.emplace_back();
    if (s == 4) {
      set.push_back(base.student(4));
      set.push_back(example2_ps5_tilde());
    }
    for (const Preference& p : all_preferences(AgentId::man(s), 3))
      if (std::none_of(set.begin(), set.end(), [&](const Preference& x) { return x.ranking() == p.ranking(); }))
        set.push_back(p);
  }
  return MtoDomain(std::move(students), {{example2_pc1(), example2_pc1_tilde()}, {example2_pc2()}, {example2_pc3()}});
}

struct MixedCoalitionFixture {
  MtoProfile base;
  MtoDomain domain;
  MtoWitness witness;
};

// The five-student market, its domain, and the ({s5, c1}) manipulation.
inline MixedCoalitionFixture mixed_coalition_counterexample() {
  MtoProfile base = example2_profile();
  MtoWitness w{base,
               {MtoAgent::student(4), MtoAgent::college(0)},
               {example2_ps5_tilde(), example2_pc1_tilde()},
               example2_truthful_outcome(),
               example2_manipulated_outcome()};
  return MixedCoalitionFixture{std::move(base), example2_domain(), std::move(w)};
}

}  // namespace matchlab::fixtures
