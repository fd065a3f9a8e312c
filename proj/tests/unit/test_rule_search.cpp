#include <gtest/gtest.h>

#include <random>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

RuleSearchOptions general() {
  RuleSearchOptions o;
  o.path = PathChoice::General;
  return o;
}

// Independent check of a rule table: stable everywhere, no profitable
// single-agent deviation between neighbouring profiles.
void expect_stable_sp_table(const PreferenceDomain& d, const std::vector<Matching>& table) {
  ASSERT_EQ(table.size(), d.profile_count());
  d.for_each_profile([&](std::uint64_t i, const Profile& p) {
    EXPECT_TRUE(is_stable(table[i], p)) << "profile " << i;
    for (const AgentId a : d.agents())
      for (const Preference& mis : d.admissible(a)) {
        const Matching& dev = table[*d.index_of(p.with(mis))];
        EXPECT_FALSE(p.of(a).prefers(dev.partner(a), table[i].partner(a))) << "profile " << i;
      }
  });
}

}  // namespace

TEST(RuleSearch, FullTwoByTwoHasNoRule) {
  const PreferenceDomain d = PreferenceDomain::full(2, 2);
  const auto fast = exists_stable_sp_rule(d);
  EXPECT_EQ(fast.path, RulePath::Fast);
  EXPECT_FALSE(fast.exists());
  const auto slow = exists_stable_sp_rule(d, general());
  EXPECT_EQ(slow.path, RulePath::General);
  EXPECT_FALSE(slow.exists());
}

TEST(RuleSearch, TopDominanceForWomenGivesMpda) {
  const PreferenceDomain d = fixtures::td_women_2x2();
  for (const auto& r : {exists_stable_sp_rule(d), exists_stable_sp_rule(d, general())}) {
    ASSERT_TRUE(r.exists());
    expect_stable_sp_table(d, r.table);
    d.for_each_profile([&](std::uint64_t i, const Profile& p) {
      EXPECT_EQ(r.table[i], deferred_acceptance(RuleId::MPDA, p));
    });
    EXPECT_FALSE(is_group_strategy_proof(*r.rule, d));
  }
}

TEST(RuleSearch, GeneralPathTablesAreStableAndSp) {
  // Random domains without unrestricted top pairs on either side.
  std::mt19937_64 rng(31);
  int with_rule = 0, tested = 0;
  while (tested < 40) {
    std::vector<std::vector<Ranking>> sets;
    for (int k = 0; k < 4; ++k)
      sets.push_back(suites::detail::random_subset(all_rankings(2), 3, rng));
    const PreferenceDomain d = suites::detail::domain_from_rankings(2, 2, sets);
    if (satisfies_unrestricted_top_pairs(d, Side::Man) || satisfies_unrestricted_top_pairs(d, Side::Woman)) continue;
    ++tested;
    const auto r = exists_stable_sp_rule(d);
    EXPECT_EQ(r.path, RulePath::General);
    if (!r.exists()) continue;
    ++with_rule;
    expect_stable_sp_table(d, r.table);
    EXPECT_FALSE(is_strategy_proof(*r.rule, d));
  }
  EXPECT_GT(with_rule, 0);
}

TEST(RuleSearch, FastPathNeedsUtp) {
  RuleSearchOptions o;
  o.path = PathChoice::Fast;
  EXPECT_THROW(exists_stable_sp_rule(fixtures::single_peaked_degenerate_2x2(), o), PreconditionError);
  RuleSearchOptions tiny;
  tiny.profile_limit = 10;
  EXPECT_THROW(exists_stable_sp_rule(PreferenceDomain::full(2, 2), tiny), BudgetExceeded);
}

TEST(RuleSearch, TableRuleRejectsForeignProfiles) {
  const auto r = exists_stable_sp_rule(fixtures::td_women_2x2());
  ASSERT_TRUE(r.exists());
  EXPECT_THROW((*r.rule)(fixtures::example1_p1()), PreconditionError);
}

TEST(IncompatibilityWitness, FoundOnFullAndSinglePeaked) {
  for (const auto& d : {PreferenceDomain::full(2, 2), fixtures::maximal_single_peaked_2x2()}) {
    const auto w = find_incompatibility_witness(d);
    ASSERT_TRUE(w);
    EXPECT_FALSE(alternating_witness_problem(d, *w));
    EXPECT_GE(w->length(), 2);
  }
}

TEST(IncompatibilityWitness, TamperedWitnessIsRejected) {
  const PreferenceDomain d = PreferenceDomain::full(2, 2);
  auto w = *find_incompatibility_witness(d);
  w.z = Outcome::partner(w.men.front());
  EXPECT_TRUE(alternating_witness_problem(d, w));
  auto w2 = *find_incompatibility_witness(d);
  w2.p_tilde_first = w2.p_first;
  EXPECT_TRUE(alternating_witness_problem(d, w2));
}

TEST(IncompatibilityWitness, NoneWhenRuleExists) {
  EXPECT_FALSE(find_incompatibility_witness(fixtures::td_women_2x2()));
}

TEST(IncompatibilityWitness, NeedsUtpForMen) {
  EXPECT_THROW(find_incompatibility_witness(fixtures::single_peaked_degenerate_2x2()), PreconditionError);
}

TEST(Equivalence, PreconditionsAreChecked) {
  const PriorOrdering mo = PriorOrdering::identity(Side::Man, 2), wo = PriorOrdering::identity(Side::Woman, 2);
  EXPECT_THROW(theorem3_equivalence_suite(PreferenceDomain::singleton(fixtures::example1_p1()), mo, wo),
               PreconditionError);
  EXPECT_THROW(theorem3_equivalence_suite(fixtures::td_women_2x2(), mo, wo), PreconditionError);
  EXPECT_THROW(theorem3_equivalence_suite(PreferenceDomain::full(2, 2), wo, mo), InvalidArgument);
}

TEST(Equivalence, MaximalSinglePeakedAllFalse) {
  const PriorOrdering mo = PriorOrdering::identity(Side::Man, 2), wo = PriorOrdering::identity(Side::Woman, 2);
  const auto r = theorem3_equivalence_suite(fixtures::maximal_single_peaked_2x2(), mo, wo);
  EXPECT_FALSE(r.top_dominance);
  EXPECT_FALSE(r.stable_sp_rule);
  EXPECT_FALSE(r.stable_gsp_rule);
  EXPECT_FALSE(r.da_stable_sp);
  EXPECT_TRUE(r.agree());
}

TEST(Equivalence, WomenSingletonPlusOutsideTopAllTrue) {
  // Women share {m1 @ m2} extended by an @-first order; men unrestricted.
  const auto d = fixtures::single_peaked_women_narrow_2x2();
  const PriorOrdering mo = PriorOrdering::identity(Side::Man, 2), wo = PriorOrdering::identity(Side::Woman, 2);
  const auto r = theorem3_equivalence_suite(d, mo, wo);
  EXPECT_TRUE(r.td_women);
  EXPECT_TRUE(r.stable_sp_rule);
  EXPECT_TRUE(r.stable_gsp_rule);
  EXPECT_TRUE(r.da_stable_sp);
  EXPECT_TRUE(r.mpda_gsp);
  EXPECT_TRUE(r.agree());
}

TEST(Equivalence, DegenerateDomain) {
  const PriorOrdering mo = PriorOrdering::identity(Side::Man, 2), wo = PriorOrdering::identity(Side::Woman, 2);
  const auto r = theorem3_equivalence_suite(fixtures::single_peaked_degenerate_2x2(), mo, wo);
  EXPECT_TRUE(r.agree());
  EXPECT_TRUE(r.top_dominance);
}
