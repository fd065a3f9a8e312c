#include <gtest/gtest.h>

#include <random>
#include <set>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

std::vector<Ranking> rows(int n, Side side, const std::vector<std::string>& r) { return fixtures::rankings(n, r, side); }

// Top dominance from the definition: for each pair of preferences and each
// outcome x, look for y, z in the two "below x, weakly above ∅" sets with
// y over z in the first and z over y in the second.
bool naive_td(const std::vector<Ranking>& set) {
  for (const Ranking& a : set)
    for (const Ranking& b : set)
      for (const Outcome x : a.order()) {
        auto below = [&](const Ranking& r, Outcome o) {
          return r.prefers(x, o) && r.weakly_prefers(o, Outcome::outside());
        };
        for (const Outcome y : a.order())
          for (const Outcome z : a.order())
            if (below(a, y) && below(b, z) && a.prefers(y, z) && b.prefers(z, y)) return false;
      }
  return true;
}

// Single-peakedness from the definition over partner pairs only.
bool naive_single_peaked(const Ranking& r, const PriorOrdering& ord) {
  const int peak = r.top_partner().index();
  for (int a = 0; a < ord.size(); ++a)
    for (int b = 0; b < ord.size(); ++b) {
      const int pa = ord.position(a), pb = ord.position(b), pk = ord.position(peak);
      const bool same_side = (pa <= pk && pb <= pk) || (pa >= pk && pb >= pk);
      if (same_side && std::abs(pa - pk) < std::abs(pb - pk) && !r.prefers(Outcome::partner(a), Outcome::partner(b)))
        return false;
    }
  return true;
}

}  // namespace

TEST(Domain, RankingCounts) {
  for (int n = 0; n <= 5; ++n) {
    std::uint64_t fact = 1;
    for (int k = 2; k <= n + 1; ++k) fact *= static_cast<std::uint64_t>(k);
    const auto all = all_rankings(n);
    EXPECT_EQ(all.size(), fact);
    EXPECT_EQ(std::set<Ranking>(all.begin(), all.end()).size(), fact);
  }
}

TEST(Domain, ProfileIndexRoundTrip) {
  const PreferenceDomain d = fixtures::td_women_2x2();
  EXPECT_EQ(d.profile_count(), 6u * 6u * 2u * 2u);
  std::uint64_t seen = 0;
  d.for_each_profile([&](std::uint64_t i, const Profile& p) {
    EXPECT_EQ(i, seen++);
    EXPECT_EQ(d.index_of(p), i);
    EXPECT_EQ(d.profile_at(i), p);
  });
  EXPECT_EQ(seen, d.profile_count());
  EXPECT_FALSE(d.contains(fixtures::example1_p1()));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) EXPECT_TRUE(d.contains(d.sample(rng)));
}

TEST(Domain, RejectsBadSets) {
  const auto r = all_rankings(2);
  EXPECT_THROW(PreferenceDomain(1, 1, {{}, {}}), InvalidArgument);
  EXPECT_THROW(PreferenceDomain::anonymous(2, 2, std::vector<Ranking>{r[0], r[0]}, r), InvalidArgument);
  std::vector<std::vector<Preference>> wrong{{Preference(AgentId::woman(0), all_rankings(1)[0])}, {Preference(AgentId::woman(0), all_rankings(1)[0])}};
  EXPECT_THROW(PreferenceDomain(1, 1, wrong), InvalidArgument);
}

TEST(Domain, SaturatingCount) {
  EXPECT_EQ(PreferenceDomain::full(6, 6).profile_count(), kSaturated);
}

TEST(TopDominance, AgreesWithDefinitionScan) {
  std::mt19937_64 rng(21);
  for (const int n : {1, 2, 3}) {
    const auto pool = all_rankings(n);
    for (int t = 0; t < 400; ++t) {
      std::vector<Ranking> set;
      for (const Ranking& r : pool)
        if (rng() % 4 == 0) set.push_back(r);
      if (set.empty()) set.push_back(pool[rng() % pool.size()]);
      EXPECT_EQ(!find_td_conflict(set), naive_td(set));
    }
  }
}

TEST(TopDominance, Fixtures) {
  EXPECT_TRUE(satisfies_top_dominance(fixtures::td_women_2x2(), Side::Woman));
  EXPECT_FALSE(satisfies_top_dominance(fixtures::td_women_2x2(), Side::Man));
  // The men's set of the two-woman full domain has a conflict below w1.
  const auto v = top_dominance_violation(PreferenceDomain::full(2, 2), Side::Man);
  ASSERT_TRUE(v);
  EXPECT_TRUE(v->p.prefers(v->y, v->z));
  EXPECT_TRUE(v->p_tilde.prefers(v->z, v->y));
}

TEST(UnrestrictedTopPairs, MinimalSetIsMinimal) {
  for (int n = 1; n <= 4; ++n) {
    const auto set = minimal_utp_set(AgentId::man(0), n);
    EXPECT_EQ(static_cast<int>(set.size()), n * (n - 1) + n + 1);
    EXPECT_FALSE(utp_gap_for(AgentId::man(0), set, n));
    for (std::size_t drop = 0; drop < set.size(); ++drop) {
      auto smaller = set;
      smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
      EXPECT_TRUE(utp_gap_for(AgentId::man(0), smaller, n)) << n << " drop " << drop;
    }
  }
}

TEST(UnrestrictedTopPairs, DomainChecks) {
  EXPECT_TRUE(satisfies_unrestricted_top_pairs(PreferenceDomain::full(2, 2), Side::Man));
  EXPECT_TRUE(satisfies_unrestricted_top_pairs(fixtures::maximal_single_peaked_2x2(), Side::Woman));
  const auto gap = utp_gap(fixtures::td_women_2x2(), Side::Woman);
  ASSERT_TRUE(gap);
  EXPECT_NE(gap->describe().find("w1"), std::string::npos);
  EXPECT_TRUE(satisfies_top_then_outside(PreferenceDomain::full(2, 3), Side::Woman));
}

TEST(CyclicalInclusion, Checks) {
  EXPECT_TRUE(satisfies_cyclical_inclusion(PreferenceDomain::full(2, 2), Side::Man));
  EXPECT_TRUE(satisfies_cyclical_inclusion(fixtures::td_women_2x2(), Side::Woman) == false);
  const auto gap = cyclical_inclusion_gap(fixtures::td_women_2x2(), Side::Woman);
  ASSERT_TRUE(gap);
  EXPECT_EQ(gap->clause, 2);
  const auto narrow = PreferenceDomain::anonymous(2, 2, all_rankings(2), rows(2, Side::Woman, {"m1 m2 @"}));
  EXPECT_EQ(cyclical_inclusion_gap(narrow, Side::Woman)->clause, 1);
  EXPECT_TRUE(satisfies_cyclical_inclusion(fixtures::single_peaked_degenerate_2x2(), Side::Man));
}

TEST(Anonymity, Checks) {
  EXPECT_TRUE(is_anonymous(PreferenceDomain::full(3, 2)));
  EXPECT_TRUE(is_anonymous(fixtures::td_women_2x2()));
  EXPECT_FALSE(is_anonymous(PreferenceDomain::singleton(fixtures::example1_p1())));
  const auto same = PreferenceDomain::anonymous(2, 2, rows(2, Side::Man, {"w1 w2 @"}), rows(2, Side::Woman, {"m1 m2 @"}));
  EXPECT_TRUE(is_anonymous(same));
}

TEST(SinglePeaked, GeneratorMatchesDefinitionFilter) {
  for (int n = 1; n <= 5; ++n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(static_cast<std::uint64_t>(n));
    std::shuffle(order.begin(), order.end(), rng);
    const PriorOrdering ord(Side::Woman, order);
    std::vector<Ranking> expect;
    for (const Ranking& r : all_rankings(n))
      if (naive_single_peaked(r, ord)) expect.push_back(r);
    const auto got = rankings_of(generate_maximal_single_peaked(ord, AgentId::man(0)));
    EXPECT_EQ(got, expect);
    EXPECT_EQ(got.size(), (std::size_t{1} << (n - 1)) * static_cast<std::size_t>(n + 1));
    for (const Ranking& r : all_rankings(n)) EXPECT_EQ(is_single_peaked(r, ord), naive_single_peaked(r, ord));
  }
}

TEST(SinglePeaked, OutsideOptionIsFree) {
  const PriorOrdering ord = PriorOrdering::identity(Side::Woman, 3);
  EXPECT_TRUE(is_single_peaked(parse_preference(AgentId::man(0), "@ w2 w1 w3", 3), ord));
  EXPECT_TRUE(is_single_peaked(parse_preference(AgentId::man(0), "w2 @ w3 w1", 3), ord));
  EXPECT_FALSE(is_single_peaked(parse_preference(AgentId::man(0), "w1 w3 w2 @", 3), ord));
}

TEST(SinglePeaked, GuardsAndSideChecks) {
  EXPECT_THROW(generate_maximal_single_peaked(PriorOrdering::identity(Side::Woman, 9), AgentId::man(0)), SizeGuardError);
  EXPECT_THROW(is_single_peaked(parse_preference(AgentId::man(0), "w1 @", 1), PriorOrdering::identity(Side::Man, 1)),
               InvalidArgument);
  EXPECT_THROW(PriorOrdering(Side::Man, {0, 0}), InvalidArgument);
}

TEST(SinglePeaked, DomainCheckUsesOrderings) {
  const auto d = fixtures::maximal_single_peaked_2x2();
  EXPECT_TRUE(is_single_peaked_domain(d, PriorOrdering::identity(Side::Man, 2), PriorOrdering::identity(Side::Woman, 2)));
  const auto d3 = fixtures::maximal_single_peaked(PriorOrdering::identity(Side::Man, 3), PriorOrdering(Side::Woman, {2, 0, 1}));
  EXPECT_TRUE(is_single_peaked_domain(d3, PriorOrdering::identity(Side::Man, 3), PriorOrdering(Side::Woman, {2, 0, 1})));
  EXPECT_FALSE(is_single_peaked_domain(d3, PriorOrdering::identity(Side::Man, 3), PriorOrdering::identity(Side::Woman, 3)));
}
