#include <gtest/gtest.h>

#include <random>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

// Number of one-to-one matchings: sum over k of C(p,k) C(q,k) k!.
std::uint64_t matching_count(int p, int q) {
  auto choose = [](int n, int k) {
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
  };
  std::uint64_t total = 0, fact = 1;
  for (int k = 0; k <= std::min(p, q); ++k) {
    if (k > 0) fact *= static_cast<std::uint64_t>(k);
    total += choose(p, k) * choose(q, k) * fact;
  }
  return total;
}

// Blocking test written straight from the definition.
bool naive_stable(const Matching& m, const Profile& p) {
  for (const AgentId a : p.agents())
    if (p.of(a).prefers(Outcome::outside(), m.partner(a))) return false;
  for (int i = 0; i < p.men_count(); ++i)
    for (int j = 0; j < p.women_count(); ++j) {
      const bool man_wants = p.man(i).prefers(Outcome::partner(j), m.partner(AgentId::man(i)));
      const bool woman_wants = p.woman(j).prefers(Outcome::partner(i), m.partner(AgentId::woman(j)));
      if (man_wants && woman_wants) return false;
    }
  return true;
}

Profile random_profile(int p, int q, std::mt19937_64& rng) { return PreferenceDomain::full(p, q).sample(rng); }

}  // namespace

TEST(Preference, ParsesAndPrints) {
  const Preference pr = parse_preference(AgentId::man(0), "w2 @ w1", 2);
  EXPECT_EQ(to_string(pr), "w2 @ w1");
  EXPECT_TRUE(pr.prefers(Outcome::partner(1), Outcome::outside()));
  EXPECT_TRUE(pr.prefers(Outcome::outside(), Outcome::partner(0)));
  EXPECT_FALSE(pr.ranking().acceptable(0));
  EXPECT_EQ(pr.top(), Outcome::partner(1));
}

TEST(Preference, RejectsMalformedLists) {
  EXPECT_THROW(parse_preference(AgentId::man(0), "w1 w1 @", 2), InvalidArgument);
  EXPECT_THROW(parse_preference(AgentId::man(0), "w1 @", 2), InvalidArgument);
  EXPECT_THROW(parse_preference(AgentId::man(0), "w1 w3 @", 2), InvalidArgument);
  EXPECT_THROW(parse_preference(AgentId::man(0), "m1 w2 @", 2), InvalidArgument);
  EXPECT_THROW(parse_preference(AgentId::woman(0), "w1 w2 @", 2), InvalidArgument);
}

TEST(Preference, PartnerPrefixOverride) {
  const Preference pr = parse_preference(AgentId::man(0), "c3 c1 c2 @", 3, 'c');
  EXPECT_EQ(pr.top(), Outcome::partner(2));
}

TEST(Ranking, OrderIsLexicographic) {
  const auto all = all_rankings(2);
  ASSERT_EQ(all.size(), 6u);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LT(all[i - 1], all[i]);
}

TEST(Matching, RejectsNonMutualInput) {
  EXPECT_THROW(Matching::from_wives(2, {0, 0}), InvalidArgument);
  EXPECT_THROW(Matching::from_wives(2, {2, -1}), InvalidArgument);
  const std::vector<std::pair<int, int>> pairs{{0, 1}, {1, 0}};
  EXPECT_EQ(Matching::from_pairs(2, 2, pairs), Matching::from_wives(2, {1, 0}));
}

TEST(Matching, EnumerationCountMatchesFormula) {
  for (int p = 1; p <= 4; ++p)
    for (int q = 1; q <= 4; ++q) {
      const auto all = enumerate_matchings(p, q);
      EXPECT_EQ(all.size(), matching_count(p, q)) << p << "x" << q;
      auto sorted = all;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    }
}

TEST(Matching, EnumerationSizeGuard) {
  EXPECT_THROW(enumerate_matchings(7, 2), SizeGuardError);
  EXPECT_THROW(stable_set(PreferenceDomain::full(7, 1).profile_at(0)), SizeGuardError);
}

TEST(Stability, FirstExampleStableSets) {
  const Matching mu = fixtures::example1_mu(), mt = fixtures::example1_mu_tilde();
  auto s1 = stable_set(fixtures::example1_p1());
  std::sort(s1.begin(), s1.end());
  auto expect = std::vector<Matching>{mu, mt};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(s1, expect);
  EXPECT_EQ(stable_set(fixtures::example1_p2()), std::vector<Matching>{mu});
  EXPECT_EQ(stable_set(fixtures::example1_p3()), std::vector<Matching>{mt});
}

TEST(Stability, BlockingPairsOfSwappedMatching) {
  // Under P1 the empty matching is blocked by every mutually acceptable pair.
  const Profile p = fixtures::example1_p1();
  const auto pairs = blocking_pairs(Matching(2, 2), p);
  EXPECT_EQ(pairs.size(), 4u);
  EXPECT_FALSE(is_stable(Matching(2, 2), p));
}

TEST(Stability, IndividualRationality) {
  const Profile p = fixtures::example1_p2();  // m1 finds w2 unacceptable
  EXPECT_FALSE(is_individually_rational(fixtures::example1_mu_tilde(), p));
  EXPECT_TRUE(is_individually_rational(fixtures::example1_mu(), p));
}

TEST(Stability, StableSetAgreesWithDefinitionScan) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    const int p = 1 + static_cast<int>(rng() % 4), q = 1 + static_cast<int>(rng() % 4);
    const Profile prof = random_profile(p, q, rng);
    std::vector<Matching> expect;
    for (const Matching& m : enumerate_matchings(p, q))
      if (naive_stable(m, prof)) expect.push_back(m);
    EXPECT_EQ(stable_set(prof), expect);
    for (const Matching& m : enumerate_matchings(p, q)) EXPECT_EQ(is_stable(m, prof), naive_stable(m, prof));
  }
}

TEST(Stability, AllOutsideFirstGivesEmptyMatching) {
  const Profile p = fixtures::all_outside_first(3, 2);
  EXPECT_EQ(stable_set(p), std::vector<Matching>{Matching(3, 2)});
}

TEST(Profile, AssignChecksOwnerAndDimension) {
  Profile p = fixtures::example1_p1();
  EXPECT_THROW(p.assign(parse_preference(AgentId::man(0), "w1 w2 w3 @", 3)), InvalidArgument);
  p.assign(parse_preference(AgentId::man(0), "@ w1 w2", 2));
  EXPECT_TRUE(p.man(0).top().is_outside());
  EXPECT_FALSE(p == fixtures::example1_p1());
}
