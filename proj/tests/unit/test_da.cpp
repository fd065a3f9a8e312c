#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

// Sequential proposals, one free man at a time. Reaches the same fixed
// point as the round-based kernel.
Matching sequential_mpda(const Profile& p) {
  const int nm = p.men_count(), nw = p.women_count();
  std::vector<std::size_t> next(static_cast<std::size_t>(nm), 0);
  std::vector<int> holds(static_cast<std::size_t>(nw), -1);
  std::deque<int> free;
  for (int i = 0; i < nm; ++i) free.push_back(i);
  while (!free.empty()) {
    const int m = free.front();
    free.pop_front();
    const auto& order = p.man(m).order();
    auto& k = next[static_cast<std::size_t>(m)];
    if (k >= order.size() || order[k].is_outside()) continue;
    const int w = order[k++].index();
    const Preference& wp = p.woman(w);
    if (!wp.prefers(Outcome::partner(m), Outcome::outside())) {
      free.push_back(m);
      continue;
    }
    int& cur = holds[static_cast<std::size_t>(w)];
    if (cur < 0) {
      cur = m;
    } else if (wp.prefers(Outcome::partner(m), Outcome::partner(cur))) {
      free.push_back(cur);
      cur = m;
    } else {
      free.push_back(m);
    }
  }
  std::vector<int> wives(static_cast<std::size_t>(nm), -1);
  for (int w = 0; w < nw; ++w)
    if (holds[static_cast<std::size_t>(w)] >= 0) wives[static_cast<std::size_t>(holds[static_cast<std::size_t>(w)])] = w;
  return Matching::from_wives(nw, wives);
}

// Swaps the roles of men and women.
Profile mirrored(const Profile& p) {
  std::vector<Preference> men, women;
  for (int j = 0; j < p.women_count(); ++j) men.emplace_back(AgentId::man(j), p.woman(j).ranking());
  for (int i = 0; i < p.men_count(); ++i) women.emplace_back(AgentId::woman(i), p.man(i).ranking());
  return Profile(std::move(men), std::move(women));
}

}  // namespace

TEST(DeferredAcceptance, FirstExample) {
  const Profile p1 = fixtures::example1_p1();
  EXPECT_EQ(deferred_acceptance(RuleId::MPDA, p1), fixtures::example1_mu());
  EXPECT_EQ(deferred_acceptance(RuleId::WPDA, p1), fixtures::example1_mu_tilde());
  EXPECT_EQ(deferred_acceptance(RuleId::MPDA, fixtures::example1_p3()), fixtures::example1_mu_tilde());
  EXPECT_EQ(deferred_acceptance(RuleId::WPDA, fixtures::example1_p2()), fixtures::example1_mu());
}

TEST(DeferredAcceptance, TraceOfFirstExample) {
  const DaResult r = run_da(RuleId::MPDA, fixtures::example1_p1());
  ASSERT_EQ(r.trace.steps.size(), 1u);
  const DaStep& s = r.trace.steps.front();
  ASSERT_EQ(s.proposals.size(), 2u);
  EXPECT_EQ(s.proposals[0].first, AgentId::man(0));
  EXPECT_EQ(s.proposals[0].second, AgentId::woman(0));
  EXPECT_TRUE(s.rejections.empty());
}

TEST(DeferredAcceptance, AllOutsideFirstIsEmpty) {
  const Profile p = fixtures::all_outside_first(3, 3);
  EXPECT_EQ(deferred_acceptance(RuleId::MPDA, p), Matching(3, 3));
  EXPECT_TRUE(run_da(RuleId::WPDA, p).trace.steps.empty());
}

TEST(DeferredAcceptance, MatchesSequentialSchedulerAndIsStable) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const int p = 1 + static_cast<int>(rng() % 5), q = 1 + static_cast<int>(rng() % 5);
    const Profile prof = PreferenceDomain::full(p, q).sample(rng);
    const Matching m = deferred_acceptance(RuleId::MPDA, prof);
    EXPECT_EQ(m, sequential_mpda(prof));
    EXPECT_TRUE(is_stable(m, prof));
    const DaResult traced = run_da(RuleId::MPDA, prof);
    EXPECT_EQ(traced.matching, m);
    EXPECT_EQ(replay(traced.trace, p, q), m);
  }
}

TEST(DeferredAcceptance, WomenProposingMirrorsMenProposing) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 500; ++t) {
    const Profile prof = PreferenceDomain::full(3, 4).sample(rng);
    const Matching w = deferred_acceptance(RuleId::WPDA, prof);
    const Matching m = deferred_acceptance(RuleId::MPDA, mirrored(prof));
    for (int j = 0; j < 4; ++j) EXPECT_EQ(w.partner(AgentId::woman(j)), m.partner(AgentId::man(j)));
    const DaResult r = run_da(RuleId::WPDA, prof);
    EXPECT_EQ(replay(r.trace, 3, 4), w);
  }
}

TEST(DeferredAcceptance, ProposerOptimalReceiverPessimal) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 400; ++t) {
    const Profile prof = PreferenceDomain::full(3, 3).sample(rng);
    EXPECT_TRUE(proposer_optimality_check(RuleId::MPDA, prof));
    EXPECT_TRUE(proposer_optimality_check(RuleId::WPDA, prof));
    const Matching m = deferred_acceptance(RuleId::MPDA, prof);
    for (const Matching& mu : stable_set(prof))
      for (int j = 0; j < 3; ++j)
        EXPECT_TRUE(prof.woman(j).weakly_prefers(mu.partner(AgentId::woman(j)), m.partner(AgentId::woman(j))));
  }
}

TEST(DeferredAcceptance, ReplayRejectsForgedTrace) {
  DaResult r = run_da(RuleId::MPDA, fixtures::example1_p1());
  r.trace.steps.front().rejections.emplace_back(AgentId::man(0), AgentId::woman(1));
  EXPECT_THROW(replay(r.trace, 2, 2), InvalidArgument);
}
