#include <gtest/gtest.h>

#include "matchlab/matchlab.hpp"

using namespace matchlab;

namespace {

suites::SuiteParams small(std::uint64_t trials) {
  suites::SuiteParams p;
  p.trials = trials;
  return p;
}

}  // namespace

TEST(Suites, QuickRunsPass) {
  for (const std::string id : {"example1", "example2", "prop4", "corollary-dubins", "theorem1", "prop-welfare",
                               "prop-unmatched", "lemma-c1", "lemma-c2", "prop-gsp-existence"}) {
    const auto r = suites::run_suite(id);
    EXPECT_TRUE(r.pass) << id << ": " << r.to_text(false);
    EXPECT_GT(r.cases, 0u) << id;
  }
}

TEST(Suites, SampledRunsPass) {
  const auto r = suites::run_suite("theorem2", small(8));
  EXPECT_TRUE(r.pass) << r.to_text(false);
  const auto t3 = suites::run_suite("theorem3", small(20));
  EXPECT_TRUE(t3.pass);
  EXPECT_TRUE(t3.sampled);
  EXPECT_EQ(t3.cases, 20u);
  const auto b = suites::run_suite("blocking-lemma", small(300));
  EXPECT_TRUE(b.pass);
  EXPECT_EQ(b.cases, 300u);
}

TEST(Suites, IdsAndErrors) {
  EXPECT_EQ(suites::suite_ids().size(), 13u);
  EXPECT_THROW(suites::run_suite("theorem9"), suites::UnknownSuite);
  suites::SuiteParams tiny;
  tiny.men = 1;
  tiny.women = 1;
  EXPECT_THROW(suites::run_suite("blocking-lemma", tiny), PreconditionError);
  suites::SuiteParams wrong;
  wrong.men = 3;
  EXPECT_THROW(suites::run_suite("example1", wrong), PreconditionError);
}

TEST(Suites, ReportsAreDeterministic) {
  for (const std::string id : {"lemma-c2", "blocking-lemma"}) {
    suites::SuiteParams p = small(40);
    p.seed = 7;
    const Json a = suites::run_suite(id, p).to_json(false);
    const Json b = suites::run_suite(id, p).to_json(false);
    EXPECT_EQ(a, b) << id;
    EXPECT_FALSE(a.contains("runtime_ms"));
  }
  suites::SuiteParams parallel = small(16);
  parallel.jobs = 3;
  EXPECT_EQ(suites::run_suite("theorem2", parallel).to_json(false), suites::run_suite("theorem2", small(16)).to_json(false));
}

TEST(Suites, ReportJsonShape) {
  const Json j = suites::run_suite("example1").to_json(true);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["suite"], "example1");
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["mode"], "exhaustive");
  EXPECT_TRUE(j.contains("runtime_ms"));
  EXPECT_EQ(j["params"]["men"], 2);
}

TEST(BlockingLemma, HandCases) {
  // Every man gets his first choice under MPDA, so no matching improves on it.
  const Profile p1 = fixtures::example1_p1();
  EXPECT_FALSE(suites::detail::check_blocking_lemma(p1, fixtures::example1_mu()));
  EXPECT_FALSE(suites::detail::check_blocking_lemma(p1, Matching(2, 2)));
  // Both men want w1, who prefers m1. Giving w1 to m2 leaves m1 single and
  // (m1, w1) blocks.
  const Profile q = parse_profile(2, 2, {"w1 w2 @", "w1 w2 @", "m1 m2 @", "m1 m2 @"});
  EXPECT_EQ(deferred_acceptance(RuleId::MPDA, q), Matching::from_wives(2, {0, 1}));
  const std::vector<std::pair<int, int>> pairs{{1, 0}};
  const Matching mu = Matching::from_pairs(2, 2, pairs);
  EXPECT_TRUE(q.man(1).prefers(Outcome::partner(0), Outcome::partner(1)));
  EXPECT_FALSE(suites::detail::check_blocking_lemma(q, mu));
  EXPECT_THROW(suites::detail::check_blocking_lemma(parse_profile(1, 1, {"@ w1", "m1 @"}), Matching::from_wives(1, {0})),
               PreconditionError);
}

TEST(BlockingLemma, ApplicableCaseHasBlockingPair) {
  // Three men, three women; mu gives m1 and m2 partners they rank above the
  // man-optimal ones, so someone outside {m1, m2} must block with a woman
  // matched to one of them.
  const Profile p = parse_profile(3, 3, {"w1 w2 w3 @", "w2 w1 w3 @", "w3 w1 w2 @",  //
                                         "m2 m3 m1 @", "m1 m3 m2 @", "m1 m2 m3 @"});
  const Matching opt = deferred_acceptance(RuleId::MPDA, p);
  for (const Matching& mu : enumerate_matchings(3, 3)) {
    if (!is_individually_rational(mu, p)) continue;
    EXPECT_FALSE(suites::detail::check_blocking_lemma(p, mu)) << to_string(mu) << " vs " << to_string(opt);
  }
}
