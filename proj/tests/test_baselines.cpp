#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "feedaudit/baselines.hpp"
#include "feedaudit/simulator.hpp"
#include "support.hpp"

using namespace feedaudit;

namespace {

Cohort cohort(const std::vector<std::string>& policies, std::size_t per, std::size_t steps, std::uint64_t seed) {
  PlatformConfig p;
  p.seed = seed + 1;
  std::vector<BotPolicy> pol;
  for (const auto& n : policies) pol.push_back(bot_policy(n));
  return generate_cohort(pol, p, per, steps, seed);
}

std::multiset<std::string> items_at(const Dataset& d, std::size_t i) {
  std::multiset<std::string> s;
  for (const auto& t : d.timelines) {
    const auto& e = t.events[i - 1];
    s.insert(e.video_id + "|" + e.creator_id + "|" + std::to_string(e.liked.active) +
             std::to_string(e.followed_creator.active) + "|" + std::to_string(e.watch_duration_s));
  }
  return s;
}

double sample_sd(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1));
}

}  // namespace

TEST(IndexRandomize, SingleUserIsIdentity) {
  const auto c = cohort({"bot4"}, 1, 60, 3);
  EXPECT_EQ(index_randomize(c.dataset, 17), c.dataset);
}

TEST(IndexRandomize, PreservesPerIndexMultisets) {
  const auto c = cohort({"bot1", "bot4", "bot5"}, 3, 80, 4);
  const auto r = index_randomize(c.dataset, 5);
  ASSERT_EQ(r.user_count(), c.dataset.user_count());
  bool moved = false;
  for (std::size_t u = 0; u < r.user_count(); ++u) {
    EXPECT_EQ(r.timelines[u].user_id, c.dataset.timelines[u].user_id);
    ASSERT_EQ(r.timelines[u].size(), 80u);
    for (std::size_t i = 1; i <= 80; ++i) {
      const auto& got = r.timelines[u].events[i - 1];
      EXPECT_EQ(got.view_ts, c.dataset.timelines[u].events[i - 1].view_ts);
      EXPECT_EQ(got.user_id, r.timelines[u].user_id);
      if (got.liked.ts) EXPECT_GE(*got.liked.ts, got.view_ts);
      moved |= got.video_id != c.dataset.timelines[u].events[i - 1].video_id;
    }
  }
  EXPECT_TRUE(moved);
  for (std::size_t i = 1; i <= 80; ++i) EXPECT_EQ(items_at(r, i), items_at(c.dataset, i));
  EXPECT_EQ(index_randomize(c.dataset, 5), r);
  EXPECT_NE(index_randomize(c.dataset, 6), r);
}

TEST(IndexRandomize, EngagementOffsetFollowsItem) {
  auto d = fixture::dataset({fixture::timeline("a", {{"A", {"#x"}, true}, {"B", {"#y"}}}),
                             fixture::timeline("b", {{"C", {"#z"}}, {"D", {"#w"}}})});
  d.timelines[1].events[0].view_ts = 1000;
  d.timelines[1].events[1].view_ts = 2000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = index_randomize(d, seed);
    for (const auto& t : r.timelines)
      for (const auto& e : t.events)
        if (e.liked.active) EXPECT_EQ(*e.liked.ts, e.view_ts + 10);
  }
}

TEST(IndexRandomize, UnequalLengthsRejected) {
  auto d = fixture::dataset({fixture::timeline("a", {{}, {}}), fixture::timeline("b", {{}})});
  EXPECT_THROW(index_randomize(d, 1), MetricsError);
}

TEST(NoiseFloor, SingleTrialIsOneRandomizedRun) {
  const auto c = cohort({"bot4", "bot5"}, 3, 120, 8);
  const FeatureSet fs = make_feature_set(default_feature_names(), 10);
  const RandomizationOptions o{1, 77, std::nullopt};
  const auto floor = noise_floor(c.dataset, fs, 10, o);
  const auto runs = randomized_labels(c.dataset, fs, o);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(floor.trials, 1u);
  EXPECT_EQ(floor.curve.mean, mean_exploit_curve(runs[0], 10).mean);
  EXPECT_THROW(noise_floor(c.dataset, fs, 10, {0, 1, std::nullopt}), MetricsError);
}

TEST(NoiseFloor, TrialsAreIndependentOfOrder) {
  const auto c = cohort({"bot4", "bot2"}, 3, 100, 9);
  const FeatureSet fs = make_feature_set(default_feature_names(), 10);
  const auto five = randomized_labels(c.dataset, fs, {5, 3, std::nullopt});
  const auto two = randomized_labels(c.dataset, fs, {2, 3, std::nullopt});
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t u = 0; u < c.dataset.user_count(); ++u) EXPECT_EQ(two[k].timelines[u].fired, five[k].timelines[u].fired);
}

TEST(NoiseFloor, StandardErrorShrinksWithTrials) {
  // The floor estimate over T trials is a mean of T iid curves, so its spread
  // across independent repetitions scales as 1/sqrt(T).
  const auto c = cohort({"bot2", "bot3"}, 6, 300, 10);
  const FeatureSet fs = make_feature_set(default_feature_names(), 20);
  auto level = [&](std::size_t trials, std::uint64_t seed) {
    return mean_after(noise_floor(c.dataset, fs, 20, {trials, seed, std::nullopt}).curve.mean, 40);
  };
  std::vector<double> small, large;
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    small.push_back(level(2, 1000 + rep));
    large.push_back(level(4, 5000 + rep));
  }
  const double ratio = sample_sd(large) / sample_sd(small);
  EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.3 / std::sqrt(2.0)) << "ratio " << ratio;
}

TEST(NoiseFloor, FlatAfterWarmup) {
  const auto c = cohort({"bot1", "bot2", "bot3"}, 5, 600, 11);
  const std::size_t w = 30;
  const auto floor = noise_floor(c.dataset, make_feature_set(default_feature_names(), w), w, {10, 12, std::nullopt});
  const double level = mean_after(floor.curve.mean, 2 * w);
  for (std::size_t i = 2 * w + 1; i <= floor.curve.size(); ++i)
    EXPECT_LT(std::abs(floor.curve.mean[i - 1] - level), 3 * floor.trial_stddev[i - 1]) << i;
}

TEST(NoiseFloor, BelowRealCurveOnPersonalizedCohort) {
  const auto c = cohort({"bot4", "bot5"}, 5, 400, 12);
  const FeatureSet fs = make_feature_set(default_feature_names(), 50);
  const auto real = mean_exploit_curve(label_dataset(c.dataset, fs), 50);
  const auto floor = noise_floor(c.dataset, fs, 50, {5, 2, std::nullopt});
  EXPECT_GT(mean_after(real.mean, 50), mean_after(floor.curve.mean, 50) + 0.1);
}
