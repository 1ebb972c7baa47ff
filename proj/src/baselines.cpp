#include "feedaudit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "feedaudit/preprocess.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit {

namespace {

void shift(Engagement& e, Timestamp offset) {
  if (e.ts) *e.ts = std::max<Timestamp>(0, *e.ts + offset);
}

}  // namespace

Dataset index_randomize(const Dataset& dataset, std::uint64_t seed) {
  const std::size_t m = dataset.user_count();
  if (m == 0) return dataset;
  const std::size_t n = dataset.timelines.front().size();
  for (const auto& t : dataset.timelines)
    if (t.size() != n)
      throw MetricsError(fmt::format("index randomization needs equal lengths; '{}' has {} events, expected {}",
                                     t.user_id, t.size(), n));

  Dataset out = dataset;
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "index-randomize", i));
    shuffle(std::span<std::size_t>(perm), rng);
    for (std::size_t u = 0; u < m; ++u) {
      const auto& source = dataset.timelines[perm[u]].events[i];
      auto& slot = out.timelines[u].events[i];
      const Timestamp view_ts = slot.view_ts;
      const Timestamp offset = view_ts - source.view_ts;
      slot = source;
      slot.user_id = out.timelines[u].user_id;
      slot.view_ts = view_ts;
      shift(slot.liked, offset);
      shift(slot.followed_creator, offset);
      shift(slot.shared, offset);
      shift(slot.favorited, offset);
    }
  }
  for (auto& t : out.timelines) refresh_follow_set(t);
  return out;
}

std::vector<LabeledDataset> randomized_labels(const Dataset& dataset, const FeatureSet& features,
                                              const RandomizationOptions& options) {
  if (options.trials == 0) throw MetricsError("trials must be at least 1");
  std::vector<LabeledDataset> out;
  out.reserve(options.trials);
  for (std::size_t t = 0; t < options.trials; ++t) {
    auto randomized = index_randomize(dataset, derive_seed(options.seed, "noise-trial", t));
    if (options.interest_radius) assign_popular_interests(randomized, *options.interest_radius);
    out.push_back(label_dataset(encode(randomized), features));
  }
  return out;
}

NoiseFloor floor_from_labels(const std::vector<LabeledDataset>& randomized, std::size_t window, std::uint64_t subset) {
  if (randomized.empty()) throw MetricsError("no randomized trials");
  NoiseFloor floor;
  floor.trials = randomized.size();
  std::vector<MeanExploitCurve> curves;
  for (const auto& labels : randomized) curves.push_back(mean_exploit_curve(labels, window, subset));
  const std::size_t n = curves.front().size();
  floor.curve = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), curves.front().users, window};
  floor.trial_stddev.assign(n, 0.0);
  const double trials = double(curves.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0, sd = 0;
    for (const auto& c : curves) {
      sum += c.mean[i];
      sd += c.stddev[i];
    }
    const double mean = sum / trials;
    double ss = 0;
    for (const auto& c : curves) ss += (c.mean[i] - mean) * (c.mean[i] - mean);
    floor.curve.mean[i] = mean;
    floor.curve.stddev[i] = sd / trials;
    floor.trial_stddev[i] = std::sqrt(ss / trials);
  }
  for (auto& c : curves) floor.trial_means.push_back(std::move(c.mean));
  return floor;
}

NoiseFloor noise_floor(const Dataset& dataset, const FeatureSet& features, std::size_t window,
                       const RandomizationOptions& options) {
  return floor_from_labels(randomized_labels(dataset, features, options), window);
}

}  // namespace feedaudit
