#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "feedaudit/metrics.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit {

PersonalizationScorer::PersonalizationScorer(const EncodedDataset& dataset, const FeatureSet& features,
                                             const LabeledDataset& labels)
    : dataset_(&dataset), features_(&features), labels_(&labels) {
  if (labels.user_count() != dataset.user_count())
    throw MetricsError("labels and dataset disagree on the number of users");
  if (labels.feature_names != features.names())
    throw MetricsError("labels were produced with a different feature set");
  indexes_.reserve(dataset.user_count());
  for (const auto& t : dataset.timelines) indexes_.emplace_back(t, features);
}

Label PersonalizationScorer::label_in_context(std::size_t user, std::size_t i, std::size_t context_user) const {
  const auto& item = dataset_->timelines[user].events.at(i - 1);
  const auto& context = dataset_->timelines[context_user];
  if (context.events.size() < i)
    throw MetricsError(fmt::format("timeline '{}' is shorter than index {}", context.user_id, i));
  // the item takes over the view time of the slot it is placed in
  const Timestamp reference = context.events[i - 1].view_ts;
  return indexes_[context_user].any_fires(*features_, item, i, reference) ? Label::Exploit : Label::Explore;
}

double PersonalizationScorer::score(std::size_t user, std::size_t i, const ScoreOptions& options) const {
  const std::size_t m = dataset_->user_count();
  if (user >= m) throw MetricsError("user out of range");
  const auto& own = labels_->timelines[user];
  if (i == 0 || i > own.size()) throw MetricsError(fmt::format("index {} outside timeline", i));
  const Label label = own.label(i);

  std::vector<std::size_t> others;
  others.reserve(m - 1);
  for (std::size_t v = 0; v < m; ++v)
    if (v != user) others.push_back(v);

  double scale = 1.0;
  if (options.sample_size && *options.sample_size < others.size()) {
    Rng rng(derive_seed(options.seed, "rho", (std::uint64_t(user) << 32) ^ i));
    // partial Fisher-Yates: first s entries form the sample
    const std::size_t s = *options.sample_size;
    for (std::size_t k = 0; k < s; ++k) {
      auto j = k + static_cast<std::size_t>(uniform_below(rng, others.size() - k));
      std::swap(others[k], others[j]);
    }
    scale = s ? double(others.size()) / double(s) : 0.0;
    others.resize(s);
  }

  std::size_t agree = 0;
  for (auto v : others)
    if (label_in_context(user, i, v) == label) ++agree;

  const double k = double(agree) * scale;
  const double denom = options.denominator == RhoDenominator::AllUsers ? double(m) : double(m - 1);
  if (denom == 0.0) return 1.0;
  return 1.0 - k / denom;
}

std::vector<ItemScore> PersonalizationScorer::score_all(const ScoreOptions& options) const {
  std::vector<std::pair<std::size_t, std::size_t>> items;
  for (std::size_t u = 0; u < labels_->user_count(); ++u)
    for (std::size_t i = 1; i <= labels_->timelines[u].size(); ++i) items.emplace_back(u, i);
  std::size_t longest = 0;
  for (const auto& t : labels_->timelines) longest = std::max(longest, t.size());
  for (const auto& t : dataset_->timelines)
    if (t.events.size() < longest)
      throw MetricsError(fmt::format("timeline '{}' is shorter than the scored items", t.user_id));

  std::vector<ItemScore> out(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto [u, i] = items[k];
    out[k] = {u, i, labels_->timelines[u].label(i), score(u, i, options)};
  }
  return out;
}

}  // namespace feedaudit
