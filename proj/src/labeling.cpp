#include "feedaudit/labeling.hpp"

#include <algorithm>
#include <bit>

namespace feedaudit {

std::uint32_t Interner::intern(const std::string& key) {
  auto [it, inserted] = ids_.emplace(key, static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.push_back(key);
  return it->second;
}

std::uint32_t Interner::lookup(const std::string& key) const {
  auto it = ids_.find(key);
  return it == ids_.end() ? kMissing : it->second;
}

namespace {

Timestamp engagement_time(const Engagement& e) {
  if (!e.active) return kGateNever;
  return e.ts ? *e.ts : kGateAlways;
}

std::vector<std::uint32_t> intern_sorted(Interner& interner, const std::vector<std::string>& tags) {
  std::vector<std::uint32_t> out;
  out.reserve(tags.size());
  for (const auto& t : tags) out.push_back(interner.intern(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

EncodedDataset encode(const Dataset& dataset) {
  EncodedDataset out;
  out.timelines.reserve(dataset.user_count());
  for (const auto& t : dataset.timelines) {
    EncodedTimeline et;
    et.user_id = t.user_id;
    et.events.reserve(t.events.size());
    for (const auto& e : t.events) {
      EncodedEvent ee;
      ee.tags = intern_sorted(out.tags, e.hashtags);
      ee.creator = out.creators.intern(e.creator_id);
      ee.view_ts = e.view_ts;
      ee.gate_time[static_cast<std::size_t>(Gate::None)] = kGateAlways;
      ee.gate_time[static_cast<std::size_t>(Gate::Liked)] = engagement_time(e.liked);
      ee.gate_time[static_cast<std::size_t>(Gate::WatchedToEnd)] = watched_to_end(e) ? kGateAlways : kGateNever;
      ee.gate_time[static_cast<std::size_t>(Gate::Shared)] = engagement_time(e.shared);
      ee.gate_time[static_cast<std::size_t>(Gate::Favorited)] = engagement_time(e.favorited);
      ee.gate_time[static_cast<std::size_t>(Gate::Followed)] = engagement_time(e.followed_creator);
      et.events.push_back(std::move(ee));
    }
    et.popular = intern_sorted(out.tags, t.popular_interests);
    et.declared = intern_sorted(out.tags, t.declared_interests);
    out.timelines.push_back(std::move(et));
  }
  return out;
}

bool share_any(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return false;
}

namespace {

std::size_t window_start(const FeatureSpec& spec, std::size_t slot) {
  if (spec.scope == Scope::Global) return 1;
  const std::size_t w = *spec.window;
  return slot > w ? slot - w : 1;
}

}  // namespace

bool evaluate_in_context(const FeatureSpec& spec, const EncodedEvent& query, std::size_t slot,
                         Timestamp reference, const EncodedTimeline& context) {
  if (spec.basis == MatchBasis::InterestSet) return share_any(query.tags, context.interests(spec.interests));
  const std::size_t last = std::min(slot - 1, context.events.size());
  for (std::size_t j = window_start(spec, slot); j <= last; ++j) {
    const auto& prior = context.events[j - 1];
    if (!prior.passes(spec.gate, reference)) continue;
    if (spec.basis == MatchBasis::Hashtag ? share_any(prior.tags, query.tags) : prior.creator == query.creator)
      return true;
  }
  return false;
}

bool evaluate_feature(const FeatureSpec& spec, std::size_t i, const EncodedTimeline& timeline) {
  const auto& event = timeline.events.at(i - 1);
  return evaluate_in_context(spec, event, i, event.view_ts, timeline);
}

TimelineIndex::TimelineIndex(const EncodedTimeline& timeline, const FeatureSet& features) : timeline_(&timeline) {
  std::array<std::array<bool, 2>, kGateCount> needed{};
  for (const auto& f : features)
    if (f.basis != MatchBasis::InterestSet)
      needed[static_cast<std::size_t>(f.gate)][f.basis == MatchBasis::Hashtag ? 0 : 1] = true;

  for (std::size_t g = 0; g < kGateCount; ++g) {
    for (std::size_t b = 0; b < 2; ++b) {
      if (!needed[g][b]) continue;
      auto& map = postings_[g][b];
      for (std::size_t j = 1; j <= timeline.events.size(); ++j) {
        const auto& e = timeline.events[j - 1];
        const Timestamp t = e.gate_time[g];
        if (t == kGateNever) continue;
        auto append = [&](std::uint32_t key) {
          auto& p = map[key];
          p.position.push_back(static_cast<std::uint32_t>(j));
          p.time.push_back(t);
          p.prefix_min.push_back(p.prefix_min.empty() ? t : std::min(p.prefix_min.back(), t));
        };
        if (b == 0)
          for (auto tag : e.tags) append(tag);
        else
          append(e.creator);
      }
    }
  }
}

bool TimelineIndex::posting_hit(const PostingMap& map, std::uint32_t key, std::size_t lo, std::size_t slot,
                                bool global, Timestamp reference) const {
  auto it = map.find(key);
  if (it == map.end()) return false;
  const auto& p = it->second;
  const auto end = std::lower_bound(p.position.begin(), p.position.end(), static_cast<std::uint32_t>(slot));
  const auto k = static_cast<std::size_t>(end - p.position.begin());
  if (k == 0) return false;
  if (global) return p.prefix_min[k - 1] < reference;
  auto start = std::lower_bound(p.position.begin(), end, static_cast<std::uint32_t>(lo));
  for (auto s = static_cast<std::size_t>(start - p.position.begin()); s < k; ++s)
    if (p.time[s] < reference) return true;
  return false;
}

bool TimelineIndex::fires(const FeatureSpec& spec, const EncodedEvent& query, std::size_t slot,
                          Timestamp reference) const {
  if (spec.basis == MatchBasis::InterestSet) return share_any(query.tags, timeline_->interests(spec.interests));
  if (slot <= 1) return false;
  const bool global = spec.scope == Scope::Global;
  const std::size_t lo = window_start(spec, slot);
  const auto& map = postings_[static_cast<std::size_t>(spec.gate)][spec.basis == MatchBasis::Hashtag ? 0 : 1];
  if (spec.basis == MatchBasis::Creator) return posting_hit(map, query.creator, lo, slot, global, reference);
  for (auto tag : query.tags)
    if (posting_hit(map, tag, lo, slot, global, reference)) return true;
  return false;
}

std::uint64_t TimelineIndex::fired_mask(const FeatureSet& features, const EncodedEvent& query, std::size_t slot,
                                        Timestamp reference) const {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < features.size(); ++k)
    if (fires(features[k], query, slot, reference)) mask |= std::uint64_t{1} << k;
  return mask;
}

bool TimelineIndex::any_fires(const FeatureSet& features, const EncodedEvent& query, std::size_t slot,
                              Timestamp reference) const {
  for (const auto& f : features)
    if (fires(f, query, slot, reference)) return true;
  return false;
}

std::size_t LabeledTimeline::exploit_count(std::uint64_t subset) const {
  return static_cast<std::size_t>(std::count_if(fired.begin(), fired.end(), [&](auto m) { return (m & subset) != 0; }));
}

std::vector<std::string> fired_names(std::uint64_t mask, const std::vector<std::string>& feature_names) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < feature_names.size(); ++k)
    if (mask & (std::uint64_t{1} << k)) out.push_back(feature_names[k]);
  return out;
}

LabeledTimeline label_timeline(const EncodedTimeline& timeline, const FeatureSet& features) {
  if (features.empty()) throw FeatureError("labeling needs at least one feature");
  TimelineIndex index(timeline, features);
  LabeledTimeline out{timeline.user_id, std::vector<std::uint64_t>(timeline.events.size())};
  for (std::size_t i = 1; i <= timeline.events.size(); ++i) {
    const auto& e = timeline.events[i - 1];
    out.fired[i - 1] = index.fired_mask(features, e, i, e.view_ts);
  }
  return out;
}

LabeledTimeline label_timeline_reference(const EncodedTimeline& timeline, const FeatureSet& features) {
  if (features.empty()) throw FeatureError("labeling needs at least one feature");
  LabeledTimeline out{timeline.user_id, std::vector<std::uint64_t>(timeline.events.size())};
  for (std::size_t i = 1; i <= timeline.events.size(); ++i)
    for (std::size_t k = 0; k < features.size(); ++k)
      if (evaluate_feature(features[k], i, timeline)) out.fired[i - 1] |= std::uint64_t{1} << k;
  return out;
}

LabeledDataset label_dataset(const EncodedDataset& dataset, const FeatureSet& features) {
  if (features.empty()) throw FeatureError("labeling needs at least one feature");
  LabeledDataset out{features.names(), std::vector<LabeledTimeline>(dataset.user_count())};
  const auto m = static_cast<std::ptrdiff_t>(dataset.user_count());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t u = 0; u < m; ++u) out.timelines[u] = label_timeline(dataset.timelines[u], features);
  return out;
}

LabeledDataset label_dataset_serial(const EncodedDataset& dataset, const FeatureSet& features) {
  LabeledDataset out{features.names(), {}};
  for (const auto& t : dataset.timelines) out.timelines.push_back(label_timeline_reference(t, features));
  return out;
}

LabeledDataset label_dataset(const Dataset& dataset, const FeatureSet& features) {
  return label_dataset(encode(dataset), features);
}

}  // namespace feedaudit
