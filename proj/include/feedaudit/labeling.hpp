#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "feedaudit/features.hpp"
#include "feedaudit/trace.hpp"

namespace feedaudit {

/// Dense ids for hashtags and creators, shared across a dataset.
class Interner {
 public:
  std::uint32_t intern(const std::string& key);
  /// Returns kMissing for keys never interned.
  std::uint32_t lookup(const std::string& key) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }

  static constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
};

/// Gate time sentinels: kGateNever fails every comparison, kGateAlways
/// passes every comparison; anything else is an engagement timestamp.
inline constexpr Timestamp kGateNever = std::numeric_limits<Timestamp>::max();
inline constexpr Timestamp kGateAlways = std::numeric_limits<Timestamp>::min();

struct EncodedEvent {
  std::vector<std::uint32_t> tags;  // sorted
  std::uint32_t creator = 0;
  Timestamp view_ts = 0;
  /// An earlier item passes gate g for reference time T iff gate_time[g] < T.
  std::array<Timestamp, kGateCount> gate_time{};

  bool passes(Gate g, Timestamp reference) const { return gate_time[static_cast<std::size_t>(g)] < reference; }
};

struct EncodedTimeline {
  std::string user_id;
  std::vector<EncodedEvent> events;
  std::vector<std::uint32_t> popular;   // sorted tag ids
  std::vector<std::uint32_t> declared;  // sorted tag ids

  const std::vector<std::uint32_t>& interests(InterestSource s) const {
    return s == InterestSource::Popular ? popular : declared;
  }
};

struct EncodedDataset {
  Interner tags;
  Interner creators;
  std::vector<EncodedTimeline> timelines;

  std::size_t user_count() const { return timelines.size(); }
};

EncodedDataset encode(const Dataset& dataset);

bool share_any(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

// ---------------------------------------------------------------------------
// Reference path: literal scans over the history, one feature at a time.
// ---------------------------------------------------------------------------

/// Would `query`, placed at 1-based slot `slot` of `context` and viewed at
/// `reference`, activate `spec`? Scans context items r_j with j < slot.
bool evaluate_in_context(const FeatureSpec& spec, const EncodedEvent& query, std::size_t slot,
                         Timestamp reference, const EncodedTimeline& context);

/// Activation of `spec` at 1-based index i of the timeline itself.
bool evaluate_feature(const FeatureSpec& spec, std::size_t i, const EncodedTimeline& timeline);

// ---------------------------------------------------------------------------
// Indexed path: per-timeline posting lists keyed by tag / creator.
// ---------------------------------------------------------------------------

/// Posting lists of items that pass a gate, with prefix minima of gate time
/// so a global query is a binary search and a local query scans only window
/// members that share the key.
class TimelineIndex {
 public:
  TimelineIndex(const EncodedTimeline& timeline, const FeatureSet& features);

  bool fires(const FeatureSpec& spec, const EncodedEvent& query, std::size_t slot, Timestamp reference) const;
  std::uint64_t fired_mask(const FeatureSet& features, const EncodedEvent& query, std::size_t slot,
                           Timestamp reference) const;
  bool any_fires(const FeatureSet& features, const EncodedEvent& query, std::size_t slot,
                 Timestamp reference) const;

  const EncodedTimeline& timeline() const { return *timeline_; }

 private:
  struct Posting {
    std::vector<std::uint32_t> position;  // 1-based, ascending
    std::vector<Timestamp> time;
    std::vector<Timestamp> prefix_min;
  };
  using PostingMap = std::unordered_map<std::uint32_t, Posting>;

  bool posting_hit(const PostingMap& map, std::uint32_t key, std::size_t lo, std::size_t slot, bool global,
                   Timestamp reference) const;

  const EncodedTimeline* timeline_;
  // [gate][0 = hashtag, 1 = creator]
  std::array<std::array<PostingMap, 2>, kGateCount> postings_;
};

enum class Label : std::uint8_t { Explore = 0, Exploit = 1 };

/// Per-index fired masks; bit k is feature k of the set used for labeling.
struct LabeledTimeline {
  std::string user_id;
  std::vector<std::uint64_t> fired;

  std::size_t size() const { return fired.size(); }
  /// 1-based index.
  Label label(std::size_t i) const { return fired[i - 1] ? Label::Exploit : Label::Explore; }
  /// Label when only the features in `subset` are in play.
  Label label(std::size_t i, std::uint64_t subset) const {
    return (fired[i - 1] & subset) ? Label::Exploit : Label::Explore;
  }
  std::size_t exploit_count(std::uint64_t subset = ~std::uint64_t{0}) const;
};

struct LabeledDataset {
  std::vector<std::string> feature_names;
  std::vector<LabeledTimeline> timelines;

  std::size_t user_count() const { return timelines.size(); }
};

std::vector<std::string> fired_names(std::uint64_t mask, const std::vector<std::string>& feature_names);

/// Indexed labeling of one timeline.
LabeledTimeline label_timeline(const EncodedTimeline& timeline, const FeatureSet& features);

/// Literal scan; kept as the oracle for label_timeline.
LabeledTimeline label_timeline_reference(const EncodedTimeline& timeline, const FeatureSet& features);

/// Labels every user in parallel (OpenMP over users).
LabeledDataset label_dataset(const EncodedDataset& dataset, const FeatureSet& features);

/// Single-threaded reference-path labeling of a whole dataset.
LabeledDataset label_dataset_serial(const EncodedDataset& dataset, const FeatureSet& features);

LabeledDataset label_dataset(const Dataset& dataset, const FeatureSet& features);

}  // namespace feedaudit
