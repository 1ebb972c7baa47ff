#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feedaudit/trace.hpp"

namespace feedaudit {

class SimulationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-item behaviour of an automated account. Watch and skip are the two
/// dwell outcomes; like and follow are independent coin flips.
struct BotPolicy {
  std::string name;
  double p_watch = 0.0;
  double p_skip = 1.0;
  double p_like = 0.0;
  double p_follow = 0.0;
};

void validate(const BotPolicy& policy);

/// Bots 1-5 of the reference bot study.
const std::vector<BotPolicy>& reference_bot_policies();
/// "bot1" .. "bot5"; throws SimulationError otherwise.
BotPolicy bot_policy(std::string_view name);

/// What an exploit recommendation is built from.
enum class ExploitBasis : std::uint8_t {
  LikedHashtag,    // shares a hashtag with a liked item
  FollowedCreator, // same creator as an item whose creator was followed
  WatchedHashtag,  // shares a hashtag with an item watched to the end
  ViewedCreator,   // same creator as any recently viewed item; needs no engagement
};
inline constexpr std::size_t kExploitBasisCount = 4;

std::string_view to_string(ExploitBasis b);

/// Synthetic recommender standing in for a live feed. Every creator has a
/// home topic; explore items come from a uniformly random creator with tags
/// drawn from that creator's topic.
struct PlatformConfig {
  double exploit_rate = 0.5;  // q
  std::size_t creators = 5000;
  std::size_t topics = 500;
  std::size_t tags_per_topic = 8;
  std::size_t min_tags_per_video = 2;
  std::size_t max_tags_per_video = 3;
  /// Weights over ExploitBasis, in enum order; must sum to 1. An exploit
  /// draw picks among the bases that have a qualifying source, in proportion
  /// to these weights, and falls back to explore when none has.
  std::array<double, kExploitBasisCount> basis_weights = {0.4, 0.2, 0.2, 0.2};
  /// Exploit sources are drawn from the last `lookback` items when possible.
  std::size_t lookback = 50;
  double min_video_s = 10.0;
  double max_video_s = 60.0;
  Timestamp start_ts = 1672185600;
  std::uint64_t seed = 0;  // content pool (creator topics)
};

void validate(const PlatformConfig& config);

/// Ground truth for one emitted item.
struct PlantedLabel {
  bool exploit = false;
  std::optional<ExploitBasis> basis;
  std::optional<std::size_t> basis_index;  // 1-based index of the source item
  bool fallback = false;  // exploit was drawn but no source existed
};

struct BotRun {
  UserTimeline timeline;
  std::vector<PlantedLabel> truth;
};

BotRun run_bot(const BotPolicy& policy, const PlatformConfig& platform, std::size_t steps, std::uint64_t seed,
               const std::string& user_id = "bot");

struct Cohort {
  Dataset dataset;
  std::vector<std::vector<PlantedLabel>> truth;  // aligned with dataset.timelines
  std::vector<std::string> policy_of_user;       // aligned with dataset.timelines
};

/// n_per_policy bots per policy, each with its own derived seed.
Cohort generate_cohort(const std::vector<BotPolicy>& policies, const PlatformConfig& platform,
                       std::size_t n_per_policy, std::size_t steps, std::uint64_t seed);

constexpr std::string_view kGroundTruthHeader = "#feedaudit-truth v1";

/// Sidecar rows: user_id, index, planted label, basis, basis index.
void write_ground_truth(std::ostream& out, const Cohort& cohort);

}  // namespace feedaudit
