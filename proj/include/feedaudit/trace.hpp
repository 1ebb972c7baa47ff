#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedaudit {

using Timestamp = std::int64_t;

/// A boolean engagement signal with the optional time it happened.
struct Engagement {
  bool active = false;
  std::optional<Timestamp> ts;

  bool operator==(const Engagement&) const = default;
};

/// One item-user pair of a recommendation timeline.
struct RecommendationEvent {
  std::string user_id;
  std::string video_id;
  std::string creator_id;
  std::vector<std::string> hashtags;  // sorted, unique, lowercase
  Timestamp view_ts = 0;
  double video_duration_s = 0.0;
  double watch_duration_s = 0.0;
  Engagement liked;
  Engagement followed_creator;
  Engagement shared;
  Engagement favorited;

  bool operator==(const RecommendationEvent&) const = default;
};

struct UserTimeline {
  std::string user_id;
  std::vector<RecommendationEvent> events;  // index i is events[i - 1]
  std::vector<std::string> follow_set;
  std::vector<std::string> popular_interests;   // ordered by relevance
  std::vector<std::string> declared_interests;

  std::size_t size() const { return events.size(); }
  bool operator==(const UserTimeline&) const = default;
};

/// Timelines keyed (and ordered) by user_id.
struct Dataset {
  std::vector<UserTimeline> timelines;

  std::size_t user_count() const { return timelines.size(); }
  const UserTimeline* find(std::string_view user_id) const;
  bool operator==(const Dataset&) const = default;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public TraceError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InsufficientLengthError : public TraceError {
 public:
  using TraceError::TraceError;
};

struct ParseOptions {
  bool strict = false;
};

struct ParseReport {
  std::size_t lines_read = 0;
  std::size_t records = 0;
  std::size_t skipped_lines = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> warnings;
};

/// Lowercase, whitespace-trimmed form used for all hashtag comparisons.
std::string canonical_hashtag(std::string_view tag);

/// Sorts, canonicalizes, and removes duplicate tags in place.
void normalize_hashtags(std::vector<std::string>& tags);

/// Orders events by view_ts, ties by video_id.
void sort_events(std::vector<RecommendationEvent>& events);

/// Recomputes follow_set from the events' followed_creator flags.
void refresh_follow_set(UserTimeline& timeline);

Dataset parse_traces(std::istream& in, const ParseOptions& options = {},
                     ParseReport* report = nullptr);
Dataset parse_traces_file(const std::string& path, const ParseOptions& options = {},
                          ParseReport* report = nullptr);

constexpr std::string_view kTraceHeader = "#feedaudit-trace v1";

/// Emits the dataset in the line format parse_traces reads. Interest sets are
/// written as one profile record per user ahead of that user's events.
void write_traces(std::ostream& out, const Dataset& dataset);
void write_traces_file(const std::string& path, const Dataset& dataset);

UserTimeline take_prefix(const UserTimeline& timeline, std::size_t n);

/// Keeps users with at least n events and truncates each to its first n.
Dataset take_prefix_all(const Dataset& dataset, std::size_t n,
                        std::vector<std::string>* excluded = nullptr);

/// Uncapped ratio watch/video; throws when the video duration is zero.
double watch_percentage(const RecommendationEvent& event);

inline bool watched_to_end(const RecommendationEvent& event) {
  return event.video_duration_s > 0.0 && event.watch_duration_s / event.video_duration_s >= 1.0;
}

}  // namespace feedaudit
