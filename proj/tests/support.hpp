#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feedaudit/trace.hpp"

namespace feedaudit::fixture {

struct Ev {
  std::string creator = "c";
  std::vector<std::string> tags;
  bool liked = false;
  bool watched = false;
  bool shared = false;
  bool favorited = false;
  bool followed = false;
};

/// Events at view_ts 100, 200, ...; engagements land 10 s after the view.
inline UserTimeline timeline(const std::string& user, const std::vector<Ev>& evs) {
  UserTimeline t;
  t.user_id = user;
  Timestamp ts = 100;
  std::size_t n = 0;
  for (const auto& e : evs) {
    RecommendationEvent r;
    r.user_id = user;
    r.video_id = user + "-v" + std::to_string(++n);
    r.creator_id = e.creator;
    r.hashtags = e.tags;
    normalize_hashtags(r.hashtags);
    r.view_ts = ts;
    r.video_duration_s = 20;
    r.watch_duration_s = e.watched ? 20 : 5;
    auto set = [&](Engagement& g, bool on) {
      if (on) g = {true, ts + 10};
    };
    set(r.liked, e.liked);
    set(r.shared, e.shared);
    set(r.favorited, e.favorited);
    set(r.followed_creator, e.followed);
    t.events.push_back(std::move(r));
    ts += 100;
  }
  refresh_follow_set(t);
  return t;
}

inline Dataset dataset(std::vector<UserTimeline> ts) {
  Dataset d;
  d.timelines = std::move(ts);
  return d;
}

}  // namespace feedaudit::fixture
