#include "feedaudit/trace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "json.hpp"

namespace feedaudit {

using nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& what)
    : TraceError(fmt::format("line {}: {}", line, what)), line_(line) {}

const UserTimeline* Dataset::find(std::string_view user_id) const {
  auto it = std::lower_bound(timelines.begin(), timelines.end(), user_id,
                             [](const UserTimeline& t, std::string_view id) { return t.user_id < id; });
  if (it == timelines.end() || it->user_id != user_id) return nullptr;
  return &*it;
}

std::string canonical_hashtag(std::string_view tag) {
  std::size_t b = 0, e = tag.size();
  while (b < e && std::isspace(static_cast<unsigned char>(tag[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(tag[e - 1]))) --e;
  std::string out(tag.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void normalize_hashtags(std::vector<std::string>& tags) {
  for (auto& t : tags) t = canonical_hashtag(t);
  std::erase_if(tags, [](const std::string& t) { return t.empty(); });
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
}

void sort_events(std::vector<RecommendationEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.view_ts, a.video_id) < std::tie(b.view_ts, b.video_id);
  });
}

void refresh_follow_set(UserTimeline& timeline) {
  std::set<std::string> follows;
  for (const auto& e : timeline.events)
    if (e.followed_creator.active) follows.insert(e.creator_id);
  timeline.follow_set.assign(follows.begin(), follows.end());
}

namespace {

std::string require_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ParseError(line, fmt::format("missing string field '{}'", key));
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key, std::size_t line) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw ParseError(line, fmt::format("field '{}' must be an array", key));
  for (const auto& v : *it) {
    if (!v.is_string()) throw ParseError(line, fmt::format("field '{}' must hold strings", key));
    out.push_back(v.get<std::string>());
  }
  return out;
}

double non_negative_real(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0.0;
  if (!it->is_number()) throw ParseError(line, fmt::format("field '{}' must be a number", key));
  double v = it->get<double>();
  if (!(v >= 0.0)) throw ParseError(line, fmt::format("field '{}' must be non-negative", key));
  return v;
}

Engagement engagement(const json& j, const char* flag, const char* ts_key, std::size_t line) {
  Engagement out;
  auto it = j.find(flag);
  if (it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError(line, fmt::format("field '{}' must be boolean", flag));
    out.active = it->get<bool>();
  }
  auto ts = j.find(ts_key);
  if (out.active && ts != j.end() && !ts->is_null()) {
    if (!ts->is_number_integer()) throw ParseError(line, fmt::format("field '{}' must be an integer", ts_key));
    auto v = ts->get<Timestamp>();
    if (v < 0) throw ParseError(line, fmt::format("field '{}' must be non-negative", ts_key));
    out.ts = v;
  }
  return out;
}

RecommendationEvent event_from_json(const json& j, std::size_t line) {
  RecommendationEvent e;
  e.user_id = require_string(j, "user_id", line);
  e.video_id = require_string(j, "video_id", line);
  e.creator_id = require_string(j, "creator_id", line);
  e.hashtags = string_list(j, "hashtags", line);
  normalize_hashtags(e.hashtags);
  auto ts = j.find("view_ts");
  if (ts == j.end() || !ts->is_number_integer()) throw ParseError(line, "missing integer field 'view_ts'");
  e.view_ts = ts->get<Timestamp>();
  e.video_duration_s = non_negative_real(j, "video_duration_s", line);
  e.watch_duration_s = non_negative_real(j, "watch_duration_s", line);
  e.liked = engagement(j, "liked", "liked_ts", line);
  e.followed_creator = engagement(j, "followed_creator", "followed_ts", line);
  e.shared = engagement(j, "shared", "shared_ts", line);
  e.favorited = engagement(j, "favorited", "favorited_ts", line);
  return e;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Dataset parse_traces(std::istream& in, const ParseOptions& options, ParseReport* report) {
  ParseReport local;
  ParseReport& rep = report ? *report : local;

  struct Profile {
    std::vector<std::string> popular, declared;
  };
  std::map<std::string, std::vector<RecommendationEvent>> by_user;
  std::map<std::string, Profile> profiles;
  std::set<std::tuple<std::string, std::string, Timestamp>> seen;

  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    ++rep.lines_read;
    if (blank_or_comment(text)) continue;
    try {
      json j = json::parse(text);
      if (!j.is_object()) throw ParseError(line_no, "record is not an object");
      if (!j.contains("video_id")) {
        // profile record: interest sets only
        Profile p;
        p.popular = string_list(j, "popular_interests", line_no);
        p.declared = string_list(j, "declared_interests", line_no);
        for (auto& t : p.popular) t = canonical_hashtag(t);
        normalize_hashtags(p.declared);
        profiles[require_string(j, "user_id", line_no)] = std::move(p);
        continue;
      }
      auto e = event_from_json(j, line_no);
      if (!seen.emplace(e.user_id, e.video_id, e.view_ts).second) {
        ++rep.duplicates;
        rep.warnings.push_back(fmt::format("line {}: duplicate ({}, {}, {}) dropped", line_no, e.user_id,
                                           e.video_id, e.view_ts));
        continue;
      }
      ++rep.records;
      by_user[e.user_id].push_back(std::move(e));
    } catch (const json::exception& ex) {
      if (options.strict) throw ParseError(line_no, ex.what());
      ++rep.skipped_lines;
      rep.warnings.push_back(fmt::format("line {}: {}", line_no, ex.what()));
    } catch (const ParseError& ex) {
      if (options.strict) throw;
      ++rep.skipped_lines;
      rep.warnings.push_back(ex.what());
    }
  }

  Dataset ds;
  for (auto& [user, events] : by_user) {
    UserTimeline t;
    t.user_id = user;
    t.events = std::move(events);
    sort_events(t.events);
    refresh_follow_set(t);
    if (auto p = profiles.find(user); p != profiles.end()) {
      t.popular_interests = p->second.popular;
      t.declared_interests = p->second.declared;
    }
    ds.timelines.push_back(std::move(t));
  }
  return ds;
}

Dataset parse_traces_file(const std::string& path, const ParseOptions& options, ParseReport* report) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file: " + path);
  return parse_traces(in, options, report);
}

namespace {

void put_engagement(json& j, const char* flag, const char* ts_key, const Engagement& e) {
  j[flag] = e.active;
  if (e.active && e.ts) j[ts_key] = *e.ts;
}

}  // namespace

void write_traces(std::ostream& out, const Dataset& dataset) {
  out << kTraceHeader << '\n';
  for (const auto& t : dataset.timelines) {
    if (!t.popular_interests.empty() || !t.declared_interests.empty()) {
      json p;
      p["user_id"] = t.user_id;
      p["popular_interests"] = t.popular_interests;
      p["declared_interests"] = t.declared_interests;
      out << p.dump() << '\n';
    }
    for (const auto& e : t.events) {
      json j;
      j["user_id"] = e.user_id;
      j["video_id"] = e.video_id;
      j["creator_id"] = e.creator_id;
      j["hashtags"] = e.hashtags;
      j["view_ts"] = e.view_ts;
      j["video_duration_s"] = e.video_duration_s;
      j["watch_duration_s"] = e.watch_duration_s;
      put_engagement(j, "liked", "liked_ts", e.liked);
      put_engagement(j, "followed_creator", "followed_ts", e.followed_creator);
      put_engagement(j, "shared", "shared_ts", e.shared);
      put_engagement(j, "favorited", "favorited_ts", e.favorited);
      out << j.dump() << '\n';
    }
  }
}

void write_traces_file(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write trace file: " + path);
  write_traces(out, dataset);
}

UserTimeline take_prefix(const UserTimeline& timeline, std::size_t n) {
  if (n == 0) throw TraceError("prefix length must be positive");
  if (timeline.events.size() < n)
    throw InsufficientLengthError(fmt::format("user '{}' has {} events, fewer than the required {}",
                                              timeline.user_id, timeline.events.size(), n));
  UserTimeline out = timeline;
  out.events.resize(n);
  refresh_follow_set(out);
  return out;
}

Dataset take_prefix_all(const Dataset& dataset, std::size_t n, std::vector<std::string>* excluded) {
  if (n == 0) throw TraceError("prefix length must be positive");
  Dataset out;
  for (const auto& t : dataset.timelines) {
    if (t.events.size() < n) {
      if (excluded) excluded->push_back(t.user_id);
      continue;
    }
    out.timelines.push_back(take_prefix(t, n));
  }
  return out;
}

double watch_percentage(const RecommendationEvent& event) {
  if (!(event.video_duration_s > 0.0))
    throw TraceError(fmt::format("video '{}' has undefined duration", event.video_id));
  return event.watch_duration_s / event.video_duration_s;
}

}  // namespace feedaudit
