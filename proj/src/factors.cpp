#include "feedaudit/factors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

namespace feedaudit {

FactorVector compute_factors(const UserTimeline& timeline) {
  if (timeline.events.empty()) throw StatsError(fmt::format("user '{}' has no events", timeline.user_id));
  FactorVector f;
  double watch_sum = 0;
  std::size_t with_duration = 0, skips = 0, likes = 0, from_following = 0;

  // creator -> earliest time the follow became effective (or the index)
  struct FollowMark {
    std::optional<Timestamp> ts;
    std::size_t index;
  };
  std::unordered_map<std::string, std::vector<FollowMark>> follows;
  for (std::size_t j = 0; j < timeline.events.size(); ++j) {
    const auto& e = timeline.events[j];
    if (e.followed_creator.active) follows[e.creator_id].push_back({e.followed_creator.ts, j});
  }

  for (std::size_t i = 0; i < timeline.events.size(); ++i) {
    const auto& e = timeline.events[i];
    if (e.video_duration_s > 0.0) {
      watch_sum += std::min(e.watch_duration_s / e.video_duration_s, 1.0);
      ++with_duration;
    }
    if (e.watch_duration_s < kEarlySkipSeconds) ++skips;
    if (e.liked.active) ++likes;
    if (auto it = follows.find(e.creator_id); it != follows.end()) {
      const bool before = std::any_of(it->second.begin(), it->second.end(), [&](const FollowMark& m) {
        return m.ts ? *m.ts < e.view_ts : m.index < i;
      });
      if (before) ++from_following;
    }
  }
  const double n = double(timeline.events.size());
  if (with_duration) f.watch_pct = watch_sum / double(with_duration);
  f.early_skip_rate = double(skips) / n;
  f.fraction_liked = double(likes) / n;
  f.fraction_from_following = double(from_following) / n;
  return f;
}

QuartileGroups quartile_groups(const std::map<std::string, double>& per_user_exploit,
                               std::optional<std::size_t> group_size) {
  const std::size_t m = per_user_exploit.size();
  if (m < 4) throw StatsError(fmt::format("quartile grouping needs at least 4 users, got {}", m));
  const std::size_t g = group_size.value_or((m + 3) / 4);
  if (g == 0 || 2 * g > m) throw StatsError(fmt::format("group size {} does not fit {} users", g, m));

  std::vector<std::pair<std::string, double>> users(per_user_exploit.begin(), per_user_exploit.end());
  std::sort(users.begin(), users.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  QuartileGroups out;
  for (std::size_t k = 0; k < g; ++k) out.bottom.push_back(users[k].first);
  for (std::size_t k = 0; k < g; ++k) out.top.push_back(users[m - 1 - k].first);
  return out;
}

Impact impact_level(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw StatsError(fmt::format("p value {} outside [0, 1]", p));
  if (p < 1e-3) return Impact::High;
  if (p < 0.05) return Impact::Medium;
  return Impact::Low;
}

std::string_view to_string(Impact impact) {
  switch (impact) {
    case Impact::High:
      return "High";
    case Impact::Medium:
      return "Medium";
    case Impact::Low:
      return "Low";
  }
  return "?";
}

namespace {

std::optional<double> factor_value(const FactorVector& f, std::size_t k) {
  switch (k) {
    case 0:
      return f.watch_pct;
    case 1:
      return f.early_skip_rate;
    case 2:
      return f.fraction_liked;
    default:
      return f.fraction_from_following;
  }
}

}  // namespace

FactorReport factor_report(const Dataset& dataset, const std::map<std::string, double>& per_user_exploit,
                           TTestVariant variant, std::optional<std::size_t> group_size) {
  FactorReport report;
  report.variant = variant;
  std::map<std::string, FactorVector> factors;
  for (const auto& t : dataset.timelines) {
    if (!per_user_exploit.count(t.user_id))
      throw StatsError(fmt::format("no exploit fraction for user '{}'", t.user_id));
    auto f = compute_factors(t);
    factors.emplace(t.user_id, f);
    report.per_user.emplace_back(t.user_id, f);
  }
  report.groups = quartile_groups(per_user_exploit, group_size);
  report.top_size = report.groups.top.size();
  report.bottom_size = report.groups.bottom.size();

  for (std::size_t k = 0; k < kFactorCount; ++k) {
    std::vector<double> top, bottom;
    for (const auto& u : report.groups.top)
      if (auto v = factor_value(factors.at(u), k)) top.push_back(*v);
    for (const auto& u : report.groups.bottom)
      if (auto v = factor_value(factors.at(u), k)) bottom.push_back(*v);
    FactorRow row;
    row.factor = std::string(kFactorNames[k]);
    if (top.size() < 2 || bottom.size() < 2) {
      row.bottom_mean = bottom.empty() ? std::nan("") : mean(bottom);
      row.top_mean = top.empty() ? std::nan("") : mean(top);
      row.test.p = 1.0;
      row.test.t = std::nan("");
      row.impact = Impact::Low;
    } else {
      row.bottom_mean = mean(bottom);
      row.top_mean = mean(top);
      row.test = t_test(top, bottom, variant);
      row.impact = impact_level(row.test.p);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace feedaudit
