#include "feedaudit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "feedaudit/rng.hpp"

namespace feedaudit {

void validate(const BotPolicy& policy) {
  for (double p : {policy.p_watch, policy.p_skip, policy.p_like, policy.p_follow})
    if (!(p >= 0.0 && p <= 1.0)) throw SimulationError(fmt::format("policy '{}': probability outside [0, 1]", policy.name));
  if (std::abs(policy.p_watch + policy.p_skip - 1.0) > 1e-9)
    throw SimulationError(fmt::format("policy '{}': watch and skip probabilities must sum to 1", policy.name));
}

const std::vector<BotPolicy>& reference_bot_policies() {
  static const std::vector<BotPolicy> policies = {
      {"bot1", 0.0, 1.0, 0.0, 0.0}, {"bot2", 1.0, 0.0, 0.0, 0.0}, {"bot3", 0.5, 0.5, 0.0, 0.0},
      {"bot4", 1.0, 0.0, 0.5, 0.5}, {"bot5", 0.5, 0.5, 0.5, 0.5},
  };
  return policies;
}

BotPolicy bot_policy(std::string_view name) {
  for (const auto& p : reference_bot_policies())
    if (p.name == name) return p;
  throw SimulationError(fmt::format("unknown bot policy '{}'", name));
}

std::string_view to_string(ExploitBasis b) {
  switch (b) {
    case ExploitBasis::LikedHashtag:
      return "liked_hashtag";
    case ExploitBasis::FollowedCreator:
      return "followed_creator";
    case ExploitBasis::WatchedHashtag:
      return "watched_hashtag";
    case ExploitBasis::ViewedCreator:
      return "viewed_creator";
  }
  return "?";
}

void validate(const PlatformConfig& c) {
  if (!(c.exploit_rate >= 0.0 && c.exploit_rate <= 1.0)) throw SimulationError("exploit_rate must lie in [0, 1]");
  if (c.creators == 0 || c.topics == 0) throw SimulationError("content pool must have creators and topics");
  if (c.min_tags_per_video == 0 || c.min_tags_per_video > c.max_tags_per_video ||
      c.max_tags_per_video > c.tags_per_topic)
    throw SimulationError("need 1 <= min_tags_per_video <= max_tags_per_video <= tags_per_topic");
  double sum = 0;
  for (double w : c.basis_weights) {
    if (w < 0.0) throw SimulationError("basis weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw SimulationError("basis weights must sum to 1");
  if (c.lookback == 0) throw SimulationError("lookback must be positive");
  if (!(c.min_video_s > 0.0 && c.min_video_s <= c.max_video_s)) throw SimulationError("bad video duration range");
}

namespace {

struct Item {
  std::size_t creator = 0;
  std::size_t topic = 0;
  std::vector<std::size_t> tag_slots;  // indices within the topic
};

class Platform {
 public:
  explicit Platform(const PlatformConfig& c) : c_(c) {}

  std::size_t home_topic(std::size_t creator) const {
    return static_cast<std::size_t>(derive_seed(c_.seed, "creator-topic", creator) % c_.topics);
  }

  std::string tag_name(std::size_t topic, std::size_t slot) const { return fmt::format("#t{}_{}", topic, slot); }

  /// Draws a tag set from `topic`, optionally forcing one slot in.
  std::vector<std::size_t> draw_tags(Rng& rng, std::optional<std::size_t> forced) const {
    const std::size_t count =
        c_.min_tags_per_video + uniform_below(rng, c_.max_tags_per_video - c_.min_tags_per_video + 1);
    std::vector<std::size_t> slots(c_.tags_per_topic);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    if (forced) std::swap(slots[0], slots[*forced]);
    const std::size_t start = forced ? 1 : 0;
    for (std::size_t k = start; k < count; ++k) {
      auto j = k + static_cast<std::size_t>(uniform_below(rng, slots.size() - k));
      std::swap(slots[k], slots[j]);
    }
    slots.resize(count);
    std::sort(slots.begin(), slots.end());
    return slots;
  }

  Item explore(Rng& rng) const {
    Item it;
    it.creator = static_cast<std::size_t>(uniform_below(rng, c_.creators));
    it.topic = home_topic(it.creator);
    it.tag_slots = draw_tags(rng, std::nullopt);
    return it;
  }

 private:
  const PlatformConfig& c_;
};

bool qualifies(ExploitBasis basis, const RecommendationEvent& e) {
  switch (basis) {
    case ExploitBasis::LikedHashtag:
      return e.liked.active;
    case ExploitBasis::FollowedCreator:
      return e.followed_creator.active;
    case ExploitBasis::WatchedHashtag:
      return watched_to_end(e);
    case ExploitBasis::ViewedCreator:
      return true;
  }
  return false;
}

}  // namespace

BotRun run_bot(const BotPolicy& policy, const PlatformConfig& platform, std::size_t steps, std::uint64_t seed,
               const std::string& user_id) {
  validate(policy);
  validate(platform);
  if (steps == 0) throw SimulationError("steps must be at least 1");

  const Platform pool(platform);
  Rng rng(seed);
  BotRun run;
  run.timeline.user_id = user_id;
  run.timeline.events.reserve(steps);
  run.truth.reserve(steps);
  std::vector<Item> items;
  items.reserve(steps);

  Timestamp now = platform.start_ts;
  for (std::size_t step = 0; step < steps; ++step) {
    PlantedLabel truth;
    std::optional<Item> item;

    if (bernoulli(rng, platform.exploit_rate)) {
      // per basis: sources within the lookback, else anywhere earlier
      std::array<std::vector<std::size_t>, kExploitBasisCount> sources;
      double total = 0;
      const std::size_t recent = step > platform.lookback ? step - platform.lookback : 0;
      for (std::size_t b = 0; b < kExploitBasisCount; ++b) {
        if (platform.basis_weights[b] <= 0) continue;
        const auto basis = static_cast<ExploitBasis>(b);
        for (std::size_t j = recent; j < step; ++j)
          if (qualifies(basis, run.timeline.events[j])) sources[b].push_back(j);
        if (sources[b].empty())
          for (std::size_t j = 0; j < recent; ++j)
            if (qualifies(basis, run.timeline.events[j])) sources[b].push_back(j);
        if (!sources[b].empty()) total += platform.basis_weights[b];
      }
      ExploitBasis basis = ExploitBasis::LikedHashtag;
      if (total > 0) {
        const double r = uniform01(rng) * total;
        double acc = 0;
        std::size_t pick = kExploitBasisCount;
        for (std::size_t b = 0; b < kExploitBasisCount; ++b) {
          if (sources[b].empty()) continue;
          pick = b;
          acc += platform.basis_weights[b];
          if (r < acc) break;
        }
        basis = static_cast<ExploitBasis>(pick);
      }
      const auto& candidates = sources[static_cast<std::size_t>(basis)];
      if (candidates.empty()) {
        truth.fallback = true;
      } else {
        const std::size_t src = candidates[uniform_below(rng, candidates.size())];
        const Item& source = items[src];
        Item it;
        switch (basis) {
          case ExploitBasis::LikedHashtag:
          case ExploitBasis::WatchedHashtag: {
            const std::size_t keep = source.tag_slots[uniform_below(rng, source.tag_slots.size())];
            it.creator = static_cast<std::size_t>(uniform_below(rng, platform.creators));
            it.topic = source.topic;
            it.tag_slots = pool.draw_tags(rng, keep);
            break;
          }
          case ExploitBasis::FollowedCreator: {
            it.creator = source.creator;
            it.topic = source.topic;
            const std::size_t keep = source.tag_slots[uniform_below(rng, source.tag_slots.size())];
            it.tag_slots = pool.draw_tags(rng, keep);
            break;
          }
          case ExploitBasis::ViewedCreator:
            it.creator = source.creator;
            it.topic = pool.home_topic(it.creator);
            it.tag_slots = pool.draw_tags(rng, std::nullopt);
            break;
        }
        item = std::move(it);
        truth.exploit = true;
        truth.basis = basis;
        truth.basis_index = src + 1;
      }
    }
    if (!item) item = pool.explore(rng);

    RecommendationEvent e;
    e.user_id = user_id;
    e.video_id = fmt::format("{}-v{}", user_id, step + 1);
    e.creator_id = fmt::format("c{}", item->creator);
    for (auto s : item->tag_slots) e.hashtags.push_back(pool.tag_name(item->topic, s));
    normalize_hashtags(e.hashtags);
    e.view_ts = now;
    e.video_duration_s = uniform_real(rng, platform.min_video_s, platform.max_video_s);
    const bool watch = bernoulli(rng, policy.p_watch);
    // early exits land inside the sub-second skip band
    const double skip_dwell = uniform_real(rng, 0.2, 0.9);
    e.watch_duration_s = watch ? e.video_duration_s : skip_dwell;
    const auto engaged_at = now + static_cast<Timestamp>(e.watch_duration_s / 2.0);
    if (bernoulli(rng, policy.p_like)) e.liked = {true, engaged_at};
    if (bernoulli(rng, policy.p_follow)) e.followed_creator = {true, engaged_at};
    now += static_cast<Timestamp>(std::ceil(e.watch_duration_s)) + 1;

    items.push_back(std::move(*item));
    run.timeline.events.push_back(std::move(e));
    run.truth.push_back(truth);
  }
  refresh_follow_set(run.timeline);
  return run;
}

Cohort generate_cohort(const std::vector<BotPolicy>& policies, const PlatformConfig& platform,
                       std::size_t n_per_policy, std::size_t steps, std::uint64_t seed) {
  if (policies.empty() || n_per_policy == 0) throw SimulationError("cohort would be empty");
  if (steps == 0) throw SimulationError("steps must be at least 1");
  struct Job {
    std::string user_id;
    const BotPolicy* policy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : policies)
    for (std::size_t k = 0; k < n_per_policy; ++k) {
      auto id = fmt::format("{}-{:03d}", p.name, k + 1);
      jobs.push_back({id, &p, derive_seed(seed, "bot:" + id)});
    }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.user_id < b.user_id; });
  for (std::size_t k = 1; k < jobs.size(); ++k)
    if (jobs[k].user_id == jobs[k - 1].user_id) throw SimulationError("duplicate policy names in cohort");

  std::vector<BotRun> runs(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  for (const auto& j : jobs) validate(*j.policy);
  validate(platform);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    runs[k] = run_bot(*jobs[k].policy, platform, steps, jobs[k].seed, jobs[k].user_id);

  Cohort cohort;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    cohort.dataset.timelines.push_back(std::move(runs[k].timeline));
    cohort.truth.push_back(std::move(runs[k].truth));
    cohort.policy_of_user.push_back(jobs[k].policy->name);
  }
  return cohort;
}

void write_ground_truth(std::ostream& out, const Cohort& cohort) {
  out << kGroundTruthHeader << '\n';
  out << "user_id\tindex\tplanted\tbasis\tbasis_index\tfallback\n";
  for (std::size_t u = 0; u < cohort.dataset.user_count(); ++u) {
    const auto& id = cohort.dataset.timelines[u].user_id;
    for (std::size_t i = 0; i < cohort.truth[u].size(); ++i) {
      const auto& t = cohort.truth[u][i];
      out << id << '\t' << i + 1 << '\t' << (t.exploit ? "planted-exploit" : "planted-explore") << '\t'
          << (t.basis ? to_string(*t.basis) : "-") << '\t'
          << (t.basis_index ? std::to_string(*t.basis_index) : "-") << '\t' << (t.fallback ? 1 : 0) << '\n';
    }
  }
}

}  // namespace feedaudit
