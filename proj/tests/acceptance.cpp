// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "feedaudit/baselines.hpp"
#include "feedaudit/factors.hpp"
#include "feedaudit/features.hpp"
#include "feedaudit/labeling.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/selection.hpp"
#include "feedaudit/simulator.hpp"
#include "feedaudit/stats.hpp"
#include "feedaudit/trace.hpp"

namespace fs = std::filesystem;
using namespace feedaudit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr std::size_t kW = 50;
constexpr std::size_t kN = 1000;

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

double average(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double sample_sd(const std::vector<double>& v) {
  const double m = average(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1));
}

double pooled_sd(const std::vector<double>& a, const std::vector<double>& b) {
  const double va = sample_sd(a), vb = sample_sd(b);
  return std::sqrt((va * va + vb * vb) / 2.0);
}

Cohort make_cohort(const std::vector<std::string>& policies, std::size_t per_policy, double q,
                   std::array<double, kExploitBasisCount> weights, std::uint64_t seed) {
  PlatformConfig p;
  p.exploit_rate = q;
  p.basis_weights = weights;
  p.seed = seed * 7919 + 13;
  std::vector<BotPolicy> pol;
  for (const auto& name : policies) pol.push_back(bot_policy(name));
  return generate_cohort(pol, p, per_policy, kN, seed);
}

constexpr std::array<double, kExploitBasisCount> kDefaultWeights = {0.4, 0.2, 0.2, 0.2};
constexpr std::array<double, kExploitBasisCount> kLikedOnly = {1.0, 0.0, 0.0, 0.0};

// Reference bot policies that never follow; their activation rates do not drift
// with history length.
const std::vector<std::string> kFollowFree = {"bot1", "bot2", "bot3"};

FeatureSet default_set() { return make_feature_set(default_feature_names(), kW); }

std::vector<double> user_means(const Dataset& d, const FeatureSet& f) {
  return post_warmup_user_means(label_dataset(d, f), kW, kW);
}

// ---------------------------------------------------------------------------
// 1. Labeling oracle equivalence
// ---------------------------------------------------------------------------

bool gate_open(const FeatureSpec& spec, const RecommendationEvent& prior, Timestamp reference) {
  auto engaged = [reference](const Engagement& e) { return e.active && (!e.ts || *e.ts < reference); };
  switch (spec.gate) {
    case Gate::None:
      return true;
    case Gate::Liked:
      return engaged(prior.liked);
    case Gate::WatchedToEnd:
      return prior.video_duration_s > 0 && prior.watch_duration_s >= prior.video_duration_s;
    case Gate::Shared:
      return engaged(prior.shared);
    case Gate::Favorited:
      return engaged(prior.favorited);
    case Gate::Followed:
      return engaged(prior.followed_creator);
  }
  return false;
}

bool naive_fires(const FeatureSpec& spec, const UserTimeline& t, std::size_t i) {
  const auto& e = t.events[i - 1];
  auto common = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    for (const auto& x : a)
      for (const auto& y : b)
        if (x == y) return true;
    return false;
  };
  if (spec.basis == MatchBasis::InterestSet)
    return common(e.hashtags,
                  spec.interests == InterestSource::Popular ? t.popular_interests : t.declared_interests);
  std::size_t lo = 1;
  if (spec.scope == Scope::Local) lo = i > *spec.window ? i - *spec.window : 1;
  for (std::size_t j = lo; j < i; ++j) {
    const auto& r = t.events[j - 1];
    if (!gate_open(spec, r, e.view_ts)) continue;
    if (spec.basis == MatchBasis::Hashtag ? common(r.hashtags, e.hashtags) : r.creator_id == e.creator_id)
      return true;
  }
  return false;
}

Outcome criterion_oracle() {
  std::mt19937_64 rng(20240101);
  const std::vector<std::string> creators = {"ca", "cb"};
  const std::vector<std::string> tags = {"#x", "#y", "#z"};
  auto coin = [&rng](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  Dataset d;
  for (int u = 0; u < 500; ++u) {
    UserTimeline t;
    t.user_id = fmt::format("u{:03d}", u);
    const int len = pick(1, 8);
    Timestamp ts = 1000;
    for (int k = 0; k < len; ++k) {
      RecommendationEvent e;
      e.user_id = t.user_id;
      e.video_id = fmt::format("v{}", k);
      e.creator_id = creators[pick(0, 1)];
      for (const auto& tag : tags)
        if (coin(0.4)) e.hashtags.push_back(tag);
      ts += pick(1, 4);
      e.view_ts = ts;
      e.video_duration_s = 10;
      e.watch_duration_s = std::array<double, 3>{3, 10, 12}[pick(0, 2)];
      auto engagement = [&]() {
        Engagement g;
        g.active = coin(0.45);
        if (g.active && coin(0.6)) g.ts = ts + pick(-2, 8);
        return g;
      };
      e.liked = engagement();
      e.shared = engagement();
      e.favorited = engagement();
      e.followed_creator = engagement();
      t.events.push_back(e);
    }
    for (const auto& tag : tags)
      if (coin(0.3)) t.popular_interests.push_back(tag);
    refresh_follow_set(t);
    d.timelines.push_back(std::move(t));
  }

  std::size_t mismatches = 0, checks = 0;
  for (std::size_t window : {std::size_t{1}, std::size_t{3}, kW}) {
    const FeatureSet all = catalogue_feature_set(window);
    const FeatureSet seven = make_feature_set(default_feature_names(), window);
    const auto encoded = encode(d);
    const auto labels_all = label_dataset(encoded, all);
    const auto labels_seven = label_dataset(encoded, seven);
    for (std::size_t u = 0; u < d.user_count(); ++u) {
      const auto& t = d.timelines[u];
      for (std::size_t i = 1; i <= t.size(); ++i) {
        for (std::size_t k = 0; k < all.size(); ++k) {
          const bool expect = naive_fires(all[k], t, i);
          const bool got = (labels_all.timelines[u].fired[i - 1] >> k) & 1U;
          mismatches += expect != got;
          ++checks;
        }
        bool joint = false;
        for (const auto& f : seven) joint = joint || naive_fires(f, t, i);
        mismatches += joint != (labels_seven.timelines[u].label(i) == Label::Exploit);
        ++checks;
      }
    }
  }
  return {mismatches == 0, fmt::format("{} mismatches in {} checks (500 timelines, W in {{1, 3, 50}})",
                                       mismatches, checks)};
}

// ---------------------------------------------------------------------------
// 2. Engaged > passive > randomized floor
// ---------------------------------------------------------------------------

Outcome criterion_ordering() {
  const Cohort engaged = make_cohort({"bot4"}, 20, 0.5, kDefaultWeights, 101);
  const Cohort passive = make_cohort({"bot1"}, 20, 0.5, kDefaultWeights, 202);
  const FeatureSet f = default_set();
  const auto e = user_means(engaged.dataset, f);
  const auto p = user_means(passive.dataset, f);

  Dataset pooled = engaged.dataset;
  for (const auto& t : passive.dataset.timelines) pooled.timelines.push_back(t);
  std::sort(pooled.timelines.begin(), pooled.timelines.end(),
            [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  auto floor_of = [&f](const Dataset& d, std::uint64_t seed) {
    std::vector<double> out;
    for (const auto& trial : randomized_labels(d, f, {10, seed, std::nullopt})) {
      const auto m = post_warmup_user_means(trial, kW, kW);
      out.insert(out.end(), m.begin(), m.end());
    }
    return out;
  };
  const std::vector<std::pair<std::string, std::vector<double>>> floors = {
      {"engaged", floor_of(engaged.dataset, 301)},
      {"passive", floor_of(passive.dataset, 302)},
      {"pooled", floor_of(pooled, 303)}};

  const double me = average(e), mp = average(p);
  const double s1 = pooled_sd(e, p);
  bool pass = me - mp > 2 * s1;
  std::string detail = fmt::format("engaged {:.4f} passive {:.4f} (gap {:.4f} > 2*{:.4f})", me, mp, me - mp, s1);
  for (const auto& [name, fl] : floors) {
    const double mf = average(fl), s2 = pooled_sd(p, fl);
    pass = pass && mp - mf > 2 * s2;
    detail += fmt::format("; {} floor {:.4f} (gap {:.4f} > 2*{:.4f})", name, mf, mp - mf, s2);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 3. Warm-up ramp
// ---------------------------------------------------------------------------

Outcome criterion_ramp() {
  const Cohort c = make_cohort(kFollowFree, 7, 0.5, kDefaultWeights, 404);
  const auto curve = mean_exploit_curve(label_dataset(c.dataset, default_set()), kW);
  const double early = mean_between(curve.mean, 1, kW);
  const double late = mean_between(curve.mean, 2 * kW + 1, kN);
  const double drop = 1.0 - early / late;
  return {early <= 0.9 * late,
          fmt::format("mean over [1, W] {:.4f}, over (2W, N] {:.4f}; relative deficit {:.1f}% >= 10%", early, late,
                      100 * drop)};
}

// ---------------------------------------------------------------------------
// 4. Noise-floor flatness
// ---------------------------------------------------------------------------

Outcome criterion_flat_floor() {
  const Cohort c = make_cohort(kFollowFree, 7, 0.5, kDefaultWeights, 505);
  const NoiseFloor floor = noise_floor(c.dataset, default_set(), kW, {10, 606, std::nullopt});
  const double level = mean_after(floor.curve.mean, 2 * kW);
  std::size_t violations = 0;
  double worst = 0;
  for (std::size_t i = 2 * kW + 1; i <= kN; ++i) {
    const double dev = std::abs(floor.curve.mean[i - 1] - level);
    const double sd = floor.trial_stddev[i - 1];
    if (!(dev < 3 * sd)) ++violations;
    if (sd > 0) worst = std::max(worst, dev / sd);
  }
  return {floor.trials == 10 && violations == 0,
          fmt::format("trials {}, floor level {:.4f}, max |dev|/sd {:.3f}, {} indices at or beyond 3 sd",
                      floor.trials, level, worst, violations)};
}

// ---------------------------------------------------------------------------
// 5. Personalization-score separation and symmetry
// ---------------------------------------------------------------------------

Outcome criterion_rho() {
  const Cohort c = make_cohort({"bot4"}, 20, 0.5, kDefaultWeights, 707);
  const FeatureSet f = default_set();
  const auto encoded = encode(c.dataset);
  const auto labels = label_dataset(encoded, f);
  PersonalizationScorer scorer(encoded, f, labels);
  double se = 0, sx = 0;
  std::size_t ne = 0, nx = 0;
  for (const auto& s : scorer.score_all()) {
    if (s.label == Label::Exploit) {
      se += s.rho;
      ++ne;
    } else {
      sx += s.rho;
      ++nx;
    }
  }
  const double gap = se / double(ne) - sx / double(nx);

  constexpr std::size_t m = 20;
  Dataset same;
  for (std::size_t u = 0; u < m; ++u) {
    UserTimeline t = c.dataset.timelines.front();
    t.events.resize(200);
    t.user_id = fmt::format("twin{:02d}", u);
    for (auto& e : t.events) e.user_id = t.user_id;
    same.timelines.push_back(std::move(t));
  }
  const auto enc2 = encode(same);
  const auto lab2 = label_dataset(enc2, f);
  PersonalizationScorer scorer2(enc2, f, lab2);
  const double expected = 1.0 - double(m - 1) / double(m);
  std::size_t off = 0;
  for (const auto& s : scorer2.score_all())
    if (s.rho != expected) ++off;

  return {gap >= 0.3 && off == 0,
          fmt::format("mean rho exploit {:.4f} vs explore {:.4f} (gap {:.4f} >= 0.3); identical timelines: {} items "
                      "differ from 1 - (m-1)/m",
                      se / double(ne), sx / double(nx), gap, off)};
}

// ---------------------------------------------------------------------------
// 6. Recall on planted ground truth, and q = 0 against the floor
// ---------------------------------------------------------------------------

Outcome criterion_recall() {
  const Cohort c = make_cohort({"bot4"}, 20, 0.5, kLikedOnly, 808);
  const FeatureSet f = default_set();
  const auto labels = label_dataset(c.dataset, f);
  std::size_t planted = 0, hit = 0;
  for (std::size_t u = 0; u < c.truth.size(); ++u)
    for (std::size_t i = 1; i <= c.truth[u].size(); ++i) {
      const auto& t = c.truth[u][i - 1];
      if (!t.exploit || t.basis != ExploitBasis::LikedHashtag || !t.basis_index) continue;
      if (*t.basis_index + kW < i) continue;
      ++planted;
      hit += labels.timelines[u].label(i) == Label::Exploit;
    }
  const double recall = double(hit) / double(planted);

  const Cohort zero = make_cohort({"bot4"}, 20, 0.0, kLikedOnly, 909);
  const auto real = user_means(zero.dataset, f);
  std::vector<double> floor;
  for (const auto& trial : randomized_labels(zero.dataset, f, {10, 910, std::nullopt})) {
    const auto m = post_warmup_user_means(trial, kW, kW);
    floor.insert(floor.end(), m.begin(), m.end());
  }
  const double diff = std::abs(average(real) - average(floor));
  const double sd = pooled_sd(real, floor);
  return {recall >= 0.9 && diff < 3 * sd,
          fmt::format("recall {:.4f} over {} planted items (>= 0.90); q = 0: |labeled - floor| = {:.5f} < 3*{:.5f}",
                      recall, planted, diff, sd)};
}

// ---------------------------------------------------------------------------
// 7. Feature-selection recovery
// ---------------------------------------------------------------------------

bool same_report(const SelectionReport& a, const SelectionReport& b) {
  if (a.candidates.size() != b.candidates.size() || a.tau != b.tau || a.final_set != b.final_set ||
      a.retained != b.retained || a.trace.size() != b.trace.size())
    return false;
  for (std::size_t k = 0; k < a.candidates.size(); ++k) {
    const auto &x = a.candidates[k], &y = b.candidates[k];
    if (x.name != y.name || x.real_mean != y.real_mean || x.randomized_mean != y.randomized_mean) return false;
  }
  for (std::size_t k = 0; k < a.trace.size(); ++k)
    if (a.trace[k].removed != b.trace[k].removed || a.trace[k].subset_snr != b.trace[k].subset_snr) return false;
  return true;
}

Outcome criterion_selection() {
  const Cohort c = make_cohort({"bot4"}, 20, 0.5, kLikedOnly, 1111);
  SelectionOptions o;
  o.window = kW;
  o.trials = 10;
  o.seed = 1212;
  const FeatureSet candidates = catalogue_feature_set(kW);
  std::vector<SelectionReport> runs;
  for (int r = 0; r < 3; ++r) runs.push_back(select_features(c.dataset, candidates, o));
  const auto& rep = runs.front();

  auto rank_of = [&rep](const std::string& name) {
    for (std::size_t k = 0; k < rep.candidates.size(); ++k)
      if (rep.candidates[k].name == name) return k;
    return rep.candidates.size();
  };
  bool above = true;
  for (const auto& cand : rep.candidates)
    if (cand.name.rfind("shares_", 0) == 0) above = above && rank_of("likes_hashtag_local") < rank_of(cand.name);
  bool excluded = true;
  for (const auto& cand : rep.candidates)
    if (cand.randomized_mean > rep.tau)
      excluded = excluded && std::find(rep.final_set.begin(), rep.final_set.end(), cand.name) == rep.final_set.end();
  const bool deterministic = same_report(runs[0], runs[1]) && same_report(runs[0], runs[2]);
  auto in_final = [&rep](std::string_view name) {
    return std::find(rep.final_set.begin(), rep.final_set.end(), name) != rep.final_set.end();
  };
  bool no_shares = true;
  for (const auto& n : rep.final_set) no_shares = no_shares && n.rfind("shares_", 0) != 0;
  const bool likes_kept = in_final("likes_hashtag_local") || in_final("likes_creator_local");

  std::string final_set;
  for (const auto& n : rep.final_set) final_set += (final_set.empty() ? "" : ",") + n;
  return {above && excluded && deterministic && no_shares && likes_kept,
          fmt::format("likes_hashtag_local rank {} above shares_*: {}; features above tau excluded: {}; likes kept, "
                      "shares_* dropped: {}; 3 runs identical: {}; final {{{}}}",
                      rank_of("likes_hashtag_local") + 1, above, excluded, no_shares && likes_kept, deterministic,
                      final_set)};
}

// ---------------------------------------------------------------------------
// 8. Statistics oracle
// ---------------------------------------------------------------------------

// Two-sided tail of Student's t by composite Simpson quadrature of the pdf.
double quadrature_p(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double a = 0, b = std::abs(t);
  const int n = 200000;
  const double h = (b - a) / n;
  double s = pdf(a) + pdf(b);
  for (int k = 1; k < n; ++k) s += pdf(a + k * h) * (k % 2 ? 4 : 2);
  return 1.0 - 2.0 * s * h / 3.0;
}

Outcome criterion_stats() {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {3, 4, 5, 6, 7};
  const auto r = t_test(a, b);
  const double oracle = quadrature_p(-2.0, 8.0);
  const bool t_ok = std::abs(r.t + 2.0) < 1e-9 && r.df == 8.0 && std::abs(r.p - oracle) < 1e-6;
  const bool impact_ok = impact_level(0.03) == Impact::Medium && impact_level(0.14) == Impact::Low &&
                         impact_level(1e-5) == Impact::High && impact_level(1e-14) == Impact::High;
  return {t_ok && impact_ok && std::abs(oracle - 0.0805) < 5e-5,
          fmt::format("t = {:.12f}, df = {}, p = {:.9f} (quadrature {:.9f}); impacts Medium/Low/High/High: {}", r.t,
                      r.df, r.p, oracle, impact_ok)};
}

// ---------------------------------------------------------------------------
// 9. Factor-impact ordering
// ---------------------------------------------------------------------------

Outcome criterion_factors() {
  // bot3 and bot5 share watch/skip probabilities; only bot5 likes.
  const Cohort c = make_cohort({"bot3", "bot5"}, 20, 0.5, kLikedOnly, 1313);
  const auto labels = label_dataset(c.dataset, default_set());
  const auto means = post_warmup_user_means(labels, kW, kW);
  std::map<std::string, double> per_user;
  for (std::size_t u = 0; u < labels.user_count(); ++u) per_user[labels.timelines[u].user_id] = means[u];
  const auto rep = factor_report(c.dataset, per_user);
  double p_liked = 1, p_skip = 0;
  for (const auto& row : rep.rows) {
    if (row.factor == "Fraction Liked") p_liked = row.test.p;
    if (row.factor == "Early Skip Rate") p_skip = row.test.p;
  }
  return {p_liked < p_skip, fmt::format("p(fraction_liked) = {:.3g} < p(early_skip_rate) = {:.3g}", p_liked, p_skip)};
}

// ---------------------------------------------------------------------------
// 10. Byte-identical bundles across runs and thread counts
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt::format("feedaudit-acceptance-{}", ::getpid());
  fs::create_directories(dir);
  PlatformConfig p;
  p.seed = 77;
  const Cohort c = generate_cohort({bot_policy("bot4"), bot_policy("bot1"), bot_policy("bot5")}, p, 4, 300, 1414);
  write_traces_file((dir / "traces.jsonl").string(), c.dataset);
  {
    std::ofstream cfg(dir / "audit.cfg");
    cfg << "N = 300\nW = 30\nX = 10\nY = 10\ntrials = 4\nselect = true\nmin_count = 3\nembedding_dim = 16\n"
           "embedding_epochs = 2\nscore_sample_size = 6\nseed = 99\n";
  }
  std::vector<std::string> bundles;
  const std::vector<int> threads = {1, 4, 1, 3};
  for (std::size_t r = 0; r < threads.size(); ++r) {
    const fs::path out = dir / fmt::format("bundle{}", r);
    const std::string cmd = fmt::format("\"{}\" report \"{}\" --out \"{}\" --config \"{}\" --threads {}",
                                        FEEDAUDIT_CLI, (dir / "traces.jsonl").string(), out.string(),
                                        (dir / "audit.cfg").string(), threads[r]);
    if (std::system(cmd.c_str()) != 0) return {false, fmt::format("command failed: {}", cmd)};
    std::string all;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(out)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
    bundles.push_back(std::move(all));
  }
  std::size_t differing = 0;
  for (std::size_t r = 1; r < bundles.size(); ++r) differing += bundles[r] != bundles[0];
  fs::remove_all(dir);
  return {differing == 0 && !bundles[0].empty(),
          fmt::format("{} runs at threads {{1, 4, 1, 3}}, {} bundles differ from the first, {} bytes", bundles.size(),
                      differing, bundles[0].size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"labeling matches exhaustive oracle", criterion_oracle},
      {"engaged > passive > randomized floor", criterion_ordering},
      {"warm-up ramp", criterion_ramp},
      {"noise floor flat after 2W", criterion_flat_floor},
      {"personalization score separation", criterion_rho},
      {"planted exploit recall", criterion_recall},
      {"feature selection recovery", criterion_selection},
      {"t-test and impact levels", criterion_stats},
      {"factor impact ordering", criterion_factors},
      {"deterministic report bundle", criterion_determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << fmt::format("{} criterion {:>2}: {} | {} ({:.1f}s)", o.pass ? "PASS" : "FAIL", k + 1,
                             criteria[k].first, o.detail, secs)
              << std::endl;
    failures += !o.pass;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failures, criteria.size()) << std::endl;
  return failures == 0 ? 0 : 1;
}
