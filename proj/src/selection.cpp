#include "feedaudit/selection.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "feedaudit/metrics.hpp"

namespace feedaudit {

double signal_noise_ratio(double real_mean, double randomized_mean) {
  if (real_mean <= 0.0) return 0.0;
  if (randomized_mean <= 0.0) return kInfiniteSnr;
  return real_mean / randomized_mean;
}

SelectionEvidence::SelectionEvidence(const Dataset& real, FeatureSet candidates, const SelectionOptions& options)
    : candidates_(std::move(candidates)), window_(options.window), warmup_(options.warmup.value_or(options.window)) {
  if (candidates_.empty()) throw SelectionError("no candidate features");
  if (real.user_count() == 0) throw SelectionError("no timelines to select features on");
  if (warmup_ >= real.timelines.front().size())
    throw SelectionError(fmt::format("warmup {} leaves no indices in timelines of length {}", warmup_,
                                     real.timelines.front().size()));
  real_ = label_dataset(encode(real), candidates_);
  RandomizationOptions r{options.trials, options.seed, options.interest_radius};
  randomized_ = randomized_labels(real, candidates_, r);
}

double SelectionEvidence::real_mean(std::uint64_t subset) const {
  return mean_after(mean_exploit_curve(real_, window_, subset).mean, warmup_);
}

double SelectionEvidence::randomized_mean(std::uint64_t subset) const {
  return mean_after(floor_from_labels(randomized_, window_, subset).curve.mean, warmup_);
}

double SelectionEvidence::snr(std::uint64_t subset) const {
  return signal_noise_ratio(real_mean(subset), randomized_mean(subset));
}

double feature_snr(const FeatureSpec& feature, const Dataset& real, const NoiseFloor& floor, std::size_t window,
                   std::size_t warmup) {
  FeatureSet single;
  single.add(feature);
  const auto labels = label_dataset(encode(real), single);
  const auto curve = mean_exploit_curve(labels, window);
  if (warmup >= curve.size()) throw SelectionError("warmup must be shorter than the timelines");
  if (floor.curve.size() != curve.size()) throw SelectionError("noise floor and data differ in length");
  return signal_noise_ratio(mean_after(curve.mean, warmup), mean_after(floor.curve.mean, warmup));
}

SelectionReport rank_candidates(const SelectionEvidence& evidence, std::optional<double> tau) {
  const auto& cands = evidence.candidates();
  SelectionReport report;
  report.trials = evidence.trials();
  report.warmup = evidence.warmup();

  for (std::size_t k = 0; k < cands.size(); ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    CandidateScore s;
    s.name = cands[k].name;
    s.real_mean = evidence.real_mean(bit);
    s.randomized_mean = evidence.randomized_mean(bit);
    s.snr = signal_noise_ratio(s.real_mean, s.randomized_mean);
    report.candidates.push_back(s);
  }

  if (tau) {
    if (!(*tau > 0.0)) throw SelectionError("tau must be positive");
    report.tau = *tau;
  } else {
    double sum = 0, ss = 0;
    for (const auto& c : report.candidates) sum += c.randomized_mean;
    const double mu = sum / double(report.candidates.size());
    for (const auto& c : report.candidates) ss += (c.randomized_mean - mu) * (c.randomized_mean - mu);
    report.tau = mu + std::sqrt(ss / double(report.candidates.size()));
  }

  std::stable_sort(report.candidates.begin(), report.candidates.end(),
                   [](const CandidateScore& a, const CandidateScore& b) { return a.snr > b.snr; });
  for (auto& c : report.candidates) {
    c.retained = c.randomized_mean <= report.tau && c.snr > 0.0;
    if (c.retained) report.retained.push_back(c.name);
  }
  if (report.retained.empty())
    throw SelectionError(fmt::format("no feature has a randomized exploit fraction at or below tau = {}; "
                                     "try a larger tau",
                                     report.tau));
  report.retained_snr = evidence.snr(cands.mask_of(report.retained));
  report.final_set = report.retained;
  report.final_snr = report.retained_snr;
  return report;
}

void backward_eliminate(const SelectionEvidence& evidence, SelectionReport& report, double epsilon) {
  if (report.retained.size() < 2) throw SelectionError("backward elimination needs at least two retained features");
  const auto& cands = evidence.candidates();
  report.epsilon = epsilon;
  report.trace.clear();
  report.round_sizes.clear();

  std::vector<std::string> current = report.retained;
  double current_snr = evidence.snr(cands.mask_of(current));
  report.stop_reason = "single feature left";
  while (current.size() > 1) {
    std::vector<double> subset_snr(current.size());
    const auto n = static_cast<std::ptrdiff_t>(current.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      std::vector<std::string> subset;
      for (std::ptrdiff_t j = 0; j < n; ++j)
        if (j != k) subset.push_back(current[static_cast<std::size_t>(j)]);
      subset_snr[static_cast<std::size_t>(k)] = evidence.snr(cands.mask_of(subset));
    }
    // later (lower-ranked) features win ties
    std::size_t best = 0;
    for (std::size_t k = 1; k < subset_snr.size(); ++k)
      if (subset_snr[k] >= subset_snr[best]) best = k;
    const double best_snr = subset_snr[best];
    report.round_sizes.push_back(current.size());
    const bool improves = std::isinf(best_snr) ? !std::isinf(current_snr) : best_snr >= current_snr * (1.0 + epsilon);
    if (!improves) {
      report.stop_reason = fmt::format("no removal improves SNR by at least {}", epsilon);
      break;
    }
    report.trace.push_back({current[best], best_snr, current.size()});
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
    current_snr = best_snr;
  }
  report.final_set = current;
  report.final_snr = current_snr;
}

SelectionReport select_features(const Dataset& real, const FeatureSet& candidates, const SelectionOptions& options) {
  SelectionEvidence evidence(real, candidates, options);
  auto report = rank_candidates(evidence, options.tau);
  report.seed = options.seed;
  report.epsilon = options.epsilon;
  if (report.retained.size() >= 2) {
    backward_eliminate(evidence, report, options.epsilon);
  } else {
    report.stop_reason = "single feature retained";
  }
  return report;
}

}  // namespace feedaudit
