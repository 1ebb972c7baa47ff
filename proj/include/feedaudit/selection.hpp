#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedaudit/baselines.hpp"
#include "feedaudit/features.hpp"
#include "feedaudit/labeling.hpp"
#include "feedaudit/trace.hpp"

namespace feedaudit {

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ratio of exploit fractions, real over randomized. Zero when the feature
/// never fires on real data; +infinity when it fires on real data only.
double signal_noise_ratio(double real_mean, double randomized_mean);

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

struct SelectionOptions {
  std::size_t window = 50;
  std::optional<std::size_t> warmup;  // defaults to window
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::optional<double> tau;  // defaults to mean + 1 sd of randomized means
  double epsilon = 0.01;      // minimum relative SNR gain to keep removing
  std::optional<std::size_t> interest_radius;
};

/// Fired masks of every candidate on the real data and on a shared set of
/// seeded randomized trials; any subset's exploit fractions derive from
/// these without relabeling.
class SelectionEvidence {
 public:
  SelectionEvidence(const Dataset& real, FeatureSet candidates, const SelectionOptions& options);

  const FeatureSet& candidates() const { return candidates_; }
  std::size_t warmup() const { return warmup_; }
  std::size_t window() const { return window_; }
  std::size_t trials() const { return randomized_.size(); }

  double real_mean(std::uint64_t subset) const;
  double randomized_mean(std::uint64_t subset) const;
  double snr(std::uint64_t subset) const;

 private:
  FeatureSet candidates_;
  std::size_t window_;
  std::size_t warmup_;
  LabeledDataset real_;
  std::vector<LabeledDataset> randomized_;
};

/// Single-feature SNR against a precomputed noise floor.
double feature_snr(const FeatureSpec& feature, const Dataset& real, const NoiseFloor& floor, std::size_t window,
                   std::size_t warmup);

struct CandidateScore {
  std::string name;
  double real_mean = 0.0;
  double randomized_mean = 0.0;
  double snr = 0.0;
  bool retained = false;
};

struct EliminationStep {
  std::string removed;
  double subset_snr = 0.0;
  std::size_t subsets_evaluated = 0;
};

struct SelectionReport {
  std::vector<CandidateScore> candidates;  // descending SNR
  double tau = 0.0;
  std::vector<std::string> retained;       // d' features, descending SNR
  double retained_snr = 0.0;
  std::vector<EliminationStep> trace;
  std::vector<std::size_t> round_sizes;    // subsets evaluated per round, including the last
  std::vector<std::string> final_set;
  double final_snr = 0.0;
  std::string stop_reason;
  std::size_t trials = 0;
  std::size_t warmup = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
};

/// Scores each candidate alone and retains those with randomized mean at or
/// below tau that carry any signal. Throws when nothing is retained.
SelectionReport rank_candidates(const SelectionEvidence& evidence, std::optional<double> tau);

/// Leave-one-out backward elimination over report.retained.
void backward_eliminate(const SelectionEvidence& evidence, SelectionReport& report, double epsilon);

SelectionReport select_features(const Dataset& real, const FeatureSet& candidates, const SelectionOptions& options);

}  // namespace feedaudit
