#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "feedaudit/features.hpp"
#include "feedaudit/labeling.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/trace.hpp"

namespace feedaudit {

/// Permutes, independently at every index, the items occupying that index
/// across all timelines. Items keep their engagement; the view timestamp
/// (and engagement times, shifted by the same offset) follow the slot.
/// Timelines must all have the same length.
Dataset index_randomize(const Dataset& dataset, std::uint64_t seed);

struct RandomizationOptions {
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  /// When set, popular interests are recomputed on each randomized dataset.
  std::optional<std::size_t> interest_radius;
};

/// Labels `trials` independently randomized copies of the dataset.
std::vector<LabeledDataset> randomized_labels(const Dataset& dataset, const FeatureSet& features,
                                              const RandomizationOptions& options);

struct NoiseFloor {
  MeanExploitCurve curve;             // mean over trials; stddev = mean cross-user stddev
  std::vector<double> trial_stddev;   // spread of the mean curve across trials
  std::vector<std::vector<double>> trial_means;
  std::size_t trials = 0;
};

NoiseFloor floor_from_labels(const std::vector<LabeledDataset>& randomized, std::size_t window,
                             std::uint64_t subset = kAllFeatures);

NoiseFloor noise_floor(const Dataset& dataset, const FeatureSet& features, std::size_t window,
                       const RandomizationOptions& options);

}  // namespace feedaudit
