#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedaudit/labeling.hpp"

namespace feedaudit {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kAllFeatures = ~std::uint64_t{0};

/// alpha[i - 1] is the user exploit fraction at 1-based index i.
struct ExploitSeries {
  std::string user_id;
  std::vector<double> alpha;
  std::size_t window = 0;
};

struct MeanExploitCurve {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation across users
  std::size_t users = 0;
  std::size_t window = 0;

  std::size_t size() const { return mean.size(); }
};

/// Exploit labels among [max(1, i - W), i - 1], divided by W.
double user_exploit_fraction(const LabeledTimeline& labeled, std::size_t i, std::size_t window,
                             std::uint64_t subset = kAllFeatures);

ExploitSeries exploit_series(const LabeledTimeline& labeled, std::size_t window, std::uint64_t subset = kAllFeatures);

/// Throws MetricsError when timelines differ in length or the set is empty.
MeanExploitCurve mean_exploit_curve(const LabeledDataset& labeled, std::size_t window,
                                    std::uint64_t subset = kAllFeatures);

/// Mean of values at 1-based indices i > warmup; NaN if there are none.
double mean_after(const std::vector<double>& per_index, std::size_t warmup);

/// Mean over 1-based indices in [first, last].
double mean_between(const std::vector<double>& per_index, std::size_t first, std::size_t last);

/// Exploit labels / timeline length, per user.
std::vector<double> overall_exploit_fractions(const LabeledDataset& labeled, std::uint64_t subset = kAllFeatures);

/// Per-user mean of the exploit series over indices i > warmup.
std::vector<double> post_warmup_user_means(const LabeledDataset& labeled, std::size_t window, std::size_t warmup,
                                           std::uint64_t subset = kAllFeatures);

// ---------------------------------------------------------------------------
// Personalization score
// ---------------------------------------------------------------------------

enum class RhoDenominator { AllUsers, OtherUsers };

struct ScoreOptions {
  RhoDenominator denominator = RhoDenominator::AllUsers;
  /// Evaluate a seeded uniform subset of this many other users.
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
};

struct ItemScore {
  std::size_t user = 0;
  std::size_t index = 0;  // 1-based
  Label label = Label::Explore;
  double rho = 0.0;
};

/// Places an item virtually into every other timeline at the same index and
/// counts the contexts that agree with its own label.
class PersonalizationScorer {
 public:
  PersonalizationScorer(const EncodedDataset& dataset, const FeatureSet& features, const LabeledDataset& labels);

  /// rho for item i (1-based) of user u.
  double score(std::size_t user, std::size_t i, const ScoreOptions& options = {}) const;

  /// Label the item would receive at slot i of user v's timeline.
  Label label_in_context(std::size_t user, std::size_t i, std::size_t context_user) const;

  /// All items of all users, parallel over items; order is (user, index).
  std::vector<ItemScore> score_all(const ScoreOptions& options = {}) const;

 private:
  const EncodedDataset* dataset_;
  const FeatureSet* features_;
  const LabeledDataset* labels_;
  std::vector<TimelineIndex> indexes_;
};

}  // namespace feedaudit
